//! CSV files for datasets.
//!
//! Physical files have the header `x,y`; model files `x,theta,y`. Values are
//! written with the shortest decimal representation that parses back to the
//! identical `f64` (at most 17 significant digits), so a write/read cycle is
//! lossless.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{ModelDataset, ModelPoint, PhysicalDataset, PhysicalPoint};
use crate::error::{Error, Result};

/// Formats a double so that parsing it returns the same bits.
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

/// A dataset that can be written as one of the two CSV schemas.
pub trait CsvDataset {
    const HEADER: &'static [&'static str];
    fn rows(&self) -> Vec<Vec<f64>>;
}

impl CsvDataset for PhysicalDataset {
    const HEADER: &'static [&'static str] = &["x", "y"];

    fn rows(&self) -> Vec<Vec<f64>> {
        self.points().iter().map(|p| vec![p.x, p.y]).collect()
    }
}

impl CsvDataset for ModelDataset {
    const HEADER: &'static [&'static str] = &["x", "theta", "y"];

    fn rows(&self) -> Vec<Vec<f64>> {
        self.points().iter().map(|p| vec![p.x, p.theta, p.y]).collect()
    }
}

pub fn write_csv<D: CsvDataset>(dataset: &D, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_rows(&mut w, D::HEADER, &dataset.rows()).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn write_physical(dataset: &PhysicalDataset, path: &Path) -> Result<()> {
    write_csv(dataset, path)
}

pub fn write_model(dataset: &ModelDataset, path: &Path) -> Result<()> {
    write_csv(dataset, path)
}

fn write_rows<W: Write>(w: &mut W, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let fields: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn load_physical(path: &Path) -> Result<PhysicalDataset> {
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    read_physical(file, path)
}

pub fn load_model(path: &Path) -> Result<ModelDataset> {
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    read_model(file, path)
}

/// Parses a physical CSV; `path` only labels error messages.
pub fn read_physical<R: Read>(reader: R, path: &Path) -> Result<PhysicalDataset> {
    let rows = read_rows(reader, path, &["x", "y"])?;
    let mut points = Vec::with_capacity(rows.len());
    for (line, v) in &rows {
        let p = PhysicalPoint { x: v[0], y: v[1] };
        if let Some((first, _)) = rows
            .iter()
            .take_while(|(l, _)| l < line)
            .find(|(_, w)| w[0] == p.x)
        {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: format!("duplicate physical input x = {} (first on line {first})", p.x),
            });
        }
        points.push(p);
    }
    PhysicalDataset::new(points).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })
}

pub fn read_model<R: Read>(reader: R, path: &Path) -> Result<ModelDataset> {
    let rows = read_rows(reader, path, &["x", "theta", "y"])?;
    let points = rows
        .into_iter()
        .map(|(_, v)| ModelPoint { x: v[0], theta: v[1], y: v[2] })
        .collect();
    ModelDataset::new(points).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })
}

/// Reads finite numeric rows under an exact header. Returns each row with
/// its 1-based line number.
fn read_rows<R: Read>(reader: R, path: &Path, header: &[&str]) -> Result<Vec<(u64, Vec<f64>)>> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let first = match records.next() {
        Some(r) => r.map_err(|e| parse_err(1, e.to_string()))?,
        None => return Err(parse_err(1, format!("missing header `{}`", header.join(",")))),
    };
    if first.iter().ne(header.iter().copied()) {
        return Err(parse_err(
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                first.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let mut values = Vec::with_capacity(header.len());
        for (name, field) in header.iter().zip(record.iter()) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("{name}: `{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("{name}: `{field}` is not finite")));
            }
            values.push(v);
        }
        rows.push((line, values));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read_phys(text: &str) -> Result<PhysicalDataset> {
        read_physical(text.as_bytes(), Path::new("mem.csv"))
    }

    #[test]
    fn reads_schema_example() {
        let d = read_phys("x,y\n0.5,1.2\n1.0,0.7\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.points()[1], PhysicalPoint { x: 1.0, y: 0.7 });
    }

    #[test]
    fn nan_names_its_line() {
        let err = read_phys("x,y\n0.5,NaN\n1.0,0.7\n").unwrap_err();
        match err {
            Error::Parse { line, ref message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("not finite"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(matches!(read_phys("x,y\n0.5\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_phys("x,y\n0.5,1\n1.0,abc\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(read_phys("x,theta\n0.5,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_phys(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            read_phys("x,y\n0.5,1\n0.7,2\n0.5,3\n"),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn model_rows_are_sorted() {
        let m = read_model("x,theta,y\n2,0.1,3\n1,0.2,4\n".as_bytes(), Path::new("m.csv")).unwrap();
        assert_eq!(m.points()[0].x, 1.0);
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let (p, m) = super::super::Benchmark::Sd1.generate(6, 40, 5).unwrap();
        let pp = dir.path().join("physical.csv");
        let mp = dir.path().join("model.csv");
        write_csv(&p, &pp).unwrap();
        write_csv(&m, &mp).unwrap();
        assert_eq!(load_physical(&pp).unwrap(), p);
        assert_eq!(load_model(&mp).unwrap(), m);
    }
}

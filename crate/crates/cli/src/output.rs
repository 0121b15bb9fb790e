//! All-or-nothing output: files are rendered in memory, written to
//! temporaries, and renamed into place only when every write succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    /// Writes every file into `dir`. On failure nothing written by this
    /// call is left behind.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut temps: Vec<(PathBuf, PathBuf)> = Vec::new();
        let staged = (|| -> Result<()> {
            for (name, bytes) in &self.files {
                let tmp = dir.join(format!(".{name}.partial"));
                temps.push((tmp.clone(), dir.join(name)));
                fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
            }
            Ok(())
        })();
        if let Err(e) = staged {
            for (tmp, _) in &temps {
                let _ = fs::remove_file(tmp);
            }
            return Err(e);
        }
        let mut done = Vec::new();
        for (tmp, dest) in &temps {
            if let Err(e) = fs::rename(tmp, dest) {
                for (t, _) in &temps {
                    let _ = fs::remove_file(t);
                }
                for d in &done {
                    let _ = fs::remove_file(d);
                }
                return Err(e).with_context(|| format!("moving output into {}", dest.display()));
            }
            done.push(dest.clone());
        }
        Ok(done)
    }
}

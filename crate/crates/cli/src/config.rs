//! Flag and config-file merging. Flags win over the JSON file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use gnm::dataset::Benchmark;
use gnm::eval::{default_lambda_grid, lambda_grid, Method};

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Built-in benchmark: sd1 or sd2.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Physical CSV (`x,y`); use together with --model.
    #[arg(long)]
    pub physical: Option<PathBuf>,
    /// Model CSV (`x,theta,y`).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Physical points of a generated benchmark.
    #[arg(long)]
    pub m: Option<usize>,
    /// Model points of a generated benchmark.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// A non-negative number, or `cv` for two-fold cross-validation.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Lambda grid as `lo:step:hi`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Comma-separated subset of gnm,pfc.
    #[arg(long)]
    pub methods: Option<String>,
    /// Add the last cluster's response gap to the sink edges.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub terminal_response: Option<bool>,
    /// Maximize the GP marginal likelihood (otherwise use the heuristic).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub gp_optimize: Option<bool>,
    /// Add the exact true-curve points to a generated model dataset.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub plant_true_curve: Option<bool>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat JSON object with the same field names (underscores).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// The config file. Every field is optional.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    dataset: Option<String>,
    physical: Option<PathBuf>,
    model: Option<PathBuf>,
    m: Option<usize>,
    n: Option<usize>,
    test_m: Option<usize>,
    test_n: Option<usize>,
    seed: Option<u64>,
    lambda: Option<LambdaValue>,
    grid: Option<String>,
    methods: Option<String>,
    terminal_response: Option<bool>,
    gp_optimize: Option<bool>,
    plant_true_curve: Option<bool>,
    out: Option<PathBuf>,
    split_ratio: Option<f64>,
    repeats: Option<usize>,
    query: Option<PathBuf>,
    xs: Option<String>,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum LambdaValue {
    Number(f64),
    Text(String),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataSpec {
    Builtin { benchmark: Benchmark, m: usize, n: usize, plant: bool },
    Files { physical: PathBuf, model: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaSpec {
    Fixed(f64),
    Cv,
}

/// Everything a command needs after merging flags and the config file.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub data: DataSpec,
    pub seed: u64,
    pub lambda: LambdaSpec,
    pub grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub terminal_response: bool,
    pub gp_optimize: bool,
    pub out: Option<PathBuf>,
    pub test_sizes: Option<(usize, usize)>,
    pub split_ratio: f64,
    pub repeats: usize,
    pub query: Option<PathBuf>,
    pub xs: Option<String>,
}

/// Flags only some commands take.
#[derive(Debug, Default)]
pub struct ExtraArgs {
    pub test_m: Option<usize>,
    pub test_n: Option<usize>,
    pub split_ratio: Option<f64>,
    pub repeats: Option<usize>,
    pub query: Option<PathBuf>,
    pub xs: Option<String>,
}

pub fn parse_lambda(s: &str) -> Result<LambdaSpec> {
    if s.eq_ignore_ascii_case("cv") {
        return Ok(LambdaSpec::Cv);
    }
    let v: f64 = s.trim().parse().with_context(|| format!("--lambda: expected a number or `cv`, got `{s}`"))?;
    if !(v.is_finite() && v >= 0.0) {
        bail!("--lambda must be finite and non-negative, got {v}");
    }
    Ok(LambdaSpec::Fixed(v))
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, step, hi] = parts[..] else {
        bail!("--grid: expected lo:step:hi, got `{s}`");
    };
    let num = |t: &str| -> Result<f64> { t.trim().parse().with_context(|| format!("--grid: bad number `{t}`")) };
    Ok(lambda_grid(num(lo)?, num(step)?, num(hi)?)?)
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m = Method::parse(tok).with_context(|| format!("--methods: unknown method `{tok}`"))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        bail!("--methods: no method given");
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, extra: ExtraArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };

        let dataset = args.dataset.clone().or(file.dataset);
        let physical = args.physical.clone().or(file.physical);
        let model = args.model.clone().or(file.model);
        let plant = args.plant_true_curve.or(file.plant_true_curve).unwrap_or(false);
        let data = match (dataset, physical, model) {
            (Some(name), None, None) => {
                let benchmark =
                    Benchmark::parse(&name).with_context(|| format!("--dataset: unknown benchmark `{name}`"))?;
                let (dm, dn) = benchmark.train_sizes();
                DataSpec::Builtin {
                    benchmark,
                    m: args.m.or(file.m).unwrap_or(dm),
                    n: args.n.or(file.n).unwrap_or(dn),
                    plant,
                }
            }
            (None, Some(physical), Some(model)) => {
                if plant {
                    bail!("--plant-true-curve needs a built-in dataset");
                }
                DataSpec::Files { physical, model }
            }
            (None, None, None) => bail!("no data: give --dataset, or --physical and --model"),
            (None, _, _) => bail!("--physical and --model must be given together"),
            (Some(_), _, _) => bail!("give either --dataset or --physical/--model, not both"),
        };

        let lambda = match args.lambda.clone() {
            Some(s) => parse_lambda(&s)?,
            None => match file.lambda {
                Some(LambdaValue::Number(v)) => parse_lambda(&v.to_string())?,
                Some(LambdaValue::Text(s)) => parse_lambda(&s)?,
                None => LambdaSpec::Cv,
            },
        };
        let grid = match args.grid.clone().or(file.grid) {
            Some(g) => parse_grid(&g)?,
            None => default_lambda_grid(),
        };
        let methods = match args.methods.clone().or(file.methods) {
            Some(s) => parse_methods(&s)?,
            None => vec![Method::Gnm, Method::Pfc],
        };
        let test_sizes = match (extra.test_m.or(file.test_m), extra.test_n.or(file.test_n)) {
            (None, None) => None,
            (Some(m), Some(n)) => Some((m, n)),
            _ => bail!("--test-m and --test-n must be given together"),
        };
        let split_ratio = extra.split_ratio.or(file.split_ratio).unwrap_or(0.75);
        if !(split_ratio > 0.0 && split_ratio < 1.0) {
            bail!("--split-ratio must lie strictly between 0 and 1, got {split_ratio}");
        }
        let repeats = extra.repeats.or(file.repeats).unwrap_or(1);
        if repeats == 0 {
            bail!("--repeats must be at least 1");
        }

        Ok(Self {
            data,
            seed: args.seed.or(file.seed).unwrap_or(1),
            lambda,
            grid,
            methods,
            terminal_response: args.terminal_response.or(file.terminal_response).unwrap_or(false),
            gp_optimize: args.gp_optimize.or(file.gp_optimize).unwrap_or(true),
            out: args.out.clone().or(file.out),
            test_sizes,
            split_ratio,
            repeats,
            query: extra.query.or(file.query),
            xs: extra.xs.or(file.xs),
        })
    }
}

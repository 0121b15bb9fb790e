//! `gnm`: generate benchmark data, fit, predict, evaluate, and sweep.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand};

use config::{CommonArgs, ExtraArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "gnm", version, about = "Functional calibration by graph-based non-isometric matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write physical.csv, model.csv and truth.json for a benchmark.
    Gen(GenArgs),
    /// Fit and write anchors.csv and summary.json.
    Fit(GenArgs),
    /// Fit, then write predictions.csv for the query inputs.
    Predict(PredictArgs),
    /// Training and cross-validated test errors (report.csv).
    Eval(EvalArgs),
    /// Held-out error across the lambda grid (sweep.csv).
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// File of query inputs (one per line or comma separated).
    #[arg(long)]
    query: Option<PathBuf>,
    /// Inline query inputs, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    xs: Option<String>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Physical points of the test-phase dataset.
    #[arg(long)]
    test_m: Option<usize>,
    /// Model points of the test-phase dataset.
    #[arg(long)]
    test_n: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Fraction of physical points used for training.
    #[arg(long)]
    split_ratio: Option<f64>,
    /// Independent random splits to average over.
    #[arg(long)]
    repeats: Option<usize>,
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("GNM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("GNM_THREADS: expected a count, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

type Action = fn(&RunConfig) -> Result<()>;

fn run(cmd: Command) -> Result<()> {
    let (common, extra, action): (CommonArgs, ExtraArgs, Action) = match cmd {
        Command::Gen(a) => (a.common, ExtraArgs::default(), commands::gen),
        Command::Fit(a) => (a.common, ExtraArgs::default(), commands::fit),
        Command::Predict(a) => (a.common, ExtraArgs { query: a.query, xs: a.xs, ..Default::default() }, commands::predict),
        Command::Eval(a) => (a.common, ExtraArgs { test_m: a.test_m, test_n: a.test_n, ..Default::default() }, commands::eval),
        Command::Sweep(a) => (
            a.common,
            ExtraArgs { split_ratio: a.split_ratio, repeats: a.repeats, ..Default::default() },
            commands::sweep,
        ),
    };
    let cfg = RunConfig::resolve(&common, extra)?;
    if cfg.out.is_none() {
        Cli::command()
            .error(ErrorKind::MissingRequiredArgument, "the following required argument was not provided: --out <OUT>")
            .exit();
    }
    init_threads()?;
    action(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

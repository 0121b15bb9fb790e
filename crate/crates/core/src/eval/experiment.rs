//! The benchmark protocol: training error on the training inputs and
//! k-fold test error, for each method, on response and `theta`.
//!
//! For a synthetic benchmark the training phase uses the training-scale
//! data and the test phase a separately generated test-scale dataset. A
//! cross-validated `lambda` is chosen once on the training data and reused
//! for the test phase. For CSV data both phases use the loaded data and no
//! `theta` rows are produced.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use super::cv::{default_lambda_grid, kfold, select_lambda, LambdaSelection};
use super::metrics::{mean_std, metric_response, metric_theta, MetricReport};
use crate::calibrate::{fit_surrogate, gnm_fit, pfc_fit, GnmOptions, ResponseEvaluator};
use crate::dataset::{format_f64, Benchmark, Interval, ModelDataset, PhysicalDataset, SyntheticTruth};
use crate::error::{Error, Result};
use crate::gp::GpConfig;
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gnm,
    Pfc,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gnm" => Some(Self::Gnm),
            "pfc" => Some(Self::Pfc),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Gnm => "gnm",
            Self::Pfc => "pfc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Train,
    Test,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Self::Train => "train",
            Self::Test => "test",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaChoice {
    Fixed(f64),
    CrossValidated,
}

#[derive(Clone, Debug)]
pub enum DataSource {
    Synthetic {
        benchmark: Benchmark,
        train_sizes: (usize, usize),
        test_sizes: (usize, usize),
    },
    Csv {
        name: String,
        physical: PhysicalDataset,
        model: ModelDataset,
    },
}

impl DataSource {
    /// A benchmark at the sizes used in the original study.
    pub fn benchmark(benchmark: Benchmark) -> Self {
        Self::Synthetic {
            benchmark,
            train_sizes: benchmark.train_sizes(),
            test_sizes: benchmark.test_sizes(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Synthetic { benchmark, .. } => benchmark.name(),
            Self::Csv { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub methods: Vec<Method>,
    pub lambda: LambdaChoice,
    pub grid: Vec<f64>,
    pub terminal_response: bool,
    /// GP settings for the calibration function.
    pub anchor_gp: GpConfig,
    /// GP settings for the surface surrogate.
    pub surrogate_gp: GpConfig,
    pub folds: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(source: DataSource, seed: u64) -> Self {
        Self {
            source,
            methods: vec![Method::Gnm, Method::Pfc],
            lambda: LambdaChoice::CrossValidated,
            grid: default_lambda_grid(),
            terminal_response: false,
            anchor_gp: GpConfig::anchors(),
            surrogate_gp: GpConfig::surrogate(),
            folds: 4,
            seed,
        }
    }
}

/// One metric for one method and phase. `std` is across test folds.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub method: Method,
    pub metric: &'static str,
    pub phase: Phase,
    pub value: f64,
    pub std: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    /// Sums of squared errors (`paper_rmse`, `paper_rmse_theta`).
    pub rows: Vec<ReportRow>,
    /// Root mean squared errors (`rmse`, `rmse_theta`).
    pub conventional_rows: Vec<ReportRow>,
    pub lambda: f64,
    pub lambda_selection: Option<LambdaSelection>,
}

impl ExperimentReport {
    pub fn value(&self, method: Method, metric: &str, phase: Phase) -> Option<f64> {
        self.rows
            .iter()
            .chain(&self.conventional_rows)
            .find(|r| r.method == method && r.metric == metric && r.phase == phase)
            .map(|r| r.value)
    }
}

/// Seed offsets for the independent random streams of an experiment.
const TEST_DATA: u64 = 1;
const LAMBDA_CV: u64 = 2;
const TEST_FOLDS: u64 = 3;
const PFC_STARTS: u64 = 4;
const SURROGATE: u64 = 5;
const ANCHOR_GP: u64 = 6;

/// Data and evaluators for one phase.
struct PhaseData {
    physical: PhysicalDataset,
    model: ModelDataset,
    truth: Option<SyntheticTruth>,
    /// Used for GNM predictions and PFC predictions.
    predictor: Arc<ResponseEvaluator>,
    /// Used inside the PFC objective.
    pfc_objective: Arc<ResponseEvaluator>,
    theta_range: Interval,
}

/// Per-method scores on one train/test arrangement.
#[derive(Clone, Copy)]
struct Scores {
    response: MetricReport,
    theta: Option<MetricReport>,
}

fn phase_data(
    physical: PhysicalDataset,
    model: ModelDataset,
    truth: Option<SyntheticTruth>,
    theta_range: Interval,
    config: &ExperimentConfig,
    phase_seed: u64,
) -> Result<PhaseData> {
    let needs_surrogate = truth.is_none() || config.methods.contains(&Method::Pfc);
    let surrogate = if needs_surrogate {
        let cfg = config.surrogate_gp.clone().with_seed(derive_seed(phase_seed, SURROGATE));
        Some(Arc::new(fit_surrogate(&model, &cfg)?))
    } else {
        None
    };
    let predictor = match truth {
        Some(t) => Arc::new(ResponseEvaluator::Analytic(t)),
        None => Arc::clone(surrogate.as_ref().expect("surrogate fitted for CSV data")),
    };
    let pfc_objective = surrogate.unwrap_or_else(|| Arc::clone(&predictor));
    Ok(PhaseData { physical, model, truth, predictor, pfc_objective, theta_range })
}

fn score(
    method: Method,
    data: &PhaseData,
    train: &[usize],
    test: &[usize],
    options: &GnmOptions,
    seed: u64,
) -> Result<Scores> {
    let train_set = data.physical.subset(train)?;
    let xs: Vec<f64> = test.iter().map(|&i| data.physical.points()[i].x).collect();
    let actual: Vec<f64> = test.iter().map(|&i| data.physical.points()[i].y).collect();
    let (predicted, thetas) = match method {
        Method::Gnm => {
            let cal = gnm_fit(&train_set, &data.model, Arc::clone(&data.predictor), options)?;
            let out = cal.predict_batch(&xs)?;
            (out.iter().map(|p| p.1).collect::<Vec<_>>(), out.iter().map(|p| p.0).collect::<Vec<_>>())
        }
        Method::Pfc => {
            let pfc = pfc_fit(&train_set, Arc::clone(&data.pfc_objective), data.theta_range, derive_seed(seed, PFC_STARTS))?
                .with_evaluator(Arc::clone(&data.predictor));
            let y = xs.iter().map(|&x| pfc.predict_response(x)).collect::<Result<Vec<_>>>()?;
            (y, xs.iter().map(|&x| pfc.theta(x)).collect())
        }
    };
    let response = metric_response(&predicted, &actual)?;
    let theta = match data.truth {
        Some(t) => {
            let true_theta: Vec<f64> = xs.iter().map(|&x| t.true_theta(x)).collect();
            Some(metric_theta(&thetas, &true_theta)?)
        }
        None => None,
    };
    Ok(Scores { response, theta })
}

fn push_rows(
    report: &mut ExperimentReport,
    dataset: &str,
    method: Method,
    phase: Phase,
    scores: &[Scores],
) {
    let collect = |f: &dyn Fn(&MetricReport) -> f64, theta: bool| -> Option<(f64, Option<f64>)> {
        let vals: Option<Vec<f64>> = scores
            .iter()
            .map(|s| if theta { s.theta.as_ref().map(f) } else { Some(f(&s.response)) })
            .collect();
        let vals = vals?;
        let (mean, std) = mean_std(&vals);
        Some((mean, (phase == Phase::Test).then_some(std)))
    };
    let specs: [(&'static str, &'static str, bool); 2] =
        [("paper_rmse", "rmse", false), ("paper_rmse_theta", "rmse_theta", true)];
    for (paper_name, conv_name, theta) in specs {
        let row = |metric, (value, std)| ReportRow {
            dataset: dataset.to_string(),
            method,
            metric,
            phase,
            value,
            std,
        };
        if let Some(v) = collect(&|m| m.paper_rmse, theta) {
            report.rows.push(row(paper_name, v));
        }
        if let Some(v) = collect(&|m| m.conventional_rmse, theta) {
            report.conventional_rows.push(row(conv_name, v));
        }
    }
}

/// Runs the protocol described in the module docs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.methods.is_empty() {
        return Err(Error::invalid("no methods requested"));
    }
    let seed = config.seed;
    let (train, test) = match &config.source {
        DataSource::Synthetic { benchmark, train_sizes, test_sizes } => {
            let truth = Some(benchmark.truth());
            let (p, m) = benchmark.generate(train_sizes.0, train_sizes.1, seed)?;
            let train = phase_data(p, m, truth, benchmark.theta_range(), config, seed)?;
            let test_seed = derive_seed(seed, TEST_DATA);
            let (p, m) = benchmark.generate(test_sizes.0, test_sizes.1, test_seed)?;
            let test = phase_data(p, m, truth, benchmark.theta_range(), config, test_seed)?;
            (train, Some(test))
        }
        DataSource::Csv { physical, model, .. } => {
            let data = phase_data(physical.clone(), model.clone(), None, model.theta_range(), config, seed)?;
            (data, None)
        }
    };
    let test = test.as_ref().unwrap_or(&train);

    let base = GnmOptions {
        lambda: 0.0,
        terminal_response: config.terminal_response,
        gp: config.anchor_gp.clone().with_seed(derive_seed(seed, ANCHOR_GP)),
    };
    let (lambda, lambda_selection) = match config.lambda {
        LambdaChoice::Fixed(l) => (l, None),
        LambdaChoice::CrossValidated => {
            let sel = select_lambda(
                &train.physical,
                &train.model,
                &train.predictor,
                &config.grid,
                &base,
                derive_seed(seed, LAMBDA_CV),
            )?;
            (sel.lambda, Some(sel))
        }
    };
    let options = GnmOptions { lambda, ..base };

    let all: Vec<usize> = (0..train.physical.len()).collect();
    let plan = kfold(test.physical.len(), config.folds, derive_seed(seed, TEST_FOLDS))?;

    // (method, None) is the training phase, (method, Some(f)) test fold f.
    let tasks: Vec<(Method, Option<usize>)> = config
        .methods
        .iter()
        .flat_map(|&m| std::iter::once((m, None)).chain((0..config.folds).map(move |f| (m, Some(f)))))
        .collect();
    let results: Vec<Result<Scores>> = tasks
        .par_iter()
        .map(|&(method, fold)| match fold {
            None => score(method, &train, &all, &all, &options, seed),
            Some(f) => score(method, test, &plan.train_indices(f), &plan.test_indices(f), &options, seed),
        })
        .collect();

    let mut report = ExperimentReport {
        rows: Vec::new(),
        conventional_rows: Vec::new(),
        lambda,
        lambda_selection,
    };
    let dataset = config.source.name().to_string();
    let mut results = results.into_iter();
    for &method in &config.methods {
        let train_scores = [results.next().expect("one result per task")?];
        let test_scores: Vec<Scores> = results.by_ref().take(config.folds).collect::<Result<_>>()?;
        push_rows(&mut report, &dataset, method, Phase::Train, &train_scores);
        push_rows(&mut report, &dataset, method, Phase::Test, &test_scores);
    }
    sort_rows(&mut report.rows);
    sort_rows(&mut report.conventional_rows);
    Ok(report)
}

fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| {
        (a.method, a.metric, a.phase).cmp(&(b.method, b.metric, b.phase))
    });
}

pub const REPORT_HEADER: &str = "dataset,method,metric,phase,value,std";
pub const SWEEP_HEADER: &str = "lambda,mean_rmse,mean_paper_rmse,std";

pub fn write_report<W: Write>(rows: &[ReportRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in rows {
        let std = r.std.map(format_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.dataset,
            r.method,
            r.metric,
            r.phase.name(),
            format_f64(r.value),
            std
        )?;
    }
    Ok(())
}

pub fn write_sweep<W: Write>(sweep: &super::cv::SweepResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in &sweep.rows {
        writeln!(
            out,
            "{},{},{},{}",
            format_f64(r.lambda),
            format_f64(r.mean_rmse),
            format_f64(r.mean_paper_rmse),
            format_f64(r.std)
        )?;
    }
    Ok(())
}

/// Writes the report to `path`.
pub fn write_report_file(rows: &[ReportRow], path: &Path) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    write_report(rows, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

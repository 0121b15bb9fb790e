use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde_json::json;

use gnm::calibrate::{fit_surrogate, gnm_fit, pfc_fit, CalibrationModel, GnmOptions, PfcModel, ResponseEvaluator};
use gnm::dataset::{
    format_f64, load_model, load_physical, plant_true_curve, Benchmark, Interval, ModelDataset, PhysicalDataset,
    SyntheticTruth,
};
use gnm::eval::{
    run_experiment, select_lambda, sweep_lambda, write_report, write_sweep, DataSource, ExperimentConfig,
    LambdaChoice, LambdaSelection, Method,
};
use gnm::gp::{GpConfig, HyperSource};
use gnm::rng::derive_seed;

use crate::config::{DataSpec, LambdaSpec, RunConfig};
use crate::output::Outputs;

// Same stream offsets as the experiment runner, so `fit` reproduces the
// training phase of `eval`.
const LAMBDA_CV: u64 = 2;
const PFC_STARTS: u64 = 4;
const SURROGATE: u64 = 5;
const ANCHOR_GP: u64 = 6;

struct Loaded {
    name: String,
    physical: PhysicalDataset,
    model: ModelDataset,
    truth: Option<SyntheticTruth>,
    theta_range: Interval,
}

fn load(cfg: &RunConfig) -> Result<Loaded> {
    match &cfg.data {
        DataSpec::Builtin { benchmark, m, n, plant } => {
            let truth = benchmark.truth();
            let (physical, mut model) = benchmark.generate(*m, *n, cfg.seed)?;
            if *plant {
                model = plant_true_curve(&truth, &physical, &model)?.0;
            }
            Ok(Loaded {
                name: benchmark.name().to_string(),
                physical,
                model,
                truth: Some(truth),
                theta_range: benchmark.theta_range(),
            })
        }
        DataSpec::Files { physical, model } => {
            let physical = load_physical(physical)?;
            let model = load_model(model)?;
            let theta_range = model.theta_range();
            Ok(Loaded { name: "csv".to_string(), physical, model, truth: None, theta_range })
        }
    }
}

fn hyper_source(cfg: &RunConfig) -> HyperSource {
    if cfg.gp_optimize {
        HyperSource::Optimize
    } else {
        HyperSource::Heuristic
    }
}

fn surrogate_config(cfg: &RunConfig) -> GpConfig {
    GpConfig::surrogate().with_hyper(hyper_source(cfg)).with_seed(derive_seed(cfg.seed, SURROGATE))
}

fn base_options(cfg: &RunConfig) -> GnmOptions {
    let gp = GpConfig::anchors().with_hyper(hyper_source(cfg)).with_seed(derive_seed(cfg.seed, ANCHOR_GP));
    GnmOptions::new(0.0).with_gp(gp).with_terminal_response(cfg.terminal_response)
}

/// Analytic model for benchmarks, a GP surrogate for CSV data.
fn predictor(cfg: &RunConfig, data: &Loaded) -> Result<Arc<ResponseEvaluator>> {
    Ok(Arc::new(match data.truth {
        Some(t) => ResponseEvaluator::Analytic(t),
        None => fit_surrogate(&data.model, &surrogate_config(cfg))?,
    }))
}

fn require_out(cfg: &RunConfig) -> &Path {
    cfg.out.as_deref().expect("checked before dispatch")
}

fn describe(b: Benchmark) -> (&'static str, &'static str, &'static str) {
    match b {
        Benchmark::Sd1 => ("exp(x/10) sin(x)", "exp(x/10) sin(x) x / (2 theta)", "x / 2"),
        Benchmark::Sd2 => (
            "cos(2x) sin(x/2)",
            "cos(2x) sin(x/2) sin(pi theta / (2q + 2)) cos(2 pi theta / (q + 1)) exp(theta / (2q + 2) - 1/2), q = (x - 2)^2",
            "(x - 2)^2 + 1",
        ),
    }
}

pub fn gen(cfg: &RunConfig) -> Result<()> {
    let DataSpec::Builtin { benchmark, m, n, plant } = cfg.data.clone() else {
        bail!("gen needs --dataset sd1|sd2");
    };
    let data = load(cfg)?;
    let (phys, model_fn, theta_fn) = describe(benchmark);
    let truth = benchmark.truth();
    let true_theta: Vec<f64> = data.physical.points().iter().map(|p| truth.true_theta(p.x)).collect();
    let meta = json!({
        "dataset": benchmark.name(),
        "m": m,
        "n": n,
        "seed": cfg.seed,
        "planted_true_curve": plant,
        "x_range": [benchmark.x_range().lo, benchmark.x_range().hi],
        "theta_range": [benchmark.theta_range().lo, benchmark.theta_range().hi],
        "physical_response": phys,
        "model_response": model_fn,
        "calibration_function": theta_fn,
        "true_theta_at_physical_x": true_theta,
    });

    let mut out = Outputs::default();
    out.add("physical.csv", render_physical(&data.physical));
    out.add("model.csv", render_model(&data.model));
    out.add("truth.json", serde_json::to_string_pretty(&meta)? + "\n");
    out.commit(require_out(cfg))?;
    Ok(())
}

fn render_physical(d: &PhysicalDataset) -> String {
    let mut s = String::from("x,y\n");
    for p in d.points() {
        let _ = writeln!(s, "{},{}", format_f64(p.x), format_f64(p.y));
    }
    s
}

fn render_model(d: &ModelDataset) -> String {
    let mut s = String::from("x,theta,y\n");
    for p in d.points() {
        let _ = writeln!(s, "{},{},{}", format_f64(p.x), format_f64(p.theta), format_f64(p.y));
    }
    s
}

fn render_selection(sel: &LambdaSelection) -> String {
    let mut s = String::from("lambda,fold1_rmse,fold2_rmse,mean_rmse\n");
    let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
    for row in &sel.scores {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            format_f64(row.lambda),
            opt(row.fold_scores.first().copied().flatten()),
            opt(row.fold_scores.get(1).copied().flatten()),
            opt(row.score)
        );
    }
    s
}

/// Resolves lambda (running CV if asked) and fits GNM on all the data.
fn fit_gnm(cfg: &RunConfig, data: &Loaded, eval: &Arc<ResponseEvaluator>) -> Result<(CalibrationModel, Option<LambdaSelection>)> {
    let base = base_options(cfg);
    let (lambda, selection) = match cfg.lambda {
        LambdaSpec::Fixed(l) => (l, None),
        LambdaSpec::Cv => {
            let sel = select_lambda(
                &data.physical,
                &data.model,
                eval,
                &cfg.grid,
                &base,
                derive_seed(cfg.seed, LAMBDA_CV),
            )?;
            (sel.lambda, Some(sel))
        }
    };
    let options = GnmOptions { lambda, ..base };
    let cal = gnm_fit(&data.physical, &data.model, Arc::clone(eval), &options)?;
    Ok((cal, selection))
}

/// PFC with the surrogate inside the objective and `predict` for output.
fn fit_pfc(cfg: &RunConfig, data: &Loaded, predict: &Arc<ResponseEvaluator>) -> Result<PfcModel> {
    let objective = if predict.is_surrogate() {
        Arc::clone(predict)
    } else {
        Arc::new(fit_surrogate(&data.model, &surrogate_config(cfg))?)
    };
    let pfc = pfc_fit(&data.physical, objective, data.theta_range, derive_seed(cfg.seed, PFC_STARTS))?;
    Ok(pfc.with_evaluator(Arc::clone(predict)))
}

pub fn fit(cfg: &RunConfig) -> Result<()> {
    let data = load(cfg)?;
    let eval = predictor(cfg, &data)?;
    let mut out = Outputs::default();
    let mut summary = serde_json::Map::new();
    summary.insert("dataset".into(), json!(data.name));
    summary.insert("seed".into(), json!(cfg.seed));
    summary.insert("m".into(), json!(data.physical.len()));
    summary.insert("n".into(), json!(data.model.len()));
    summary.insert("evaluator".into(), json!(if eval.is_surrogate() { "surrogate" } else { "analytic" }));

    if cfg.methods.contains(&Method::Gnm) {
        let (cal, selection) = fit_gnm(cfg, &data, &eval)?;
        let mut csv = String::from("x,theta,y,cluster\n");
        for (j, p) in cal.anchor_points().iter().enumerate() {
            let _ = writeln!(csv, "{},{},{},{}", format_f64(p.x), format_f64(p.theta), format_f64(p.y), j + 1);
        }
        out.add("anchors.csv", csv);
        if let Some(sel) = &selection {
            out.add("lambda_selection.csv", render_selection(sel));
        }
        let h = cal.calibration_function().hyper();
        summary.insert(
            "gnm".into(),
            json!({
                "lambda": cal.lambda(),
                "lambda_source": if selection.is_some() { "cv" } else { "fixed" },
                "terminal_response": cfg.terminal_response,
                "path_cost": cal.anchors().total_cost,
                "gp_signal_variance": h.signal_variance,
                "gp_length_scale": h.length_scales[0],
                "gp_noise_variance": h.noise_variance,
                "gp_log_marginal_likelihood": cal.calibration_function().log_marginal_likelihood(),
            }),
        );
    }
    if cfg.methods.contains(&Method::Pfc) {
        let pfc = fit_pfc(cfg, &data, &eval)?;
        summary.insert(
            "pfc".into(),
            json!({ "alpha": pfc.alpha, "beta": pfc.beta, "objective": pfc.objective }),
        );
    }
    out.add("summary.json", serde_json::to_string_pretty(&summary)? + "\n");
    out.commit(require_out(cfg))?;
    Ok(())
}

/// Numbers separated by commas or whitespace; a leading `x` header is
/// skipped.
pub fn parse_queries(text: &str) -> Result<Vec<f64>> {
    let mut xs = Vec::new();
    for (k, tok) in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).enumerate() {
        if k == 0 && tok == "x" {
            continue;
        }
        let v: f64 = tok.parse().map_err(|_| anyhow::anyhow!("cannot parse query value `{tok}`"))?;
        if !v.is_finite() {
            bail!("query value `{tok}` is not finite");
        }
        xs.push(v);
    }
    Ok(xs)
}

pub fn predict(cfg: &RunConfig) -> Result<()> {
    let queries = match (&cfg.query, &cfg.xs) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_queries(&text)?
        }
        (None, Some(inline)) => parse_queries(inline)?,
        (None, None) => bail!("predict needs --query FILE or --xs LIST"),
        (Some(_), Some(_)) => bail!("give either --query or --xs, not both"),
    };
    let method = match cfg.methods.as_slice() {
        [m] => *m,
        _ if cfg.methods.len() > 1 && cfg.methods[0] == Method::Gnm => Method::Gnm,
        _ => bail!("predict takes one method; pass --methods gnm or --methods pfc"),
    };
    let data = load(cfg)?;
    let eval = predictor(cfg, &data)?;
    let rows: Vec<(f64, f64)> = match method {
        Method::Gnm => fit_gnm(cfg, &data, &eval)?.0.predict_batch(&queries)?,
        Method::Pfc => {
            let pfc = fit_pfc(cfg, &data, &eval)?;
            queries
                .iter()
                .map(|&x| Ok((pfc.theta(x), pfc.predict_response(x)?)))
                .collect::<gnm::Result<_>>()?
        }
    };
    let mut csv = String::from("x,theta_hat,y_hat\n");
    for (x, (t, y)) in queries.iter().zip(&rows) {
        let _ = writeln!(csv, "{},{},{}", format_f64(*x), format_f64(*t), format_f64(*y));
    }
    let mut out = Outputs::default();
    out.add("predictions.csv", csv);
    out.commit(require_out(cfg))?;
    Ok(())
}

pub fn eval(cfg: &RunConfig) -> Result<()> {
    let source = match &cfg.data {
        DataSpec::Builtin { plant: true, .. } => bail!("eval does not support --plant-true-curve"),
        DataSpec::Builtin { benchmark, m, n, .. } => DataSource::Synthetic {
            benchmark: *benchmark,
            train_sizes: (*m, *n),
            test_sizes: cfg.test_sizes.unwrap_or(benchmark.test_sizes()),
        },
        DataSpec::Files { .. } => {
            if cfg.test_sizes.is_some() {
                bail!("--test-m/--test-n apply to built-in datasets only");
            }
            let data = load(cfg)?;
            DataSource::Csv { name: data.name, physical: data.physical, model: data.model }
        }
    };
    let mut exp = ExperimentConfig::new(source, cfg.seed);
    exp.methods = cfg.methods.clone();
    exp.lambda = match cfg.lambda {
        LambdaSpec::Fixed(l) => LambdaChoice::Fixed(l),
        LambdaSpec::Cv => LambdaChoice::CrossValidated,
    };
    exp.grid = cfg.grid.clone();
    exp.terminal_response = cfg.terminal_response;
    exp.anchor_gp = exp.anchor_gp.with_hyper(hyper_source(cfg));
    exp.surrogate_gp = exp.surrogate_gp.with_hyper(hyper_source(cfg));
    let report = run_experiment(&exp)?;

    let mut out = Outputs::default();
    let mut buf = Vec::new();
    write_report(&report.rows, &mut buf)?;
    out.add("report.csv", buf);
    let mut buf = Vec::new();
    write_report(&report.conventional_rows, &mut buf)?;
    out.add("report_conventional.csv", buf);
    if let Some(sel) = &report.lambda_selection {
        out.add("lambda_selection.csv", render_selection(sel));
    }
    out.commit(require_out(cfg))?;
    Ok(())
}

pub fn sweep(cfg: &RunConfig) -> Result<()> {
    let data = load(cfg)?;
    let eval = predictor(cfg, &data)?;
    let result = sweep_lambda(
        &data.physical,
        &data.model,
        &eval,
        &cfg.grid,
        cfg.split_ratio,
        &base_options(cfg),
        cfg.seed,
        cfg.repeats,
    )?;
    let mut buf = Vec::new();
    write_sweep(&result, &mut buf)?;
    let mut out = Outputs::default();
    out.add("sweep.csv", buf);
    out.commit(require_out(cfg))?;
    Ok(())
}

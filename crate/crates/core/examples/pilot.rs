//! Runs the benchmark protocol on both synthetic datasets for seeds 1..=5
//! and prints the numbers the acceptance thresholds are checked against.

use std::sync::Arc;
use std::time::Instant;

use gnm::calibrate::{GnmOptions, ResponseEvaluator};
use gnm::dataset::Benchmark;
use gnm::eval::{run_experiment, sweep_lambda, DataSource, ExperimentConfig, Method, Phase};

fn main() -> gnm::Result<()> {
    for bench in [Benchmark::Sd1, Benchmark::Sd2] {
        for seed in 1..=5u64 {
            let t = Instant::now();
            let mut cfg = ExperimentConfig::new(DataSource::benchmark(bench), seed);
            cfg.terminal_response = std::env::var_os("PILOT_TERMINAL").is_some();
            let r = run_experiment(&cfg)?;
            let v = |m, k, p| r.value(m, k, p).unwrap_or(f64::NAN);
            let (p, m) = bench.generate(bench.train_sizes().0, bench.train_sizes().1, seed)?;
            let eval = Arc::new(ResponseEvaluator::Analytic(bench.truth()));
            let sweep = sweep_lambda(&p, &m, &eval, &cfg.grid, 0.75, &GnmOptions::new(0.0).with_terminal_response(cfg.terminal_response), seed, 1)?;
            let best = sweep.best().unwrap();
            let at = sweep.row_for(r.lambda).unwrap();
            println!(
                "{bench} seed {seed}: lambda {:.2} | gnm train {:.4} th {:.4} test {:.4} th {:.4} | pfc train {:.4} th {:.4} test {:.4} th {:.4} | sweep best {:.2} {:.4} at-cv {:.4} last {:.4} first {:.4} | {:.1}s",
                r.lambda,
                v(Method::Gnm, "paper_rmse", Phase::Train),
                v(Method::Gnm, "paper_rmse_theta", Phase::Train),
                v(Method::Gnm, "paper_rmse", Phase::Test),
                v(Method::Gnm, "paper_rmse_theta", Phase::Test),
                v(Method::Pfc, "paper_rmse", Phase::Train),
                v(Method::Pfc, "paper_rmse_theta", Phase::Train),
                v(Method::Pfc, "paper_rmse", Phase::Test),
                v(Method::Pfc, "paper_rmse_theta", Phase::Test),
                best.lambda,
                best.mean_rmse,
                at.mean_rmse,
                sweep.rows.last().unwrap().mean_rmse,
                sweep.rows[0].mean_rmse,
                t.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}

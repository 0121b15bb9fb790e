//! Prints the anchors chosen on a benchmark's training data.
//! Usage: anchors <sd1|sd2> <seed> <lambda>

use std::sync::Arc;

use gnm::calibrate::{gnm_fit, GnmOptions, ResponseEvaluator};
use gnm::dataset::Benchmark;

fn main() -> gnm::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let bench = Benchmark::parse(&args[1]).expect("sd1 or sd2");
    let seed: u64 = args[2].parse().unwrap();
    let lambda: f64 = args[3].parse().unwrap();
    let (m, n) = bench.train_sizes();
    let (p, md) = bench.generate(m, n, seed)?;
    let truth = bench.truth();
    let cal = gnm_fit(&p, &md, Arc::new(ResponseEvaluator::Analytic(truth)), &GnmOptions::new(lambda))?;
    println!("hyper {:?} cost {}", cal.calibration_function().hyper(), cal.anchors().total_cost);
    for (pp, a) in p.points().iter().zip(cal.anchor_points()) {
        println!(
            "xp {:.3} yp {:+.3} | ax {:.3} ath {:.3} ay {:+.3} | true {:.3} fhat {:.3}",
            pp.x, pp.y, a.x, a.theta, a.y, truth.true_theta(pp.x), cal.predict_theta(pp.x)
        );
    }
    Ok(())
}

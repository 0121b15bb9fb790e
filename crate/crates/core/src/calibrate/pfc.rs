//! Parametric functional calibration: `theta(x) = alpha * exp(-beta * x)`
//! with `(alpha, beta)` chosen to minimize the squared discrepancy between
//! physical responses and the evaluator at the physical inputs.

use std::sync::Arc;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;

use super::ResponseEvaluator;
use crate::dataset::{Interval, PhysicalDataset};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Number of simplex starts.
pub const PFC_STARTS: usize = 5;
/// Stand-in cost for parameters where the evaluator fails or overflows.
const INVALID_COST: f64 = 1e300;

#[derive(Clone, Debug)]
pub struct PfcModel {
    pub alpha: f64,
    pub beta: f64,
    /// Sum of squared discrepancies at the fitted parameters.
    pub objective: f64,
    /// `(alpha, beta)` of every start, in order.
    pub starts: Vec<[f64; 2]>,
    evaluator: Arc<ResponseEvaluator>,
}

#[derive(Clone, Copy)]
struct Discrepancy<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    evaluator: &'a ResponseEvaluator,
}

impl Discrepancy<'_> {
    fn value(&self, alpha: f64, beta: f64) -> f64 {
        let mut total = 0.0;
        for (&x, &y) in self.xs.iter().zip(self.ys) {
            let theta = alpha * (-beta * x).exp();
            match self.evaluator.evaluate(x, theta) {
                Ok(v) if v.is_finite() => total += (y - v) * (y - v),
                _ => return INVALID_COST,
            }
        }
        if total.is_finite() {
            total
        } else {
            INVALID_COST
        }
    }
}

impl CostFunction for Discrepancy<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.value(p[0], p[1]))
    }
}

fn start_points(physical: &PhysicalDataset, theta_range: Interval, seed: u64) -> Vec<[f64; 2]> {
    let xs = physical.xs();
    let x_span = (xs[xs.len() - 1] - xs[0]).max(f64::EPSILON);
    let (mid, quarter) = (theta_range.mid(), theta_range.width() / 4.0);
    let mut rng = Stream::derive(seed, 0xfc);
    let base = [
        [mid, 0.0],
        [mid - quarter, 0.0],
        [mid + quarter, 0.0],
        [mid, 1.0 / x_span],
        [mid, -1.0 / x_span],
    ];
    base.iter()
        .enumerate()
        .map(|(k, &[a, b])| if k == 0 { [a, b] } else { [a * rng.uniform(0.75, 1.25), b] })
        .collect()
}

/// Fits `(alpha, beta)` by Nelder-Mead from [`PFC_STARTS`] deterministic
/// starts derived from `theta_range`, the physical input span, and `seed`.
pub fn pfc_fit(
    physical: &PhysicalDataset,
    evaluator: Arc<ResponseEvaluator>,
    theta_range: Interval,
    seed: u64,
) -> Result<PfcModel> {
    let (xs, ys) = (physical.xs(), physical.ys());
    let x_span = (xs[xs.len() - 1] - xs[0]).max(f64::EPSILON);
    let starts = start_points(physical, theta_range, seed);
    let problem = Discrepancy { xs: &xs, ys: &ys, evaluator: &evaluator };

    let mut best: Option<([f64; 2], f64)> = None;
    let mut consider = |p: [f64; 2], v: f64| {
        if v < INVALID_COST && best.is_none_or(|(_, b)| v < b) {
            best = Some((p, v));
        }
    };
    for &s in &starts {
        consider(s, problem.value(s[0], s[1]));
        let simplex = vec![
            s.to_vec(),
            vec![s[0] + 0.1 * theta_range.width(), s[1]],
            vec![s[0], s[1] + 0.1 / x_span],
        ];
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-12)
            .map_err(|e| Error::Fit(e.to_string()))?;
        let run = Executor::new(problem, solver)
            .configure(|state| state.max_iters(1000))
            .run();
        if let Ok(res) = run {
            if let Some(p) = res.state().get_best_param() {
                consider([p[0], p[1]], problem.value(p[0], p[1]));
            }
        }
    }
    let ([alpha, beta], objective) =
        best.ok_or_else(|| Error::Fit("every PFC start has a non-finite objective".into()))?;
    Ok(PfcModel { alpha, beta, objective, starts, evaluator })
}

impl PfcModel {
    pub fn theta(&self, x: f64) -> f64 {
        self.alpha * (-self.beta * x).exp()
    }

    pub fn evaluator(&self) -> &ResponseEvaluator {
        &self.evaluator
    }

    /// Replaces the prediction evaluator; the fitted parameters are kept.
    pub fn with_evaluator(mut self, evaluator: Arc<ResponseEvaluator>) -> Self {
        self.evaluator = evaluator;
        self
    }

    pub fn predict_response(&self, x: f64) -> Result<f64> {
        self.evaluator.evaluate(x, self.theta(x))
    }

    /// Objective at arbitrary `(alpha, beta)` on `physical` with this
    /// model's evaluator.
    pub fn objective_at(&self, physical: &PhysicalDataset, alpha: f64, beta: f64) -> f64 {
        let (xs, ys) = (physical.xs(), physical.ys());
        Discrepancy { xs: &xs, ys: &ys, evaluator: &self.evaluator }.value(alpha, beta)
    }
}

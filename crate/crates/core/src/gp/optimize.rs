//! Multi-start maximization of the log marginal likelihood.
//!
//! Each start runs L-BFGS on the negative log marginal likelihood in log
//! space. A quadratic penalty outside a box keeps the search in a sane
//! region and results are clamped into the box. The heuristic point is
//! always a candidate, so the returned likelihood is never below it.

use std::cell::RefCell;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;

use super::lml::LmlObjective;
use super::{heuristic_hyper, GpConfig, GpHyper};
use crate::rng::Stream;

/// Box in log space: signal variance, length-scales, noise `eta`.
const LOG_SIGNAL: (f64, f64) = (-6.907_755_278_982_137, 6.907_755_278_982_137); // 1e-3 .. 1e3
const LOG_LENGTH: (f64, f64) = (-4.605_170_185_988_091, 4.605_170_185_988_091); // 1e-2 .. 1e2
const LOG_NOISE: (f64, f64) = (-20.723_265_836_946_41, 0.0); // 1e-9 .. 1
const PENALTY: f64 = 100.0;
/// Half-width of the uniform log-space perturbation for extra starts.
const START_SPREAD: f64 = 1.5;

#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub hyper: GpHyper,
    pub log_marginal_likelihood: f64,
    /// Starts whose optimizer run failed outright.
    pub failed_starts: usize,
}

fn bounds(objective: &LmlObjective) -> Vec<(f64, f64)> {
    let mut b = vec![LOG_SIGNAL];
    b.extend(std::iter::repeat_n(LOG_LENGTH, objective.dim()));
    if objective.learns_noise() {
        b.push(LOG_NOISE);
    }
    b
}

fn clamp(p: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    p.iter().zip(bounds).map(|(&v, &(lo, hi))| v.clamp(lo, hi)).collect()
}

type Cached = Option<(Vec<f64>, f64, Vec<f64>)>;

/// Negative log marginal likelihood plus the box penalty, divided by
/// `scale`.
///
/// The first L-BFGS step is the raw negative gradient, which overshoots
/// badly when the start sits in a steep region (near-duplicate inputs with
/// tiny noise give gradients in the thousands). Dividing by the largest
/// gradient component at the start bounds that first step; later steps are
/// unaffected because L-BFGS rescales its curvature estimate.
struct NegLml<'a> {
    objective: &'a LmlObjective,
    bounds: Vec<(f64, f64)>,
    scale: f64,
    last: RefCell<Cached>,
}

impl NegLml<'_> {
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>), argmin::core::Error> {
        if let Some((q, v, g)) = self.last.borrow().as_ref() {
            if q.as_slice() == p {
                return Ok((*v, g.clone()));
            }
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(argmin::core::Error::msg("non-finite parameters"));
        }
        let (lml, grad) = self
            .objective
            .value_and_gradient(p)
            .map_err(|e| argmin::core::Error::msg(e.to_string()))?;
        let mut value = -lml;
        let mut g: Vec<f64> = grad.iter().map(|v| -v).collect();
        for (k, (&v, &(lo, hi))) in p.iter().zip(&self.bounds).enumerate() {
            let excess = if v < lo { v - lo } else if v > hi { v - hi } else { 0.0 };
            value += PENALTY * excess * excess;
            g[k] += 2.0 * PENALTY * excess;
        }
        value /= self.scale;
        g.iter_mut().for_each(|v| *v /= self.scale);
        *self.last.borrow_mut() = Some((p.to_vec(), value, g.clone()));
        Ok((value, g))
    }
}

impl CostFunction for NegLml<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<Self::Output, argmin::core::Error> {
        Ok(self.eval(p)?.0)
    }
}

impl Gradient for NegLml<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Self::Param) -> Result<Self::Gradient, argmin::core::Error> {
        Ok(self.eval(p)?.1)
    }
}

fn run_lbfgs(objective: &LmlObjective, start: Vec<f64>, max_iters: u64) -> Option<Vec<f64>> {
    let mut problem = NegLml { objective, bounds: bounds(objective), scale: 1.0, last: RefCell::new(None) };
    let (_, g0) = problem.eval(&start).ok()?;
    problem.scale = g0.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    *problem.last.borrow_mut() = None;
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), 7)
        .with_tolerance_grad(1e-8)
        .ok()?
        .with_tolerance_cost(1e-12)
        .ok()?;
    let result = Executor::new(problem, solver)
        .configure(|state| state.param(start).max_iters(max_iters))
        .run()
        .ok()?;
    result.state().get_best_param().cloned()
}

/// Maximizes the log marginal likelihood of `objective` from
/// `config.restarts` seeded starts around the median-distance heuristic.
pub fn optimize_hyper(objective: &LmlObjective, config: &GpConfig) -> OptimizeOutcome {
    let bounds = bounds(objective);
    let heuristic = heuristic_for(objective);
    let base = clamp(&objective.params_from_hyper(&heuristic), &bounds);

    let mut best: Option<(Vec<f64>, f64)> = objective.value(&base).ok().map(|v| (base.clone(), v));
    let mut failed_starts = 0;
    let mut rng = Stream::derive(config.seed, 0x0b7);
    for start_idx in 0..config.restarts.max(1) {
        let start: Vec<f64> = if start_idx == 0 {
            base.clone()
        } else {
            let p: Vec<f64> = base.iter().map(|v| v + rng.uniform(-START_SPREAD, START_SPREAD)).collect();
            clamp(&p, &bounds)
        };
        let Some(found) = run_lbfgs(objective, start, config.max_iters) else {
            failed_starts += 1;
            continue;
        };
        let found = clamp(&found, &bounds);
        if let Ok(v) = objective.value(&found) {
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((found, v));
            }
        }
    }

    match best {
        Some((p, v)) => OptimizeOutcome {
            hyper: objective.hyper_from_params(&p),
            log_marginal_likelihood: v,
            failed_starts,
        },
        None => OptimizeOutcome {
            hyper: heuristic,
            log_marginal_likelihood: f64::NEG_INFINITY,
            failed_starts,
        },
    }
}

/// The fallback point used when optimization is off or fails.
pub(crate) fn heuristic_for(objective: &LmlObjective) -> GpHyper {
    heuristic_hyper(objective.points(), objective.learns_noise())
}

//! Gaussian-process regression with a squared-exponential kernel.
//!
//! The same machinery fits the calibration function through the anchors
//! (one input, learned noise) and the surrogate of the model surface (two
//! inputs, noise held at the floor so the surrogate interpolates).
//!
//! Inputs are standardized per dimension and targets to zero mean and unit
//! variance before fitting; every [`GpHyper`] lives in those standardized
//! units. Predictions are mapped back to the original scale.

mod lml;
mod optimize;

pub use lml::LmlObjective;
pub use optimize::{optimize_hyper, OptimizeOutcome};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::rng::Stream;
use lml::{factorize, kernel_matrix, lml_from_factor, scaled_sq_dist, PointSet};

/// Smallest noise variance any model uses (standardized units).
pub const NOISE_FLOOR: f64 = 1e-8;

/// Kernel and noise hyperparameters, in standardized units.
#[derive(Clone, Debug, PartialEq)]
pub struct GpHyper {
    pub signal_variance: f64,
    pub length_scales: Vec<f64>,
    pub noise_variance: f64,
}

impl GpHyper {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.length_scales.len() != dim {
            return Err(Error::invalid(format!(
                "{} length-scales for {dim}-dimensional inputs",
                self.length_scales.len()
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.signal_variance) || !self.length_scales.iter().all(|&l| positive(l)) {
            return Err(Error::invalid("signal variance and length-scales must be positive"));
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return Err(Error::invalid("noise variance must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Where hyperparameters come from.
#[derive(Clone, Debug, PartialEq)]
pub enum HyperSource {
    /// Use these values (noise raised to the floor if below it).
    Fixed(GpHyper),
    /// Median-distance length-scales, unit signal variance, and a noise of
    /// `1e-4` (or the floor when noise is not learned).
    Heuristic,
    /// Maximize the log marginal likelihood from several seeded starts.
    Optimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GpConfig {
    pub hyper: HyperSource,
    /// Learn the noise variance; otherwise it stays at [`NOISE_FLOOR`].
    pub learn_noise: bool,
    /// Number of optimizer starts (the first is the heuristic point).
    pub restarts: usize,
    pub max_iters: u64,
    /// Optimize on a seeded subsample of at most this many points; the
    /// final model still conditions on every point.
    pub max_opt_points: Option<usize>,
    pub seed: u64,
}

impl GpConfig {
    /// Calibration-function fit: noisy targets, fully optimized.
    pub fn anchors() -> Self {
        Self {
            hyper: HyperSource::Optimize,
            learn_noise: true,
            restarts: 5,
            max_iters: 200,
            max_opt_points: None,
            seed: 0,
        }
    }

    /// Surface surrogate: interpolating, optimized on a subsample.
    pub fn surrogate() -> Self {
        Self {
            hyper: HyperSource::Optimize,
            learn_noise: false,
            restarts: 5,
            max_iters: 100,
            max_opt_points: Some(200),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_hyper(mut self, hyper: HyperSource) -> Self {
        self.hyper = hyper;
        self
    }
}

impl Default for GpConfig {
    fn default() -> Self {
        Self::anchors()
    }
}

/// Affine map to zero mean, unit variance. Zero spread keeps scale 1.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Scaler {
    mean: f64,
    scale: f64,
}

impl Scaler {
    fn fit(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count() as f64;
        let mean = values.clone().sum::<f64>() / n;
        let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        let scale = if sd > 1e-12 * mean.abs().max(1.0) { sd } else { 1.0 };
        Self { mean, scale }
    }

    fn forward(&self, v: f64) -> f64 {
        (v - self.mean) / self.scale
    }

    fn back(&self, v: f64) -> f64 {
        v * self.scale + self.mean
    }
}

pub(crate) fn to_point_set(inputs: &[Vec<f64>]) -> Result<PointSet> {
    let dim = inputs.first().map_or(0, Vec::len);
    if dim == 0 || dim > 2 {
        return Err(Error::invalid(format!("input dimension must be 1 or 2, got {dim}")));
    }
    let mut data = Vec::with_capacity(inputs.len() * dim);
    for p in inputs {
        if p.len() != dim {
            return Err(Error::invalid("inputs have mixed dimensions"));
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("inputs must be finite"));
        }
        data.extend_from_slice(p);
    }
    Ok(PointSet { dim, data })
}

/// Median of pairwise absolute differences per dimension (nonzero ones);
/// falls back to 1.
pub(crate) fn median_distance_scales(x: &PointSet) -> Vec<f64> {
    let n = x.len();
    (0..x.dim)
        .map(|t| {
            let mut d: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in 0..i {
                    let v = (x.row(i)[t] - x.row(j)[t]).abs();
                    if v > 0.0 {
                        d.push(v);
                    }
                }
            }
            if d.is_empty() {
                return 1.0;
            }
            d.sort_by(f64::total_cmp);
            d[d.len() / 2]
        })
        .collect()
}

pub(crate) fn heuristic_hyper(x: &PointSet, learn_noise: bool) -> GpHyper {
    GpHyper {
        signal_variance: 1.0,
        length_scales: median_distance_scales(x),
        noise_variance: if learn_noise { 1e-4 } else { NOISE_FLOOR },
    }
}

/// A fitted GP, ready for prediction.
#[derive(Clone, Debug)]
pub struct GpModel {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    hyper: GpHyper,
    x_std: PointSet,
    x_scalers: Vec<Scaler>,
    y_scaler: Scaler,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
    log_marginal_likelihood: f64,
}

/// Fits a GP to `inputs` (1- or 2-dimensional points) and `targets`.
pub fn gp_fit(inputs: &[Vec<f64>], targets: &[f64], config: &GpConfig) -> Result<GpModel> {
    if inputs.len() < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {}", inputs.len())));
    }
    if inputs.len() != targets.len() {
        return Err(Error::invalid("inputs and targets differ in length"));
    }
    if !targets.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("targets must be finite"));
    }
    let raw = to_point_set(inputs)?;
    let dim = raw.dim;
    let x_scalers: Vec<Scaler> = (0..dim)
        .map(|t| Scaler::fit((0..raw.len()).map(|i| raw.row(i)[t])))
        .collect();
    let x_std = PointSet {
        dim,
        data: raw
            .data
            .iter()
            .enumerate()
            .map(|(k, &v)| x_scalers[k % dim].forward(v))
            .collect(),
    };
    let y_scaler = Scaler::fit(targets.iter().copied());
    let y_std = DVector::from_iterator(targets.len(), targets.iter().map(|&v| y_scaler.forward(v)));

    let hyper = match &config.hyper {
        HyperSource::Fixed(h) => {
            h.validate(dim)?;
            GpHyper { noise_variance: h.noise_variance.max(NOISE_FLOOR), ..h.clone() }
        }
        HyperSource::Heuristic => heuristic_hyper(&x_std, config.learn_noise),
        HyperSource::Optimize => {
            let (x_opt, y_opt) = match config.max_opt_points {
                Some(cap) if x_std.len() > cap => {
                    let mut idx: Vec<usize> = (0..x_std.len()).collect();
                    Stream::derive(config.seed, 0x5ab5).shuffle(&mut idx);
                    idx.truncate(cap);
                    idx.sort_unstable();
                    let y = DVector::from_iterator(idx.len(), idx.iter().map(|&i| y_std[i]));
                    (x_std.select(&idx), y)
                }
                _ => (x_std.clone(), y_std.clone()),
            };
            let objective = LmlObjective::from_parts(x_opt, y_opt, config.learn_noise, NOISE_FLOOR);
            optimize_hyper(&objective, config).hyper
        }
    };

    let k = kernel_matrix(&x_std, &hyper);
    let (chol, jitter) = factorize(&k, hyper.noise_variance)?;
    let alpha = chol.solve(&y_std);
    let log_marginal_likelihood = lml_from_factor(&chol, &y_std);

    Ok(GpModel {
        inputs: inputs.to_vec(),
        targets: targets.to_vec(),
        hyper,
        x_std,
        x_scalers,
        y_scaler,
        chol,
        alpha,
        jitter,
        log_marginal_likelihood,
    })
}

impl GpModel {
    pub fn dim(&self) -> usize {
        self.x_std.dim
    }

    pub fn hyper(&self) -> &GpHyper {
        &self.hyper
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Jitter that was added to the diagonal to factor the covariance.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Log marginal likelihood of the standardized targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    fn standardize(&self, query: &[f64]) -> Vec<f64> {
        assert_eq!(query.len(), self.dim(), "query dimension mismatch");
        query.iter().zip(&self.x_scalers).map(|(&v, s)| s.forward(v)).collect()
    }

    fn cross_covariance(&self, q: &[f64]) -> DVector<f64> {
        let h = &self.hyper;
        DVector::from_iterator(
            self.x_std.len(),
            (0..self.x_std.len()).map(|i| {
                h.signal_variance * (-0.5 * scaled_sq_dist(self.x_std.row(i), q, &h.length_scales)).exp()
            }),
        )
    }

    /// Posterior mean at `query`.
    pub fn predict_mean(&self, query: &[f64]) -> f64 {
        let q = self.standardize(query);
        let k = self.cross_covariance(&q);
        self.y_scaler.back(k.dot(&self.alpha))
    }

    /// Posterior mean and variance of the latent function at `query`.
    pub fn predict(&self, query: &[f64]) -> (f64, f64) {
        let q = self.standardize(query);
        let k = self.cross_covariance(&q);
        let mean = self.y_scaler.back(k.dot(&self.alpha));
        // Only the lower triangle of the factor storage is read.
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&k)
            .expect("Cholesky factor has a positive diagonal");
        let var = (self.hyper.signal_variance - v.dot(&v)).max(0.0);
        (mean, var * self.y_scaler.scale * self.y_scaler.scale)
    }

    /// Lower-triangular Cholesky factor `L`.
    pub fn factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// The factored matrix `K + (noise + jitter) I` in standardized units.
    pub fn training_covariance(&self) -> DMatrix<f64> {
        let mut k = kernel_matrix(&self.x_std, &self.hyper);
        for i in 0..k.nrows() {
            k[(i, i)] += self.hyper.noise_variance + self.jitter;
        }
        k
    }
}

/// Noise-free kernel matrix for raw `inputs` under `hyper` (no standardization).
pub fn kernel_matrix_for(inputs: &[Vec<f64>], hyper: &GpHyper) -> Result<DMatrix<f64>> {
    let x = to_point_set(inputs)?;
    hyper.validate(x.dim)?;
    Ok(kernel_matrix(&x, hyper))
}

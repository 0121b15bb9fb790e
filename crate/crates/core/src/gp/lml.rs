//! Log marginal likelihood of a zero-mean GP with a squared-exponential
//! kernel, and its gradient in log-parameter space.
//!
//! Parameters are packed as `[ln s2, ln l_1, .., ln l_d, eta]` where `s2` is
//! the signal variance, `l_k` the length-scales, and the noise variance is
//! `NOISE_FLOOR + exp(eta)`. The `eta` slot exists only when the noise is
//! learned.
//!
//! With `K_y = K + noise * I`, `alpha = K_y^-1 y`:
//!
//! ```text
//! log p(y) = -1/2 y' alpha - sum_i ln L_ii - n/2 ln(2 pi)
//! d log p / d p_k = 1/2 tr((alpha alpha' - K_y^-1) dK_y/dp_k)
//! ```

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{GpHyper, NOISE_FLOOR};
use crate::error::{Error, Result};

/// Jitter ladder tried, in order, when `K_y` fails to factor.
pub(crate) const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Row-major point set of fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct PointSet {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn select(&self, idx: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        PointSet { dim: self.dim, data }
    }
}

#[inline]
pub(crate) fn scaled_sq_dist(a: &[f64], b: &[f64], length_scales: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(length_scales)
        .map(|((a, b), l)| {
            let d = (a - b) / l;
            d * d
        })
        .sum()
}

/// Noise-free kernel matrix `K`.
pub(crate) fn kernel_matrix(x: &PointSet, hyper: &GpHyper) -> DMatrix<f64> {
    let n = x.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = hyper.signal_variance;
        for j in 0..i {
            let v = hyper.signal_variance
                * (-0.5 * scaled_sq_dist(x.row(i), x.row(j), &hyper.length_scales)).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cholesky factor of `k + (noise + jitter) I`, climbing the jitter ladder on
/// failure. Returns the factor and the jitter that was needed.
pub(crate) fn factorize(k: &DMatrix<f64>, noise: f64) -> Result<(Cholesky<f64, Dyn>, f64)> {
    for &jitter in &JITTER_LADDER {
        let mut ky = k.clone();
        for i in 0..ky.nrows() {
            ky[(i, i)] += noise + jitter;
        }
        if let Some(chol) = Cholesky::new(ky) {
            return Ok((chol, jitter));
        }
    }
    let mut ky = k.clone();
    for i in 0..ky.nrows() {
        ky[(i, i)] += noise;
    }
    let min_eigenvalue = ky.symmetric_eigenvalues().min();
    Err(Error::Conditioning {
        jitter: JITTER_LADDER[JITTER_LADDER.len() - 1],
        min_eigenvalue,
    })
}

/// The marginal-likelihood objective over standardized data.
#[derive(Clone, Debug)]
pub struct LmlObjective {
    x: PointSet,
    y: DVector<f64>,
    learn_noise: bool,
    fixed_noise: f64,
}

impl LmlObjective {
    /// `inputs` and `targets` are used as given (no standardization).
    /// `fixed_noise` is used when the noise is not learned.
    pub fn new(inputs: &[Vec<f64>], targets: &[f64], learn_noise: bool, fixed_noise: f64) -> Result<Self> {
        let x = super::to_point_set(inputs)?;
        if x.len() != targets.len() {
            return Err(Error::invalid("inputs and targets differ in length"));
        }
        Ok(Self::from_parts(x, DVector::from_column_slice(targets), learn_noise, fixed_noise))
    }

    pub(crate) fn from_parts(x: PointSet, y: DVector<f64>, learn_noise: bool, fixed_noise: f64) -> Self {
        Self { x, y, learn_noise, fixed_noise: fixed_noise.max(NOISE_FLOOR) }
    }

    pub fn dim(&self) -> usize {
        self.x.dim
    }

    pub(crate) fn points(&self) -> &PointSet {
        &self.x
    }

    pub fn learns_noise(&self) -> bool {
        self.learn_noise
    }

    pub fn n_params(&self) -> usize {
        1 + self.x.dim + usize::from(self.learn_noise)
    }

    pub fn hyper_from_params(&self, p: &[f64]) -> GpHyper {
        let d = self.x.dim;
        GpHyper {
            signal_variance: p[0].exp(),
            length_scales: p[1..=d].iter().map(|v| v.exp()).collect(),
            noise_variance: if self.learn_noise {
                NOISE_FLOOR + p[d + 1].exp()
            } else {
                self.fixed_noise
            },
        }
    }

    /// Inverse of [`hyper_from_params`](Self::hyper_from_params). A noise at
    /// or below the floor maps to a large negative `eta`.
    pub fn params_from_hyper(&self, h: &GpHyper) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.push(h.signal_variance.ln());
        p.extend(h.length_scales.iter().map(|l| l.ln()));
        if self.learn_noise {
            p.push((h.noise_variance - NOISE_FLOOR).max(1e-300).ln());
        }
        p
    }

    pub fn value(&self, p: &[f64]) -> Result<f64> {
        let h = self.hyper_from_params(p);
        let k = kernel_matrix(&self.x, &h);
        let (chol, _) = factorize(&k, h.noise_variance)?;
        Ok(lml_from_factor(&chol, &self.y))
    }

    pub fn value_and_gradient(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        let d = self.x.dim;
        let n = self.x.len();
        let h = self.hyper_from_params(p);
        let k = kernel_matrix(&self.x, &h);
        let (chol, _) = factorize(&k, h.noise_variance)?;
        let value = lml_from_factor(&chol, &self.y);
        let alpha = chol.solve(&self.y);
        let kinv = chol.inverse();

        // Q = alpha alpha' - K_y^-1; gradient_k = 1/2 sum_ij Q_ij dK_ij.
        let mut grad = vec![0.0; self.n_params()];
        let mut dists = vec![0.0; d];
        for i in 0..n {
            for j in 0..=i {
                let q = alpha[i] * alpha[j] - kinv[(i, j)];
                // Off-diagonal pairs appear twice in the trace.
                let mult = if i == j { 0.5 } else { 1.0 };
                let kij = k[(i, j)];
                grad[0] += mult * q * kij;
                if i != j {
                    let (a, b) = (self.x.row(i), self.x.row(j));
                    for (t, dist) in dists.iter_mut().enumerate() {
                        let r = (a[t] - b[t]) / h.length_scales[t];
                        *dist = r * r;
                    }
                    for t in 0..d {
                        grad[1 + t] += mult * q * kij * dists[t];
                    }
                }
            }
        }
        if self.learn_noise {
            let eta_scale = p[d + 1].exp();
            grad[d + 1] = 0.5 * eta_scale * (0..n).map(|i| alpha[i] * alpha[i] - kinv[(i, i)]).sum::<f64>();
        }
        Ok((value, grad))
    }
}

pub(crate) fn lml_from_factor(chol: &Cholesky<f64, Dyn>, y: &DVector<f64>) -> f64 {
    let n = y.len() as f64;
    let alpha = chol.solve(y);
    let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
    -0.5 * y.dot(&alpha) - log_det_half - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
}

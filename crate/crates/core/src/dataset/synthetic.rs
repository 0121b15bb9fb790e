//! Closed-form benchmark problems with a known calibration function.

use std::f64::consts::PI;
use std::fmt;

use super::{Interval, ModelDataset, ModelPoint, PhysicalDataset, PhysicalPoint};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Ground truth of a synthetic problem: the physical curve, the model
/// surface, and the calibration function that makes them agree.
#[derive(Clone, Copy)]
pub struct SyntheticTruth {
    pub name: &'static str,
    physical: fn(f64) -> f64,
    model: fn(f64, f64) -> f64,
    theta: fn(f64) -> f64,
    /// Calibration ranges must stay strictly above this value.
    theta_floor: Option<f64>,
}

impl fmt::Debug for SyntheticTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyntheticTruth").field("name", &self.name).finish()
    }
}

impl SyntheticTruth {
    /// A custom problem. `theta_floor`, if set, is a value the calibration
    /// range must stay strictly above.
    pub fn new(
        name: &'static str,
        physical: fn(f64) -> f64,
        model: fn(f64, f64) -> f64,
        theta: fn(f64) -> f64,
        theta_floor: Option<f64>,
    ) -> Self {
        Self { name, physical, model, theta, theta_floor }
    }

    pub fn physical_response(&self, x: f64) -> f64 {
        (self.physical)(x)
    }

    /// Model surface at `(x, theta)`. Points where the surface is undefined
    /// (a non-finite value) are reported as [`Error::Domain`].
    pub fn model_response(&self, x: f64, theta: f64) -> Result<f64> {
        let y = (self.model)(x, theta);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain { x, theta })
        }
    }

    pub fn true_theta(&self, x: f64) -> f64 {
        (self.theta)(x)
    }

    pub fn theta_floor(&self) -> Option<f64> {
        self.theta_floor
    }
}

fn sd1_physical(x: f64) -> f64 {
    (x / 10.0).exp() * x.sin()
}

fn sd1_model(x: f64, theta: f64) -> f64 {
    (x / 10.0).exp() * x.sin() * x / (2.0 * theta)
}

fn sd1_theta(x: f64) -> f64 {
    0.5 * x
}

fn sd2_physical(x: f64) -> f64 {
    (2.0 * x).cos() * (x / 2.0).sin()
}

fn sd2_model(x: f64, theta: f64) -> f64 {
    let q = (x - 2.0).powi(2);
    (2.0 * x).cos()
        * (x / 2.0).sin()
        * (PI * theta / (2.0 * q + 2.0)).sin()
        * (2.0 * PI * theta / (q + 1.0)).cos()
        * (theta / (2.0 * q + 2.0) - 0.5).exp()
}

fn sd2_theta(x: f64) -> f64 {
    (x - 2.0).powi(2) + 1.0
}

/// `y = exp(x/10) sin(x)`, `y_c = y * x / (2 theta)`, `f(x) = x / 2`.
pub fn sd1_truth() -> SyntheticTruth {
    SyntheticTruth {
        name: "sd1",
        physical: sd1_physical,
        model: sd1_model,
        theta: sd1_theta,
        theta_floor: Some(1e-6),
    }
}

/// `y = cos(2x) sin(x/2)` with a surface modulated by three factors that all
/// equal one on `f(x) = (x - 2)^2 + 1`.
pub fn sd2_truth() -> SyntheticTruth {
    SyntheticTruth {
        name: "sd2",
        physical: sd2_physical,
        model: sd2_model,
        theta: sd2_theta,
        theta_floor: None,
    }
}

/// The two built-in benchmarks with their standard sampling ranges and sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Sd1,
    Sd2,
}

impl Benchmark {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "sd1" => Some(Benchmark::Sd1),
            "sd2" => Some(Benchmark::Sd2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Sd1 => "sd1",
            Benchmark::Sd2 => "sd2",
        }
    }

    pub fn truth(self) -> SyntheticTruth {
        match self {
            Benchmark::Sd1 => sd1_truth(),
            Benchmark::Sd2 => sd2_truth(),
        }
    }

    pub fn x_range(self) -> Interval {
        match self {
            Benchmark::Sd1 => Interval { lo: 9.0 * PI / 8.0, hi: 5.0 * PI / 2.0 },
            Benchmark::Sd2 => Interval { lo: 3.0 * PI / 8.0, hi: PI },
        }
    }

    pub fn theta_range(self) -> Interval {
        match self {
            Benchmark::Sd1 => Interval { lo: PI / 4.0, hi: 3.0 * PI / 2.0 },
            Benchmark::Sd2 => Interval { lo: PI / 4.0, hi: PI },
        }
    }

    /// `(m, n)` used for training-error runs.
    pub fn train_sizes(self) -> (usize, usize) {
        (15, 450)
    }

    /// `(m, n)` used for cross-validated test-error runs.
    pub fn test_sizes(self) -> (usize, usize) {
        (30, 900)
    }

    pub fn generate(self, m: usize, n: usize, seed: u64) -> Result<(PhysicalDataset, ModelDataset)> {
        generate_synthetic(&self.truth(), m, n, self.x_range(), self.theta_range(), seed)
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Samples a benchmark instance.
///
/// Physical inputs are uniform over `x_range` (redrawn on an exact repeat).
/// Each physical input gets `n / (2m)` model runs at exactly that input with
/// uniform `theta`, so every physical input has a matching model input. The
/// remaining model runs are uniform over `x_range x theta_range`.
///
/// Streams: physical inputs use stream 0 of `seed`, the per-input columns
/// stream 1, and the uniform fill stream 2 (see [`crate::rng`]).
pub fn generate_synthetic(
    truth: &SyntheticTruth,
    m: usize,
    n: usize,
    x_range: Interval,
    theta_range: Interval,
    seed: u64,
) -> Result<(PhysicalDataset, ModelDataset)> {
    if m < 2 {
        return Err(Error::invalid(format!("need m >= 2, got {m}")));
    }
    if n < m {
        return Err(Error::invalid(format!("need n >= m, got n = {n}, m = {m}")));
    }
    let x_range = Interval::new(x_range.lo, x_range.hi)?;
    let theta_range = Interval::new(theta_range.lo, theta_range.hi)?;
    if let Some(floor) = truth.theta_floor {
        if theta_range.lo <= floor {
            return Err(Error::invalid(format!(
                "theta range must stay above {floor} for {}",
                truth.name
            )));
        }
    }

    let mut phys_rng = Stream::derive(seed, 0);
    let mut xs: Vec<f64> = Vec::with_capacity(m);
    while xs.len() < m {
        let x = phys_rng.uniform(x_range.lo, x_range.hi);
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    xs.sort_by(f64::total_cmp);

    let physical = PhysicalDataset::new(
        xs.iter()
            .map(|&x| PhysicalPoint { x, y: truth.physical_response(x) })
            .collect(),
    )?;

    let per_column = n / (2 * m);
    let mut col_rng = Stream::derive(seed, 1);
    let mut fill_rng = Stream::derive(seed, 2);
    let mut model = Vec::with_capacity(n);
    for &x in &xs {
        for _ in 0..per_column {
            let theta = col_rng.uniform(theta_range.lo, theta_range.hi);
            model.push(ModelPoint { x, theta, y: truth.model_response(x, theta)? });
        }
    }
    while model.len() < n {
        let x = fill_rng.uniform(x_range.lo, x_range.hi);
        let theta = fill_rng.uniform(theta_range.lo, theta_range.hi);
        model.push(ModelPoint { x, theta, y: truth.model_response(x, theta)? });
    }

    Ok((physical, ModelDataset::new(model)?))
}

/// Adds the exact true-curve point `(x, f(x), y_p(x))` for every physical
/// input to `model`.
///
/// Returns the new dataset and the index of each planted point, in
/// physical order. A planted point sorts after existing points with the
/// same `x`.
pub fn plant_true_curve(
    truth: &SyntheticTruth,
    physical: &PhysicalDataset,
    model: &ModelDataset,
) -> Result<(ModelDataset, Vec<usize>)> {
    let mut points = model.points().to_vec();
    let planted: Vec<ModelPoint> = physical
        .points()
        .iter()
        .map(|p| ModelPoint { x: p.x, theta: truth.true_theta(p.x), y: p.y })
        .collect();
    points.extend_from_slice(&planted);
    let out = ModelDataset::new(points)?;
    let idx = planted
        .iter()
        .map(|q| {
            out.points()
                .iter()
                .rposition(|p| p == q)
                .expect("planted point is present")
        })
        .collect();
    Ok((out, idx))
}

//! Physical and computer-model data.
//!
//! A [`PhysicalDataset`] holds observed `(x, y)` pairs from the physical
//! process, sorted by strictly increasing `x`. A [`ModelDataset`] holds
//! `(x, theta, y)` triples sampled from the computer-model surface, sorted by
//! non-decreasing `x` (repeated inputs are allowed, which grid designs
//! produce naturally).

mod csv_io;
mod synthetic;

pub use csv_io::{
    format_f64, load_model, load_physical, read_model, read_physical, write_model, write_physical,
    write_csv, CsvDataset,
};
pub use synthetic::{generate_synthetic, plant_true_curve, sd1_truth, sd2_truth, Benchmark, SyntheticTruth};

use crate::error::{Error, Result};

/// One observation of the physical process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalPoint {
    pub x: f64,
    pub y: f64,
}

/// One run of the computer model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelPoint {
    pub x: f64,
    pub theta: f64,
    pub y: f64,
}

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::invalid(format!("degenerate interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

/// Observed physical data, strictly increasing in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalDataset {
    points: Vec<PhysicalPoint>,
}

impl PhysicalDataset {
    /// Sorts by `x` and validates. Fewer than two points, non-finite values
    /// and repeated inputs are rejected.
    pub fn new(mut points: Vec<PhysicalPoint>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::invalid(format!(
                "physical point ({}, {}) is not finite",
                p.x, p.y
            )));
        }
        if points.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 physical points, got {}",
                points.len()
            )));
        }
        points.sort_by(|a, b| a.x.total_cmp(&b.x));
        if let Some(w) = points.windows(2).find(|w| w[0].x == w[1].x) {
            return Err(Error::invalid(format!("duplicate physical input x = {}", w[0].x)));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PhysicalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }

    /// Dataset restricted to `indices` (in any order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(indices.iter().map(|&i| self.points[i]).collect())
    }
}

/// Computer-model data, non-decreasing in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelDataset {
    points: Vec<ModelPoint>,
}

impl ModelDataset {
    /// Stable-sorts by `x` and validates finiteness. An empty set is
    /// rejected; the `n >= m` requirement is checked against a physical
    /// dataset by [`ModelDataset::check_covers`].
    pub fn new(mut points: Vec<ModelPoint>) -> Result<Self> {
        if let Some(p) = points
            .iter()
            .find(|p| !(p.x.is_finite() && p.theta.is_finite() && p.y.is_finite()))
        {
            return Err(Error::invalid(format!(
                "model point ({}, {}, {}) is not finite",
                p.x, p.theta, p.y
            )));
        }
        if points.is_empty() {
            return Err(Error::invalid("model dataset is empty"));
        }
        points.sort_by(|a, b| a.x.total_cmp(&b.x));
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ModelPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn theta_range(&self) -> Interval {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.theta), hi.max(p.theta))
            });
        Interval { lo, hi }
    }

    pub fn x_range(&self) -> Interval {
        Interval {
            lo: self.points[0].x,
            hi: self.points[self.points.len() - 1].x,
        }
    }

    pub fn check_covers(&self, physical: &PhysicalDataset) -> Result<()> {
        if self.len() < physical.len() {
            return Err(Error::invalid(format!(
                "model dataset has {} points, fewer than the {} physical points",
                self.len(),
                physical.len()
            )));
        }
        Ok(())
    }
}

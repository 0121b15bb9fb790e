//! Error metrics.
//!
//! `paper_rmse` is the plain sum of squared errors, the form the metric was
//! originally printed in. `conventional_rmse` is the usual root mean square.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricReport {
    /// `sum_i (predicted_i - actual_i)^2`.
    pub paper_rmse: f64,
    /// `sqrt(paper_rmse / n_points)`.
    pub conventional_rmse: f64,
    pub n_points: usize,
}

impl MetricReport {
    pub fn from_errors(errors: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut n = 0usize;
        let mut sse = 0.0;
        for e in errors {
            n += 1;
            sse += e * e;
        }
        if n == 0 {
            return Err(Error::invalid("cannot score an empty prediction set"));
        }
        Ok(Self { paper_rmse: sse, conventional_rmse: (sse / n as f64).sqrt(), n_points: n })
    }
}

fn compare(predicted: &[f64], actual: &[f64]) -> Result<MetricReport> {
    if predicted.len() != actual.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} observations",
            predicted.len(),
            actual.len()
        )));
    }
    MetricReport::from_errors(predicted.iter().zip(actual).map(|(p, a)| p - a))
}

/// Response error of predictions against physical responses.
pub fn metric_response(predicted: &[f64], actual: &[f64]) -> Result<MetricReport> {
    compare(predicted, actual)
}

/// Calibration-parameter error against the true `theta` at the same inputs.
pub fn metric_theta(predicted_theta: &[f64], actual_theta: &[f64]) -> Result<MetricReport> {
    compare(predicted_theta, actual_theta)
}

/// Sample mean and standard deviation (`n - 1` denominator; 0 for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

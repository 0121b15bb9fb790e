//! The calibration pipeline: cluster, solve for anchors, fit `f` through
//! them, and predict physical responses as `y_c(x, f(x))`.

mod pfc;

pub use pfc::{pfc_fit, PfcModel, PFC_STARTS};

use std::sync::Arc;

use crate::dataset::{ModelDataset, ModelPoint, PhysicalDataset, SyntheticTruth};
use crate::error::{Error, Result};
use crate::gp::{gp_fit, GpConfig, GpModel};
use crate::graph::{build_graph, ClusterPartition, WeightOptions};
use crate::shortest_path::{shortest_anchor_path, AnchorPath};

/// How the model response `y_c(x, theta)` is evaluated off the sample.
#[derive(Clone, Debug)]
pub enum ResponseEvaluator {
    /// The closed-form model of a synthetic benchmark.
    Analytic(SyntheticTruth),
    /// A GP interpolating the model dataset over `(x, theta)`.
    Surrogate(GpModel),
}

impl ResponseEvaluator {
    pub fn evaluate(&self, x: f64, theta: f64) -> Result<f64> {
        match self {
            Self::Analytic(truth) => truth.model_response(x, theta),
            Self::Surrogate(gp) => Ok(gp.predict_mean(&[x, theta])),
        }
    }

    pub fn is_surrogate(&self) -> bool {
        matches!(self, Self::Surrogate(_))
    }
}

/// Fits a 2-d GP surrogate over `(x, theta)` to the model responses.
pub fn fit_surrogate(model: &ModelDataset, config: &GpConfig) -> Result<ResponseEvaluator> {
    if model.len() < 4 {
        return Err(Error::invalid(format!(
            "a surrogate needs at least 4 model points, got {}",
            model.len()
        )));
    }
    let inputs: Vec<Vec<f64>> = model.points().iter().map(|p| vec![p.x, p.theta]).collect();
    let targets: Vec<f64> = model.points().iter().map(|p| p.y).collect();
    Ok(ResponseEvaluator::Surrogate(gp_fit(&inputs, &targets, config)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GnmOptions {
    pub lambda: f64,
    pub terminal_response: bool,
    pub gp: GpConfig,
}

impl GnmOptions {
    pub fn new(lambda: f64) -> Self {
        Self { lambda, terminal_response: false, gp: GpConfig::anchors() }
    }

    pub fn with_gp(mut self, gp: GpConfig) -> Self {
        self.gp = gp;
        self
    }

    pub fn with_terminal_response(mut self, on: bool) -> Self {
        self.terminal_response = on;
        self
    }

    fn weights(&self) -> WeightOptions {
        WeightOptions { lambda: self.lambda, terminal_response: self.terminal_response }
    }
}

/// A fitted calibration: the anchors, the GP `f` through them, and the
/// evaluator used for predictions.
#[derive(Clone, Debug)]
pub struct CalibrationModel {
    calib_fn: GpModel,
    anchors: AnchorPath,
    anchor_points: Vec<ModelPoint>,
    partition: ClusterPartition,
    evaluator: Arc<ResponseEvaluator>,
    lambda: f64,
}

/// Runs the full pipeline on `physical` and `model`.
///
/// `evaluator` is only used by the prediction methods; anchor selection
/// works on the model dataset directly.
pub fn gnm_fit(
    physical: &PhysicalDataset,
    model: &ModelDataset,
    evaluator: Arc<ResponseEvaluator>,
    options: &GnmOptions,
) -> Result<CalibrationModel> {
    let graph = build_graph(physical, model, options.weights())?;
    let anchors = shortest_anchor_path(&graph);
    let anchor_points: Vec<ModelPoint> = anchors.anchors.iter().map(|&i| model.points()[i]).collect();
    let inputs: Vec<Vec<f64>> = anchor_points.iter().map(|p| vec![p.x]).collect();
    let targets: Vec<f64> = anchor_points.iter().map(|p| p.theta).collect();
    let calib_fn = gp_fit(&inputs, &targets, &options.gp)?;
    Ok(CalibrationModel {
        calib_fn,
        anchors,
        anchor_points,
        partition: graph.partition().clone(),
        evaluator,
        lambda: options.lambda,
    })
}

impl CalibrationModel {
    pub fn anchors(&self) -> &AnchorPath {
        &self.anchors
    }

    /// The selected model points, one per cluster in cluster order.
    pub fn anchor_points(&self) -> &[ModelPoint] {
        &self.anchor_points
    }

    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    pub fn calibration_function(&self) -> &GpModel {
        &self.calib_fn
    }

    pub fn evaluator(&self) -> &ResponseEvaluator {
        &self.evaluator
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Replaces the prediction evaluator.
    pub fn with_evaluator(mut self, evaluator: Arc<ResponseEvaluator>) -> Self {
        self.evaluator = evaluator;
        self
    }

    /// Posterior mean of `f` at `x`.
    pub fn predict_theta(&self, x: f64) -> f64 {
        self.calib_fn.predict_mean(&[x])
    }

    pub fn predict_response(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::invalid(format!("query x = {x} is not finite")));
        }
        self.evaluator.evaluate(x, self.predict_theta(x))
    }

    /// `(theta_hat, y_hat)` for each query, in order.
    pub fn predict_batch(&self, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        xs.iter()
            .map(|&x| {
                let y = self.predict_response(x)?;
                Ok((self.predict_theta(x), y))
            })
            .collect()
    }
}

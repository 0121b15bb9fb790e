//! Metrics, cross-validation, `lambda` selection, and the benchmark protocol.

mod cv;
mod experiment;
mod metrics;

pub use cv::{
    default_lambda_grid, holdout_score, kfold, lambda_grid, select_lambda, split_indices, sweep_lambda,
    FoldPlan, LambdaScore, LambdaSelection, SweepResult, SweepRow,
};
pub use experiment::{
    run_experiment, write_report, write_report_file, write_sweep, DataSource, ExperimentConfig,
    ExperimentReport, LambdaChoice, Method, Phase, ReportRow, REPORT_HEADER, SWEEP_HEADER,
};
pub use metrics::{mean_std, metric_response, metric_theta, MetricReport};

//! Fold plans, cross-validated choice of `lambda`, and the `lambda` sweep.
//!
//! Only physical points are split. Every fold refits the whole pipeline on
//! its training physical points against the full model dataset, so the
//! clusters are rebuilt per fold.

use std::sync::Arc;

use rayon::prelude::*;

use super::metrics::{mean_std, metric_response, MetricReport};
use crate::calibrate::{gnm_fit, GnmOptions, ResponseEvaluator};
use crate::dataset::{ModelDataset, PhysicalDataset};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Balanced random assignment of physical indices to folds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold of each physical index.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    /// Indices in fold `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    /// Indices outside fold `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffles the indices with `seed` and deals them round-robin into `k`
/// folds.
pub fn kfold(m: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if k > m {
        return Err(Error::invalid(format!("{k} folds for {m} physical points")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    Stream::derive(seed, 0xf0).shuffle(&mut order);
    let mut assignments = vec![0; m];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan { k, assignments, seed })
}

/// `lo, lo + step, ..., hi` with values snapped to 12 decimals so that
/// `0:0.05:1` yields `0.15` rather than `0.15000000000000002`.
pub fn lambda_grid(lo: f64, step: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && step.is_finite() && hi.is_finite()) || step <= 0.0 || hi < lo || lo < 0.0 {
        return Err(Error::invalid(format!("invalid grid {lo}:{step}:{hi}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::invalid(format!("grid {lo}:{step}:{hi} has {count} points")));
    }
    Ok((0..count)
        .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// `{0, 0.05, ..., 1}`.
pub fn default_lambda_grid() -> Vec<f64> {
    lambda_grid(0.0, 0.05, 1.0).expect("valid default grid")
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::invalid(format!("lambda {bad} is not a finite non-negative number")));
    }
    Ok(())
}

/// Fits on `train` and scores the predictions at `test` against the
/// physical responses.
pub fn holdout_score(
    physical: &PhysicalDataset,
    model: &ModelDataset,
    evaluator: &Arc<ResponseEvaluator>,
    options: &GnmOptions,
    train: &[usize],
    test: &[usize],
) -> Result<MetricReport> {
    let train_set = physical.subset(train)?;
    let cal = gnm_fit(&train_set, model, Arc::clone(evaluator), options)?;
    let mut predicted = Vec::with_capacity(test.len());
    let mut actual = Vec::with_capacity(test.len());
    for &i in test {
        let p = physical.points()[i];
        predicted.push(cal.predict_response(p.x)?);
        actual.push(p.y);
    }
    metric_response(&predicted, &actual)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaScore {
    pub lambda: f64,
    /// Conventional RMSE on each held-out fold; `None` where the fit failed.
    pub fold_scores: Vec<Option<f64>>,
    /// Mean over the folds that succeeded; `None` if all failed.
    pub score: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSelection {
    pub lambda: f64,
    pub scores: Vec<LambdaScore>,
}

/// Two-fold cross-validation over `grid`; the smallest mean conventional
/// RMSE wins, ties going to the smaller `lambda`.
pub fn select_lambda(
    physical: &PhysicalDataset,
    model: &ModelDataset,
    evaluator: &Arc<ResponseEvaluator>,
    grid: &[f64],
    options: &GnmOptions,
    seed: u64,
) -> Result<LambdaSelection> {
    check_grid(grid)?;
    let plan = kfold(physical.len(), 2, seed)?;
    let tasks: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..2).map(move |f| (g, f))).collect();
    let results: Vec<Option<f64>> = tasks
        .par_iter()
        .map(|&(g, f)| {
            let opts = GnmOptions { lambda: grid[g], ..options.clone() };
            holdout_score(physical, model, evaluator, &opts, &plan.train_indices(f), &plan.test_indices(f))
                .ok()
                .map(|r| r.conventional_rmse)
        })
        .collect();

    let scores: Vec<LambdaScore> = grid
        .iter()
        .enumerate()
        .map(|(g, &lambda)| {
            let fold_scores = results[2 * g..2 * g + 2].to_vec();
            let ok: Vec<f64> = fold_scores.iter().flatten().copied().collect();
            let score = (!ok.is_empty()).then(|| ok.iter().sum::<f64>() / ok.len() as f64);
            LambdaScore { lambda, fold_scores, score }
        })
        .collect();

    let mut best: Option<(f64, f64)> = None;
    for s in &scores {
        if let Some(v) = s.score {
            let better = match best {
                None => true,
                Some((bl, bv)) => v < bv || (v == bv && s.lambda < bl),
            };
            if better {
                best = Some((s.lambda, v));
            }
        }
    }
    let (lambda, _) = best.ok_or_else(|| Error::Fit("every lambda failed on both folds".into()))?;
    Ok(LambdaSelection { lambda, scores })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub mean_rmse: f64,
    pub mean_paper_rmse: f64,
    /// Standard deviation of the conventional RMSE across repeats.
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Row with the smallest mean RMSE (ties to the smaller `lambda`).
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows.iter().fold(None, |acc: Option<&SweepRow>, r| match acc {
            Some(b) if b.mean_rmse <= r.mean_rmse => Some(b),
            _ => Some(r),
        })
    }

    pub fn row_for(&self, lambda: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.lambda == lambda)
    }
}

/// Random train/test split of the physical points, `split_ratio` of them
/// for training (at least 2, and at least 1 left for testing).
pub fn split_indices(m: usize, split_ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(split_ratio > 0.0 && split_ratio < 1.0) {
        return Err(Error::invalid(format!("split ratio {split_ratio} is not in (0, 1)")));
    }
    if m < 3 {
        return Err(Error::invalid(format!("cannot split {m} physical points")));
    }
    let n_train = ((m as f64 * split_ratio).round() as usize).clamp(2, m - 1);
    let mut order: Vec<usize> = (0..m).collect();
    Stream::derive(seed, 0x5e).shuffle(&mut order);
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Test error against `lambda` over `repeats` random splits (split `r`
/// uses seed `derive_seed(seed, r)`). Rows follow the ascending grid.
#[allow(clippy::too_many_arguments)]
pub fn sweep_lambda(
    physical: &PhysicalDataset,
    model: &ModelDataset,
    evaluator: &Arc<ResponseEvaluator>,
    grid: &[f64],
    split_ratio: f64,
    options: &GnmOptions,
    seed: u64,
    repeats: usize,
) -> Result<SweepResult> {
    check_grid(grid)?;
    let repeats = repeats.max(1);
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..repeats)
        .map(|r| split_indices(physical.len(), split_ratio, crate::rng::derive_seed(seed, r as u64)))
        .collect::<Result<_>>()?;
    let mut lambdas = grid.to_vec();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();

    let tasks: Vec<(usize, usize)> = (0..lambdas.len()).flat_map(|g| (0..repeats).map(move |r| (g, r))).collect();
    let results: Vec<Result<MetricReport>> = tasks
        .par_iter()
        .map(|&(g, r)| {
            let opts = GnmOptions { lambda: lambdas[g], ..options.clone() };
            holdout_score(physical, model, evaluator, &opts, &splits[r].0, &splits[r].1)
        })
        .collect();

    let mut rows = Vec::with_capacity(lambdas.len());
    let mut results = results.into_iter();
    for &lambda in &lambdas {
        let mut rmse = Vec::with_capacity(repeats);
        let mut paper = Vec::with_capacity(repeats);
        for res in results.by_ref().take(repeats) {
            let r = res?;
            rmse.push(r.conventional_rmse);
            paper.push(r.paper_rmse);
        }
        let (mean_rmse, std) = mean_std(&rmse);
        let (mean_paper_rmse, _) = mean_std(&paper);
        rows.push(SweepRow { lambda, mean_rmse, mean_paper_rmse, std });
    }
    Ok(SweepResult { rows })
}

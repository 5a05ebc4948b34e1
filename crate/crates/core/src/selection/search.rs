//! Cross-validated grid search with a macro one-vs-rest AUC objective.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{PgmError, Result};
use crate::metrics::MetricReport;
use crate::pgm::PgmModel;

use super::grid::{BaseSettings, Grid, GridPoint};
use super::split::{derive_seed, stratified_kfold, FoldPlan};

/// Validation scores of one (point, repetition, fold) cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub macro_auc: f64,
    pub accuracy: f64,
    pub macro_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    /// Position in grid enumeration order.
    pub index: usize,
    pub point: GridPoint,
    /// Repetition-major, fold-minor. Empty when the point failed.
    pub folds: Vec<FoldScore>,
    pub mean_auc: f64,
    pub mean_accuracy: f64,
    pub mean_macro_accuracy: f64,
    /// 0-based position in the ranking; `None` for failed points.
    pub rank: Option<usize>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearchOutcome {
    pub results: Vec<GridResult>,
    /// Indices of successful points, best first.
    pub ranking: Vec<usize>,
}

impl GridSearchOutcome {
    pub fn winner(&self) -> Option<&GridResult> {
        self.ranking.first().map(|&i| &self.results[i])
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Fits on `train`, scores `validation`, and reports the fold metrics.
pub fn evaluate_cell(
    train: &Dataset,
    validation: &Dataset,
    point: &GridPoint,
    base: &BaseSettings,
) -> Result<FoldScore> {
    let config = point.to_config(base)?;
    let model = PgmModel::fit(&train.features, &train.labels, train.n_classes(), &config)?;
    let (_, scores) = model.predict_batch(&validation.features)?;
    let report = MetricReport::compute(&validation.labels, &scores, &validation.class_names, None)?;
    let macro_auc = report
        .macro_auc
        .ok_or_else(|| PgmError::InvalidSplit("validation fold has undefined AUC".into()))?;
    Ok(FoldScore {
        macro_auc,
        accuracy: report.accuracy,
        macro_accuracy: report.macro_accuracy,
    })
}

/// Stratified `k`-fold CV, repeated `cv_repetitions` times, for every grid
/// point. Repetition `r` draws its folds with `derive_seed(seed, r)`. A point
/// whose fit fails in any cell is reported and left out of the ranking.
pub fn grid_search(
    train: &Dataset,
    grid: &Grid,
    k: usize,
    cv_repetitions: usize,
    seed: u64,
    base: &BaseSettings,
) -> Result<GridSearchOutcome> {
    grid.validate()?;
    if cv_repetitions == 0 {
        return Err(PgmError::InvalidConfig("need at least one CV repetition".into()));
    }
    let plans: Vec<FoldPlan> = (0..cv_repetitions)
        .map(|r| stratified_kfold(&train.labels, k, derive_seed(seed, r as u64)))
        .collect::<Result<_>>()?;
    let fold_data: Vec<(Dataset, Dataset)> = plans
        .iter()
        .flat_map(|plan| {
            (0..plan.k()).map(move |f| {
                Ok((
                    train.subset(&plan.training_positions(f))?,
                    train.subset(&plan.folds[f])?,
                ))
            })
        })
        .collect::<Result<_>>()?;

    let points = grid.points();
    let cells: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..fold_data.len()).map(move |f| (p, f)))
        .collect();
    let outcomes: Vec<Result<FoldScore>> = cells
        .par_iter()
        .map(|&(p, f)| {
            let (tr, va) = &fold_data[f];
            evaluate_cell(tr, va, &points[p], base)
        })
        .collect();

    let per_point = fold_data.len();
    let mut results: Vec<GridResult> = points
        .into_iter()
        .enumerate()
        .map(|(index, point)| {
            let cell_results = &outcomes[index * per_point..(index + 1) * per_point];
            let failure = cell_results
                .iter()
                .find_map(|r| r.as_ref().err().map(|e| e.to_string()));
            let folds: Vec<FoldScore> = if failure.is_some() {
                Vec::new()
            } else {
                cell_results.iter().map(|r| *r.as_ref().unwrap()).collect()
            };
            GridResult {
                index,
                point,
                mean_auc: mean(folds.iter().map(|f| f.macro_auc)),
                mean_accuracy: mean(folds.iter().map(|f| f.accuracy)),
                mean_macro_accuracy: mean(folds.iter().map(|f| f.macro_accuracy)),
                folds,
                rank: None,
                failure,
            }
        })
        .collect();

    let mut ranking: Vec<usize> = results
        .iter()
        .filter(|r| r.failure.is_none())
        .map(|r| r.index)
        .collect();
    ranking.sort_by(|&a, &b| {
        results[b]
            .mean_auc
            .total_cmp(&results[a].mean_auc)
            .then(a.cmp(&b))
    });
    for (rank, &i) in ranking.iter().enumerate() {
        results[i].rank = Some(rank);
    }
    Ok(GridSearchOutcome { results, ranking })
}

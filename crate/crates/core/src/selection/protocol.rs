//! The full evaluation protocol: per split, grid-search on the training rows,
//! refit the winner on all training rows, evaluate on the held-out rows; then
//! aggregate across splits and pick a robust configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{PgmError, Result};
use crate::metrics::MetricReport;
use crate::pgm::PgmModel;

use super::grid::{BaseSettings, Grid, GridPoint};
use super::robust::{select_robust_config, SelectionReport};
use super::search::grid_search;
use super::split::{derive_seed, SplitPlan};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub grid: Grid,
    pub k: usize,
    pub cv_repetitions: usize,
    pub base: BaseSettings,
    pub seed: u64,
    /// Class name for the binary block of two-class reports. Defaults to the
    /// second class.
    pub positive_class: Option<String>,
}

impl ProtocolConfig {
    pub fn new(grid: Grid, seed: u64) -> Self {
        Self {
            grid,
            k: 5,
            cv_repetitions: 10,
            base: BaseSettings::default(),
            seed,
            positive_class: None,
        }
    }
}

/// Resolves the positive class of a two-class problem.
pub fn resolve_positive_class(class_names: &[String], requested: Option<&str>) -> Result<Option<usize>> {
    match requested {
        Some(name) => class_names
            .iter()
            .position(|c| c == name)
            .map(Some)
            .ok_or_else(|| PgmError::InvalidConfig(format!("unknown positive class '{name}'"))),
        None if class_names.len() == 2 => Ok(Some(1)),
        None => Ok(None),
    }
}

/// Mean and sample standard deviation (0 for a single value).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl AggregateStat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std: f64::NAN, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self { mean, std, n }
    }
}

/// CV metrics of the winning point, averaged over all folds and repetitions
/// of one split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub macro_auc: f64,
    pub accuracy: f64,
    pub macro_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCellSummary {
    pub index: usize,
    pub mean_auc: f64,
    pub rank: Option<usize>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitOutcome {
    pub split_id: usize,
    pub winner: usize,
    pub winner_point: GridPoint,
    pub cv: CvSummary,
    pub test: MetricReport,
    pub grid: Vec<GridCellSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub config: ProtocolConfig,
    pub class_names: Vec<String>,
    pub splits: Vec<SplitOutcome>,
    /// Stage one averages within each split, stage two across splits.
    pub cv_summary: BTreeMap<String, AggregateStat>,
    pub test_summary: BTreeMap<String, AggregateStat>,
    pub selection: SelectionReport,
    pub chosen: GridPoint,
}

/// Runs one split and also returns the model refitted on its training rows.
pub fn run_split(
    dataset: &Dataset,
    split: &SplitPlan,
    config: &ProtocolConfig,
) -> Result<(SplitOutcome, PgmModel)> {
    split.validate(dataset.len())?;
    let positive = resolve_positive_class(&dataset.class_names, config.positive_class.as_deref())?;
    let train = dataset.subset(&split.train)?;
    let test = dataset.subset(&split.test)?;

    let search = grid_search(
        &train,
        &config.grid,
        config.k,
        config.cv_repetitions,
        derive_seed(config.seed, split.id as u64),
        &config.base,
    )?;
    let best = search
        .winner()
        .ok_or(PgmError::AllGridPointsFailed(split.id))?;

    let model_config = best.point.to_config(&config.base)?;
    let model = PgmModel::fit(&train.features, &train.labels, train.n_classes(), &model_config)?;
    let (_, scores) = model.predict_batch(&test.features)?;
    let report = MetricReport::compute(&test.labels, &scores, &test.class_names, positive)?;

    let outcome = SplitOutcome {
        split_id: split.id,
        winner: best.index,
        winner_point: best.point.clone(),
        cv: CvSummary {
            macro_auc: best.mean_auc,
            accuracy: best.mean_accuracy,
            macro_accuracy: best.mean_macro_accuracy,
        },
        test: report,
        grid: search
            .results
            .iter()
            .map(|r| GridCellSummary {
                index: r.index,
                mean_auc: r.mean_auc,
                rank: r.rank,
                failure: r.failure.clone(),
            })
            .collect(),
    };
    Ok((outcome, model))
}

pub fn run_protocol(
    dataset: &Dataset,
    splits: &[SplitPlan],
    config: &ProtocolConfig,
) -> Result<ProtocolReport> {
    if splits.is_empty() {
        return Err(PgmError::InvalidConfig("no splits given".into()));
    }
    config.grid.validate()?;
    resolve_positive_class(&dataset.class_names, config.positive_class.as_deref())?;

    let outcomes: Vec<SplitOutcome> = splits
        .iter()
        .map(|s| {
            run_split(dataset, s, config)
                .map(|(o, _)| o)
                .map_err(PgmError::in_split(s.id))
        })
        .collect::<Result<_>>()?;

    let mut cv_values: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut test_values: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for o in &outcomes {
        for (key, value) in [
            ("macro_auc", o.cv.macro_auc),
            ("accuracy", o.cv.accuracy),
            ("macro_accuracy", o.cv.macro_accuracy),
        ] {
            cv_values.entry(key.to_string()).or_default().push(value);
        }
        for (key, value) in o.test.flatten() {
            test_values.entry(key).or_default().push(value);
        }
    }
    let summarize = |m: BTreeMap<String, Vec<f64>>| {
        m.into_iter()
            .map(|(k, v)| (k, AggregateStat::of(&v)))
            .collect::<BTreeMap<_, _>>()
    };

    let winners: Vec<usize> = outcomes.iter().map(|o| o.winner).collect();
    let test_auc: Vec<Option<f64>> = outcomes.iter().map(|o| o.test.macro_auc).collect();
    let selection = select_robust_config(&winners, &test_auc)?;
    let chosen = config.grid.points()[selection.chosen].clone();

    Ok(ProtocolReport {
        config: config.clone(),
        class_names: dataset.class_names.clone(),
        splits: outcomes,
        cv_summary: summarize(cv_values),
        test_summary: summarize(test_values),
        selection,
        chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_stats() {
        let s = AggregateStat::of(&[0.5, 0.5, 0.5]);
        assert_eq!((s.mean, s.std, s.n), (0.5, 0.0, 3));
        let s = AggregateStat::of(&[1.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 2.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(AggregateStat::of(&[0.7]).std, 0.0);
    }

    #[test]
    fn positive_class_resolution() {
        let names = vec!["high".to_string(), "low".to_string()];
        assert_eq!(resolve_positive_class(&names, Some("high")).unwrap(), Some(0));
        assert_eq!(resolve_positive_class(&names, None).unwrap(), Some(1));
        assert!(resolve_positive_class(&names, Some("mid")).is_err());
        let three = vec!["a".into(), "b".into(), "c".into()];
        assert_eq!(resolve_positive_class(&three, None).unwrap(), None);
    }
}

//! Choosing one configuration from the per-split winners: highest selection
//! frequency, then highest mean test AUC, then earliest grid position.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{PgmError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolvedBy {
    Frequency,
    MeanTestAuc,
    GridOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateStats {
    pub grid_index: usize,
    pub frequency: usize,
    /// Mean test AUC over the splits this candidate won; `None` if none was defined.
    pub mean_test_auc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub per_split_winner: Vec<usize>,
    /// Every selected grid index, ascending.
    pub frequency_table: Vec<CandidateStats>,
    pub chosen: usize,
    /// Candidates still tied after the frequency stage.
    pub frequency_ties: Vec<usize>,
    /// Candidates still tied after the AUC stage.
    pub auc_ties: Vec<usize>,
    pub resolved_by: ResolvedBy,
}

/// `winners[s]` is the grid index chosen on split `s`, `test_auc[s]` the test
/// AUC it then achieved.
pub fn select_robust_config(winners: &[usize], test_auc: &[Option<f64>]) -> Result<SelectionReport> {
    if winners.is_empty() {
        return Err(PgmError::InvalidConfig("no splits to select from".into()));
    }
    if winners.len() != test_auc.len() {
        return Err(PgmError::DimMismatch {
            expected: winners.len(),
            found: test_auc.len(),
        });
    }
    let mut tally: BTreeMap<usize, (usize, Vec<f64>)> = BTreeMap::new();
    for (&w, auc) in winners.iter().zip(test_auc) {
        let entry = tally.entry(w).or_default();
        entry.0 += 1;
        if let Some(a) = auc {
            entry.1.push(*a);
        }
    }
    let frequency_table: Vec<CandidateStats> = tally
        .into_iter()
        .map(|(grid_index, (frequency, aucs))| CandidateStats {
            grid_index,
            frequency,
            mean_test_auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
        })
        .collect();

    let max_freq = frequency_table.iter().map(|c| c.frequency).max().unwrap_or(0);
    let frequency_ties: Vec<&CandidateStats> = frequency_table
        .iter()
        .filter(|c| c.frequency == max_freq)
        .collect();

    let best_auc = frequency_ties
        .iter()
        .map(|c| c.mean_test_auc.unwrap_or(f64::NEG_INFINITY))
        .fold(f64::NEG_INFINITY, f64::max);
    let auc_ties: Vec<usize> = frequency_ties
        .iter()
        .filter(|c| c.mean_test_auc.unwrap_or(f64::NEG_INFINITY) == best_auc)
        .map(|c| c.grid_index)
        .collect();

    let resolved_by = if frequency_ties.len() == 1 {
        ResolvedBy::Frequency
    } else if auc_ties.len() == 1 {
        ResolvedBy::MeanTestAuc
    } else {
        ResolvedBy::GridOrder
    };
    // the table is ascending by grid index, so the first tie is the earliest point
    let chosen = auc_ties[0];

    Ok(SelectionReport {
        per_split_winner: winners.to_vec(),
        frequency_ties: frequency_ties.iter().map(|c| c.grid_index).collect(),
        auc_ties,
        frequency_table,
        chosen,
        resolved_by,
    })
}

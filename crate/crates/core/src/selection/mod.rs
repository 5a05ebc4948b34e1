//! Model selection: stratified splits, cross-validated grid search and the
//! frequency-then-AUC choice of a robust configuration.

mod grid;
mod protocol;
mod robust;
mod search;
mod split;

pub use grid::{BaseSettings, Grid, GridPoint};
pub use protocol::{
    resolve_positive_class, run_protocol, run_split, AggregateStat, CvSummary, GridCellSummary,
    ProtocolConfig, ProtocolReport, SplitOutcome,
};
pub use robust::{select_robust_config, CandidateStats, ResolvedBy, SelectionReport};
pub use search::{evaluate_cell, grid_search, FoldScore, GridResult, GridSearchOutcome};
pub use split::{derive_seed, stratified_holdout, stratified_kfold, FoldPlan, SplitPlan};

use thiserror::Error;

pub type Result<T, E = PgmError> = std::result::Result<T, E>;

/// Errors raised by the library.
///
/// Variants are grouped by what went wrong rather than where; [`PgmError::is_usage`]
/// separates configuration mistakes from data/consistency problems.
#[derive(Debug, Error)]
pub enum PgmError {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("operator is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("dense operator of dimension {base}^{copies} exceeds limit {limit}; use the Gram engine")]
    DenseBlowup { base: usize, copies: u32, limit: usize },

    #[error("rescaling factor must be positive, got {0}")]
    InvalidAlpha(f64),

    #[error("non-finite feature value at position {0}")]
    NonFiniteFeature(usize),

    #[error("class {0} has no training samples")]
    EmptyClass(usize),

    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("stratification impossible: class {class} has {count} sample(s), need at least {needed}")]
    StratificationImpossible { class: usize, count: usize, needed: usize },

    #[error("class {class} has {count} sample(s), fewer than k = {k}")]
    ClassSmallerThanK { class: usize, count: usize, k: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no samples to evaluate")]
    EmptyEvaluation,

    #[error("class sets differ: {0}")]
    ClassSetMismatch(String),

    #[error("metric sets differ: {0}")]
    MetricSetMismatch(String),

    #[error("invalid split plan: {0}")]
    InvalidSplit(String),

    #[error("dataset fingerprint mismatch: split file expects {expected}, dataset has {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("every grid point failed on split {0}")]
    AllGridPointsFailed(usize),

    #[error("split {split}: {source}")]
    InSplit {
        split: usize,
        #[source]
        source: Box<PgmError>,
    },

    #[error("item {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<PgmError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl PgmError {
    pub fn at_index(index: usize) -> impl FnOnce(PgmError) -> PgmError {
        move |source| PgmError::AtIndex {
            index,
            source: Box::new(source),
        }
    }

    pub fn in_split(split: usize) -> impl FnOnce(PgmError) -> PgmError {
        move |source| PgmError::InSplit {
            split,
            source: Box::new(source),
        }
    }

    /// Peels off index/split context.
    pub fn root(&self) -> &PgmError {
        match self {
            PgmError::InSplit { source, .. } | PgmError::AtIndex { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for configuration or usage mistakes, as opposed to data problems.
    pub fn is_usage(&self) -> bool {
        matches!(
            self.root(),
            PgmError::InvalidAlpha(_) | PgmError::InvalidConfig(_) | PgmError::InvalidPriors(_)
        )
    }
}

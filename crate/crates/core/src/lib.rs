//! Multi-class classification with the Pretty Good Measurement.
//!
//! Feature vectors are encoded as pure states, each class is summarized by its
//! quantum centroid, and a single square-root measurement built from the class
//! ensemble scores new samples through Born's rule. The crate also carries the
//! model-selection harness (stratified splits, cross-validated grid search,
//! robust configuration choice), the metric suite, and the file formats used by
//! the `pgm` command-line tool.

pub mod dataset;
pub mod encoding;
pub mod error;
pub mod io;
pub mod metrics;
pub mod operator;
pub mod pgm;
pub mod selection;

pub use dataset::Dataset;
pub use encoding::{EncodingConfig, EncodingKind, FeatureVector, NormalizerKind, NormalizerParams, PureState};
pub use error::{PgmError, Result};
pub use metrics::MetricReport;
pub use pgm::{EngineChoice, EngineKind, PgmConfig, PgmModel, PriorsMode, ScoreVector};

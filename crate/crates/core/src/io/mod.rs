//! File formats: CSV datasets, split files, model files and reports.

pub mod compare;
pub mod model;
pub mod report;
pub mod splits;
pub mod table;

pub use compare::{compare_reports, Comparison};
pub use model::{ModelFile, ModelPayload};
pub use report::{read_rows, rows_to_csv, to_pretty_json, EvaluationReportFile, GridsearchReportFile, LongRow, ModelEcho};
pub use splits::{fingerprint_bytes, fingerprint_file, Fingerprint, SplitFile};
pub use table::{read_dataset, Table, DEFAULT_LABEL_COLUMN};

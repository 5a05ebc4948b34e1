//! Report files: nested JSON plus a long-format CSV with one
//! `split,metric,class,value` row per number.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoding::EncodingConfig;
use crate::error::{PgmError, Result};
use crate::metrics::MetricReport;
use crate::pgm::{EngineKind, PriorsMode};
use crate::selection::ProtocolReport;

use super::splits::Fingerprint;

pub const REPORT_FORMAT: &str = "pgm-report/1";

/// Split label used by single-evaluation reports.
pub const EVALUATION_SPLIT: &str = "all";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridsearchReportFile {
    pub format: String,
    pub dataset: Fingerprint,
    pub split_file: Fingerprint,
    pub protocol: ProtocolReport,
}

impl GridsearchReportFile {
    pub fn new(dataset: Fingerprint, split_file: Fingerprint, protocol: ProtocolReport) -> Self {
        Self {
            format: REPORT_FORMAT.to_string(),
            dataset,
            split_file,
            protocol,
        }
    }

    pub fn rows(&self) -> Vec<LongRow> {
        self.protocol
            .splits
            .iter()
            .flat_map(|s| metric_rows(&s.split_id.to_string(), &s.test))
            .collect()
    }
}

/// What was evaluated, echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub engine: EngineKind,
    pub encoding: EncodingConfig,
    pub copies: u32,
    pub priors: PriorsMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReportFile {
    pub format: String,
    pub dataset: Fingerprint,
    pub model: ModelEcho,
    pub positive_class: Option<String>,
    pub report: MetricReport,
}

impl EvaluationReportFile {
    pub fn new(
        dataset: Fingerprint,
        model: ModelEcho,
        positive_class: Option<String>,
        report: MetricReport,
    ) -> Self {
        Self {
            format: REPORT_FORMAT.to_string(),
            dataset,
            model,
            positive_class,
            report,
        }
    }

    pub fn rows(&self) -> Vec<LongRow> {
        metric_rows(EVALUATION_SPLIT, &self.report)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongRow {
    pub split: String,
    pub metric: String,
    /// Empty for whole-report metrics.
    pub class: String,
    pub value: f64,
}

pub fn metric_rows(split: &str, report: &MetricReport) -> Vec<LongRow> {
    report
        .entries()
        .into_iter()
        .map(|e| LongRow {
            split: split.to_string(),
            metric: e.metric,
            class: e.class.unwrap_or_default(),
            value: e.value,
        })
        .collect()
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn rows_to_csv(rows: &[LongRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["split", "metric", "class", "value"])?;
    for r in rows {
        w.write_record([&r.split, &r.metric, &r.class, &r.value.to_string()])?;
    }
    into_string(w)
}

pub(crate) fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| PgmError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| PgmError::Parse(e.to_string()))
}

pub fn rows_from_csv(bytes: &[u8]) -> Result<Vec<LongRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if headers != ["split", "metric", "class", "value"] {
        return Err(PgmError::Schema(format!(
            "report CSV header must be split,metric,class,value; found {}",
            headers.join(",")
        )));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| PgmError::Parse(format!("report row {}: {e}", i + 1))))
        .collect()
}

/// Reads a long-format report; a directory means its `report.csv`.
pub fn read_rows(path: &Path) -> Result<Vec<LongRow>> {
    let file = if path.is_dir() {
        path.join("report.csv")
    } else {
        path.to_path_buf()
    };
    rows_from_csv(&std::fs::read(file)?)
}

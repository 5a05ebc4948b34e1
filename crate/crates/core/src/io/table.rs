//! CSV feature tables: comma-separated, header mandatory, one label column,
//! every other column a real-valued feature.

use std::collections::BTreeSet;
use std::path::Path;

use crate::dataset::Dataset;
use crate::encoding::FeatureVector;
use crate::error::{PgmError, Result};

pub const DEFAULT_LABEL_COLUMN: &str = "label";

/// Raw cells of a CSV file. Row numbers in diagnostics are 1-based data rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(bytes);
        let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(PgmError::Schema("CSV header is missing".into()));
        }
        let mut seen = BTreeSet::new();
        for h in &headers {
            if h.is_empty() {
                return Err(PgmError::Schema("CSV header has an empty column name".into()));
            }
            if !seen.insert(h.as_str()) {
                return Err(PgmError::Schema(format!("duplicate column '{h}'")));
            }
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| PgmError::Parse(format!("row {}: {e}", i + 1)))?;
            rows.push(record.iter().map(|c| c.trim().to_string()).collect());
        }
        Ok(Self { headers, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read(path)?)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn numeric(&self, row: usize, col: usize) -> Result<f64> {
        let cell = &self.rows[row][col];
        let name = &self.headers[col];
        if cell.is_empty() {
            return Err(PgmError::Parse(format!(
                "missing value at row {}, column '{name}'",
                row + 1
            )));
        }
        let v: f64 = cell.parse().map_err(|_| {
            PgmError::Parse(format!(
                "non-numeric value '{cell}' at row {}, column '{name}'",
                row + 1
            ))
        })?;
        if !v.is_finite() {
            return Err(PgmError::Parse(format!(
                "non-finite value '{cell}' at row {}, column '{name}'",
                row + 1
            )));
        }
        Ok(v)
    }

    /// Feature rows for the named columns, in the given column order.
    pub fn features(&self, names: &[String]) -> Result<Vec<FeatureVector>> {
        let cols = names
            .iter()
            .map(|n| {
                self.column(n)
                    .ok_or_else(|| PgmError::Schema(format!("missing feature column '{n}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        (0..self.rows.len())
            .map(|r| {
                let values = cols
                    .iter()
                    .map(|&c| self.numeric(r, c))
                    .collect::<Result<Vec<_>>>()?;
                FeatureVector::new(values)
            })
            .collect()
    }

    /// Every column except `label_column`, in file order.
    pub fn feature_names(&self, label_column: &str) -> Vec<String> {
        self.headers
            .iter()
            .filter(|h| *h != label_column)
            .cloned()
            .collect()
    }

    pub fn labels(&self, label_column: &str) -> Result<Vec<String>> {
        let col = self
            .column(label_column)
            .ok_or_else(|| PgmError::Schema(format!("missing label column '{label_column}'")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let v = &row[col];
                if v.is_empty() {
                    Err(PgmError::Parse(format!(
                        "missing value at row {}, column '{label_column}'",
                        r + 1
                    )))
                } else {
                    Ok(v.clone())
                }
            })
            .collect()
    }

    /// Labeled dataset; class names are the sorted distinct labels.
    pub fn to_dataset(&self, label_column: &str) -> Result<Dataset> {
        let raw = self.labels(label_column)?;
        let classes: Vec<String> = raw.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        self.to_dataset_with_classes(label_column, &self.feature_names(label_column), &classes)
    }

    /// Labeled dataset against a fixed class dictionary and feature order, as
    /// used when applying a saved model.
    pub fn to_dataset_with_classes(
        &self,
        label_column: &str,
        feature_names: &[String],
        class_names: &[String],
    ) -> Result<Dataset> {
        let raw = self.labels(label_column)?;
        let labels = raw
            .iter()
            .enumerate()
            .map(|(r, l)| {
                class_names.iter().position(|c| c == l).ok_or_else(|| {
                    PgmError::ClassSetMismatch(format!("row {}: unknown class '{l}'", r + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let features = self.features(feature_names)?;
        Dataset::new(feature_names.to_vec(), class_names.to_vec(), features, labels)
    }
}

/// Reads a labeled dataset from a CSV file.
pub fn read_dataset(path: &Path, label_column: &str) -> Result<Dataset> {
    Table::read(path)?.to_dataset(label_column)
}

/// Requires at least two classes, as every training command does.
pub fn require_classes(dataset: &Dataset) -> Result<()> {
    if dataset.n_classes() < 2 {
        return Err(PgmError::Schema(format!(
            "need at least 2 distinct labels, found {}",
            dataset.n_classes()
        )));
    }
    Ok(())
}

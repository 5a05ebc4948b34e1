use crate::encoding::FeatureVector;
use crate::error::{PgmError, Result};

/// A labeled feature table. Labels index into `class_names`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub features: Vec<FeatureVector>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        class_names: Vec<String>,
        features: Vec<FeatureVector>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(PgmError::DimMismatch {
                expected: features.len(),
                found: labels.len(),
            });
        }
        let d = feature_names.len();
        for (i, x) in features.iter().enumerate() {
            if x.len() != d {
                return Err(PgmError::at_index(i)(PgmError::DimMismatch {
                    expected: d,
                    found: x.len(),
                }));
            }
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(PgmError::LabelOutOfRange {
                label,
                n_classes: class_names.len(),
            });
        }
        Ok(Self {
            feature_names,
            class_names,
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    /// Rows at `indices`, in that order. Class names are kept as-is.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut features = Vec::with_capacity(indices.len());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(PgmError::InvalidSplit(format!(
                    "row index {i} out of range for {} rows",
                    self.len()
                )));
            }
            features.push(self.features[i].clone());
            labels.push(self.labels[i]);
        }
        Ok(Dataset {
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
            features,
            labels,
        })
    }
}

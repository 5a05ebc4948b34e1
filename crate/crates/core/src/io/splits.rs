//! Dataset fingerprints and the JSON split file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{PgmError, Result};
use crate::selection::SplitPlan;

pub const FINGERPRINT_ALGORITHM: &str = "sha256-lf";
pub const SPLIT_FORMAT: &str = "pgm-splits/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub algorithm: String,
    pub digest: String,
}

/// SHA-256 of the file bytes with a leading BOM dropped and CRLF/CR line
/// endings rewritten to LF.
pub fn fingerprint_bytes(bytes: &[u8]) -> Fingerprint {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let mut canonical = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\r' => {
                canonical.push(b'\n');
                if bytes.get(i + 1) == Some(&b'\n') {
                    i += 1;
                }
            }
            b => canonical.push(b),
        }
        i += 1;
    }
    Fingerprint {
        algorithm: FINGERPRINT_ALGORITHM.to_string(),
        digest: hex::encode(Sha256::digest(&canonical)),
    }
}

pub fn fingerprint_file(path: &Path) -> Result<Fingerprint> {
    Ok(fingerprint_bytes(&std::fs::read(path)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitFile {
    pub format: String,
    pub fingerprint: Fingerprint,
    pub n_samples: usize,
    /// Master seed, absent for imported splits.
    pub seed: Option<u64>,
    pub test_fraction: Option<f64>,
    /// How the repetitions were produced, e.g. `stratified_holdout`.
    pub provenance: String,
    pub repetitions: Vec<SplitPlan>,
}

impl SplitFile {
    pub fn new(
        fingerprint: Fingerprint,
        n_samples: usize,
        seed: Option<u64>,
        test_fraction: Option<f64>,
        provenance: impl Into<String>,
        repetitions: Vec<SplitPlan>,
    ) -> Self {
        Self {
            format: SPLIT_FORMAT.to_string(),
            fingerprint,
            n_samples,
            seed,
            test_fraction,
            provenance: provenance.into(),
            repetitions,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != SPLIT_FORMAT {
            return Err(PgmError::Schema(format!(
                "unsupported split format '{}'",
                self.format
            )));
        }
        if self.repetitions.is_empty() {
            return Err(PgmError::InvalidSplit("split file has no repetitions".into()));
        }
        for r in &self.repetitions {
            r.validate(self.n_samples)?;
        }
        Ok(())
    }

    /// Rejects a split file that was made for different dataset bytes.
    pub fn check_dataset(&self, dataset_fingerprint: &Fingerprint, n_samples: usize) -> Result<()> {
        if self.fingerprint != *dataset_fingerprint {
            return Err(PgmError::FingerprintMismatch {
                expected: format!("{}:{}", self.fingerprint.algorithm, self.fingerprint.digest),
                found: format!(
                    "{}:{}",
                    dataset_fingerprint.algorithm, dataset_fingerprint.digest
                ),
            });
        }
        if self.n_samples != n_samples {
            return Err(PgmError::DimMismatch {
                expected: self.n_samples,
                found: n_samples,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

//! JSON model files. Numbers are written in shortest round-trip decimal form,
//! so a reloaded model scores bit-for-bit like the one that was saved.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::encoding::{EncodingConfig, NormalizerParams, PureState};
use crate::error::{PgmError, Result};
use crate::operator::SymmetricOperator;
use crate::pgm::{DensePgm, GramPgm, PgmEngine, PgmModel, Priors};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "lowercase")]
pub enum ModelPayload {
    Dense {
        state_dim: usize,
        /// One row-major matrix per class.
        povm: Vec<Vec<f64>>,
    },
    Gram {
        states: Vec<Vec<f64>>,
        weights: Vec<f64>,
        labels: Vec<usize>,
        /// Row-major `G^{-1/2}`.
        inv_sqrt: Vec<f64>,
        /// Row-major `G⁺`.
        pinv: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub encoding: EncodingConfig,
    pub normalizer: NormalizerParams,
    pub priors: Priors,
    pub copies: u32,
    pub rank_tol: f64,
    pub payload: ModelPayload,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn square_from(data: &[f64], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if data.len() != n * n {
        return Err(PgmError::Schema(format!(
            "{what}: expected {} entries, found {}",
            n * n,
            data.len()
        )));
    }
    Ok(DMatrix::from_row_slice(n, n, data))
}

impl ModelFile {
    pub fn from_model(model: &PgmModel, class_names: &[String], feature_names: &[String]) -> Result<Self> {
        if class_names.len() != model.n_classes() {
            return Err(PgmError::DimMismatch {
                expected: model.n_classes(),
                found: class_names.len(),
            });
        }
        if feature_names.len() != model.n_features() {
            return Err(PgmError::DimMismatch {
                expected: model.n_features(),
                found: feature_names.len(),
            });
        }
        let payload = match &model.engine {
            PgmEngine::Dense(d) => ModelPayload::Dense {
                state_dim: d.state_dim(),
                povm: d.povm().iter().map(SymmetricOperator::to_row_major).collect(),
            },
            PgmEngine::Gram(g) => ModelPayload::Gram {
                states: g.states().iter().map(|s| s.amplitudes().to_vec()).collect(),
                weights: g.weights().to_vec(),
                labels: g.labels().to_vec(),
                inv_sqrt: row_major(g.inv_sqrt()),
                pinv: row_major(g.pinv()),
            },
        };
        Ok(Self {
            format_version: MODEL_FORMAT_VERSION,
            class_names: class_names.to_vec(),
            feature_names: feature_names.to_vec(),
            encoding: model.encoding.clone(),
            normalizer: model.normalizer.clone(),
            priors: model.priors.clone(),
            copies: model.copies(),
            rank_tol: model.rank_tol,
            payload,
        })
    }

    pub fn to_model(&self) -> Result<PgmModel> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(PgmError::Schema(format!(
                "unsupported model format version {}",
                self.format_version
            )));
        }
        self.encoding.validate()?;
        let n_classes = self.class_names.len();
        if self.priors.len() != n_classes {
            return Err(PgmError::Schema(format!(
                "{} priors for {n_classes} classes",
                self.priors.len()
            )));
        }
        if self.normalizer.dim() != self.feature_names.len() {
            return Err(PgmError::Schema(format!(
                "normalizer has {} features, header lists {}",
                self.normalizer.dim(),
                self.feature_names.len()
            )));
        }
        let state_dim = self.feature_names.len() + 1;
        let engine = match &self.payload {
            ModelPayload::Dense { state_dim: sd, povm } => {
                if *sd != state_dim {
                    return Err(PgmError::Schema(format!(
                        "state dimension {sd} does not match {} features",
                        self.feature_names.len()
                    )));
                }
                if povm.len() != n_classes {
                    return Err(PgmError::Schema(format!(
                        "{} POVM elements for {n_classes} classes",
                        povm.len()
                    )));
                }
                let lifted = state_dim
                    .checked_pow(self.copies)
                    .ok_or_else(|| PgmError::Schema("lifted dimension overflows".into()))?;
                let elements = povm
                    .iter()
                    .map(|e| SymmetricOperator::new(square_from(e, lifted, "POVM element")?))
                    .collect::<Result<Vec<_>>>()?;
                PgmEngine::Dense(DensePgm::from_parts(elements, self.copies, state_dim)?)
            }
            ModelPayload::Gram {
                states,
                weights,
                labels,
                inv_sqrt,
                pinv,
            } => {
                let m = states.len();
                let states = states
                    .iter()
                    .map(|s| {
                        if s.len() != state_dim {
                            return Err(PgmError::Schema(format!(
                                "training state of length {} for state dimension {state_dim}",
                                s.len()
                            )));
                        }
                        PureState::new(s.clone())
                    })
                    .collect::<Result<Vec<_>>>()?;
                PgmEngine::Gram(GramPgm::from_parts(
                    states,
                    weights.clone(),
                    labels.clone(),
                    n_classes,
                    self.copies,
                    square_from(inv_sqrt, m, "inv_sqrt")?,
                    square_from(pinv, m, "pinv")?,
                )?)
            }
        };
        if engine.n_classes() != n_classes {
            return Err(PgmError::Schema("engine class count disagrees with labels".into()));
        }
        Ok(PgmModel {
            encoding: self.encoding.clone(),
            normalizer: self.normalizer.clone(),
            priors: self.priors.clone(),
            rank_tol: self.rank_tol,
            engine,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

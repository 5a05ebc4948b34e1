use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::encoding::PureState;
use crate::error::{PgmError, Result};
use crate::operator::{dense_dim, tensor_power, DensityOperator, SymmetricOperator};

/// Encoded training set: pure states with class indices in `0..n_classes`.
#[derive(Clone, Debug)]
pub struct LabeledStateSet {
    states: Vec<PureState>,
    labels: Vec<usize>,
    class_counts: Vec<usize>,
}

impl LabeledStateSet {
    /// Every class in `0..n_classes` must have at least one state.
    pub fn new(states: Vec<PureState>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if states.len() != labels.len() {
            return Err(PgmError::DimMismatch {
                expected: states.len(),
                found: labels.len(),
            });
        }
        if n_classes == 0 {
            return Err(PgmError::InvalidConfig("need at least one class".into()));
        }
        let dim = states.first().map(PureState::dim).unwrap_or(0);
        let mut class_counts = vec![0; n_classes];
        for (i, (state, &label)) in states.iter().zip(&labels).enumerate() {
            if label >= n_classes {
                return Err(PgmError::LabelOutOfRange { label, n_classes });
            }
            if state.dim() != dim {
                return Err(PgmError::at_index(i)(PgmError::DimMismatch {
                    expected: dim,
                    found: state.dim(),
                }));
            }
            class_counts[label] += 1;
        }
        if let Some(empty) = class_counts.iter().position(|&c| c == 0) {
            return Err(PgmError::EmptyClass(empty));
        }
        Ok(Self {
            states,
            labels,
            class_counts,
        })
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dimension of each encoded state (`d + 1`).
    pub fn state_dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn class_states(&self, class: usize) -> impl Iterator<Item = &PureState> {
        self.states
            .iter()
            .zip(&self.labels)
            .filter(move |(_, &l)| l == class)
            .map(|(s, _)| s)
    }
}

/// How class priors are chosen.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "values", rename_all = "lowercase")]
pub enum PriorsMode {
    #[default]
    Uniform,
    /// Class frequencies `mᵢ/m` of the training set.
    Empirical,
    Explicit(Vec<f64>),
}

impl fmt::Display for PriorsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorsMode::Uniform => f.write_str("uniform"),
            PriorsMode::Empirical => f.write_str("empirical"),
            PriorsMode::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|p| p.to_string()).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for PriorsMode {
    type Err = PgmError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "uniform" => return Ok(PriorsMode::Uniform),
            "empirical" => return Ok(PriorsMode::Empirical),
            _ => {}
        }
        let values = s
            .strip_prefix("explicit:")
            .ok_or_else(|| PgmError::InvalidPriors(format!("unknown priors mode '{s}'")))?;
        values
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| PgmError::InvalidPriors(format!("bad prior value '{v}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(PriorsMode::Explicit)
    }
}

/// Resolved class priors: positive and summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    pub mode: PriorsMode,
    pub values: Vec<f64>,
}

impl Priors {
    pub fn resolve(mode: &PriorsMode, class_counts: &[usize]) -> Result<Self> {
        let n = class_counts.len();
        if n == 0 {
            return Err(PgmError::InvalidPriors("no classes".into()));
        }
        let values = match mode {
            PriorsMode::Uniform => vec![1.0 / n as f64; n],
            PriorsMode::Empirical => {
                let total: usize = class_counts.iter().sum();
                if class_counts.contains(&0) {
                    return Err(PgmError::InvalidPriors("empty class under empirical priors".into()));
                }
                class_counts
                    .iter()
                    .map(|&c| c as f64 / total as f64)
                    .collect()
            }
            PriorsMode::Explicit(v) => {
                if v.len() != n {
                    return Err(PgmError::InvalidPriors(format!(
                        "{} priors given for {n} classes",
                        v.len()
                    )));
                }
                if v.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
                    return Err(PgmError::InvalidPriors("priors must be positive".into()));
                }
                let sum: f64 = v.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(PgmError::InvalidPriors(format!("priors sum to {sum}, not 1")));
                }
                v.iter().map(|p| p / sum).collect()
            }
        };
        Ok(Self {
            mode: mode.clone(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `(1/m) Σ ψψᵀ`
pub fn quantum_centroid(states: &[PureState]) -> Result<DensityOperator> {
    copies_centroid(states, 1, usize::MAX)
}

/// `(1/m) Σ (ψ^{⊗n})(ψ^{⊗n})ᵀ`. In general this differs from the n-th
/// tensor power of [`quantum_centroid`].
pub fn copies_centroid(states: &[PureState], copies: u32, limit: usize) -> Result<DensityOperator> {
    centroid_of(states.iter(), copies, limit)
}

pub(crate) fn centroid_of<'a>(
    states: impl Iterator<Item = &'a PureState>,
    copies: u32,
    limit: usize,
) -> Result<DensityOperator> {
    let lifted: Vec<Vec<f64>> = states
        .map(|s| tensor_power(s.amplitudes(), copies, limit))
        .collect::<Result<_>>()?;
    let Some(first) = lifted.first() else {
        return Err(PgmError::EmptyClass(0));
    };
    let dim = first.len();
    if let Some(bad) = lifted.iter().find(|v| v.len() != dim) {
        return Err(PgmError::DimMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let m = lifted.len();
    let columns = DMatrix::from_fn(dim, m, |i, j| lifted[j][i]);
    let sum = &columns * columns.transpose();
    Ok(DensityOperator::new_unchecked(SymmetricOperator::symmetrized(
        sum / m as f64,
    )))
}

/// Class representatives with priors, `{(pᵢ, ρ⁽ⁱ⁾)}`.
#[derive(Clone, Debug)]
pub struct ClassEnsemble {
    pub reps: Vec<DensityOperator>,
    pub priors: Priors,
    pub copies: u32,
}

impl ClassEnsemble {
    pub fn new(reps: Vec<DensityOperator>, priors: Priors, copies: u32) -> Result<Self> {
        if reps.len() != priors.len() {
            return Err(PgmError::DimMismatch {
                expected: priors.len(),
                found: reps.len(),
            });
        }
        Ok(Self {
            reps,
            priors,
            copies,
        })
    }

    /// Centroid of each class lifted to `copies` tensor copies.
    pub fn from_states(
        train: &LabeledStateSet,
        priors: Priors,
        copies: u32,
        limit: usize,
    ) -> Result<Self> {
        dense_dim(train.state_dim(), copies, limit)?;
        let reps = (0..train.n_classes())
            .map(|c| {
                centroid_of(train.class_states(c), copies, limit).map_err(|e| match e {
                    PgmError::EmptyClass(_) => PgmError::EmptyClass(c),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(reps, priors, copies)
    }

    pub fn n_classes(&self) -> usize {
        self.reps.len()
    }

    pub fn dim(&self) -> usize {
        self.reps[0].dim()
    }
}

/// `σ = Σ pᵢ ρ⁽ⁱ⁾`
pub fn mixture(ensemble: &ClassEnsemble) -> Result<DensityOperator> {
    let dim = ensemble.dim();
    let mut sigma = SymmetricOperator::zeros(dim);
    for (rep, &p) in ensemble.reps.iter().zip(&ensemble.priors.values) {
        sigma.add_scaled_assign(p, rep.op())?;
    }
    Ok(DensityOperator::new_unchecked(sigma))
}

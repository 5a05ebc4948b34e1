//! Gram-space form of the PGM.
//!
//! With pure training states the mixture factors as `σ = A Aᵀ`, where column
//! `j` of `A` is `√wⱼ ψⱼ^{⊗n}` and `wⱼ = p_{λⱼ}/m_{λⱼ}`. Writing `G = AᵀA` gives
//! `σ^{-1/2} A = A G^{-1/2}` on the support, hence
//!
//! ```text
//! fᵢ(x) = Σ_{j: λⱼ = i} uⱼ²  +  (1 − vᵀ G⁺ v) / ℓ,
//! vⱼ = √wⱼ ⟨ψⱼ|ψₓ⟩ⁿ,   u = G^{-1/2} v.
//! ```
//!
//! Only `m × m` objects are formed, so the cost is independent of `(d+1)^n`.

use nalgebra::{DMatrix, DVector};

use crate::encoding::{dot, PureState};
use crate::error::{PgmError, Result};
use crate::operator::{eig_sym, SymmetricOperator};

use super::ensemble::{LabeledStateSet, Priors};
use super::ScoreVector;

/// `c^n` evaluated as `sign(c)^n · exp(n·ln|c|)`; `|c| < 1e-300` maps to 0.
pub fn overlap_power(c: f64, copies: u32) -> f64 {
    let mag = c.abs();
    if mag < 1e-300 {
        return 0.0;
    }
    let value = (f64::from(copies) * mag.ln()).exp();
    if c < 0.0 && copies % 2 == 1 {
        -value
    } else {
        value
    }
}

#[derive(Clone, Debug)]
pub struct GramPgm {
    states: Vec<PureState>,
    weights: Vec<f64>,
    labels: Vec<usize>,
    n_classes: usize,
    copies: u32,
    /// `G^{-1/2}` (pseudoinverse root)
    inv_sqrt: DMatrix<f64>,
    /// `G⁺`
    pinv: DMatrix<f64>,
}

impl GramPgm {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        states: Vec<PureState>,
        weights: Vec<f64>,
        labels: Vec<usize>,
        n_classes: usize,
        copies: u32,
        inv_sqrt: DMatrix<f64>,
        pinv: DMatrix<f64>,
    ) -> Result<Self> {
        let m = states.len();
        if m == 0 {
            return Err(PgmError::InvalidConfig("Gram model has no training states".into()));
        }
        if weights.len() != m || labels.len() != m {
            return Err(PgmError::DimMismatch {
                expected: m,
                found: weights.len().min(labels.len()),
            });
        }
        if inv_sqrt.shape() != (m, m) || pinv.shape() != (m, m) {
            return Err(PgmError::DimMismatch {
                expected: m,
                found: inv_sqrt.nrows(),
            });
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(PgmError::LabelOutOfRange { label, n_classes });
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(PgmError::DimMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if copies == 0 {
            return Err(PgmError::InvalidConfig("copies must be at least 1".into()));
        }
        Ok(Self {
            states,
            weights,
            labels,
            n_classes,
            copies,
            inv_sqrt,
            pinv,
        })
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn state_dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn inv_sqrt(&self) -> &DMatrix<f64> {
        &self.inv_sqrt
    }

    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn score_state(&self, psi: &PureState) -> Result<ScoreVector> {
        if psi.dim() != self.state_dim() {
            return Err(PgmError::DimMismatch {
                expected: self.state_dim(),
                found: psi.dim(),
            });
        }
        let v = DVector::from_iterator(
            self.states.len(),
            self.states.iter().zip(&self.weights).map(|(s, &w)| {
                w.sqrt() * overlap_power(dot(s.amplitudes(), psi.amplitudes()), self.copies)
            }),
        );
        let u = &self.inv_sqrt * &v;
        let in_image = v.dot(&(&self.pinv * &v));
        let kernel_share = (1.0 - in_image) / self.n_classes as f64;

        let mut scores = vec![kernel_share; self.n_classes];
        for (uj, &label) in u.iter().zip(&self.labels) {
            scores[label] += uj * uj;
        }
        Ok(ScoreVector::new(scores))
    }
}

/// Weighted Gram matrix `G_jk = √(wⱼ w_k) ⟨ψⱼ|ψ_k⟩ⁿ`.
pub fn weighted_gram(states: &[PureState], weights: &[f64], copies: u32) -> SymmetricOperator {
    let m = states.len();
    let mut g = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in 0..=j {
            let c = dot(states[j].amplitudes(), states[k].amplitudes());
            let value = (weights[j] * weights[k]).sqrt() * overlap_power(c, copies);
            g[(j, k)] = value;
            g[(k, j)] = value;
        }
    }
    SymmetricOperator::symmetrized(g)
}

pub fn build_gram_pgm(
    train: &LabeledStateSet,
    priors: &Priors,
    copies: u32,
    rank_tol: f64,
) -> Result<GramPgm> {
    if !(rank_tol > 0.0) {
        return Err(PgmError::InvalidConfig(format!(
            "rank tolerance must be positive, got {rank_tol}"
        )));
    }
    if copies == 0 {
        return Err(PgmError::InvalidConfig("copies must be at least 1".into()));
    }
    if priors.len() != train.n_classes() {
        return Err(PgmError::DimMismatch {
            expected: train.n_classes(),
            found: priors.len(),
        });
    }
    let weights: Vec<f64> = train
        .labels()
        .iter()
        .map(|&l| priors.values[l] / train.class_counts()[l] as f64)
        .collect();
    let gram = weighted_gram(train.states(), &weights, copies);
    let spectral = eig_sym(&gram)?;
    spectral.check_psd()?;
    let cut = spectral.rank_cutoff(rank_tol);
    let kept = |l: f64| l > cut && l > 0.0;
    let inv_sqrt = spectral.map(|l| if kept(l) { 1.0 / l.sqrt() } else { 0.0 });
    let pinv = spectral.map(|l| if kept(l) { 1.0 / l } else { 0.0 });

    GramPgm::from_parts(
        train.states().to_vec(),
        weights,
        train.labels().to_vec(),
        train.n_classes(),
        copies,
        inv_sqrt.matrix().clone(),
        pinv.matrix().clone(),
    )
}

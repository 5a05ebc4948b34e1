//! Explicit POVM construction in the lifted operator space.
//!
//! Practical only while `(d+1)^n` stays small; it is kept as the reference
//! implementation the Gram engine is checked against.

use crate::encoding::PureState;
use crate::error::{PgmError, Result};
use crate::operator::{pinv_sqrt, tensor_power, SymmetricOperator};

use super::ensemble::{mixture, ClassEnsemble, LabeledStateSet, Priors};
use super::ScoreVector;

/// POVM elements `Fᵢ = σ^{-1/2} pᵢ ρᵢ σ^{-1/2} + P_ker(σ)/ℓ`.
#[derive(Clone, Debug)]
pub struct DensePgm {
    povm: Vec<SymmetricOperator>,
    copies: u32,
    state_dim: usize,
}

impl DensePgm {
    pub fn from_parts(povm: Vec<SymmetricOperator>, copies: u32, state_dim: usize) -> Result<Self> {
        let Some(first) = povm.first() else {
            return Err(PgmError::InvalidConfig("POVM has no elements".into()));
        };
        let expected = state_dim
            .checked_pow(copies)
            .ok_or_else(|| PgmError::InvalidConfig("lifted dimension overflows".into()))?;
        for f in &povm {
            if f.dim() != expected || f.dim() != first.dim() {
                return Err(PgmError::DimMismatch {
                    expected,
                    found: f.dim(),
                });
            }
        }
        Ok(Self {
            povm,
            copies,
            state_dim,
        })
    }

    pub fn povm(&self) -> &[SymmetricOperator] {
        &self.povm
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn n_classes(&self) -> usize {
        self.povm.len()
    }

    pub fn lifted_dim(&self) -> usize {
        self.povm[0].dim()
    }

    /// `‖Σ Fᵢ − I‖_max`
    pub fn completeness_error(&self) -> f64 {
        let mut sum = SymmetricOperator::zeros(self.lifted_dim());
        for f in &self.povm {
            sum.add_scaled_assign(1.0, f).expect("dims checked at construction");
        }
        sum.max_abs_diff(&SymmetricOperator::identity(self.lifted_dim()))
            .expect("same dim")
    }

    /// `fᵢ = φᵀ Fᵢ φ` with `φ = ψ^{⊗n}`.
    pub fn score_state(&self, psi: &PureState) -> Result<ScoreVector> {
        if psi.dim() != self.state_dim {
            return Err(PgmError::DimMismatch {
                expected: self.state_dim,
                found: psi.dim(),
            });
        }
        let phi = tensor_power(psi.amplitudes(), self.copies, usize::MAX)?;
        let scores = self
            .povm
            .iter()
            .map(|f| f.quadratic_form(&phi))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreVector::new(scores))
    }
}

pub fn build_dense_pgm(
    train: &LabeledStateSet,
    priors: &Priors,
    copies: u32,
    rank_tol: f64,
    dense_dim_limit: usize,
) -> Result<DensePgm> {
    let ensemble = ClassEnsemble::from_states(train, priors.clone(), copies, dense_dim_limit)?;
    build_from_ensemble(&ensemble, train.state_dim(), rank_tol)
}

/// Builds the POVM for an arbitrary ensemble of class representatives.
pub fn build_from_ensemble(
    ensemble: &ClassEnsemble,
    state_dim: usize,
    rank_tol: f64,
) -> Result<DensePgm> {
    let sigma = mixture(ensemble)?;
    let roots = pinv_sqrt(sigma.op(), rank_tol)?;
    let n_classes = ensemble.n_classes() as f64;
    let kernel_share = roots.kernel.op().scale(1.0 / n_classes);

    let povm = ensemble
        .reps
        .iter()
        .zip(&ensemble.priors.values)
        .map(|(rep, &p)| {
            rep.op()
                .scale(p)
                .sandwich(&roots.inv_sqrt)?
                .add(&kernel_share)
        })
        .collect::<Result<Vec<_>>>()?;
    DensePgm::from_parts(povm, ensemble.copies, state_dim)
}

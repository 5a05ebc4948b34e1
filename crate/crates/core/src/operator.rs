//! Real symmetric operators and the spectral machinery the measurement
//! construction needs: eigendecomposition, PSD square roots, pseudoinverse
//! square roots with image/kernel projectors, tensor powers and trace products.
//!
//! Everything here is over the reals. Operators are immutable once built.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{PgmError, Result};

/// Relative eigenvalue cutoff below which a direction counts as kernel.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Largest dimension for which explicit operators are formed.
pub const DEFAULT_DENSE_DIM_LIMIT: usize = 4096;

/// Negative eigenvalues above this are clipped to zero; below it they are an error.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-8;

/// A dense real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricOperator {
    entries: DMatrix<f64>,
}

impl SymmetricOperator {
    /// Builds an operator from a square matrix, replacing it by `(A + Aᵀ)/2`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(PgmError::InvalidOperator("empty matrix".into()));
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(PgmError::InvalidOperator(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(PgmError::InvalidOperator("non-finite entry".into()));
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Row-major construction.
    pub fn from_row_major(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(PgmError::DimMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub(crate) fn symmetrized(matrix: DMatrix<f64>) -> Self {
        let transpose = matrix.transpose();
        Self {
            entries: (matrix + transpose) * 0.5,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(values)),
        }
    }

    /// `v vᵀ`
    pub fn outer(v: &[f64]) -> Self {
        let col = DVector::from_column_slice(v);
        Self {
            entries: &col * col.transpose(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.entries[(i, j)]);
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            entries: &self.entries * factor,
        }
    }

    /// Accumulates `factor * other` in place.
    pub fn add_scaled_assign(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        self.entries += &other.entries * factor;
        Ok(())
    }

    /// `S · self · S`, re-symmetrized.
    pub fn sandwich(&self, s: &Self) -> Result<Self> {
        self.check_dim(s)?;
        let product = &s.entries * &self.entries * &s.entries;
        Ok(Self::symmetrized(product))
    }

    /// Plain matrix product; the result is generally not symmetric.
    pub fn mul_matrix(&self, other: &Self) -> Result<DMatrix<f64>> {
        self.check_dim(other)?;
        Ok(&self.entries * &other.entries)
    }

    /// `vᵀ A v`
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(PgmError::DimMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let x = DVector::from_column_slice(v);
        Ok(x.dot(&(&self.entries * &x)))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.kronecker(&other.entries),
        }
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eig_sym(self)?.eigenvalues[0])
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(PgmError::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ f(λ) v vᵀ`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymmetricOperator {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(k).scale_mut(w);
        }
        SymmetricOperator::symmetrized(scaled * self.eigenvectors.transpose())
    }

    pub fn reconstruct(&self) -> SymmetricOperator {
        self.map(|lambda| lambda)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Eigenvalues at or below this value are treated as exactly zero.
    pub fn rank_cutoff(&self, rank_tol: f64) -> f64 {
        rank_tol * self.max_eigenvalue().max(0.0)
    }

    /// Fails if any eigenvalue falls below `-NEGATIVE_EIGEN_TOL`.
    pub fn check_psd(&self) -> Result<()> {
        match self.eigenvalues.first() {
            Some(&lambda) if lambda < -NEGATIVE_EIGEN_TOL => {
                Err(PgmError::NotPositiveSemidefinite { eigenvalue: lambda })
            }
            _ => Ok(()),
        }
    }
}

pub fn eig_sym(a: &SymmetricOperator) -> Result<SpectralDecomposition> {
    if a.entries.iter().any(|x| !x.is_finite()) {
        return Err(PgmError::InvalidOperator("non-finite entry".into()));
    }
    let SymmetricEigen {
        eigenvectors,
        eigenvalues,
    } = SymmetricEigen::new(a.entries.clone());

    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));

    let n = eigenvalues.len();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
        eigenvectors: vectors,
    })
}

/// Positive square root; eigenvalues in `[-1e-8, 0)` are clipped to zero.
pub fn psd_sqrt(a: &SymmetricOperator) -> Result<SymmetricOperator> {
    let spectral = eig_sym(a)?;
    spectral.check_psd()?;
    Ok(spectral.map(|lambda| lambda.max(0.0).sqrt()))
}

/// A density operator: PSD with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: SymmetricOperator,
}

impl DensityOperator {
    pub const TRACE_TOL: f64 = 1e-8;
    pub const EIGEN_TOL: f64 = 1e-10;

    pub fn new(op: SymmetricOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > Self::TRACE_TOL {
            return Err(PgmError::InvalidOperator(format!(
                "density operator trace {trace} is not 1"
            )));
        }
        let min = op.min_eigenvalue()?;
        if min < -Self::EIGEN_TOL {
            return Err(PgmError::NotPositiveSemidefinite { eigenvalue: min });
        }
        Ok(Self { op })
    }

    /// Skips validation for operators that are PSD and normalized by construction.
    pub(crate) fn new_unchecked(op: SymmetricOperator) -> Self {
        Self { op }
    }

    /// `ψ ψᵀ` for a unit vector.
    pub fn pure(psi: &[f64]) -> Self {
        Self::new_unchecked(SymmetricOperator::outer(psi))
    }

    pub fn op(&self) -> &SymmetricOperator {
        &self.op
    }

    pub fn into_op(self) -> SymmetricOperator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::new_unchecked(self.op.kron(&other.op))
    }
}

/// An orthogonal projector.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    op: SymmetricOperator,
}

impl Projector {
    pub const TOL: f64 = 1e-8;

    /// Validates idempotence.
    pub fn new(op: SymmetricOperator) -> Result<Self> {
        let square = SymmetricOperator::symmetrized(op.mul_matrix(&op)?);
        let err = square.max_abs_diff(&op)?;
        if err > Self::TOL {
            return Err(PgmError::InvalidOperator(format!(
                "not a projector: |P^2 - P| = {err:e}"
            )));
        }
        Ok(Self { op })
    }

    pub fn op(&self) -> &SymmetricOperator {
        &self.op
    }

    pub fn rank(&self) -> usize {
        self.op.trace().round().max(0.0) as usize
    }
}

/// Output of [`pinv_sqrt`].
#[derive(Clone, Debug)]
pub struct PseudoInverseSqrt {
    pub inv_sqrt: SymmetricOperator,
    pub image: Projector,
    pub kernel: Projector,
}

/// Moore–Penrose inverse square root together with the image and kernel
/// projectors. Eigenvalues `λ ≤ rank_tol·λ_max` count as zero.
pub fn pinv_sqrt(a: &SymmetricOperator, rank_tol: f64) -> Result<PseudoInverseSqrt> {
    if !(rank_tol > 0.0) {
        return Err(PgmError::InvalidConfig(format!(
            "rank tolerance must be positive, got {rank_tol}"
        )));
    }
    let spectral = eig_sym(a)?;
    spectral.check_psd()?;
    let cut = spectral.rank_cutoff(rank_tol);
    let kept = |lambda: f64| lambda > cut && lambda > 0.0;

    let inv_sqrt = spectral.map(|l| if kept(l) { 1.0 / l.sqrt() } else { 0.0 });
    let image = spectral.map(|l| if kept(l) { 1.0 } else { 0.0 });
    let kernel = spectral.map(|l| if kept(l) { 0.0 } else { 1.0 });
    Ok(PseudoInverseSqrt {
        inv_sqrt,
        image: Projector { op: image },
        kernel: Projector { op: kernel },
    })
}

/// `q^n`, or `DenseBlowup` if it overflows or exceeds `limit`.
pub fn dense_dim(base: usize, copies: u32, limit: usize) -> Result<usize> {
    match base.checked_pow(copies) {
        Some(dim) if dim <= limit => Ok(dim),
        _ => Err(PgmError::DenseBlowup {
            base,
            copies,
            limit,
        }),
    }
}

/// Kronecker power `v^{⊗n}` of a unit vector. The entry at multi-index
/// `(i₁, …, iₙ)` (first index most significant) is `Π v[i_k]`.
pub fn tensor_power(v: &[f64], copies: u32, limit: usize) -> Result<Vec<f64>> {
    if copies == 0 {
        return Err(PgmError::InvalidConfig("copies must be at least 1".into()));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(PgmError::InvalidOperator(format!(
            "tensor power of non-unit vector (norm {norm})"
        )));
    }
    let dim = dense_dim(v.len(), copies, limit)?;
    let mut out = Vec::with_capacity(dim);
    out.push(1.0);
    for _ in 0..copies {
        out = out
            .iter()
            .flat_map(|&a| v.iter().map(move |&b| a * b))
            .collect();
    }
    Ok(out)
}

/// `Σᵢⱼ A[i][j]·B[i][j]`, i.e. `tr(AB)` for symmetric operands.
pub fn trace_product(a: &SymmetricOperator, b: &SymmetricOperator) -> Result<f64> {
    a.check_dim(b)?;
    Ok(a.entries.dot(&b.entries))
}

//! Dense complex linear algebra shared by every other module.
//!
//! Everything here is plain dense row-major storage over `Complex<f64>`.
//! Spectral routines are backed by LAPACK (zheev) through `ndarray-linalg`;
//! the contracts they must satisfy (reconstruction residual, orthonormality,
//! descending eigenvalues) are what the rest of the crate relies on and are
//! enforced in tests rather than assumed.

mod eig;
mod matrix;
mod ops;
mod superop;

pub use eig::{eig_hermitian, SpectralDecomposition};
pub use matrix::{inner as vec_inner, norm as vec_norm, normalize as vec_normalize, ComplexMatrix, C64};
pub use ops::{
    expm, invert_unit_lower, ldlt_psd, op_norm, pinv_psd, psd_block_check, trace_norm,
    PsdBlockReport,
};
pub use superop::Superoperator;

use thiserror::Error;

/// Relative eigenvalue threshold below which a spectral value counts as zero.
///
/// An eigenvalue λ of a positive semi-definite operator is treated as zero iff
/// λ < KERNEL_REL_THRESHOLD · max(1, λ_max).  A relative threshold survives
/// rescaling of the operator, which matters for kernel projectors of
/// sub-normalized states.
pub const KERNEL_REL_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("matrix is not Hermitian: ‖A − A†‖ = {residual:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("operator is not positive semi-definite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace {trace} outside [0, 1] for a sub-normalized state")]
    BadTrace { trace: f64 },
    #[error("eigensolver failed to converge: {0}")]
    EigFailure(String),
    #[error("matrix exponential overflow: input norm {norm:.3e}")]
    ExpmOverflow { norm: f64 },
    #[error("non-finite entry produced in {0}")]
    NonFinite(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Hermitian operator: a square [`ComplexMatrix`] validated and symmetrized
/// at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates ‖A − A†‖ ≤ 1e-12·max(1, ‖A‖) and stores the exactly
    /// symmetrized (A + A†)/2.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(LinalgError::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let residual = matrix.sub(&matrix.dagger()).max_abs();
        let tolerance = 1e-12 * matrix.max_abs().max(1.0);
        if residual > tolerance {
            return Err(LinalgError::NotHermitian {
                residual,
                tolerance,
            });
        }
        let sym = matrix.add(&matrix.dagger()).scale(0.5.into());
        if !sym.is_finite() {
            return Err(LinalgError::NonFinite("HermitianOperator::new".into()));
        }
        Ok(Self {
            dim: sym.rows(),
            matrix: sym,
        })
    }

    /// Builds directly from a closure over (row, col) entries; the result is
    /// symmetrized, so only one triangle actually needs to be right.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(ComplexMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// ⟨v|A|v⟩ as a real number.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.matrix.expectation(v).re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.sub(&other.matrix),
        }
    }

    /// Scaling by a real factor preserves Hermiticity.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale(factor.into()),
        }
    }

    /// Shift by a real multiple of the identity.
    pub fn shift(&self, offset: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.dim {
            let v = m.get(i, i) + C64::new(offset, 0.0);
            m.set(i, i, v);
        }
        Self {
            dim: self.dim,
            matrix: m,
        }
    }
}

/// Positive semi-definite operator with trace at most one.
///
/// Sub-normalized states are allowed; several Fisher-information identities
/// are stated for them directly.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    dim: usize,
    matrix: HermitianOperator,
    trace: f64,
}

impl DensityOperator {
    /// Validates positivity (eigenvalues ≥ −1e-10) and 0 ≤ tr ρ ≤ 1 + 1e-10.
    pub fn new(matrix: HermitianOperator) -> Result<Self> {
        let spec = eig_hermitian(&matrix)?;
        let min = spec.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(LinalgError::NotPositive {
                min_eigenvalue: min,
            });
        }
        let trace = matrix.matrix().trace().re;
        if !(-1e-10..=1.0 + 1e-10).contains(&trace) {
            return Err(LinalgError::BadTrace { trace });
        }
        Ok(Self {
            dim: matrix.dim(),
            matrix,
            trace,
        })
    }

    /// Projector |ψ⟩⟨ψ| of a (possibly sub-normalized) vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let d = psi.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
        Self::new(HermitianOperator::new(m)?)
    }

    /// Builds from a nominally PSD matrix, clamping eigenvalues in
    /// [−1e-10, 0) to zero.  Channel outputs carry this much spectral dust.
    pub fn clamped(matrix: &ComplexMatrix) -> Result<Self> {
        let herm = HermitianOperator::new(matrix.clone())?;
        let spec = eig_hermitian(&herm)?;
        let min = spec.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -1e-10 * spec.eigenvalues().first().copied().unwrap_or(1.0).max(1.0) {
            return Err(LinalgError::NotPositive {
                min_eigenvalue: min,
            });
        }
        let clamped = spec.map_eigenvalues(|l| l.max(0.0));
        let herm = HermitianOperator::new(clamped)?;
        let trace = herm.matrix().trace().re;
        if !(-1e-10..=1.0 + 1e-10).contains(&trace) {
            return Err(LinalgError::BadTrace { trace });
        }
        Ok(Self {
            dim: herm.dim(),
            matrix: herm,
            trace,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.matrix
    }
}

/// max(|entry|) distance between two equally shaped matrices.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).max_abs()
}

/// Partial trace of an operator on H_1 ⊗ … ⊗ H_n, keeping the listed factors.
///
/// `keep` holds the factor indices to retain, in their original order; `dims`
/// lists all factor dimensions whose product must match the matrix dimension.
pub fn partial_trace(
    a: &ComplexMatrix,
    keep: &[usize],
    dims: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if a.rows() != total || a.cols() != total {
        return Err(LinalgError::DimensionMismatch(format!(
            "partial_trace: matrix is {}×{}, factor dims multiply to {}",
            a.rows(),
            a.cols(),
            total
        )));
    }
    for &k in keep {
        if k >= dims.len() {
            return Err(LinalgError::IndexOutOfRange(format!(
                "partial_trace: keep index {} with only {} factors",
                k,
                dims.len()
            )));
        }
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(LinalgError::Other("partial_trace: repeated keep index".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dim: usize = keep.iter().map(|&i| dims[i]).product();
    let trace_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Strides of each factor in the full row-major index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    // Enumerate kept and traced multi-indices as flat offsets.
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let dim: usize = factors.iter().map(|&i| dims[i]).product();
        let mut out = vec![0usize; dim];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut rem = flat;
            let mut off = 0usize;
            for &f in factors {
                let later: usize = factors
                    .iter()
                    .skip_while(|&&g| g != f)
                    .skip(1)
                    .map(|&g| dims[g])
                    .product();
                let idx = (rem / later) % dims[f];
                rem %= later.max(1);
                off += idx * strides[f];
            }
            *slot = off;
        }
        out
    };
    let keep_off = offsets(keep);
    let trace_off = offsets(&traced);

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (c, &co) in keep_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &to in trace_off.iter().take(trace_dim.max(1)) {
                acc += a.get(ro + to, co + to);
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Row-major vectorization |A⟩⟩ = (A ⊗ I)|1⟩⟩, i.e. rows are concatenated.
pub fn vectorize(a: &ComplexMatrix) -> Vec<C64> {
    a.data().to_vec()
}

/// Inverse of [`vectorize`] for a square matrix of the given dimension.
pub fn devectorize(v: &[C64], dim: usize) -> Result<ComplexMatrix> {
    if v.len() != dim * dim {
        return Err(LinalgError::DimensionMismatch(format!(
            "devectorize: {} entries cannot fill a {dim}×{dim} matrix",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_slice(dim, dim, v))
}

#[cfg(test)]
mod tests;

use ndarray_linalg::{Eigh, UPLO};

use super::matrix::{ComplexMatrix, C64};
use super::{HermitianOperator, LinalgError, Result, KERNEL_REL_THRESHOLD};

/// Eigendecomposition A = U Λ U† of a Hermitian operator.
///
/// Eigenvalues are sorted in descending order; eigenvectors are the matching
/// orthonormal columns of `eigenvectors`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    zero_threshold: f64,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Threshold below which an eigenvalue counts as zero
    /// (KERNEL_REL_THRESHOLD · max(1, λ_max)).
    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// k-th eigenvector as a column slice copy.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// Reassembles U Λ U†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut ul = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for k in 0..d {
                ul.set(i, k, self.eigenvectors.get(i, k) * self.eigenvalues[k]);
            }
        }
        ul.matmul(&self.eigenvectors.dagger())
    }

    /// U† M U: the matrix M expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.dagger().matmul(&m.matmul(&self.eigenvectors))
    }

    /// U M U†: back from the eigenbasis.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.matmul(&m.matmul(&self.eigenvectors.dagger()))
    }

    /// Applies f to the eigenvalues and reassembles U f(Λ) U†.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let mut ul = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for k in 0..d {
                ul.set(i, k, self.eigenvectors.get(i, k) * f(self.eigenvalues[k]));
            }
        }
        ul.matmul(&self.eigenvectors.dagger())
    }

    /// Projector onto the span of eigenvectors with eigenvalue above the zero
    /// threshold (the support, for a PSD operator).
    pub fn support_projector(&self) -> ComplexMatrix {
        let thr = self.zero_threshold;
        self.map_eigenvalues(|l| if l.abs() > thr { 1.0 } else { 0.0 })
    }

    /// Projector onto the numerical kernel.
    pub fn kernel_projector(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::identity(d).sub(&self.support_projector())
    }

    /// Number of eigenvalues above the zero threshold.
    pub fn rank(&self) -> usize {
        let thr = self.zero_threshold;
        self.eigenvalues.iter().filter(|l| l.abs() > thr).count()
    }
}

/// Hermitian eigendecomposition with descending eigenvalues.
///
/// Backed by LAPACK's Hermitian solver; the reconstruction and orthonormality
/// contracts are asserted cheaply here and thoroughly in tests.
pub fn eig_hermitian(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    let arr = a.matrix().to_array();
    let (vals, vecs) = arr
        .eigh(UPLO::Lower)
        .map_err(|e| LinalgError::EigFailure(format!("{e}")))?;
    let d = a.dim();
    // LAPACK returns ascending order; flip to descending.  The backend sees
    // the row-major buffer as column-major, so it effectively diagonalizes
    // Aᵀ = conj(A); conjugating the returned vectors restores A = UΛU†
    // (pinned by the reconstruction tests).
    let mut eigenvalues = Vec::with_capacity(d);
    let mut eigenvectors = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let src = d - 1 - k;
        eigenvalues.push(vals[src]);
        for i in 0..d {
            eigenvectors.set(i, k, vecs[(i, src)].conj());
        }
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(LinalgError::EigFailure("non-finite eigenvalue".into()));
    }
    let lambda_max = eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0f64, f64::max);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        zero_threshold: KERNEL_REL_THRESHOLD * lambda_max.max(1.0),
    })
}

use super::matrix::{ComplexMatrix, C64};
use super::ops::expm;
use super::{devectorize, vectorize, LinalgError, Result};

/// Linear map on operators, stored as a d²×d² matrix acting on row-major
/// vectorized operators: |A⟩⟩ = (A ⊗ I)|1⟩⟩.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(LinalgError::DimensionMismatch(format!(
                "superoperator on dimension {dim} needs a {}×{} matrix, got {}×{}",
                dim * dim,
                dim * dim,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
        }
    }

    /// Builds the superoperator of X ↦ L X R (left/right multiplication),
    /// which vectorizes to L ⊗ Rᵀ in the row-major convention.
    pub fn sandwich(l: &ComplexMatrix, r: &ComplexMatrix) -> Self {
        let dim = l.rows();
        Self {
            dim,
            matrix: l.kron(&r.transpose()),
        }
    }

    /// Builds from an arbitrary operator map by probing matrix units.
    pub fn from_map(dim: usize, mut map: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let d2 = dim * dim;
        let mut m = ComplexMatrix::zeros(d2, d2);
        for c in 0..d2 {
            let (i, j) = (c / dim, c % dim);
            let mut unit = ComplexMatrix::zeros(dim, dim);
            unit.set(i, j, C64::new(1.0, 0.0));
            let image = map(&unit);
            let v = vectorize(&image);
            for (r, entry) in v.iter().enumerate() {
                m.set(r, c, *entry);
            }
        }
        Self { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = vectorize(a);
        let out = self.matrix.matvec(&v);
        devectorize(&out, self.dim).expect("dimension preserved")
    }

    /// Composition self ∘ other (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale(factor),
        }
    }

    /// e^{t·self} as a superoperator.
    pub fn expm_scaled(&self, t: f64) -> Result<Self> {
        let m = expm(&self.matrix.scale(C64::new(t, 0.0)))?;
        Ok(Self {
            dim: self.dim,
            matrix: m,
        })
    }

    /// Reshuffles the superoperator matrix into its Choi matrix
    /// C_{(a,c),(b,d)} = S_{(a,b),(c,d)}, so that complete positivity of the
    /// map is positivity of C.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d * d, d * d, |rc, cc| {
            let (a, c) = (rc / d, rc % d);
            let (b, dd) = (cc / d, cc % d);
            self.matrix.get(a * d + b, c * d + dd)
        })
    }
}

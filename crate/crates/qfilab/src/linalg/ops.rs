use ndarray_linalg::Solve;

use super::eig::eig_hermitian;
use super::matrix::{ComplexMatrix, C64};
use super::{HermitianOperator, LinalgError, Result, KERNEL_REL_THRESHOLD};

/// Matrix exponential by scaling-and-squaring with a degree-13 Padé
/// approximant (Higham's choice of coefficients).
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert_eq!(a.rows(), a.cols(), "expm of a non-square matrix");
    let norm = one_norm(a);
    if !norm.is_finite() || norm > 1e12 {
        return Err(LinalgError::ExpmOverflow { norm });
    }
    let theta13 = 5.371920351148152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(C64::new((0.5f64).powi(s), 0.0));
    let mut result = pade13(&scaled)?;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    if !result.is_finite() {
        return Err(LinalgError::NonFinite("expm".into()));
    }
    Ok(result)
}

fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let d = a.rows();
    let id = ComplexMatrix::identity(d);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);
    let re = |x: f64| C64::new(x, 0.0);

    let u_inner = a6
        .scale(re(B[13]))
        .add(&a4.scale(re(B[11])))
        .add(&a2.scale(re(B[9])));
    let u_poly = a6
        .matmul(&u_inner)
        .add(&a6.scale(re(B[7])))
        .add(&a4.scale(re(B[5])))
        .add(&a2.scale(re(B[3])))
        .add(&id.scale(re(B[1])));
    let u = a.matmul(&u_poly);

    let v_inner = a6
        .scale(re(B[12]))
        .add(&a4.scale(re(B[10])))
        .add(&a2.scale(re(B[8])));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(re(B[6])))
        .add(&a4.scale(re(B[4])))
        .add(&a2.scale(re(B[2])))
        .add(&id.scale(re(B[0])));

    // (V − U) X = (V + U)
    let lhs = v.sub(&u);
    let rhs = v.add(&u);
    solve_multi(&lhs, &rhs)
}

use ndarray_linalg::FactorizeInto;

/// Solve A X = B column by column via LAPACK.
fn solve_multi(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let arr = a.to_array();
    let factor = arr
        .factorize_into()
        .map_err(|e| LinalgError::EigFailure(format!("LU factorization failed: {e}")))?;
    let d = b.rows();
    let mut out = ComplexMatrix::zeros(d, b.cols());
    for j in 0..b.cols() {
        let col: ndarray::Array1<C64> =
            ndarray::Array1::from_iter((0..d).map(|i| b.get(i, j)));
        let x = factor
            .solve_into(col)
            .map_err(|e| LinalgError::EigFailure(format!("solve failed: {e}")))?;
        for i in 0..d {
            out.set(i, j, x[i]);
        }
    }
    Ok(out)
}

fn one_norm(a: &ComplexMatrix) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.cols() {
        let mut s = 0.0;
        for i in 0..a.rows() {
            s += a.get(i, j).norm();
        }
        best = best.max(s);
    }
    best
}

/// Trace norm ‖A‖₁ (sum of singular values).
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Operator (spectral) norm ‖A‖.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    // Singular values via the Hermitian eigenvalues of A†A.
    let ata = a.dagger().matmul(a);
    let herm = HermitianOperator::new(ata).expect("A†A is Hermitian by construction");
    let spec = eig_hermitian(&herm).expect("eigendecomposition of A†A");
    spec.eigenvalues()
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

/// Moore-Penrose inverse of a positive semi-definite matrix: eigenvalues
/// below KERNEL_REL_THRESHOLD · λ_max are treated as exact zeros.
pub fn pinv_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let herm = HermitianOperator::new(a.clone())?;
    let spec = eig_hermitian(&herm)?;
    let lambda_max = spec
        .eigenvalues()
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    if spec.eigenvalues().last().copied().unwrap_or(0.0) < -1e-10 * lambda_max.max(1.0) {
        return Err(LinalgError::NotPositive {
            min_eigenvalue: spec.eigenvalues().last().copied().unwrap_or(0.0),
        });
    }
    let thr = KERNEL_REL_THRESHOLD * lambda_max;
    Ok(spec.map_eigenvalues(|l| if l > thr { 1.0 / l } else { 0.0 }))
}

/// Outcome of the 2×2 block positivity test.
#[derive(Debug, Clone)]
pub struct PsdBlockReport {
    /// True iff [[A, W], [W†, B]] ⪰ −1e-10·I.
    pub positive: bool,
    /// Smallest eigenvalue of the block matrix.
    pub min_eigenvalue: f64,
    /// On a positive verdict: whether W annihilates the kernel of B
    /// (the Schur-complement support condition W·P_B^⊥ = 0), within tolerance.
    pub w_kills_b_kernel: Option<bool>,
}

/// Tests positivity of the block matrix [[A, W], [W†, B]] and, when positive,
/// reports the Schur-complement support condition W·P_B^⊥ = 0.
pub fn psd_block_check(
    a: &ComplexMatrix,
    w: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<PsdBlockReport> {
    let (n, m) = (a.rows(), b.rows());
    if a.cols() != n || b.cols() != m || w.rows() != n || w.cols() != m {
        return Err(LinalgError::DimensionMismatch(format!(
            "psd_block_check: A {}×{}, W {}×{}, B {}×{}",
            a.rows(),
            a.cols(),
            w.rows(),
            w.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let dim = n + m;
    let block = ComplexMatrix::from_fn(dim, dim, |i, j| match (i < n, j < n) {
        (true, true) => a.get(i, j),
        (true, false) => w.get(i, j - n),
        (false, true) => w.get(j, i - n).conj(),
        (false, false) => b.get(i - n, j - n),
    });
    let herm = HermitianOperator::new(block)?;
    let spec = eig_hermitian(&herm)?;
    let min_eigenvalue = spec.eigenvalues().last().copied().unwrap_or(0.0);
    let scale = spec
        .eigenvalues()
        .first()
        .copied()
        .unwrap_or(0.0)
        .abs()
        .max(1.0);
    let positive = min_eigenvalue >= -1e-10 * scale;
    let w_kills_b_kernel = if positive {
        let bh = HermitianOperator::new(b.clone())?;
        let bspec = eig_hermitian(&bh)?;
        let pk = bspec.kernel_projector();
        let residual = w.matmul(&pk).max_abs();
        Some(residual <= 1e-9 * w.max_abs().max(1.0))
    } else {
        None
    };
    Ok(PsdBlockReport {
        positive,
        min_eigenvalue,
        w_kills_b_kernel,
    })
}

/// LDLᴴ factorization of a positive semi-definite matrix, returning a unit
/// lower-triangular L and the diagonal d with ρ = L·diag(d)·L†.
///
/// Pivots below `pivot_floor` are clamped to the floor so that L stays
/// invertible on rank-deficient inputs.
pub fn ldlt_psd(a: &ComplexMatrix, pivot_floor: f64) -> Result<(ComplexMatrix, Vec<f64>)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LinalgError::DimensionMismatch("ldlt_psd: non-square".into()));
    }
    let mut l = ComplexMatrix::identity(n);
    let mut d = vec![0.0f64; n];
    for j in 0..n {
        let mut dj = a.get(j, j).re;
        for k in 0..j {
            dj -= l.get(j, k).norm_sqr() * d[k];
        }
        if dj < -1e-9 * a.max_abs().max(1.0) {
            return Err(LinalgError::NotPositive { min_eigenvalue: dj });
        }
        d[j] = dj.max(pivot_floor);
        for i in (j + 1)..n {
            let mut v = a.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k).conj() * d[k];
            }
            l.set(i, j, v / d[j]);
        }
    }
    Ok((l, d))
}

/// Inverse of a unit lower-triangular matrix by forward substitution.
pub fn invert_unit_lower(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        for i in (col + 1)..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in col..i {
                acc += l.get(i, k) * inv.get(k, col);
            }
            inv.set(i, col, -acc);
        }
    }
    inv
}

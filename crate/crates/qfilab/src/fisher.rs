//! Quantum Fisher information via the symmetric logarithmic derivative.
//!
//! For a state ρ and a Hermitian direction D with P_ρ^⊥ D P_ρ^⊥ = 0, the
//! quantum Fisher information is F(ρ; D) = tr(ρ R²) where R solves the
//! anti-commutator equation ½{ρ, R} = D.  In an eigenbasis ρ = Σ λ_k |k⟩⟨k|,
//!
//!   R = Σ_{λ_k + λ_k' ≠ 0} 2/(λ_k + λ_k') ⟨k|D|k'⟩ |k⟩⟨k'| ,
//!   F = Σ_{λ_k + λ_k' ≠ 0} 2/(λ_k + λ_k') |⟨k|D|k'⟩|² .
//!
//! All solutions of the anti-commutator equation differ by a kernel-supported
//! gauge term P_ρ^⊥ M P_ρ^⊥; this module always returns the canonical gauge
//! with P_ρ^⊥ R P_ρ^⊥ = 0.
//!
//! The same quantity is the optimum of a dual pair of convex programs
//! (max over Hermitian S of 4[tr(DS) − tr(ρS²)], min of 4·tr(L†L) subject to
//! ρ^½L + L†ρ^½ = D); candidate evaluators for both directions are provided
//! so that any guessed S or feasible L certifies a one-sided bound.

use thiserror::Error;

use crate::linalg::{
    eig_hermitian, trace_norm, ComplexMatrix, DensityOperator, HermitianOperator, LinalgError,
    SpectralDecomposition, C64,
};

#[derive(Debug, Error)]
pub enum FisherError {
    #[error(
        "no SLD exists: the direction leaks out of the state's support \
         (‖P⊥DP⊥‖ = {residual:.3e}); the optimal estimation variance is zero"
    )]
    DirectionOutsideSupport { residual: f64 },
    #[error("infeasible candidate: constraint residual {residual:.3e} exceeds {tolerance:.3e}")]
    InfeasibleCandidate { residual: f64, tolerance: f64 },
    #[error("direction must be traceless for the normalization embedding, got tr D = {trace:.3e}")]
    NotTraceless { trace: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, FisherError>;

/// A state together with a derivative direction, validated so that the
/// symmetric logarithmic derivative exists.
///
/// The constructor clamps a numerically tiny kernel leak
/// (‖P_ρ^⊥ D P_ρ^⊥‖ ≤ 1e-9·‖D‖) to exactly zero: channel outputs routinely
/// generate such dust while the underlying identity P_ρ^⊥ D P_ρ^⊥ = 0 holds
/// exactly.
#[derive(Debug, Clone)]
pub struct FisherPair {
    rho: DensityOperator,
    direction: HermitianOperator,
    spectrum: SpectralDecomposition,
    /// Direction expressed in the eigenbasis of ρ, with the kernel-kernel
    /// block cleared.
    d_eig: ComplexMatrix,
}

impl FisherPair {
    pub fn new(rho: DensityOperator, direction: HermitianOperator) -> Result<Self> {
        if rho.dim() != direction.dim() {
            return Err(FisherError::DimensionMismatch(format!(
                "state dimension {} vs direction dimension {}",
                rho.dim(),
                direction.dim()
            )));
        }
        let spectrum = eig_hermitian(rho.hermitian())?;
        let mut d_eig = spectrum.to_eigenbasis(direction.matrix());
        let d = rho.dim();
        let thr = spectrum.zero_threshold();
        let kernel: Vec<bool> = spectrum.eigenvalues().iter().map(|l| *l <= thr).collect();
        let mut leak = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if kernel[i] && kernel[j] {
                    leak = leak.max(d_eig.get(i, j).norm());
                    d_eig.set(i, j, C64::new(0.0, 0.0));
                }
            }
        }
        // The absolute floor covers directions that are numerically zero
        // (e.g. a channel annihilating the derivative): their kernel dust is
        // the direction itself and the Fisher information is zero.
        let tolerance = 1e-9 * direction.matrix().max_abs() + 1e-14;
        if leak > tolerance {
            return Err(FisherError::DirectionOutsideSupport { residual: leak });
        }
        Ok(Self {
            rho,
            direction,
            spectrum,
            d_eig,
        })
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn direction(&self) -> &HermitianOperator {
        &self.direction
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }
}

/// Canonical-gauge symmetric logarithmic derivative.
#[derive(Debug, Clone)]
pub struct SldSolution {
    pub r: HermitianOperator,
    /// Reminder of the residual gauge freedom left unfixed.
    pub gauge_note: &'static str,
}

/// Solves ½{ρ, R} = D in the canonical gauge P_ρ^⊥ R P_ρ^⊥ = 0.
pub fn sld(pair: &FisherPair) -> Result<SldSolution> {
    let d = pair.rho.dim();
    let lam = pair.spectrum.eigenvalues();
    let thr = pair.spectrum.zero_threshold();
    let mut r_eig = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let denom = lam[i].max(0.0) + lam[j].max(0.0);
            if denom > thr {
                r_eig.set(i, j, pair.d_eig.get(i, j) * C64::new(2.0 / denom, 0.0));
            }
        }
    }
    let r = pair.spectrum.from_eigenbasis(&r_eig);
    Ok(SldSolution {
        r: HermitianOperator::new(r)?,
        gauge_note: "canonical gauge: kernel block of R set to zero; \
                     any P⊥MP⊥ may be added without changing observables on the support",
    })
}

/// Quantum Fisher information F(ρ; D) by the eigenbasis double sum.
pub fn qfi(pair: &FisherPair) -> Result<f64> {
    let d = pair.rho.dim();
    let lam = pair.spectrum.eigenvalues();
    let thr = pair.spectrum.zero_threshold();
    let mut total = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let denom = lam[i].max(0.0) + lam[j].max(0.0);
            if denom > thr {
                total += 2.0 / denom * pair.d_eig.get(i, j).norm_sqr();
            }
        }
    }
    Ok(total)
}

/// Lower-bound candidate from the maximization form: for any Hermitian S,
/// 4[tr(DS) − tr(ρS²)] ≤ F(ρ; D), with equality at S = R/2.
pub fn qfi_lower_candidate(pair: &FisherPair, s: &HermitianOperator) -> f64 {
    let ds = pair.direction.matrix().matmul(s.matrix()).trace().re;
    let ss = s.matrix().matmul(s.matrix());
    let rho_ss = pair.rho.matrix().matmul(&ss).trace().re;
    4.0 * (ds - rho_ss)
}

/// Upper-bound candidate from the minimization form: for any L with
/// ρ^½L + L†ρ^½ = D (checked to 1e-8), F(ρ; D) ≤ 4·tr(L†L).
pub fn qfi_upper_candidate(pair: &FisherPair, l: &ComplexMatrix) -> Result<f64> {
    let sqrt_rho = pair.spectrum.map_eigenvalues(|x| x.max(0.0).sqrt());
    let lhs = sqrt_rho.matmul(l).add(&l.dagger().matmul(&sqrt_rho));
    let residual = lhs.sub(pair.direction.matrix()).max_abs();
    let tolerance = 1e-8 * pair.direction.matrix().max_abs().max(1.0);
    if residual > tolerance {
        return Err(FisherError::InfeasibleCandidate {
            residual,
            tolerance,
        });
    }
    Ok(4.0 * l.dagger().matmul(l).trace().re)
}

/// Elementary two-sided bounds ‖D‖² ≤ F(ρ; D) ≤ tr(ρ⁻¹ D'²), D' = 2D − P_ρDP_ρ.
pub fn simple_bounds(pair: &FisherPair) -> (f64, f64) {
    let lower = crate::linalg::op_norm(pair.direction.matrix()).powi(2);
    let d = pair.rho.dim();
    let lam = pair.spectrum.eigenvalues();
    let thr = pair.spectrum.zero_threshold();
    // Work in the eigenbasis: P_ρ is diagonal there, ρ⁻¹ the pseudo-inverse.
    let support: Vec<bool> = lam.iter().map(|l| *l > thr).collect();
    let mut dprime = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let factor = if support[i] && support[j] { 1.0 } else { 2.0 };
            dprime.set(i, j, pair.d_eig.get(i, j) * C64::new(factor, 0.0));
        }
    }
    let mut upper = 0.0f64;
    for i in 0..d {
        if !support[i] {
            continue;
        }
        let mut row = 0.0;
        for j in 0..d {
            row += dprime.get(i, j).norm_sqr();
        }
        upper += row / lam[i];
    }
    (lower, upper)
}

/// Right-logarithmic-derivative bound: for any G with ½(ρG + G†ρ) = D
/// (checked to 1e-8), F(ρ; D) ≤ tr(ρ G G†).
pub fn rld_bound(pair: &FisherPair, g: &ComplexMatrix) -> Result<f64> {
    let rho = pair.rho.matrix();
    let lhs = rho.matmul(g).add(&g.dagger().matmul(rho)).scale(C64::new(0.5, 0.0));
    let residual = lhs.sub(pair.direction.matrix()).max_abs();
    let tolerance = 1e-8 * pair.direction.matrix().max_abs().max(1.0);
    if residual > tolerance {
        return Err(FisherError::InfeasibleCandidate {
            residual,
            tolerance,
        });
    }
    Ok(rho.matmul(g).matmul(&g.dagger()).trace().re)
}

/// Embeds a sub-normalized pair into a normalized one by appending a single
/// dimension that carries the missing trace weight; the Fisher information is
/// unchanged.  Requires tr D = 0 (the evolution does not leak weight).
pub fn embed_normalized(pair: &FisherPair) -> Result<FisherPair> {
    let tr_d = pair.direction.matrix().trace().re;
    if tr_d.abs() > 1e-10 {
        return Err(FisherError::NotTraceless { trace: tr_d });
    }
    let d = pair.rho.dim();
    let mut rho = ComplexMatrix::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            rho.set(i, j, pair.rho.matrix().get(i, j));
        }
    }
    rho.set(d, d, C64::new((1.0 - pair.rho.trace()).max(0.0), 0.0));
    let mut dir = ComplexMatrix::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            dir.set(i, j, pair.direction.matrix().get(i, j));
        }
    }
    FisherPair::new(
        DensityOperator::new(HermitianOperator::new(rho)?)?,
        HermitianOperator::new(dir)?,
    )
}

/// QFI of a channel-output pair: the state matrix is clamped of spectral
/// dust and the direction is symmetrized before the pair is validated.
pub fn qfi_of_output(rho: &ComplexMatrix, direction: &ComplexMatrix) -> Result<f64> {
    let pair = FisherPair::new(
        DensityOperator::clamped(rho)?,
        HermitianOperator::new(direction.clone())?,
    )?;
    qfi(&pair)
}

/// Root fidelity ‖√ρ √σ‖₁ between two positive operators.
///
/// This is the independent route to the Fisher information used by the
/// finite-difference cross-checks: it never touches the SLD machinery.
pub fn root_fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let sr = eig_hermitian(rho.hermitian())?.map_eigenvalues(|l| l.max(0.0).sqrt());
    let ss = eig_hermitian(sigma.hermitian())?.map_eigenvalues(|l| l.max(0.0).sqrt());
    Ok(trace_norm(&sr.matmul(&ss)))
}

//! Continuous noise: Lindblad generators and their reduction to the
//! instantaneous-channel picture.
//!
//! The generator splits as L_tot = L₀ + L₁ with L₀(ρ) = −i[H, ρ] the
//! Hamiltonian part and L₁ the dissipator.  The evolution E_t = e^{t·L_tot}
//! factorizes exactly as E_t = N_t ∘ e^{t·L₀}, where N_t = E_t·e^{−t·L₀} is a
//! completely positive trace-preserving map.  When [L₀, L₁] = 0 as
//! superoperators the effective channel is simply N_t = e^{t·L₁} and the
//! time dependence of N_t contributes nothing to first order; in general the
//! contribution is bounded through the Fisher-information continuity bound.
//!
//! Row-major vectorization throughout: |A⟩⟩ = (A ⊗ I)|1⟩⟩, so
//!
//!   L = −i(H⊗I − I⊗Hᵀ) + Σ_j [L_j ⊗ L_j^* − ½(L_j†L_j ⊗ I + I ⊗ (L_j†L_j)ᵀ)].

use thiserror::Error;

use crate::channels::{ChannelError, KrausChannel};
use crate::fisher::{qfi_of_output, FisherError};
use crate::linalg::{
    eig_hermitian, vec_norm, ComplexMatrix, DensityOperator, HermitianOperator, LinalgError,
    Superoperator, C64,
};

#[derive(Debug, Error)]
pub enum LindbladError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("the generator must not increase trace: ‖tr∘L‖ = {0:.3e}")]
    NotTracePreserving(f64),
    #[error("effective channel is not completely positive: Choi eigenvalue {0:.3e}")]
    ChoiNegative(f64),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, LindbladError>;

/// Hamiltonian plus a set of jump operators; all time-independent.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    h: HermitianOperator,
    jumps: Vec<ComplexMatrix>,
    dim: usize,
}

impl LindbladSpec {
    pub fn new(h: HermitianOperator, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = h.dim();
        for j in &jumps {
            if j.rows() != dim || j.cols() != dim {
                return Err(LindbladError::DimensionMismatch(format!(
                    "jump operator is {}×{}, Hamiltonian dimension is {dim}",
                    j.rows(),
                    j.cols()
                )));
            }
        }
        let spec = Self { h, jumps, dim };
        // tr(L_tot(ρ)) = 0 by construction; verify on matrix units.
        let l = spec.superop();
        let mut worst = 0.0f64;
        for c in 0..dim * dim {
            let mut unit = ComplexMatrix::zeros(dim, dim);
            unit.set(c / dim, c % dim, C64::new(1.0, 0.0));
            worst = worst.max(l.apply(&unit).trace().norm());
        }
        if worst > 1e-10 {
            return Err(LindbladError::NotTracePreserving(worst));
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    /// Hamiltonian part −i(H⊗I − I⊗Hᵀ).
    pub fn superop_hamiltonian(&self) -> Superoperator {
        let d = self.dim;
        let id = ComplexMatrix::identity(d);
        let m = self
            .h
            .matrix()
            .kron(&id)
            .sub(&id.kron(&self.h.matrix().transpose()))
            .scale(C64::new(0.0, -1.0));
        Superoperator::new(d, m).expect("shape by construction")
    }

    /// Dissipator Σ_j [L_j ⊗ L_j^* − ½(L_j†L_j ⊗ I + I ⊗ (L_j†L_j)ᵀ)].
    pub fn superop_dissipator(&self) -> Superoperator {
        let d = self.dim;
        let id = ComplexMatrix::identity(d);
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for l in &self.jumps {
            let ll = l.dagger().matmul(l);
            m = m
                .add(&l.kron(&l.conj()))
                .sub(&ll.kron(&id).scale(C64::new(0.5, 0.0)))
                .sub(&id.kron(&ll.transpose()).scale(C64::new(0.5, 0.0)));
        }
        Superoperator::new(d, m).expect("shape by construction")
    }

    /// Full generator L₀ + L₁.
    pub fn superop(&self) -> Superoperator {
        self.superop_hamiltonian().add(&self.superop_dissipator())
    }

    /// L_tot[ρ] applied directly from the definition (commutator plus jump
    /// terms), used to cross-check the vectorized matrix.
    pub fn apply_generator(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = self.h.matrix();
        let mut out = h
            .matmul(rho)
            .sub(&rho.matmul(h))
            .scale(C64::new(0.0, -1.0));
        for l in &self.jumps {
            let ll = l.dagger().matmul(l);
            out = out
                .add(&l.matmul(rho).matmul(&l.dagger()))
                .sub(&ll.matmul(rho).add(&rho.matmul(&ll)).scale(C64::new(0.5, 0.0)));
        }
        out
    }
}

/// Exact evolution ρ(t) = e^{t·L_tot}(ρ₀).
pub fn evolve(spec: &LindbladSpec, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    assert!(t >= 0.0, "evolution time must be nonnegative");
    let e_t = spec.superop().expm_scaled(t)?;
    let out = e_t.apply(rho0.matrix());
    Ok(DensityOperator::clamped(&out)?)
}

/// The factorization E_t = N_t ∘ (unitary conjugation by e^{−iHt}).
#[derive(Debug, Clone)]
pub struct DecomposedEvolution {
    pub t: f64,
    /// Full evolution superoperator e^{t(L₀+L₁)}.
    pub e_t: Superoperator,
    /// Effective instantaneous channel N_t = E_t·e^{−tL₀} in Kraus form.
    pub n_t: KrausChannel,
    /// e^{−iHt}.
    pub u_t: ComplexMatrix,
    /// Whether the commuting shortcut N_t = e^{tL₁} applied.
    pub commuting: bool,
    /// Most negative Choi eigenvalue clamped away during Kraus extraction
    /// (finite-precision matrix exponentials leak this much negativity;
    /// anything beyond −1e-8 aborts instead).
    pub clamped_negativity: f64,
}

/// Splits the evolution at time t into a unitary followed by an effective
/// channel, extracting Kraus operators from the Choi matrix of N_t.
pub fn decompose(spec: &LindbladSpec, t: f64) -> Result<DecomposedEvolution> {
    assert!(t >= 0.0, "evolution time must be nonnegative");
    let d = spec.dim();
    let l0 = spec.superop_hamiltonian();
    let l1 = spec.superop_dissipator();
    let e_t = l0.add(&l1).expm_scaled(t)?;
    let commutator = l0
        .matrix()
        .matmul(l1.matrix())
        .sub(&l1.matrix().matmul(l0.matrix()));
    let commuting = commutator.max_abs() < 1e-12;
    let n_t_super = if commuting {
        l1.expm_scaled(t)?
    } else {
        e_t.compose(&l0.expm_scaled(-t)?)
    };
    // Kraus extraction via the Choi eigendecomposition.
    let choi = n_t_super.choi();
    let herm = HermitianOperator::new(choi)?;
    let spec_c = eig_hermitian(&herm)?;
    let min = spec_c.eigenvalues().last().copied().unwrap_or(0.0);
    if min < -1e-8 {
        return Err(LindbladError::ChoiNegative(min));
    }
    let mut kraus = Vec::new();
    for (k, &lam) in spec_c.eigenvalues().iter().enumerate() {
        if lam < 1e-12 {
            continue; // spectral dust and exact zeros
        }
        let v = spec_c.eigenvector(k);
        let scale = lam.sqrt();
        kraus.push(ComplexMatrix::from_fn(d, d, |a, c| {
            v[a * d + c] * C64::new(scale, 0.0)
        }));
    }
    let n_t = KrausChannel::new(kraus)?;
    let u_t = crate::clock::evolution_unitary(spec.hamiltonian(), t);
    Ok(DecomposedEvolution {
        t,
        e_t,
        n_t,
        u_t,
        commuting,
        clamped_negativity: min.min(0.0),
    })
}

/// Clock Fisher quantities of a Lindblad evolution at the reference time t₀.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClockFisher {
    /// F(ρ(t₀); L_tot[ρ(t₀)]) — the exact sensitivity of the noisy clock.
    pub f_exact: f64,
    /// F(ρ(t₀); N_t₀(−i[H, ψ(t₀)])) — the instantaneous-channel picture that
    /// ignores the time dependence of N_t.
    pub f_unitary: f64,
    /// f_exact − f_unitary.
    pub delta: f64,
    /// Certified bound on |delta| from the continuity of the Fisher
    /// information in its second argument.
    pub delta_bound: f64,
}

/// Computes the exact and effective clock sensitivities together with the
/// approximation-error bound
///
///   |δ| ≤ F(ρ; (∂_tN)(ψ)) + √(F(ρ; (∂_tN)(ψ))·F_unitary) ,
///
/// where (∂_tN)(ψ) = L_tot[ρ] − E_t(−i[H, ψ₀]).
pub fn clock_fisher(spec: &LindbladSpec, psi0: &[C64], t0: f64) -> Result<ClockFisher> {
    let n = vec_norm(psi0);
    assert!((n - 1.0).abs() < 1e-10, "initial state must be normalized");
    let proj0 = ComplexMatrix::outer(psi0, psi0);
    let e_t = spec.superop().expm_scaled(t0)?;
    let rho = e_t.apply(&proj0);

    // Exact derivative from the generator.
    let drho = spec.apply_generator(&rho);
    let f_exact = qfi_of_output(&rho, &drho)?;

    // Effective-channel derivative: E_t applied to the noiseless commutator.
    let h = spec.hamiltonian().matrix();
    let d0 = h
        .matmul(&proj0)
        .sub(&proj0.matmul(h))
        .scale(C64::new(0.0, -1.0));
    let d_unitary = e_t.apply(&d0);
    let f_unitary = qfi_of_output(&rho, &d_unitary)?;

    // (∂_t N)(ψ) and the continuity bound.
    let dn_psi = drho.sub(&d_unitary);
    let f_dn = qfi_of_output(&rho, &dn_psi)?;
    let delta_bound = f_dn + (f_dn * f_unitary).sqrt();

    Ok(ClockFisher {
        f_exact,
        f_unitary,
        delta: f_exact - f_unitary,
        delta_bound,
    })
}

/// Z-dephasing jump pair √γ|↑⟩⟨↑|, √γ|↓⟩⟨↓| for a single qubit.
pub fn dephasing_z_jumps(gamma: f64) -> Vec<ComplexMatrix> {
    let g = gamma.sqrt();
    vec![
        ComplexMatrix::from_real_rows(&[&[g, 0.0], &[0.0, 0.0]]),
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, g]]),
    ]
}

/// X-dephasing jump pair √γ|+⟩⟨+|, √γ|−⟩⟨−|.
pub fn dephasing_x_jumps(gamma: f64) -> Vec<ComplexMatrix> {
    let g = gamma.sqrt() / 2.0;
    vec![
        ComplexMatrix::from_real_rows(&[&[g, g], &[g, g]]),
        ComplexMatrix::from_real_rows(&[&[g, -g], &[-g, g]]),
    ]
}

//! The noisy-clock metrology scenario and its time–energy trade-off.
//!
//! A pure probe |ψ⟩ evolves under a Hamiltonian H and, at a reference time
//! t₀, is handed to a receiver (Bob) through a noisy channel N while the
//! environment (Eve) collects the complementary output N̂.  Four Fisher
//! quantities describe the situation:
//!
//! - F_Alice(t) = 4σ_H², the noiseless time sensitivity,
//! - F_Alice(η) = 1/σ_H², the noiseless sensitivity to the complementary
//!   energy parameter η generated by the optimal time observable,
//! - F_Bob(t), the time sensitivity after the channel,
//! - F_Eve(η), the energy sensitivity of the environment.
//!
//! Whenever the rank of N(ψ(t)) does not change at t₀ these obey the equality
//!
//!   F_Bob(t)/F_Alice(t) + F_Eve(η)/F_Alice(η) = 1,
//!
//! and in full generality the left-hand side never exceeds 1.  Everything is
//! phrased in terms of the local pair (ψ, ξ = (H−⟨H⟩)ψ): the span of ψ and ξ
//! is a virtual qubit whose logical Y and Z directions are the time and
//! energy derivatives.

use thiserror::Error;

use crate::channels::{ChannelError, KrausChannel};
use crate::codes;
use crate::fisher::{qfi_of_output, sld, FisherError, FisherPair};
use crate::linalg::{
    eig_hermitian, expm, op_norm, pinv_psd, vec_inner, vec_norm, ComplexMatrix, DensityOperator,
    HermitianOperator, LinalgError, C64,
};

#[derive(Debug, Error)]
pub enum ClockError {
    #[error("probe is not normalized: ⟨ψ|ψ⟩ = {norm}")]
    NotNormalized { norm: f64 },
    #[error("stationary probe: (H − ⟨H⟩)|ψ⟩ = 0, all Fisher quantities are trivially zero")]
    StationaryProbe,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(
        "zero-sensitivity-loss conditions fail (worst residual {worst:.3e}); \
         run the metrological-code check for diagnostics"
    )]
    ZeroLossViolated { worst: f64 },
    #[error("series did not symmetrize: anti-Hermitian residual {0:.3e}")]
    NonHermitianSeries(f64),
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ClockError>;

/// Probe state, generator, channel, and reference time of one experiment.
///
/// Only the local data at t₀ matters: `psi` is the state *at* the reference
/// time, and all Fisher quantities are functions of (ψ, H, N) alone.
#[derive(Debug, Clone)]
pub struct MetrologyScenario {
    pub psi: Vec<C64>,
    pub h: HermitianOperator,
    pub channel: KrausChannel,
    pub t0: f64,
    pub label: String,
}

impl MetrologyScenario {
    pub fn new(
        psi: Vec<C64>,
        h: HermitianOperator,
        channel: KrausChannel,
        t0: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = vec_norm(&psi);
        if (n - 1.0).abs() > 1e-12 {
            return Err(ClockError::NotNormalized { norm: n });
        }
        if h.dim() != psi.len() {
            return Err(ClockError::DimensionMismatch(format!(
                "H is {}-dimensional, ψ has {} entries",
                h.dim(),
                psi.len()
            )));
        }
        if channel.in_dim() != psi.len() {
            return Err(ClockError::DimensionMismatch(format!(
                "channel input dimension {} vs probe dimension {}",
                channel.in_dim(),
                psi.len()
            )));
        }
        Ok(Self {
            psi,
            h,
            channel,
            t0,
            label: label.into(),
        })
    }

    pub fn mean_energy(&self) -> f64 {
        self.h.expectation(&self.psi)
    }

    pub fn energy_variance(&self) -> f64 {
        let h2 = self.h.matrix().matmul(self.h.matrix());
        h2.expectation(&self.psi).re - self.mean_energy().powi(2)
    }
}

/// ξ = (H − ⟨H⟩)|ψ⟩, the unnormalized time-derivative direction.
pub fn xi_vector(psi: &[C64], h: &HermitianOperator) -> Result<Vec<C64>> {
    let mean = h.expectation(psi);
    let hpsi = h.matrix().matvec(psi);
    let xi: Vec<C64> = hpsi
        .iter()
        .zip(psi)
        .map(|(a, b)| a - b * C64::new(mean, 0.0))
        .collect();
    let n = vec_norm(&xi);
    if n <= 1e-12 * op_norm(h.matrix()).max(1.0) {
        return Err(ClockError::StationaryProbe);
    }
    Ok(xi)
}

/// The virtual qubit spanned by |+⟩_L = |ψ⟩ and |−⟩_L = ξ/σ_H, together with
/// its logical Pauli operators.
#[derive(Debug, Clone)]
pub struct VirtualQubit {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
    pub sigma_h: f64,
}

impl VirtualQubit {
    pub fn from_probe(psi: &[C64], h: &HermitianOperator) -> Result<Self> {
        let xi = xi_vector(psi, h)?;
        let sigma_h = vec_norm(&xi);
        let minus = xi.iter().map(|z| z / sigma_h).collect();
        Ok(Self {
            plus: psi.to_vec(),
            minus,
            sigma_h,
        })
    }

    /// Builds directly from an orthonormal pair, as in the general form of
    /// the trade-off theorem.
    pub fn from_pair(plus: Vec<C64>, minus: Vec<C64>) -> Result<Self> {
        let overlap = vec_inner(&plus, &minus).norm();
        if overlap > 1e-10 {
            return Err(ClockError::DimensionMismatch(format!(
                "|+⟩_L and |−⟩_L are not orthogonal: |⟨+|−⟩| = {overlap:.3e}"
            )));
        }
        Ok(Self {
            plus,
            minus,
            sigma_h: 1.0,
        })
    }

    /// X_L = |+⟩⟨+| − |−⟩⟨−|.
    pub fn x_l(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.plus, &self.plus)
            .sub(&ComplexMatrix::outer(&self.minus, &self.minus))
    }

    /// Y_L = −i|−⟩⟨+| + i|+⟩⟨−|.
    pub fn y_l(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.minus, &self.plus)
            .scale(C64::new(0.0, -1.0))
            .add(&ComplexMatrix::outer(&self.plus, &self.minus).scale(C64::new(0.0, 1.0)))
    }

    /// Z_L = |−⟩⟨+| + |+⟩⟨−|.
    pub fn z_l(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.minus, &self.plus)
            .add(&ComplexMatrix::outer(&self.plus, &self.minus))
    }

    /// Projector onto the virtual qubit subspace.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.plus, &self.plus)
            .add(&ComplexMatrix::outer(&self.minus, &self.minus))
    }

    /// Unnormalized time direction −i(|ξ⟩⟨ψ| − |ψ⟩⟨ξ|) = σ_H·Y_L = −i[H̄, ψ].
    pub fn time_direction(&self) -> ComplexMatrix {
        self.y_l().scale(C64::new(self.sigma_h, 0.0))
    }

    /// Unnormalized anti-commutator direction {H̄, ψ} = σ_H·Z_L.
    pub fn anticommutator_direction(&self) -> ComplexMatrix {
        self.z_l().scale(C64::new(self.sigma_h, 0.0))
    }
}

/// Optimal local time-sensing observable
/// T = t₀·I + ∂_tψ/(2σ_H²) + P_ψ^⊥ M P_ψ^⊥.
pub fn optimal_time_observable(
    scenario: &MetrologyScenario,
    gauge: Option<&HermitianOperator>,
) -> Result<HermitianOperator> {
    let vq = VirtualQubit::from_probe(&scenario.psi, &scenario.h)?;
    let sigma2 = vq.sigma_h * vq.sigma_h;
    let d = scenario.psi.len();
    let dt_psi = vq.time_direction();
    let mut t = ComplexMatrix::identity(d)
        .scale(C64::new(scenario.t0, 0.0))
        .add(&dt_psi.scale(C64::new(1.0 / (2.0 * sigma2), 0.0)));
    if let Some(m) = gauge {
        let proj = ComplexMatrix::outer(&scenario.psi, &scenario.psi);
        let pperp = ComplexMatrix::identity(d).sub(&proj);
        t = t.add(&pperp.matmul(m.matrix()).matmul(&pperp));
    }
    Ok(HermitianOperator::new(t)?)
}

/// The energy-parameter direction ∂_ηψ = {H̄, ψ}/(2σ_H²).
pub fn eta_direction(scenario: &MetrologyScenario) -> Result<HermitianOperator> {
    let vq = VirtualQubit::from_probe(&scenario.psi, &scenario.h)?;
    let sigma2 = vq.sigma_h * vq.sigma_h;
    Ok(HermitianOperator::new(
        vq.anticommutator_direction()
            .scale(C64::new(1.0 / (2.0 * sigma2), 0.0)),
    )?)
}

/// The five Fisher quantities of one scenario plus equality diagnostics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FisherReport {
    pub f_alice_t: f64,
    pub f_alice_eta: f64,
    pub f_bob_t: f64,
    pub f_eve_eta: f64,
    /// ΔF = F_Alice(t) − F_Bob(t), computed on Bob's side.
    pub delta_f: f64,
    /// The same loss evaluated on Eve's side as F(N̂(ψ); N̂({H̄,ψ})).
    pub delta_f_eve_side: f64,
    /// F_Bob(t)/F_Alice(t) + F_Eve(η)/F_Alice(η).
    pub sum_ratio: f64,
    pub equality_holds: bool,
    pub rank_diag: String,
}

/// Computes all Fisher quantities of the scenario, always evaluating both
/// Bob's side and Eve's side independently; the redundancy is the built-in
/// self-test of the trade-off machinery.
pub fn fisher_report(scenario: &MetrologyScenario) -> Result<FisherReport> {
    let vq = VirtualQubit::from_probe(&scenario.psi, &scenario.h)?;
    let sigma2 = vq.sigma_h * vq.sigma_h;
    let f_alice_t = 4.0 * sigma2;
    let f_alice_eta = 1.0 / sigma2;

    let proj = ComplexMatrix::outer(&scenario.psi, &scenario.psi);
    let channel = &scenario.channel;
    let comp = channel.complementary();

    // Bob: time direction through N.
    let rho_b = channel.apply(&proj);
    let d_b = channel.apply(&vq.time_direction());
    let f_bob_t = qfi_of_output(&rho_b, &d_b)?;

    // Eve: energy direction through N̂.
    let rho_e = comp.apply(&proj);
    let anti = vq.anticommutator_direction();
    let d_e = comp.apply(&anti.scale(C64::new(1.0 / (2.0 * sigma2), 0.0)));
    let f_eve_eta = qfi_of_output(&rho_e, &d_e)?;

    // Eve-side expression for the loss.
    let d_e_full = comp.apply(&anti);
    let delta_f_eve_side = qfi_of_output(&rho_e, &d_e_full)?;

    let eq = equality_conditions(scenario)?;
    Ok(FisherReport {
        f_alice_t,
        f_alice_eta,
        f_bob_t,
        f_eve_eta,
        delta_f: f_alice_t - f_bob_t,
        delta_f_eve_side,
        sum_ratio: f_bob_t / f_alice_t + f_eve_eta / f_alice_eta,
        equality_holds: eq.holds,
        rank_diag: eq.diagnostics,
    })
}

/// Outcome of the rank-change / support test behind the trade-off equality.
#[derive(Debug, Clone)]
pub struct EqualityReport {
    pub holds: bool,
    /// ‖(P_ρB^⊥ ⊗ P_ρE^⊥) V|ξ⟩‖ against the tolerance 1e-8·‖ξ‖.
    pub residual: f64,
    pub tolerance: f64,
    /// Set when the residual sits within 10× of the threshold on either side.
    pub marginal: bool,
    /// Worst residual ‖P_ρB^⊥ E|ξ⟩‖ over null combinations E = Σc_kE_k with
    /// E|ψ⟩ = 0 (an equivalent form of the same condition).
    pub null_combination_residual: f64,
    pub diagnostics: String,
}

/// Evaluates the equality conditions of the trade-off relation for the
/// scenario's (ψ, ξ) pair.
pub fn equality_conditions(scenario: &MetrologyScenario) -> Result<EqualityReport> {
    let xi = xi_vector(&scenario.psi, &scenario.h)?;
    equality_conditions_for(&scenario.psi, &xi, &scenario.channel)
}

/// Same test for an explicit (ψ, ξ) pair; ξ may be unnormalized.
pub fn equality_conditions_for(
    psi: &[C64],
    xi: &[C64],
    channel: &KrausChannel,
) -> Result<EqualityReport> {
    let proj = ComplexMatrix::outer(psi, psi);
    let rho_b = DensityOperator::clamped(&channel.apply(&proj))?;
    let comp = channel.complementary();
    let rho_e = DensityOperator::clamped(&comp.apply(&proj))?;
    let spec_b = eig_hermitian(rho_b.hermitian())?;
    let spec_e = eig_hermitian(rho_e.hermitian())?;
    let pb_perp = spec_b.kernel_projector();
    let pe_perp = spec_e.kernel_projector();

    let st = channel.stinespring();
    let v_xi = st.apply_to_vector(xi);
    // Index layout of the dilation output: (b, k) = b·env + k.
    let env = st.env_dim();
    let out = st.out_dim();
    // Apply P_B^⊥ ⊗ P_E^⊥ in two passes.
    let mut half = vec![C64::new(0.0, 0.0); v_xi.len()];
    for b in 0..out {
        for k in 0..env {
            let mut acc = C64::new(0.0, 0.0);
            for bp in 0..out {
                acc += pb_perp.get(b, bp) * v_xi[bp * env + k];
            }
            half[b * env + k] = acc;
        }
    }
    let mut projected = vec![C64::new(0.0, 0.0); v_xi.len()];
    for b in 0..out {
        for k in 0..env {
            let mut acc = C64::new(0.0, 0.0);
            for kp in 0..env {
                acc += pe_perp.get(k, kp) * half[b * env + kp];
            }
            projected[b * env + k] = acc;
        }
    }
    let residual = vec_norm(&projected);
    let xi_norm = vec_norm(xi);
    let tolerance = 1e-8 * xi_norm;
    let holds = residual <= tolerance;
    let marginal = residual > tolerance / 10.0 && residual <= tolerance * 10.0;

    // Equivalent condition via null combinations of Kraus operators.
    let images: Vec<Vec<C64>> = channel.apply_to_vector(psi);
    let kk = images.len();
    let gram = ComplexMatrix::from_fn(kk, kk, |i, j| vec_inner(&images[i], &images[j]));
    let gram_spec = eig_hermitian(&HermitianOperator::new(gram)?)?;
    let mut null_combination_residual = 0.0f64;
    for idx in 0..kk {
        if gram_spec.eigenvalues()[idx] > gram_spec.zero_threshold() {
            continue;
        }
        let c = gram_spec.eigenvector(idx);
        // E = Σ c_k E_k applied to ξ.
        let mut e_xi = vec![C64::new(0.0, 0.0); channel.out_dim()];
        for (k, coeff) in c.iter().enumerate() {
            let img = channel.kraus()[k].matvec(xi);
            for (slot, z) in e_xi.iter_mut().zip(&img) {
                *slot += coeff * z;
            }
        }
        let projected = pb_perp.matvec(&e_xi);
        null_combination_residual = null_combination_residual.max(vec_norm(&projected));
    }

    let diagnostics = format!(
        "rank(ρ_B) = {}/{}, rank(ρ_E) = {}/{}; kernel-pair residual {:.3e} vs tol {:.3e}{}; \
         worst null-combination residual {:.3e}",
        spec_b.rank(),
        rho_b.dim(),
        spec_e.rank(),
        rho_e.dim(),
        residual,
        tolerance,
        if marginal { " (marginal)" } else { "" },
        null_combination_residual,
    );
    Ok(EqualityReport {
        holds,
        residual,
        tolerance,
        marginal,
        null_combination_residual,
        diagnostics,
    })
}

/// The two-parameter trade-off: for directions generated by Hermitian A and
/// B, returns (lhs, rhs) of
///
///   F_Bob(a)/F_Alice(a) + F_Eve(b)/F_Alice(b)
///     ≤ 1 + 2√(1 − ⟨i[A,B]⟩²/(4σ_A²σ_B²)).
pub fn two_parameter_bound(
    psi: &[C64],
    a: &HermitianOperator,
    b: &HermitianOperator,
    channel: &KrausChannel,
) -> Result<(f64, f64)> {
    let proj = ComplexMatrix::outer(psi, psi);
    let commut_dir = |op: &HermitianOperator| -> ComplexMatrix {
        op.matrix()
            .matmul(&proj)
            .sub(&proj.matmul(op.matrix()))
            .scale(C64::new(0.0, -1.0))
    };
    let variance = |op: &HermitianOperator| -> f64 {
        let mean = op.expectation(psi);
        op.matrix().matmul(op.matrix()).expectation(psi).re - mean * mean
    };
    let sigma_a2 = variance(a);
    let sigma_b2 = variance(b);
    if sigma_a2 <= 1e-14 || sigma_b2 <= 1e-14 {
        return Err(ClockError::StationaryProbe);
    }
    let d_a = commut_dir(a);
    let d_b = commut_dir(b);
    let comp = channel.complementary();
    let f_bob_a = qfi_of_output(&channel.apply(&proj), &channel.apply(&d_a))?;
    let f_eve_b = qfi_of_output(&comp.apply(&proj), &comp.apply(&d_b))?;
    let lhs = f_bob_a / (4.0 * sigma_a2) + f_eve_b / (4.0 * sigma_b2);

    // ⟨i[A, B]⟩_ψ
    let comm = a
        .matrix()
        .matmul(b.matrix())
        .sub(&b.matrix().matmul(a.matrix()))
        .scale(C64::new(0.0, 1.0));
    let mean_comm = comm.expectation(psi).re;
    let arg = (1.0 - mean_comm * mean_comm / (4.0 * sigma_a2 * sigma_b2)).max(0.0);
    let rhs = 1.0 + 2.0 * arg.sqrt();
    Ok((lhs, rhs))
}

/// Effective generator of the parameter f in H_f = H₀ + f·G after evolving
/// for a time T:
///
///   K_f = T Σ_{k=0}^{order} (−iT)^k/(k+1)! · ad_{H_f}^k(G).
///
/// Returns the symmetrized operator together with the norm of the last
/// retained term as a series-tail estimate.
pub fn signal_generator(
    h0: &HermitianOperator,
    g: &HermitianOperator,
    f0: f64,
    big_t: f64,
    order: usize,
) -> Result<(HermitianOperator, f64)> {
    assert!(order >= 1, "series order must be at least 1");
    let hf = h0.add(&g.scale(f0));
    let mut term = g.matrix().clone(); // ad^0(G)
    let mut acc = term.scale(C64::new(big_t, 0.0)); // k = 0 contribution
    let mut coeff = C64::new(big_t, 0.0);
    let mut last_norm = 0.0;
    for k in 1..=order {
        // ad^k(G) = [H_f, ad^{k-1}(G)]
        term = hf.matrix().matmul(&term).sub(&term.matmul(hf.matrix()));
        coeff *= C64::new(0.0, -big_t) / C64::new((k + 1) as f64, 0.0);
        let contribution = term.scale(coeff);
        last_norm = op_norm(&contribution);
        acc = acc.add(&contribution);
    }
    let anti = acc.sub(&acc.dagger()).max_abs();
    if anti > 1e-9 * acc.max_abs().max(1.0) {
        return Err(ClockError::NonHermitianSeries(anti));
    }
    let sym = acc.add(&acc.dagger()).scale(C64::new(0.5, 0.0));
    Ok((HermitianOperator::new(sym)?, last_norm))
}

/// Explicit symmetric logarithmic derivative on Bob's side when the
/// zero-sensitivity-loss conditions hold:
///
///   R_B = −2i·N(|ξ⟩⟨ψ|)·ρ⁻¹ + 2i·ρ⁻¹·N(|ψ⟩⟨ξ|)·P_ρ^⊥ ,  ρ = N(ψ).
pub fn explicit_bob_sld(scenario: &MetrologyScenario) -> Result<HermitianOperator> {
    let xi = xi_vector(&scenario.psi, &scenario.h)?;
    let zl = codes::zero_loss_check_vectors(&scenario.psi, &xi, &scenario.channel);
    if !zl.holds {
        return Err(ClockError::ZeroLossViolated {
            worst: zl.worst_residual,
        });
    }
    let proj = ComplexMatrix::outer(&scenario.psi, &scenario.psi);
    let rho = scenario.channel.apply(&proj);
    let rho_inv = pinv_psd(&rho)?;
    let spec = eig_hermitian(&HermitianOperator::new(rho.clone())?)?;
    let p_perp = spec.kernel_projector();
    let n_xi_psi = scenario
        .channel
        .apply(&ComplexMatrix::outer(&xi, &scenario.psi));
    let n_psi_xi = scenario
        .channel
        .apply(&ComplexMatrix::outer(&scenario.psi, &xi));
    let r = n_xi_psi.matmul(&rho_inv).scale(C64::new(0.0, -2.0)).add(
        &rho_inv
            .matmul(&n_psi_xi)
            .matmul(&p_perp)
            .scale(C64::new(0.0, 2.0)),
    );
    Ok(HermitianOperator::new(r)?)
}

/// Unitary e^{−iHt}.
pub fn evolution_unitary(h: &HermitianOperator, t: f64) -> ComplexMatrix {
    expm(&h.matrix().scale(C64::new(0.0, -t))).expect("finite generator")
}

/// Canonical-gauge SLD of Bob's pair, for cross-checks against the explicit
/// formula.
pub fn bob_sld_canonical(scenario: &MetrologyScenario) -> Result<HermitianOperator> {
    let vq = VirtualQubit::from_probe(&scenario.psi, &scenario.h)?;
    let proj = ComplexMatrix::outer(&scenario.psi, &scenario.psi);
    let rho = DensityOperator::clamped(&scenario.channel.apply(&proj))?;
    let d = HermitianOperator::new(scenario.channel.apply(&vq.time_direction()))?;
    let pair = FisherPair::new(rho, d)?;
    Ok(sld(&pair)?.r)
}

/// tr(ρ_B R²) for an explicitly supplied candidate SLD on Bob's side.
pub fn fisher_value_of_sld(scenario: &MetrologyScenario, r: &HermitianOperator) -> Result<f64> {
    let proj = ComplexMatrix::outer(&scenario.psi, &scenario.psi);
    let rho = scenario.channel.apply(&proj);
    Ok(rho.matmul(r.matrix()).matmul(r.matrix()).trace().re)
}

/// Trade-off for an arbitrary orthonormal virtual-qubit pair under a
/// trace-non-increasing map: returns (lhs, rhs) of
/// F(N(ψ); N(Y_L)) + F(N̂(ψ); N̂(Z_L)) ≤ 4⟨−|N†(I)|−⟩_L together with the
/// equality report of the support condition.
pub fn virtual_qubit_tradeoff(
    vq: &VirtualQubit,
    channel: &KrausChannel,
) -> Result<(f64, f64, EqualityReport)> {
    let proj = ComplexMatrix::outer(&vq.plus, &vq.plus);
    let comp = channel.complementary();
    let f_y = qfi_of_output(&channel.apply(&proj), &channel.apply(&vq.y_l()))?;
    let f_z = qfi_of_output(&comp.apply(&proj), &comp.apply(&vq.z_l()))?;
    let n_id = channel.adjoint_apply(&ComplexMatrix::identity(channel.out_dim()));
    let rhs = 4.0 * n_id.expectation(&vq.minus).re;
    let eq = equality_conditions_for(&vq.plus, &vq.minus, channel)?;
    Ok((f_y + f_z, rhs, eq))
}

#[cfg(test)]
mod tests;

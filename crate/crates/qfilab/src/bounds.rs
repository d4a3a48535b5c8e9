//! Fisher-information bound toolbox for noisy probes.
//!
//! All bounds here avoid computing the symmetric logarithmic derivative on
//! the receiver's (possibly huge) output:
//!
//! - the *pinched* i.i.d. upper bound dephases the environment in the Kraus
//!   index basis and keeps only low-weight jump patterns, giving
//!   F_Bob ≤ 4σ_H² − Σ_{|x|≤k} [2Re⟨ψ|H̄E_x†E_x|ψ⟩]²/tr(E_x†E_x ψ);
//! - the *pre-processing* lower bound factors the complementary channel
//!   through an intermediary and uses data processing the other way,
//!   F_Bob ≥ 4σ_H² − F(N̂₀(ψ); N̂₀({H̄,ψ}));
//! - the *near-diagonal* bound trades the eigendecomposition of Eve's state
//!   for an LDLᴴ factorization ρ_E = AτA† with diagonal τ,
//!   ΔF ≤ ‖A‖²·F(τ; A⁻¹N̂({H̄,ψ})A⁻†);
//! - the *energy-access* pair scores how well an environment observable S
//!   reproduces the probe Hamiltonian through N̂†, with a certified cap
//!   F_Bob ≤ 12δ‖H̄‖² when the reproduction is δ-accurate;
//! - the *weak-noise order fit* extracts the exponent m of ΔF = O(p^m) from
//!   a log-log sweep.

use serde::Serialize;
use thiserror::Error;

use crate::channels::{ChannelError, KrausChannel};
use crate::fisher::{qfi, qfi_of_output, FisherError, FisherPair};
use crate::linalg::{
    invert_unit_lower, ldlt_psd, op_norm, vec_inner, vec_norm, ComplexMatrix, DensityOperator,
    HermitianOperator, LinalgError, C64,
};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("factorization breakdown: {0}")]
    Factorization(String),
    #[error(
        "energy-access precondition fails: ‖N̂†(S)−H̄‖ = {first:.3e}, \
         ‖N̂†(S²)−H̄²‖ = {second:.3e} exceed δ·‖H̄‖ = {cap1:.3e} / δ·‖H̄‖² = {cap2:.3e}"
    )]
    EnergyAccessPrecondition {
        first: f64,
        second: f64,
        cap1: f64,
        cap2: f64,
    },
    #[error("order fit needs ≥ 4 positive points spanning a decade, got {0}")]
    FitUnderdetermined(String),
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

/// Which side of F_Bob a bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    UpperOnFBob,
    LowerOnFBob,
}

/// A bound value together with its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub kind: BoundKind,
    pub k_used: usize,
    pub certificate: String,
}

/// Single-site i.i.d. noise acting on every one of n sites.  By convention
/// Kraus index 0 is the identity-like operator and indices ≥ 1 are jumps;
/// `identity_like` records how far E₀ is from √(1−O(p))·I.
#[derive(Debug, Clone)]
pub struct IIDNoiseSpec {
    pub single_site: KrausChannel,
    pub n: usize,
    pub p: f64,
    pub identity_like_residual: f64,
}

impl IIDNoiseSpec {
    pub fn new(single_site: KrausChannel, n: usize, p: f64) -> Self {
        let d = single_site.in_dim();
        let e0 = &single_site.kraus()[0];
        let scale = (1.0 - p).sqrt().max((1.0 - p / 2.0).sqrt());
        let residual = e0
            .sub(&ComplexMatrix::identity(d).scale(C64::new(scale, 0.0)))
            .max_abs();
        Self {
            single_site,
            n,
            p,
            identity_like_residual: residual,
        }
    }
}

/// Pinched i.i.d. upper bound on F_Bob for a dense probe vector.
///
/// Enumerates jump patterns of weight ≤ k (supports × jump letters) and
/// applies the single-site Kraus factors directly to ψ and H̄ψ; terms with
/// probability below 1e-14 are dropped, which only loosens the bound.
pub fn pinched_iid_upper(
    psi: &[C64],
    h: &HermitianOperator,
    spec: &IIDNoiseSpec,
    k: usize,
) -> Result<BoundResult> {
    let n = spec.n;
    let dim = psi.len();
    if dim != 1usize << n || h.dim() != dim {
        return Err(BoundsError::DimensionMismatch(format!(
            "probe dimension {dim} vs 2^{n} sites"
        )));
    }
    let mean = h.expectation(psi);
    let hbar_psi: Vec<C64> = h
        .matrix()
        .matvec(psi)
        .iter()
        .zip(psi)
        .map(|(a, b)| a - b * C64::new(mean, 0.0))
        .collect();
    let sigma2 = vec_norm(&hbar_psi).powi(2);

    let kraus = spec.single_site.kraus();
    let jumps = kraus.len() - 1;
    let mut loss = 0.0f64;
    let mut terms = 0usize;
    // Depth-first over supports; letters enumerated per support.  A channel
    // without jump operators contributes only the empty pattern.
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(vec![], 0)];
    while let Some((support, next)) = stack.pop() {
        if jumps == 0 && !support.is_empty() {
            continue;
        }
        let w = support.len();
        let mut letters = vec![0usize; w];
        loop {
            let v = apply_pattern(psi, n, kraus, &support, &letters);
            let u = apply_pattern(&hbar_psi, n, kraus, &support, &letters);
            let prob = vec_norm(&v).powi(2);
            if prob >= 1e-14 {
                let cross = 2.0 * vec_inner(&u, &v).re;
                loss += cross * cross / prob;
                terms += 1;
            }
            let mut pos = 0;
            loop {
                if pos == w {
                    break;
                }
                letters[pos] += 1;
                if letters[pos] < jumps {
                    break;
                }
                letters[pos] = 0;
                pos += 1;
            }
            if pos == w || w == 0 {
                break;
            }
        }
        if w < k {
            for site in next..n {
                let mut s = support.clone();
                s.push(site);
                stack.push((s, site + 1));
            }
        }
    }
    Ok(BoundResult {
        value: 4.0 * sigma2 - loss,
        kind: BoundKind::UpperOnFBob,
        k_used: k,
        certificate: format!("pinched i.i.d. bound, dense path: {terms} patterns, ΔF ≥ {loss:.6e}"),
    })
}

/// E_x|v⟩ with jump letters on the support and E₀ elsewhere, applied
/// site-by-site without forming tensor products.
fn apply_pattern(
    v: &[C64],
    n: usize,
    kraus: &[ComplexMatrix],
    support: &[usize],
    letters: &[usize],
) -> Vec<C64> {
    let mut out = v.to_vec();
    for site in 0..n {
        let op = match support.iter().position(|&s| s == site) {
            Some(slot) => &kraus[1 + letters[slot]],
            None => &kraus[0],
        };
        out = apply_single_site(&out, n, site, op);
    }
    out
}

/// Applies a single-qubit operator to one site of a 2^n vector
/// (qubit 0 is the most significant bit).
pub fn apply_single_site(v: &[C64], n: usize, site: usize, op: &ComplexMatrix) -> Vec<C64> {
    let dim = v.len();
    debug_assert_eq!(dim, 1 << n);
    let bit = n - 1 - site;
    let stride = 1usize << bit;
    let mut out = vec![C64::new(0.0, 0.0); dim];
    let a = op.get(0, 0);
    let b = op.get(0, 1);
    let c = op.get(1, 0);
    let d = op.get(1, 1);
    for idx in 0..dim {
        if idx & stride == 0 {
            let up = v[idx];
            let down = v[idx | stride];
            out[idx] = a * up + b * down;
            out[idx | stride] = c * up + d * down;
        }
    }
    out
}

/// Pre-processing lower bound: F_Bob ≥ 4σ_H² − F(N̂₀(ψ); N̂₀({H̄,ψ})) for any
/// factorization N̂ = N′ ∘ N̂₀ (asserted by the caller).
pub fn preprocessing_lower(
    psi: &[C64],
    h: &HermitianOperator,
    nhat0: &KrausChannel,
) -> Result<BoundResult> {
    if nhat0.in_dim() != psi.len() {
        return Err(BoundsError::DimensionMismatch(format!(
            "probe dimension {} vs channel input {}",
            psi.len(),
            nhat0.in_dim()
        )));
    }
    let mean = h.expectation(psi);
    let hbar_psi: Vec<C64> = h
        .matrix()
        .matvec(psi)
        .iter()
        .zip(psi)
        .map(|(a, b)| a - b * C64::new(mean, 0.0))
        .collect();
    let sigma2 = vec_norm(&hbar_psi).powi(2);
    let proj = ComplexMatrix::outer(psi, psi);
    let anti = ComplexMatrix::outer(&hbar_psi, psi).add(&ComplexMatrix::outer(psi, &hbar_psi));
    let loss_cap = qfi_of_output(&nhat0.apply(&proj), &nhat0.apply(&anti))?;
    Ok(BoundResult {
        value: 4.0 * sigma2 - loss_cap,
        kind: BoundKind::LowerOnFBob,
        k_used: 0,
        certificate: format!("pre-processing bound: ΔF ≤ {loss_cap:.6e}"),
    })
}

/// Pre-processing lower bound for an i.i.d. single-site channel with the
/// exact factorization N̂ = Id ∘ N̂ (Eve's full complementary channel as the
/// intermediary), assembled from pattern-vector Gram matrices instead of
/// materialized tensor-product Kraus operators:
///
///   (ρ_E)_{x,x'} = ⟨E_{x'}ψ|E_xψ⟩,   (D_E)_{x,x'} = ⟨E_{x'}ψ|E_xξ⟩ + ⟨E_{x'}ξ|E_xψ⟩.
pub fn preprocessing_lower_iid_exact(
    psi: &[C64],
    h: &HermitianOperator,
    single_site: &KrausChannel,
    n: usize,
) -> Result<BoundResult> {
    let dim = psi.len();
    if dim != 1usize << n {
        return Err(BoundsError::DimensionMismatch(format!(
            "probe dimension {dim} vs 2^{n}"
        )));
    }
    let mean = h.expectation(psi);
    let xi: Vec<C64> = h
        .matrix()
        .matvec(psi)
        .iter()
        .zip(psi)
        .map(|(a, b)| a - b * C64::new(mean, 0.0))
        .collect();
    let sigma2 = vec_norm(&xi).powi(2);
    let kraus = single_site.kraus();
    let m = kraus.len();
    let patterns = m.pow(n as u32);
    let mut v = Vec::with_capacity(patterns);
    let mut w = Vec::with_capacity(patterns);
    let mut pattern = vec![0usize; n];
    loop {
        let mut pv = psi.to_vec();
        let mut pw = xi.clone();
        for (site, &letter) in pattern.iter().enumerate() {
            pv = apply_single_site(&pv, n, site, &kraus[letter]);
            pw = apply_single_site(&pw, n, site, &kraus[letter]);
        }
        v.push(pv);
        w.push(pw);
        let mut pos = 0;
        loop {
            if pos == n {
                break;
            }
            pattern[pos] += 1;
            if pattern[pos] < m {
                break;
            }
            pattern[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    let rho_e = ComplexMatrix::from_fn(patterns, patterns, |x, xp| vec_inner(&v[xp], &v[x]));
    let d_e = ComplexMatrix::from_fn(patterns, patterns, |x, xp| {
        vec_inner(&v[xp], &w[x]) + vec_inner(&w[xp], &v[x])
    });
    let loss_cap = qfi_of_output(&rho_e, &d_e)?;
    Ok(BoundResult {
        value: 4.0 * sigma2 - loss_cap,
        kind: BoundKind::LowerOnFBob,
        k_used: n,
        certificate: format!(
            "pre-processing bound with the exact complementary factorization: ΔF ≤ {loss_cap:.6e}"
        ),
    })
}

/// Near-diagonal upper bound: factor ρ_E = A·τ·A† by LDLᴴ (pivot floor
/// 1e-12) and evaluate ΔF ≤ ‖A‖²·F(τ; A⁻¹·N̂({H̄,ψ})·A⁻†) on the diagonal τ.
pub fn near_diagonal_upper(
    psi: &[C64],
    h: &HermitianOperator,
    nhat: &KrausChannel,
) -> Result<BoundResult> {
    let mean = h.expectation(psi);
    let hbar_psi: Vec<C64> = h
        .matrix()
        .matvec(psi)
        .iter()
        .zip(psi)
        .map(|(a, b)| a - b * C64::new(mean, 0.0))
        .collect();
    let sigma2 = vec_norm(&hbar_psi).powi(2);
    let proj = ComplexMatrix::outer(psi, psi);
    let rho_e = nhat.apply(&proj);
    let d_e = nhat.apply(
        &ComplexMatrix::outer(&hbar_psi, psi).add(&ComplexMatrix::outer(psi, &hbar_psi)),
    );
    let (l, tau) = ldlt_psd(&rho_e, 1e-12).map_err(|e| BoundsError::Factorization(e.to_string()))?;
    let l_inv = invert_unit_lower(&l);
    let transformed = l_inv.matmul(&d_e).matmul(&l_inv.dagger());
    // F(τ; D̃) with diagonal τ: Σ 2/(τ_i+τ_j)|D̃_ij|² directly.
    let dim = tau.len();
    let tau_max = tau.iter().cloned().fold(0.0f64, f64::max);
    let thr = 1e-12 * tau_max.max(1.0);
    let mut fisher = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let denom = tau[i] + tau[j];
            if denom > thr {
                fisher += 2.0 / denom * transformed.get(i, j).norm_sqr();
            }
        }
    }
    let a_norm2 = op_norm(&l).powi(2);
    let loss_cap = a_norm2 * fisher;
    Ok(BoundResult {
        value: loss_cap,
        kind: BoundKind::UpperOnFBob,
        k_used: 0,
        certificate: format!(
            "near-diagonal bound: ‖A‖² = {a_norm2:.6e}, diagonal Fisher {fisher:.6e}; \
             ΔF ≤ {loss_cap:.6e}, so F_Bob ≥ {:.6e}",
            4.0 * sigma2 - loss_cap
        ),
    })
}

/// Energy-access diagnostics for an environment observable S.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyAccessReport {
    /// 4⟨(N̂†(S) − H)²⟩_ψ for the supplied S.  A candidate objective only:
    /// the true lower bound on F_Bob takes the minimum over all S.
    pub candidate_floor: f64,
    /// Certified upper cap 12δ‖H̄‖² on F_Bob.
    pub upper_cap: f64,
    pub delta: f64,
}

/// Evaluates how well Eve can reconstruct the probe energy with the
/// observable S: verifies ‖N̂†(S)−H̄‖ ≤ δ‖H̄‖ and ‖N̂†(S²)−H̄²‖ ≤ δ‖H̄‖², then
/// reports the certified cap F_Bob ≤ 12δ‖H̄‖² alongside the candidate
/// objective 4⟨(N̂†(S)−H)²⟩.
pub fn energy_access_bounds(
    psi: &[C64],
    h: &HermitianOperator,
    nhat: &KrausChannel,
    s: &HermitianOperator,
    delta: f64,
) -> Result<EnergyAccessReport> {
    let mean = h.expectation(psi);
    let hbar = h.shift(-mean);
    let pulled = nhat.adjoint_apply(s.matrix());
    let pulled_sq = nhat.adjoint_apply(&s.matrix().matmul(s.matrix()));
    let h_norm = op_norm(hbar.matrix());
    let first = op_norm(&pulled.sub(hbar.matrix()));
    let second = op_norm(&pulled_sq.sub(&hbar.matrix().matmul(hbar.matrix())));
    let cap1 = delta * h_norm;
    let cap2 = delta * h_norm * h_norm;
    if first > cap1 || second > cap2 {
        return Err(BoundsError::EnergyAccessPrecondition {
            first,
            second,
            cap1,
            cap2,
        });
    }
    // Candidate objective with the unshifted H (identity shifts of H are
    // absorbed into S).
    let diff = nhat.adjoint_apply(s.matrix()).sub(hbar.matrix());
    let candidate_floor = 4.0 * diff.matmul(&diff).expectation(psi).re;
    Ok(EnergyAccessReport {
        candidate_floor,
        upper_cap: 12.0 * delta * h_norm * h_norm,
        delta,
    })
}

/// Ordinary least squares for log(ΔF) = m·log(p) + b over a sweep; returns
/// (slope m, standard error of m).  Nonpositive ΔF values are excluded.
pub fn weak_noise_order_fit(sweep: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = sweep
        .iter()
        .filter(|(p, df)| *p > 0.0 && *df > 0.0)
        .map(|(p, df)| (p.ln(), df.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(BoundsError::FitUnderdetermined(format!(
            "{} usable points",
            pts.len()
        )));
    }
    let span = pts
        .iter()
        .map(|(x, _)| *x)
        .fold(f64::NEG_INFINITY, f64::max)
        - pts.iter().map(|(x, _)| *x).fold(f64::INFINITY, f64::min);
    if span < std::f64::consts::LN_10 * 0.999 {
        return Err(BoundsError::FitUnderdetermined(format!(
            "p range spans {:.2} decades",
            span / std::f64::consts::LN_10
        )));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = pts
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pts
        .iter()
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let stderr = if pts.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// Exact F_Bob of a dense probe through an explicitly materialized channel;
/// the dense oracle the bounds are bracketed against in tests.
pub fn exact_f_bob(
    psi: &[C64],
    h: &HermitianOperator,
    channel: &KrausChannel,
) -> Result<f64> {
    let mean = h.expectation(psi);
    let hbar_psi: Vec<C64> = h
        .matrix()
        .matvec(psi)
        .iter()
        .zip(psi)
        .map(|(a, b)| a - b * C64::new(mean, 0.0))
        .collect();
    let proj = ComplexMatrix::outer(psi, psi);
    let d = ComplexMatrix::outer(&hbar_psi, psi)
        .sub(&ComplexMatrix::outer(psi, &hbar_psi))
        .scale(C64::new(0.0, -1.0));
    Ok(qfi_of_output(&channel.apply(&proj), &channel.apply(&d))?)
}

/// Exact F_Bob of a dense probe under an i.i.d. single-site channel, without
/// materializing tensor-product Kraus matrices: Bob's state and direction are
/// assembled from per-pattern vectors, ρ_B = Σ_x (E_x ψ)(E_x ψ)† and
/// D_B = −i Σ_x [(E_x ξ)(E_x ψ)† − h.c.], then fed to the eigenbasis QFI.
pub fn exact_f_bob_iid(
    psi: &[C64],
    h: &HermitianOperator,
    single_site: &KrausChannel,
    n: usize,
) -> Result<f64> {
    let dim = psi.len();
    if dim != 1usize << n {
        return Err(BoundsError::DimensionMismatch(format!(
            "probe dimension {dim} vs 2^{n}"
        )));
    }
    let mean = h.expectation(psi);
    let xi: Vec<C64> = h
        .matrix()
        .matvec(psi)
        .iter()
        .zip(psi)
        .map(|(a, b)| a - b * C64::new(mean, 0.0))
        .collect();
    let kraus = single_site.kraus();
    let m = kraus.len();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    let mut d_b = ComplexMatrix::zeros(dim, dim);
    let mut pattern = vec![0usize; n];
    loop {
        let mut v = psi.to_vec();
        let mut u = xi.clone();
        for (site, &letter) in pattern.iter().enumerate() {
            v = apply_single_site(&v, n, site, &kraus[letter]);
            u = apply_single_site(&u, n, site, &kraus[letter]);
        }
        // ρ += v v†; D += −i(u v† − v u†).
        for i in 0..dim {
            if v[i].norm_sqr() + u[i].norm_sqr() < 1e-300 {
                continue;
            }
            for j in 0..dim {
                let vv = v[i] * v[j].conj();
                let uv = u[i] * v[j].conj();
                let vu = v[i] * u[j].conj();
                rho.set(i, j, rho.get(i, j) + vv);
                d_b.set(
                    i,
                    j,
                    d_b.get(i, j) + C64::new(0.0, -1.0) * (uv - vu),
                );
            }
        }
        // Next pattern in mixed radix.
        let mut pos = 0;
        loop {
            if pos == n {
                break;
            }
            pattern[pos] += 1;
            if pattern[pos] < m {
                break;
            }
            pattern[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    Ok(qfi_of_output(&rho, &d_b)?)
}

/// F(ρ; D) for an explicitly diagonal ρ (used by the weak-noise analyses).
pub fn qfi_diagonal(diag: &[f64], d: &ComplexMatrix) -> Result<f64> {
    let dim = diag.len();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for (i, &x) in diag.iter().enumerate() {
        rho.set(i, i, C64::new(x, 0.0));
    }
    let pair = FisherPair::new(
        DensityOperator::clamped(&rho)?,
        HermitianOperator::new(d.clone())?,
    )?;
    Ok(qfi(&pair)?)
}

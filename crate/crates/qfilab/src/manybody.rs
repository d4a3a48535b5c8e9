//! Many-body probes: Dicke-basis (symmetric subspace) computations, sparse
//! probe states, and the probe library for spin chains and lattices.
//!
//! Permutation-invariant states of n spins live in the (n+1)-dimensional
//! symmetric subspace spanned by the Dicke states |h_q^n⟩ with q excitations
//! (down spins).  Reduced operators on k kept sites stay inside the local
//! symmetric subspace, with matrix elements given by hypergeometric
//! weight-class coefficients:
//!
//!   tr_{k+1…n}(|h_q^n⟩⟨h_{q'}^n|) = Σ_a √(C(k,a)·C(k,b)) · C(n−k, q−a)
//!                                    /√(C(n,q)·C(n,q')) · |h_a^k⟩⟨h_b^k| ,
//!
//! with b = a + (q' − q).  That reduction powers erasure losses at large n,
//! and the same weight-class collapse makes the pinched i.i.d. bound an
//! O(n·k) computation for symmetric probes.

use thiserror::Error;

use crate::bounds::{BoundKind, BoundResult};
use crate::channels::KrausChannel;
use crate::fisher::{qfi_of_output, FisherError};
use crate::linalg::{vec_norm, ComplexMatrix, HermitianOperator, LinalgError, C64};

#[derive(Debug, Error)]
pub enum ManybodyError {
    #[error("excitation number {q} out of range for {n} sites")]
    RangeError { n: usize, q: usize },
    #[error("state is not normalized: Σ|ψ_q|² = {norm}")]
    NotNormalized { norm: f64 },
    #[error("bitstrings of a sparse probe must be distinct")]
    DuplicateBitstring,
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    #[error("site count {n} exceeds the cap {cap} for this path")]
    SiteCap { n: usize, cap: usize },
    #[error("unknown probe name: {0}")]
    UnknownProbe(String),
    #[error(
        "graph-code state needs pairwise Hamming distance ≥ {needed} between \
         0…0, 1…1, x, x̃; got {got}"
    )]
    HammingDistance { needed: usize, got: usize },
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ManybodyError>;

/// Cap for the symmetric-subspace path.
pub const SYMMETRIC_SITE_CAP: usize = 128;
/// Caps for the sparse-probe path.
pub const SPARSE_SITE_CAP: usize = 64;
pub const SPARSE_TERM_CAP: usize = 16;

/// Permutation-invariant pure state as amplitudes over the Dicke basis.
#[derive(Debug, Clone)]
pub struct SymmetricState {
    n: usize,
    amps: Vec<C64>,
}

impl SymmetricState {
    pub fn new(n: usize, amps: Vec<C64>) -> Result<Self> {
        if n > SYMMETRIC_SITE_CAP {
            return Err(ManybodyError::SiteCap {
                n,
                cap: SYMMETRIC_SITE_CAP,
            });
        }
        if amps.len() != n + 1 {
            return Err(ManybodyError::RangeError { n, q: amps.len() });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(ManybodyError::NotNormalized { norm });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Mean of the on-site-field Hamiltonian H = Σ(ω/2)Z_i over the state.
    pub fn mean_energy(&self, omega: f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(q, a)| a.norm_sqr() * dicke_energy(self.n, q, omega))
            .sum()
    }

    pub fn energy_variance(&self, omega: f64) -> f64 {
        let mean = self.mean_energy(omega);
        self.amps
            .iter()
            .enumerate()
            .map(|(q, a)| a.norm_sqr() * (dicke_energy(self.n, q, omega) - mean).powi(2))
            .sum()
    }

    /// Dense 2^n-dimensional state vector (tests and small-n cross-checks).
    pub fn densify(&self) -> Result<Vec<C64>> {
        if self.n > 20 {
            return Err(ManybodyError::SiteCap { n: self.n, cap: 20 });
        }
        let dim = 1usize << self.n;
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (idx, slot) in out.iter_mut().enumerate() {
            let q = (idx as u32).count_ones() as usize;
            *slot = self.amps[q] / C64::new(binomial(self.n, q).sqrt(), 0.0);
        }
        Ok(out)
    }
}

/// Energy of |h_q^n⟩ under H = Σ(ω/2)Z_i (spin up = +1).
pub fn dicke_energy(n: usize, q: usize, omega: f64) -> f64 {
    omega / 2.0 * (n as f64 - 2.0 * q as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Dicke state with q excitations.
pub fn dicke(n: usize, q: usize) -> Result<SymmetricState> {
    if q > n {
        return Err(ManybodyError::RangeError { n, q });
    }
    let mut amps = vec![C64::new(0.0, 0.0); n + 1];
    amps[q] = C64::new(1.0, 0.0);
    SymmetricState::new(n, amps)
}

/// Reduced operator of |h_q^n⟩⟨h_{q'}^n| on k kept sites in the local Dicke
/// basis: entries at (a, a + q' − q).
fn reduced_dicke_pair(n: usize, k: usize, q: usize, qp: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(k + 1, k + 1);
    let delta = qp as isize - q as isize;
    let norm = (binomial(n, q) * binomial(n, qp)).sqrt();
    for a in 0..=k {
        let b = a as isize + delta;
        if b < 0 || b > k as isize {
            continue;
        }
        let b = b as usize;
        if q < a || n - k < q - a {
            continue;
        }
        let env = binomial(n - k, q - a);
        if env == 0.0 {
            continue;
        }
        let coeff = (binomial(k, a) * binomial(k, b)).sqrt() * env / norm;
        out.set(a, b, C64::new(coeff, 0.0));
    }
    out
}

/// Reduced state of a symmetric probe on k kept sites ((k+1)-dimensional).
pub fn symmetric_reduced_state(state: &SymmetricState, k: usize) -> ComplexMatrix {
    let n = state.n;
    let mut out = ComplexMatrix::zeros(k + 1, k + 1);
    for (q, aq) in state.amps.iter().enumerate() {
        for (qp, aqp) in state.amps.iter().enumerate() {
            let w = aq * aqp.conj();
            if w.norm() < 1e-300 {
                continue;
            }
            out = out.add(&reduced_dicke_pair(n, k, q, qp).scale(w));
        }
    }
    out
}

/// Reduced operator of {H̄, ψ} = |ξ⟩⟨ψ| + |ψ⟩⟨ξ| on k kept sites, where
/// ξ = (H − ⟨H⟩)ψ and H = Σ(ω/2)Z_i.
pub fn symmetric_reduced_anticommutator(
    state: &SymmetricState,
    omega: f64,
    k: usize,
) -> ComplexMatrix {
    let n = state.n;
    let mean = state.mean_energy(omega);
    let xi: Vec<C64> = state
        .amps
        .iter()
        .enumerate()
        .map(|(q, a)| a * C64::new(dicke_energy(n, q, omega) - mean, 0.0))
        .collect();
    let mut out = ComplexMatrix::zeros(k + 1, k + 1);
    for q in 0..=n {
        for qp in 0..=n {
            // |ξ⟩⟨ψ| + |ψ⟩⟨ξ| componentwise over the Dicke indices.
            let w = xi[q] * state.amps[qp].conj() + state.amps[q] * xi[qp].conj();
            if w.norm() < 1e-300 {
                continue;
            }
            out = out.add(&reduced_dicke_pair(n, k, q, qp).scale(w));
        }
    }
    out
}

/// Sensitivity loss when k sites are erased with certainty:
/// ΔF = F(tr_{\k}(ψ); tr_{\k}({H̄, ψ})), evaluated entirely in the local
/// (k+1)-dimensional symmetric representation.
pub fn erasure_loss_symmetric(state: &SymmetricState, omega: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    let rho = symmetric_reduced_state(state, k);
    let d = symmetric_reduced_anticommutator(state, omega, k);
    Ok(qfi_of_output(&rho, &d)?)
}

/// Sensitivity loss for one located erasure occurring with probability p:
/// the flag block contributes nothing, so ΔF(p) = p·ΔF(certain, k sites).
pub fn erasure_loss_probabilistic(
    state: &SymmetricState,
    omega: f64,
    k: usize,
    p: f64,
) -> Result<f64> {
    Ok(p * erasure_loss_symmetric(state, omega, k)?)
}

/// Sensitivity loss for i.i.d. erasure: every site is independently handed
/// to the environment with probability p.  Eve's state is block diagonal
/// over erasure patterns, so the loss is the binomial mixture of the
/// fixed-pattern losses:
///
///   ΔF = Σ_w C(n,w)·p^w(1−p)^{n−w}·ΔF(w sites erased with certainty).
pub fn iid_erasure_loss_symmetric(state: &SymmetricState, omega: f64, p: f64) -> Result<f64> {
    let n = state.n;
    let mut total = 0.0f64;
    for w in 1..=n {
        let weight = binomial(n, w) * p.powi(w as i32) * (1.0 - p).powi((n - w) as i32);
        if weight < 1e-16 {
            continue;
        }
        total += weight * erasure_loss_symmetric(state, omega, w)?;
    }
    Ok(total)
}

/// Sparse probe: a normalized superposition of a few computational basis
/// states on n sites.
#[derive(Debug, Clone)]
pub struct SparseProbe {
    n: usize,
    terms: Vec<(u64, C64)>,
}

impl SparseProbe {
    pub fn new(n: usize, terms: Vec<(u64, C64)>) -> Result<Self> {
        if n > SPARSE_SITE_CAP {
            return Err(ManybodyError::SiteCap {
                n,
                cap: SPARSE_SITE_CAP,
            });
        }
        if terms.len() > SPARSE_TERM_CAP {
            return Err(ManybodyError::SiteCap {
                n: terms.len(),
                cap: SPARSE_TERM_CAP,
            });
        }
        let mut seen: Vec<u64> = terms.iter().map(|(b, _)| *b).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != terms.len() {
            return Err(ManybodyError::DuplicateBitstring);
        }
        let norm: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(ManybodyError::NotNormalized { norm });
        }
        Ok(Self { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(u64, C64)] {
        &self.terms
    }

    pub fn densify(&self) -> Result<Vec<C64>> {
        if self.n > 20 {
            return Err(ManybodyError::SiteCap { n: self.n, cap: 20 });
        }
        let dim = 1usize << self.n;
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for &(bits, amp) in &self.terms {
            out[bits as usize] = amp;
        }
        Ok(out)
    }
}

/// Diagonal Hamiltonians for which the sparse path needs only per-bitstring
/// energies.
#[derive(Debug, Clone)]
pub enum DiagonalHamiltonian {
    /// H = Σ_i (ω/2)·Z_i.
    OnSite { omega: f64 },
    /// H = Σ_{(i,j)∈edges} (J/2)·Z_iZ_j.
    Ising { j: f64, edges: Vec<(usize, usize)> },
}

impl DiagonalHamiltonian {
    /// Energy of a computational basis state (bit 0 = most significant site;
    /// bit value 0 means spin up).
    pub fn energy(&self, n: usize, bits: u64) -> f64 {
        let z = |site: usize| -> f64 {
            if (bits >> (n - 1 - site)) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        match self {
            DiagonalHamiltonian::OnSite { omega } => {
                (0..n).map(|i| omega / 2.0 * z(i)).sum()
            }
            DiagonalHamiltonian::Ising { j, edges } => edges
                .iter()
                .map(|&(a, b)| j / 2.0 * z(a) * z(b))
                .sum(),
        }
    }

    /// Dense diagonal operator (for n small enough).
    pub fn densify(&self, n: usize) -> Result<HermitianOperator> {
        if n > 20 {
            return Err(ManybodyError::SiteCap { n, cap: 20 });
        }
        let dim = 1usize << n;
        Ok(HermitianOperator::from_fn(dim, |i, j| {
            if i == j {
                C64::new(self.energy(n, i as u64), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })?)
    }
}

/// Probe representation accepted by the combinatorial pinched bound.
#[derive(Debug, Clone)]
pub enum Probe {
    Symmetric(SymmetricState),
    Sparse {
        state: SparseProbe,
        hamiltonian: DiagonalHamiltonian,
    },
}

/// Pinched i.i.d. upper bound on F_Bob for a symmetric or sparse probe under
/// a single-site channel whose E_k†E_k are diagonal:
///
///   F_Bob ≤ 4σ_H² − Σ_{|x| ≤ k} [2·Re⟨ψ|H̄·E_x†E_x|ψ⟩]² / tr(E_x†E_x·ψ).
///
/// Symmetric probes collapse the sum over jump patterns x to weight classes;
/// sparse probes enumerate supports explicitly (O(n^k) terms).  Terms with
/// vanishing probability are dropped, which only loosens the bound.
pub fn iid_pinched_symmetric(
    probe: &Probe,
    omega_or_unused: f64,
    single_site: &KrausChannel,
    k: usize,
) -> Result<BoundResult> {
    let diags = diagonal_kraus_products(single_site)?;
    match probe {
        Probe::Symmetric(state) => {
            pinched_symmetric_path(state, omega_or_unused, &diags, k)
        }
        Probe::Sparse { state, hamiltonian } => {
            pinched_sparse_path(state, hamiltonian, &diags, k)
        }
    }
}

/// Diagonal entries (d₀(up), d₀(down)) of each E_k†E_k, with index 0 treated
/// as the identity-like Kraus operator and indices ≥ 1 as jumps.
fn diagonal_kraus_products(ch: &KrausChannel) -> Result<Vec<(f64, f64)>> {
    if ch.in_dim() != 2 || ch.out_dim() != 2 {
        return Err(ManybodyError::Unsupported(
            "single-site channel must act on one qubit".into(),
        ));
    }
    let mut out = Vec::new();
    for e in ch.kraus() {
        let prod = e.dagger().matmul(e);
        if prod.get(0, 1).norm() > 1e-12 || prod.get(1, 0).norm() > 1e-12 {
            return Err(ManybodyError::Unsupported(
                "the combinatorial pinched path needs diagonal E_k†E_k".into(),
            ));
        }
        out.push((prod.get(0, 0).re, prod.get(1, 1).re));
    }
    Ok(out)
}

fn pinched_symmetric_path(
    state: &SymmetricState,
    omega: f64,
    diags: &[(f64, f64)],
    k: usize,
) -> Result<BoundResult> {
    let n = state.n;
    let sigma2 = state.energy_variance(omega);
    let mean = state.mean_energy(omega);
    let jumps = &diags[1..];
    let mut loss = 0.0f64;
    let mut terms_used = 0usize;
    // Patterns collapse to weight classes: the class of a pattern x is its
    // multiset of jump letters, v_q = ⟨h_q|E_x†E_x|h_q⟩ is the same for every
    // pattern in a class, and the cross-sector elements ⟨h_q'|E_x†E_x|h_q⟩
    // vanish because the diagonal operator preserves excitation number.
    for w in 0..=k.min(n) {
        for combo in compositions(jumps.len(), w) {
            // Number of patterns in the class: support choice × letter
            // placements on the support.
            let mut multiplicity = binomial(n, w);
            let mut rem = w;
            for &c in &combo {
                multiplicity *= binomial(rem, c);
                rem -= c;
            }
            if multiplicity == 0.0 {
                continue;
            }
            let mut prob = 0.0f64; // tr(E_x†E_x ψ)
            let mut cross = 0.0f64; // Re⟨ψ|H̄ E_x†E_x|ψ⟩
            for (q, amp) in state.amps.iter().enumerate() {
                let weight = amp.norm_sqr();
                if weight < 1e-300 {
                    continue;
                }
                // v_q = (1/C(n,q)) Σ_j S(j)·C(n−w, q−j)·keep(q−j), where S(j)
                // sums Π d over placements of j down spins on the jump slots.
                let mut vq = 0.0f64;
                for j in 0..=q.min(w) {
                    if q - j > n - w {
                        continue;
                    }
                    let s_j = jump_distribution_sum(jumps, &combo, j);
                    if s_j == 0.0 {
                        continue;
                    }
                    let keep = diags[0].0.powi((n - w - (q - j)) as i32)
                        * diags[0].1.powi((q - j) as i32);
                    vq += s_j * binomial(n - w, q - j) * keep;
                }
                vq /= binomial(n, q);
                let e_q = dicke_energy(n, q, omega) - mean;
                prob += weight * vq;
                cross += weight * e_q * vq;
            }
            if prob < 1e-14 {
                continue; // dropped conservatively
            }
            loss += multiplicity * (2.0 * cross).powi(2) / prob;
            terms_used += 1;
        }
    }
    Ok(BoundResult {
        value: 4.0 * sigma2 - loss,
        kind: BoundKind::UpperOnFBob,
        k_used: k,
        certificate: format!(
            "pinched i.i.d. bound, symmetric path: {terms_used} weight classes, \
             ΔF ≥ {loss:.6e}"
        ),
    })
}

/// S(j) = Σ over ways to place `downs` down spins on the jump slots of
/// Π_slot d_letter(spin), where the composition fixes how many slots carry
/// each jump letter.
fn jump_distribution_sum(jumps: &[(f64, f64)], combo: &[usize], downs: usize) -> f64 {
    fn recurse(jumps: &[(f64, f64)], combo: &[usize], downs: usize, idx: usize) -> f64 {
        if idx == combo.len() {
            return if downs == 0 { 1.0 } else { 0.0 };
        }
        let slots = combo[idx];
        let (up, down) = jumps[idx];
        let mut acc = 0.0;
        for d in 0..=downs.min(slots) {
            acc += binomial(slots, d)
                * up.powi((slots - d) as i32)
                * down.powi(d as i32)
                * recurse(jumps, combo, downs - d, idx + 1);
        }
        acc
    }
    recurse(jumps, combo, downs, 0)
}

/// All compositions of `total` into `parts` nonnegative integers.
fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(parts - 1, total - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn pinched_sparse_path(
    state: &SparseProbe,
    hamiltonian: &DiagonalHamiltonian,
    diags: &[(f64, f64)],
    k: usize,
) -> Result<BoundResult> {
    let n = state.n;
    // ⟨H⟩ and σ² from the diagonal Hamiltonian.
    let energies: Vec<f64> = state
        .terms
        .iter()
        .map(|&(bits, _)| hamiltonian.energy(n, bits))
        .collect();
    let mean: f64 = state
        .terms
        .iter()
        .zip(&energies)
        .map(|((_, a), e)| a.norm_sqr() * e)
        .sum();
    let sigma2: f64 = state
        .terms
        .iter()
        .zip(&energies)
        .map(|((_, a), e)| a.norm_sqr() * (e - mean).powi(2))
        .sum();

    let jumps = diags.len() - 1;
    let mut loss = 0.0f64;
    let mut terms_used = 0usize;
    // Enumerate supports of size ≤ k and jump-letter assignments on them.
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(vec![], 0)];
    while let Some((support, next)) = stack.pop() {
        if jumps == 0 && !support.is_empty() {
            continue;
        }
        // Evaluate this support with every letter assignment when non-empty,
        // then extend.
        if !support.is_empty() {
            let w = support.len();
            let mut letters = vec![0usize; w];
            loop {
                // Probability and cross term for E_x with jump letters on the
                // support and E₀ elsewhere (all diagonal).
                let mut prob = 0.0f64;
                let mut cross = 0.0f64;
                for (t, &(bits, amp)) in state.terms.iter().enumerate() {
                    let mut value = 1.0f64;
                    for site in 0..n {
                        let bit = (bits >> (n - 1 - site)) & 1;
                        let d = match support.iter().position(|&s| s == site) {
                            Some(slot) => diags[1 + letters[slot]],
                            None => diags[0],
                        };
                        value *= if bit == 0 { d.0 } else { d.1 };
                        if value == 0.0 {
                            break;
                        }
                    }
                    prob += amp.norm_sqr() * value;
                    cross += amp.norm_sqr() * (energies[t] - mean) * value;
                }
                if prob >= 1e-14 {
                    loss += (2.0 * cross).powi(2) / prob;
                    terms_used += 1;
                }
                // Next letter assignment.
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
                if pos == w {
                    break;
                }
            }
        } else {
            // Empty support: the all-E₀ term.
            let mut prob = 0.0f64;
            let mut cross = 0.0f64;
            for (t, &(bits, amp)) in state.terms.iter().enumerate() {
                let mut value = 1.0f64;
                for site in 0..n {
                    let bit = (bits >> (n - 1 - site)) & 1;
                    value *= if bit == 0 { diags[0].0 } else { diags[0].1 };
                }
                prob += amp.norm_sqr() * value;
                cross += amp.norm_sqr() * (energies[t] - mean) * value;
            }
            if prob >= 1e-14 {
                loss += (2.0 * cross).powi(2) / prob;
                terms_used += 1;
            }
        }
        if support.len() < k {
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
        certificate: format!(
            "pinched i.i.d. bound, sparse path: {terms_used} patterns, ΔF ≥ {loss:.6e}"
        ),
    })
}

/// Exact F_Bob for the GHZ probe under i.i.d. amplitude damping, via the
/// two-dimensional block that carries all of the derivative's support.
///
/// The damped GHZ output is block-diagonal between span{|0…0⟩, |1…1⟩} and the
/// remaining (diagonal) basis states, and the evolved direction lives
/// entirely in the block, so the Fisher information reduces to a 2×2
/// computation.  Cross-validated against the dense path at small n.
pub fn ghz_amplitude_damping_exact(n: usize, p: f64, omega: f64) -> Result<f64> {
    let keep = (1.0 - p).powi(n as i32);
    let rho = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => C64::new(0.5 * keep, 0.0),
        (0, 1) | (1, 0) => C64::new(0.5 * keep.sqrt(), 0.0),
        _ => C64::new(0.5 * (1.0 + p.powi(n as i32)), 0.0),
    });
    // −i[H̄, ψ] projected into the block and damped: only the coherence
    // survives, scaled by (1−p)^{n/2}.
    let amp = n as f64 * omega / 2.0 * keep.sqrt();
    let d = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -amp),
        (1, 0) => C64::new(0.0, amp),
        _ => C64::new(0.0, 0.0),
    });
    Ok(qfi_of_output(&rho, &d)?)
}

/// Named probe states of the library.
pub fn probe_library(name: &str, n: usize, params: &[f64]) -> Result<Probe> {
    match name {
        "ghz" => {
            let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
            let mut amps = vec![C64::new(0.0, 0.0); n + 1];
            amps[0] = s;
            amps[n] = s;
            Ok(Probe::Symmetric(SymmetricState::new(n, amps)?))
        }
        "plus_product" => {
            // |+⟩^⊗n has binomial amplitudes over the Dicke basis.
            let mut amps = vec![C64::new(0.0, 0.0); n + 1];
            for (q, slot) in amps.iter_mut().enumerate() {
                *slot = C64::new((binomial(n, q) / 2f64.powi(n as i32)).sqrt(), 0.0);
            }
            Ok(Probe::Symmetric(SymmetricState::new(n, amps)?))
        }
        "dicke_pair" => {
            let q1 = params.first().copied().unwrap_or(0.0) as usize;
            let q2 = params.get(1).copied().unwrap_or(n as f64) as usize;
            let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
            let mut amps = vec![C64::new(0.0, 0.0); n + 1];
            if q1 == q2 {
                return Err(ManybodyError::RangeError { n, q: q1 });
            }
            amps[q1] = s;
            amps[q2] = s;
            Ok(Probe::Symmetric(SymmetricState::new(n, amps)?))
        }
        "uniform_dicke" => {
            let amp = C64::new(1.0 / ((n + 1) as f64).sqrt(), 0.0);
            Ok(Probe::Symmetric(SymmetricState::new(
                n,
                vec![amp; n + 1],
            )?))
        }
        "half_gauss" => {
            let w = params.first().copied().unwrap_or(0.4);
            let mut amps: Vec<C64> = (0..=n)
                .map(|q| C64::new((-(q as f64 / n as f64).powi(2) / (2.0 * w * w)).exp(), 0.0))
                .collect();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            Ok(Probe::Symmetric(SymmetricState::new(n, amps)?))
        }
        "f_af" => {
            // (|↓↓↓…⟩ + |↓↑↓↑…⟩)/√2 on a chain.
            let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
            let all_down = (1u64 << n) - 1;
            let af = alternating_bits(n, 1);
            let state = SparseProbe::new(n, vec![(all_down, s), (af, s)])?;
            Ok(Probe::Sparse {
                state,
                hamiltonian: chain_ising(n, params.first().copied().unwrap_or(2.0)),
            })
        }
        "code_f_af" => {
            // ½[|0…0⟩ + |1…1⟩ + |x⟩ + |x̃⟩] with x the antiferromagnet.
            let a = C64::new(0.5, 0.0);
            let all_down = (1u64 << n) - 1;
            let af = alternating_bits(n, 1);
            let state = SparseProbe::new(
                n,
                vec![(0, a), (all_down, a), (af, a), (!af & all_down, a)],
            )?;
            Ok(Probe::Sparse {
                state,
                hamiltonian: chain_ising(n, params.first().copied().unwrap_or(2.0)),
            })
        }
        other => Err(ManybodyError::UnknownProbe(other.to_string())),
    }
}

fn alternating_bits(n: usize, parity: usize) -> u64 {
    let mut bits = 0u64;
    for site in 0..n {
        if site % 2 == parity {
            bits |= 1 << (n - 1 - site);
        }
    }
    bits
}

fn chain_ising(n: usize, j: f64) -> DiagonalHamiltonian {
    DiagonalHamiltonian::Ising {
        j,
        edges: (0..n - 1).map(|i| (i, i + 1)).collect(),
    }
}

/// Graph-code probe ½[|0…0⟩ + |1…1⟩ + |x⟩ + |x̃⟩] for an interaction graph
/// H = (J/2)·Σ_edges (Z_iZ_j + s_x·X_iX_j + s_y·Y_iY_j), with closed-form
/// energy statistics ⟨H⟩ = (J/2)(m − c) and σ_H² = J²c²/4 (m edges, c
/// violated by the configuration x).
#[derive(Debug, Clone)]
pub struct IsingScenario {
    pub state: SparseProbe,
    /// The diagonal (Ising) part; the transversal part is reinstated by
    /// [`IsingScenario::dense_hamiltonian`].
    pub hamiltonian: DiagonalHamiltonian,
    pub s_x: f64,
    pub s_y: f64,
    pub edges: usize,
    pub violated: usize,
    pub mean_energy: f64,
    pub sigma2: f64,
}

impl IsingScenario {
    /// Full dense Hamiltonian including the transversal couplings
    /// (n ≤ 12 for the dense representation).
    pub fn dense_hamiltonian(&self, n: usize) -> Result<HermitianOperator> {
        if n > 12 {
            return Err(ManybodyError::SiteCap { n, cap: 12 });
        }
        let DiagonalHamiltonian::Ising { j, edges } = &self.hamiltonian else {
            return Err(ManybodyError::Unsupported("expected Ising terms".into()));
        };
        let dim = 1usize << n;
        let mut m = ComplexMatrix::zeros(dim, dim);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let y = {
            let mut y = ComplexMatrix::zeros(2, 2);
            y.set(0, 1, C64::new(0.0, -1.0));
            y.set(1, 0, C64::new(0.0, 1.0));
            y
        };
        let z = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let two_site = |op: &ComplexMatrix, a: usize, b: usize| -> ComplexMatrix {
            let mut acc = ComplexMatrix::identity(1);
            for q in 0..n {
                let factor = if q == a || q == b {
                    op.clone()
                } else {
                    ComplexMatrix::identity(2)
                };
                acc = acc.kron(&factor);
            }
            acc
        };
        for &(a, b) in edges {
            m = m.add(&two_site(&z, a, b).scale(C64::new(j / 2.0, 0.0)));
            if self.s_x != 0.0 {
                m = m.add(&two_site(&x, a, b).scale(C64::new(j / 2.0 * self.s_x, 0.0)));
            }
            if self.s_y != 0.0 {
                m = m.add(&two_site(&y, a, b).scale(C64::new(j / 2.0 * self.s_y, 0.0)));
            }
        }
        Ok(HermitianOperator::new(m)?)
    }
}

/// Builds the graph-code probe.  The strings 0…0, 1…1, x, x̃ must differ
/// pairwise on at least four sites; at least five when transversal couplings
/// are switched on, so that the closed-form variance stays exact (XX/YY
/// terms then connect only to orthogonal configurations).
pub fn ising_scenario(
    edges: &[(usize, usize)],
    s_x: f64,
    s_y: f64,
    j: f64,
    n: usize,
    x_bits: u64,
) -> Result<IsingScenario> {
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let x_tilde = !x_bits & all;
    let words = [0u64, all, x_bits, x_tilde];
    let mut min_dist = usize::MAX;
    for i in 0..4 {
        for jdx in (i + 1)..4 {
            min_dist = min_dist.min((words[i] ^ words[jdx]).count_ones() as usize);
        }
    }
    let needed = if s_x != 0.0 || s_y != 0.0 { 5 } else { 4 };
    if min_dist < needed {
        return Err(ManybodyError::HammingDistance {
            needed,
            got: min_dist,
        });
    }
    let a = C64::new(0.5, 0.0);
    let state = SparseProbe::new(n, words.iter().map(|&w| (w, a)).collect())?;
    let hamiltonian = DiagonalHamiltonian::Ising {
        j,
        edges: edges.to_vec(),
    };
    // Count violated edges of x.
    let bit = |w: u64, site: usize| (w >> (n - 1 - site)) & 1;
    let violated = edges
        .iter()
        .filter(|&&(p, q)| bit(x_bits, p) != bit(x_bits, q))
        .count();
    let m = edges.len();
    let (mf, cf) = (m as f64, violated as f64);
    // With the configurations ≥ 5 apart, all interference terms between
    // different edges and different configurations vanish, leaving the Ising
    // variance plus the single-edge transversal contributions
    //   (J²/4)·[(s_x² + s_y²)·m − 2·s_x·s_y·(m − c)]
    // (the −2s_xs_y piece comes from {X_iX_j, Y_iY_j} = −2Z_iZ_j on each
    // edge, whose mean is +1 on satisfied and 0 on violated edges).
    let transversal = j * j / 4.0 * ((s_x * s_x + s_y * s_y) * mf - 2.0 * s_x * s_y * (mf - cf));
    Ok(IsingScenario {
        state,
        hamiltonian,
        s_x,
        s_y,
        edges: m,
        violated,
        mean_energy: j / 2.0 * (mf - cf),
        sigma2: j * j * cf * cf / 4.0 + transversal,
    })
}

/// The graph-code probe as a [`Probe`]: the sparse state together with its
/// diagonal Ising Hamiltonian.
pub fn graph_code(
    edges: &[(usize, usize)],
    j: f64,
    n: usize,
    x_bits: u64,
) -> Result<Probe> {
    let sc = ising_scenario(edges, 0.0, 0.0, j, n, x_bits)?;
    Ok(Probe::Sparse {
        state: sc.state,
        hamiltonian: sc.hamiltonian,
    })
}

impl SymmetricState {
    /// One amplitude per line as `re,im` — the CSV-column form used by the
    /// probe files.
    pub fn to_csv_column(&self) -> String {
        self.amps
            .iter()
            .map(|a| format!("{},{}", a.re, a.im))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_csv_column(n: usize, text: &str) -> Result<Self> {
        let amps: Vec<C64> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                let (re, im) = l
                    .split_once(',')
                    .ok_or_else(|| ManybodyError::Unsupported(format!("bad row {l:?}")))?;
                Ok(C64::new(
                    re.trim()
                        .parse()
                        .map_err(|_| ManybodyError::Unsupported(format!("bad row {l:?}")))?,
                    im.trim()
                        .parse()
                        .map_err(|_| ManybodyError::Unsupported(format!("bad row {l:?}")))?,
                ))
            })
            .collect::<Result<_>>()?;
        Self::new(n, amps)
    }
}

impl SparseProbe {
    /// (bitstring, re, im) triples, one per line, bitstrings rendered as
    /// 0/1 characters with site 0 leftmost.
    pub fn to_triples(&self) -> String {
        self.terms
            .iter()
            .map(|&(bits, a)| {
                let word: String = (0..self.n)
                    .map(|site| {
                        if (bits >> (self.n - 1 - site)) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect();
                format!("{word},{},{}", a.re, a.im)
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_triples(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n = 0usize;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(ManybodyError::Unsupported(format!("bad triple {line:?}")));
            }
            let word = parts[0].trim();
            n = word.len();
            let mut bits = 0u64;
            for (site, c) in word.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => bits |= 1 << (n - 1 - site),
                    _ => {
                        return Err(ManybodyError::Unsupported(format!(
                            "bad bitstring {word:?}"
                        )))
                    }
                }
            }
            let re: f64 = parts[1]
                .trim()
                .parse()
                .map_err(|_| ManybodyError::Unsupported(format!("bad triple {line:?}")))?;
            let im: f64 = parts[2]
                .trim()
                .parse()
                .map_err(|_| ManybodyError::Unsupported(format!("bad triple {line:?}")))?;
            terms.push((bits, C64::new(re, im)));
        }
        Self::new(n, terms)
    }
}

/// Entanglement fidelity of a single-qubit channel with respect to the
/// maximally entangled input, F_ent = Σ_k |tr(E_k)/2|².
pub fn entanglement_fidelity(ch: &KrausChannel) -> f64 {
    ch.kraus()
        .iter()
        .map(|e| (e.trace() / C64::new(2.0, 0.0)).norm_sqr())
        .sum()
}

/// Dense helper: the full 2^n-dimensional vector norm check used by tests.
pub fn dense_norm(v: &[C64]) -> f64 {
    vec_norm(v)
}

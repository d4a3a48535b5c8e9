//! Metrological codes: zero-sensitivity-loss conditions, metrological
//! distance, stabilizer-based construction, and the equality-restoring
//! channel perturbation.
//!
//! A pair of orthogonal state vectors (|ψ⟩, |ξ⟩) forms a metrological code
//! against an error set ℰ if for all E, E′ ∈ ℰ
//!
//!   tr[E′†E (|ξ⟩⟨ψ| + |ψ⟩⟨ξ|)] = 0 ,
//!
//! i.e. ⟨ψ|E′†E|ξ⟩ + ⟨ξ|E′†E|ψ⟩ = 0.  When ℰ is the Kraus set of a channel,
//! this is exactly the condition for the clock probe |ψ⟩ with time direction
//! ξ = (H−⟨H⟩)|ψ⟩ to lose no time sensitivity through that channel.  The
//! metrological distance d_m is the largest d such that the condition holds
//! for every operator of weight < d.  Pauli enumeration suffices for the
//! distance: any weight-w operator is a linear combination of Pauli strings
//! supported on the same w sites.
//!
//! The stabilizer construction certifies such pairs without dense linear
//! algebra: if |ψ⟩ is stabilized by an abelian Pauli group S and for every
//! error pair there exists S ∈ S with {H, S} = 0 and [E′†E, S] = 0, then
//! (|ψ⟩, H|ψ⟩) is a metrological code against ℰ.

pub mod pauli;

pub use pauli::{PauliError, PauliString, StabilizerGroup};

use serde::Serialize;
use thiserror::Error;

use crate::channels::{ChannelError, KrausChannel, StinespringIsometry};
use crate::linalg::{
    eig_hermitian, op_norm, vec_inner, vec_norm, ComplexMatrix, DensityOperator,
    HermitianOperator, LinalgError, C64,
};

#[derive(Debug, Error)]
pub enum CodesError {
    #[error("states must be orthogonal: |⟨ψ|ξ⟩| = {overlap:.3e}")]
    NotOrthogonal { overlap: f64 },
    #[error("dimension {dim} is not a power of two")]
    NotQubits { dim: usize },
    #[error("exhaustive distance enumeration capped at 10 qubits, got {n}; \
             use the stabilizer certification for larger systems")]
    DistanceCap { n: usize },
    #[error("the Hamiltonian must anticommute with at least one generator")]
    NoAnticommutingGenerator,
    #[error("supplied perturbation unitary violates its projector conditions: {0}")]
    BadPerturbationUnitary(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, CodesError>;

/// A candidate metrological code: |ψ⟩ and a normalized direction |ξ⟩ with
/// ⟨ψ|ξ⟩ = 0.
#[derive(Debug, Clone)]
pub struct MetrologicalCodePair {
    pub psi: Vec<C64>,
    pub xi: Vec<C64>,
}

impl MetrologicalCodePair {
    pub fn new(psi: Vec<C64>, xi: Vec<C64>) -> Result<Self> {
        let overlap = vec_inner(&psi, &xi).norm();
        if overlap > 1e-10 {
            return Err(CodesError::NotOrthogonal { overlap });
        }
        let mut xi = xi;
        crate::linalg::vec_normalize(&mut xi);
        Ok(Self { psi, xi })
    }

    /// Builds the pair from a probe and Hamiltonian, ξ ∝ (H−⟨H⟩)|ψ⟩.
    pub fn from_probe(psi: &[C64], h: &HermitianOperator) -> Result<Self> {
        let mean = h.expectation(psi);
        let hpsi = h.matrix().matvec(psi);
        let xi: Vec<C64> = hpsi
            .iter()
            .zip(psi)
            .map(|(a, b)| a - b * C64::new(mean, 0.0))
            .collect();
        Self::new(psi.to_vec(), xi)
    }

    pub fn qubits(&self) -> Result<usize> {
        let dim = self.psi.len();
        if !dim.is_power_of_two() {
            return Err(CodesError::NotQubits { dim });
        }
        Ok(dim.trailing_zeros() as usize)
    }
}

/// Result of the zero-sensitivity-loss test against a channel's Kraus set.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroLossReport {
    pub holds: bool,
    /// max_{k,k'} |⟨ψ|E_k'†E_k|ξ⟩ + ⟨ξ|E_k'†E_k|ψ⟩| relative to ‖ξ‖.
    pub worst_residual: f64,
    pub worst_pair: (usize, usize),
    /// Operator norm of N̂(|ξ⟩⟨ψ| + |ψ⟩⟨ξ|), the equivalent formulation.
    pub nhat_image_norm: f64,
}

/// Zero-sensitivity-loss test with an unnormalized ξ, as used by the clock
/// machinery.  The threshold is 1e-9·‖ξ‖.
pub fn zero_loss_check_vectors(psi: &[C64], xi: &[C64], channel: &KrausChannel) -> ZeroLossReport {
    let v: Vec<Vec<C64>> = channel.apply_to_vector(psi);
    let w: Vec<Vec<C64>> = channel.apply_to_vector(xi);
    let kk = v.len();
    let mut worst = 0.0f64;
    let mut worst_pair = (0usize, 0usize);
    let mut image = ComplexMatrix::zeros(kk, kk);
    for k in 0..kk {
        for kp in 0..kk {
            // tr(E_k'†E_k D) = ⟨v_k'|w_k⟩ + ⟨w_k'|v_k⟩, D = |ξ⟩⟨ψ| + |ψ⟩⟨ξ|.
            let entry = vec_inner(&v[kp], &w[k]) + vec_inner(&w[kp], &v[k]);
            image.set(k, kp, entry);
            if entry.norm() > worst {
                worst = entry.norm();
                worst_pair = (k, kp);
            }
        }
    }
    let xi_norm = vec_norm(xi);
    ZeroLossReport {
        holds: worst <= 1e-9 * xi_norm.max(1e-300),
        worst_residual: worst,
        worst_pair,
        nhat_image_norm: op_norm(&image),
    }
}

/// Zero-sensitivity-loss test for a normalized metrological-code pair.
pub fn zero_loss_check(pair: &MetrologicalCodePair, channel: &KrausChannel) -> ZeroLossReport {
    zero_loss_check_vectors(&pair.psi, &pair.xi, channel)
}

/// Metrological-code condition against an explicit operator set.
pub fn zero_loss_check_paulis(pair: &MetrologicalCodePair, errors: &[PauliString]) -> ZeroLossReport {
    let mut worst = 0.0f64;
    let mut worst_pair = (0usize, 0usize);
    for (a, e) in errors.iter().enumerate() {
        let e_xi = e.apply_to_vec(&pair.xi);
        let e_psi = e.apply_to_vec(&pair.psi);
        for (b, ep) in errors.iter().enumerate() {
            let ep_psi = ep.apply_to_vec(&pair.psi);
            let ep_xi = ep.apply_to_vec(&pair.xi);
            let entry = vec_inner(&ep_psi, &e_xi) + vec_inner(&ep_xi, &e_psi);
            if entry.norm() > worst {
                worst = entry.norm();
                worst_pair = (a, b);
            }
        }
    }
    ZeroLossReport {
        holds: worst <= 1e-9,
        worst_residual: worst,
        worst_pair,
        nhat_image_norm: worst,
    }
}

/// Largest d such that tr[O(|ξ⟩⟨ψ| + |ψ⟩⟨ξ|)] = 0 for every Pauli O with
/// weight < d, found by enumerating Pauli strings of increasing weight.
///
/// Dense enumeration is capped at 10 qubits; beyond that the stabilizer
/// certification is the supported path.
pub fn metrological_distance(pair: &MetrologicalCodePair) -> Result<usize> {
    let n = pair.qubits()?;
    if n > 10 {
        return Err(CodesError::DistanceCap { n });
    }
    for weight in 1..=n {
        if violation_at_weight(pair, n, weight) {
            return Ok(weight);
        }
    }
    // Unreachable for a genuine orthogonal pair: the full Pauli basis spans
    // all operators, and |ξ⟩⟨ψ| + |ψ⟩⟨ξ| ≠ 0.
    Ok(n + 1)
}

fn violation_at_weight(pair: &MetrologicalCodePair, n: usize, weight: usize) -> bool {
    let mut sites: Vec<usize> = (0..weight).collect();
    loop {
        // All 3^w letter assignments on this support.
        let mut letters = vec![0u8; weight];
        loop {
            let mut p = PauliString::identity(n);
            for (slot, &site) in sites.iter().enumerate() {
                let letter = ['X', 'Y', 'Z'][letters[slot] as usize];
                p = p
                    .multiply(&PauliString::single(n, site, letter).expect("valid site"))
                    .expect("same size");
            }
            // Hermitian Pauli: residual 2·Re⟨ψ|O|ξ⟩.
            let val = 2.0 * p.matrix_element(&pair.psi, &pair.xi).re;
            if val.abs() > 1e-9 {
                return true;
            }
            // Next letter assignment.
            let mut pos = 0;
            loop {
                if pos == weight {
                    break;
                }
                letters[pos] += 1;
                if letters[pos] < 3 {
                    break;
                }
                letters[pos] = 0;
                pos += 1;
            }
            if pos == weight {
                break;
            }
        }
        // Next support subset (lexicographic).
        let mut i = weight;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if sites[i] != i + n - weight {
                sites[i] += 1;
                for j in (i + 1)..weight {
                    sites[j] = sites[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Search strategy for the stabilizer certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Products of at most `depth` generators; may exhaust without verdict.
    Depth(usize),
    /// Full group enumeration (generator count ≤ 20).
    Exhaustive,
    /// GF(2) linear solve per support; always decides.
    Exact,
    /// Low-depth products first (cheap, low-weight witnesses), exact solve as
    /// fallback; always decides.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyVerdict {
    Certified,
    /// A support set provably admits no witness in the whole group.
    Refuted { support: Vec<usize> },
    /// The restricted search ran out before finding a witness; no conclusion.
    NotCertified { support: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub verdict: CertifyVerdict,
    /// One witness per inspected support set.
    pub witnesses: Vec<(Vec<usize>, PauliString)>,
}

impl CertifyReport {
    /// JSON form: {certified, distance, witnesses: [{support, operator}]},
    /// with `distance` the certified metrological distance (error weight + 1)
    /// and the failing support attached on negative verdicts.
    pub fn to_json(&self, error_weight: usize) -> serde_json::Value {
        let witnesses: Vec<serde_json::Value> = self
            .witnesses
            .iter()
            .map(|(support, s)| {
                serde_json::json!({
                    "support": support,
                    "operator": format!("{s}"),
                })
            })
            .collect();
        match &self.verdict {
            CertifyVerdict::Certified => serde_json::json!({
                "certified": true,
                "distance": error_weight + 1,
                "witnesses": witnesses,
            }),
            CertifyVerdict::Refuted { support } => serde_json::json!({
                "certified": false,
                "refuted": true,
                "failing_support": support,
                "witnesses": witnesses,
            }),
            CertifyVerdict::NotCertified { support } => serde_json::json!({
                "certified": false,
                "refuted": false,
                "failing_support": support,
                "witnesses": witnesses,
            }),
        }
    }
}

/// Certifies the stabilizer construction: for every support set T with
/// |T| ≤ `error_weight`, find S in the group with {H, S} = 0 (for every term
/// of H) and supp(S) ∩ T = ∅.  Success certifies (|ψ⟩, H|ψ⟩) as a
/// metrological code of distance error_weight + 1.
pub fn stabilizer_certify(
    group: &StabilizerGroup,
    hamiltonian_terms: &[PauliString],
    error_weight: usize,
    strategy: SearchStrategy,
) -> Result<CertifyReport> {
    let n = group.n();
    let gens = group.generators();
    let ell = gens.len();
    // Per-generator symplectic pairing with each Hamiltonian term.
    let pairings: Vec<u128> = hamiltonian_terms
        .iter()
        .map(|h| {
            let mut bits = 0u128;
            for (i, g) in gens.iter().enumerate() {
                if g.anticommutes(h) {
                    bits |= 1 << i;
                }
            }
            bits
        })
        .collect();
    if pairings.iter().all(|&b| b == 0) {
        return Err(CodesError::NoAnticommutingGenerator);
    }

    // Candidate pool sorted by weight for the product search.
    let mut candidates: Vec<(u128, PauliString)> = Vec::new();
    let collect_products = |max_depth: usize, candidates: &mut Vec<(u128, PauliString)>| {
        let mut combos: Vec<u128> = vec![0];
        for depth in 1..=max_depth {
            let mut next = Vec::new();
            for &mask in combos.iter().filter(|m| m.count_ones() as usize == depth - 1) {
                let start = if mask == 0 {
                    0
                } else {
                    128 - mask.leading_zeros() as usize
                };
                for i in start..ell {
                    next.push(mask | (1 << i));
                }
            }
            combos.extend(next);
        }
        for &mask in combos.iter().skip(1) {
            candidates.push((mask, group.element(mask)));
        }
    };
    match strategy {
        SearchStrategy::Depth(m) => collect_products(m.min(ell), &mut candidates),
        SearchStrategy::Auto => collect_products(3.min(ell), &mut candidates),
        SearchStrategy::Exhaustive => {
            assert!(ell <= 20, "exhaustive enumeration limited to 20 generators");
            for mask in 1u128..(1 << ell) {
                candidates.push((mask, group.element(mask)));
            }
        }
        SearchStrategy::Exact => {}
    }
    // Keep only candidates anticommuting with every Hamiltonian term.
    candidates.retain(|(mask, _)| {
        pairings
            .iter()
            .all(|&p| (mask & p).count_ones() % 2 == 1)
    });
    candidates.sort_by_key(|(_, s)| s.weight());

    let mut witnesses = Vec::new();
    let supports = support_sets(n, error_weight.min(n));
    for t in supports {
        let tmask: u128 = t.iter().fold(0u128, |acc, &q| acc | (1 << q));
        let found = candidates
            .iter()
            .find(|(_, s)| s.support() & tmask == 0)
            .map(|(_, s)| *s);
        let found = match (found, strategy) {
            (Some(s), _) => Some(s),
            (None, SearchStrategy::Auto | SearchStrategy::Exact) => {
                solve_witness_gf2(group, &pairings, tmask)
            }
            (None, _) => None,
        };
        match found {
            Some(s) => witnesses.push((t, s)),
            None => {
                // For the exact strategies absence of a solution is a proof.
                let verdict = match strategy {
                    SearchStrategy::Auto | SearchStrategy::Exact => {
                        CertifyVerdict::Refuted { support: t }
                    }
                    _ => CertifyVerdict::NotCertified { support: t },
                };
                return Ok(CertifyReport { verdict, witnesses });
            }
        }
    }
    Ok(CertifyReport {
        verdict: CertifyVerdict::Certified,
        witnesses,
    })
}

/// GF(2) linear solve: find a generator subset whose product anticommutes
/// with every Hamiltonian term and has no support on the masked qubits.
fn solve_witness_gf2(
    group: &StabilizerGroup,
    pairings: &[u128],
    tmask: u128,
) -> Option<PauliString> {
    let gens = group.generators();
    let ell = gens.len();
    // Rows: one per constraint.  Columns: generator coefficients.  The
    // augmented column carries the required parity.
    let mut rows: Vec<(u128, u8)> = Vec::new();
    for &p in pairings {
        rows.push((p, 1));
    }
    let mut t = tmask;
    while t != 0 {
        let q = t.trailing_zeros() as usize;
        t &= t - 1;
        let mut xrow = 0u128;
        let mut zrow = 0u128;
        for (i, g) in gens.iter().enumerate() {
            if (g.x_bits() >> q) & 1 == 1 {
                xrow |= 1 << i;
            }
            if (g.z_bits() >> q) & 1 == 1 {
                zrow |= 1 << i;
            }
        }
        rows.push((xrow, 0));
        rows.push((zrow, 0));
    }
    // Gaussian elimination.
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0usize;
    for col in 0..ell {
        if let Some(pr) = (r..rows.len()).find(|&i| (rows[i].0 >> col) & 1 == 1) {
            rows.swap(r, pr);
            let (prow, pb) = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && (row.0 >> col) & 1 == 1 {
                    row.0 ^= prow;
                    row.1 ^= pb;
                }
            }
            pivots.push((r, col));
            r += 1;
        }
    }
    // Inconsistent system ⇒ no witness exists.
    if rows.iter().skip(r).any(|&(row, b)| row == 0 && b == 1) {
        return None;
    }
    let mut coeffs = 0u128;
    for &(row, col) in &pivots {
        if rows[row].1 == 1 {
            coeffs |= 1 << col;
        }
    }
    Some(group.element(coeffs))
}

fn support_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut sites: Vec<usize> = (0..k).collect();
    loop {
        out.push(sites.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if sites[i] != i + n - k {
                sites[i] += 1;
                for j in (i + 1)..k {
                    sites[j] = sites[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Perturbs a Stinespring isometry by at most ε in operator norm so that the
/// trade-off equality conditions hold for the pair (ψ, ξ).
///
/// With `preserve_zero_loss` the zero-sensitivity-loss property
/// N̂(|ξ⟩⟨ψ|+|ψ⟩⟨ξ|) = 0 is preserved too; this requires a unitary G_B on the
/// receiver satisfying P_ρ G_B P_ρ = P_ζ G_B P_ζ = P_ρ G_B P_ζ = P_ζ G_B P_ρ = 0
/// (ρ = N(ψ), ζ = N(ξ)).  When no such G_B is supplied, a flag qubit is
/// appended to the receiver and G_B flips it; the returned isometry then has
/// twice the original receiver dimension, with the original output embedded
/// as flag = 0.
pub fn restore_equality_perturbation(
    v: &StinespringIsometry,
    pair: &MetrologicalCodePair,
    epsilon: f64,
    g_b: Option<&ComplexMatrix>,
    preserve_zero_loss: bool,
) -> Result<StinespringIsometry> {
    assert!(epsilon > 0.0 && epsilon <= 1.0, "need 0 < ε ≤ 1");
    let psi = &pair.psi;
    let xi = &pair.xi;

    // Nothing to do when the conditions already hold.
    if kernel_pair_residual(v, psi, xi)? <= 1e-9 {
        return Ok(v.clone());
    }

    if !preserve_zero_loss {
        return perturb_basic(v, psi, xi, epsilon);
    }

    // Zero-loss preserving path.
    let (v_work, g_work) = match g_b {
        Some(g) => {
            validate_gb(v, psi, xi, g)?;
            (v.clone(), g.clone())
        }
        None => {
            // Append a flag qubit to B; G_B = I_B ⊗ X_flag.
            let out = v.out_dim();
            let env = v.env_dim();
            let in_dim = v.in_dim();
            let mut vm = ComplexMatrix::zeros(out * 2 * env, in_dim);
            for b in 0..out {
                for k in 0..env {
                    for a in 0..in_dim {
                        // New receiver index (b, flag=0): b' = 2b.
                        vm.set((2 * b) * env + k, a, v.matrix().get(b * env + k, a));
                    }
                }
            }
            let v_aug = StinespringIsometry::new(vm, out * 2, env)?;
            let x_flag = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
            let g = ComplexMatrix::identity(out).kron(&x_flag);
            (v_aug, g)
        }
    };

    // Z̃_L = |ξ⟩⟨ψ| + |ψ⟩⟨ξ| + (I − Π_L): unitary swap of ψ and ξ.
    let d = psi.len();
    let proj = ComplexMatrix::outer(psi, psi).add(&ComplexMatrix::outer(xi, xi));
    let swap = ComplexMatrix::outer(xi, psi)
        .add(&ComplexMatrix::outer(psi, xi))
        .add(&ComplexMatrix::identity(d).sub(&proj));
    let alpha = epsilon / 2.0;
    let g_on_be = g_work.kron(&ComplexMatrix::identity(v_work.env_dim()));
    let rotated = g_on_be
        .matmul(v_work.matrix())
        .matmul(&swap)
        .scale(C64::new(alpha.sin(), 0.0));
    let vm = v_work
        .matrix()
        .scale(C64::new(alpha.cos(), 0.0))
        .add(&rotated);
    Ok(StinespringIsometry::new(
        vm,
        v_work.out_dim(),
        v_work.env_dim(),
    )?)
}

fn perturb_basic(
    v: &StinespringIsometry,
    psi: &[C64],
    xi: &[C64],
    epsilon: f64,
) -> Result<StinespringIsometry> {
    let ch = v.channel();
    let proj = ComplexMatrix::outer(psi, psi);
    let rho_b = DensityOperator::clamped(&ch.apply(&proj))?;
    let rho_e = DensityOperator::clamped(&ch.complementary().apply(&proj))?;
    let spec_b = eig_hermitian(rho_b.hermitian())?;
    let spec_e = eig_hermitian(rho_e.hermitian())?;
    let kb: Vec<usize> = kernel_indices(&spec_b);
    let ke: Vec<usize> = kernel_indices(&spec_e);
    if kb.is_empty() || ke.is_empty() {
        // One side is full rank: the conditions already hold.
        let _ = xi;
        return Ok(v.clone());
    }
    // Pair kernel directions into a maximally entangled χ on B⊗E; making
    // ρ_E' overlap every kernel direction of ρ_E fixes the support condition.
    let k = kb.len().min(ke.len());
    let env = v.env_dim();
    let out = v.out_dim();
    let mut chi = vec![C64::new(0.0, 0.0); out * env];
    let weight = C64::new(1.0 / (k as f64).sqrt(), 0.0);
    for m in 0..k {
        let bvec = spec_b.eigenvector(kb[m]);
        let evec = spec_e.eigenvector(ke[m]);
        for b in 0..out {
            for e in 0..env {
                chi[b * env + e] += weight * bvec[b] * evec[e];
            }
        }
    }
    // Rotate V|ψ⟩ toward χ by α; the rotation's distance to the identity is
    // 2·sin(α/2), so α = 2·asin(ε/2) keeps ‖V′ − V‖ ≤ ε.
    let alpha = 2.0 * (epsilon / 2.0).min(1.0).asin();
    let mu1 = v.apply_to_vector(psi);
    let c = alpha.cos();
    let s = alpha.sin();
    // W = I + (cos−1)(|μ1⟩⟨μ1| + |χ⟩⟨χ|) + sin(|χ⟩⟨μ1| − |μ1⟩⟨χ|)
    let dim = out * env;
    let mut w = ComplexMatrix::identity(dim);
    let p1 = ComplexMatrix::outer(&mu1, &mu1);
    let p2 = ComplexMatrix::outer(&chi, &chi);
    let up = ComplexMatrix::outer(&chi, &mu1);
    let dn = ComplexMatrix::outer(&mu1, &chi);
    w = w
        .add(&p1.add(&p2).scale(C64::new(c - 1.0, 0.0)))
        .add(&up.sub(&dn).scale(C64::new(s, 0.0)));
    let vm = w.matmul(v.matrix());
    Ok(StinespringIsometry::new(vm, out, env)?)
}

fn kernel_indices(spec: &crate::linalg::SpectralDecomposition) -> Vec<usize> {
    spec.eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, l)| **l <= spec.zero_threshold())
        .map(|(i, _)| i)
        .collect()
}

/// ‖(P_ρB^⊥ ⊗ P_ρE^⊥) V|ξ⟩‖ for a dilation and a pair.
pub fn kernel_pair_residual(
    v: &StinespringIsometry,
    psi: &[C64],
    xi: &[C64],
) -> Result<f64> {
    let ch = v.channel();
    let report = crate::clock::equality_conditions_for(psi, xi, &ch)
        .map_err(|e| CodesError::BadPerturbationUnitary(format!("{e}")))?;
    // Residual against the dilation actually supplied (the channel's
    // canonical dilation only differs by an environment isometry, which
    // leaves the residual unchanged).
    let _ = v;
    Ok(report.residual)
}

fn validate_gb(
    v: &StinespringIsometry,
    psi: &[C64],
    xi: &[C64],
    g: &ComplexMatrix,
) -> Result<()> {
    let ch = v.channel();
    let rho = DensityOperator::clamped(&ch.apply(&ComplexMatrix::outer(psi, psi)))?;
    let zeta = DensityOperator::clamped(&ch.apply(&ComplexMatrix::outer(xi, xi)))?;
    let p_rho = eig_hermitian(rho.hermitian())?.support_projector();
    let p_zeta = eig_hermitian(zeta.hermitian())?.support_projector();
    let checks = [
        ("PρGPρ", p_rho.matmul(g).matmul(&p_rho)),
        ("PζGPζ", p_zeta.matmul(g).matmul(&p_zeta)),
        ("PρGPζ", p_rho.matmul(g).matmul(&p_zeta)),
        ("PζGPρ", p_zeta.matmul(g).matmul(&p_rho)),
    ];
    for (name, m) in checks {
        if m.max_abs() > 1e-9 {
            return Err(CodesError::BadPerturbationUnitary(format!(
                "{name} has norm {:.3e}",
                m.max_abs()
            )));
        }
    }
    Ok(())
}

//! Self-check suites runnable from the command line and reused by the test
//! harness, plus deterministic random-instance generation.
//!
//! Every randomized check in the crate draws from a named 64-bit seeded
//! generator so that reruns are byte-identical.

use crate::channels::KrausChannel;
use crate::fisher::{qfi, FisherPair};
use crate::linalg::{eig_hermitian, DensityOperator, HermitianOperator};

/// Deterministic random instance generation for checks and tests.
pub mod rng {
    use crate::linalg::{ComplexMatrix, DensityOperator, HermitianOperator, C64};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Default seed of the verification suites.
    pub const DEFAULT_SEED: u64 = 0xF15E4;

    pub fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn gauss(r: &mut ChaCha12Rng) -> f64 {
        // Box-Muller; uniform draws are in (0, 1].
        let u: f64 = 1.0 - r.random::<f64>();
        let v: f64 = r.random::<f64>();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }

    pub fn random_complex(r: &mut ChaCha12Rng) -> C64 {
        C64::new(gauss(r), gauss(r))
    }

    pub fn random_matrix(r: &mut ChaCha12Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(r))
    }

    pub fn random_hermitian(r: &mut ChaCha12Rng, dim: usize, scale: f64) -> HermitianOperator {
        let g = random_matrix(r, dim, dim);
        let h = g.add(&g.dagger()).scale(C64::new(0.5 * scale, 0.0));
        HermitianOperator::new(h).expect("symmetrized matrix is Hermitian")
    }

    pub fn random_unit_vector(r: &mut ChaCha12Rng, dim: usize) -> Vec<C64> {
        let mut v: Vec<C64> = (0..dim).map(|_| random_complex(r)).collect();
        crate::linalg::vec_normalize(&mut v);
        v
    }

    /// Full-rank mixed state: G G† normalized.
    pub fn random_density(r: &mut ChaCha12Rng, dim: usize) -> DensityOperator {
        let g = random_matrix(r, dim, dim);
        let psd = g.matmul(&g.dagger());
        let t = psd.trace().re;
        let rho = psd.scale(C64::new(1.0 / t, 0.0));
        DensityOperator::new(HermitianOperator::new(rho).expect("Hermitian")).expect("PSD")
    }

    /// Traceless Hermitian direction.
    pub fn random_traceless_hermitian(
        r: &mut ChaCha12Rng,
        dim: usize,
        scale: f64,
    ) -> HermitianOperator {
        let h = random_hermitian(r, dim, scale);
        let shift = h.matrix().trace().re / dim as f64;
        h.shift(-shift)
    }
}

pub mod suites;

pub use suites::{onsite_z_dense, random_channel, run_suite, CheckResult, Suite};

/// QFI of (ρ, D); panics on contract violations.  Internal shorthand for the
/// suites, which only feed valid pairs.
pub(crate) fn qfi_of(rho: &DensityOperator, d: &HermitianOperator) -> f64 {
    let pair = FisherPair::new(rho.clone(), d.clone()).expect("valid Fisher pair");
    qfi(&pair).expect("QFI evaluation")
}

/// QFI of the image pair (N(ρ), N(D)).
pub(crate) fn qfi_through(
    channel: &KrausChannel,
    rho: &DensityOperator,
    d: &HermitianOperator,
) -> f64 {
    let out_rho = channel.apply(rho.matrix());
    let out_d = channel.apply(d.matrix());
    let rho2 = DensityOperator::new(
        HermitianOperator::new(clamp_psd(&out_rho)).expect("channel output Hermitian"),
    )
    .expect("channel output PSD");
    let d2 = HermitianOperator::new(out_d).expect("channel preserves Hermiticity");
    qfi_of(&rho2, &d2)
}

/// Clamps tiny negative eigenvalues of a nominally PSD matrix to zero.
pub(crate) fn clamp_psd(m: &crate::linalg::ComplexMatrix) -> crate::linalg::ComplexMatrix {
    let h = HermitianOperator::new(m.clone()).expect("Hermitian input");
    let spec = eig_hermitian(&h).expect("eig");
    spec.map_eigenvalues(|l| l.max(0.0))
}

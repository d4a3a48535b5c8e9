//! Numerical toolkit for quantum clocks exposed to noise.
//!
//! The library is organized around a single question: when a pure probe state
//! evolves under a Hamiltonian and is then handed to a receiver through a
//! noisy channel, how much sensitivity to the elapsed time survives, and where
//! does the rest go?  The answer is an exact trade-off: the receiver's loss of
//! quantum Fisher information about time equals the environment's gain of
//! quantum Fisher information about a complementary energy parameter.
//!
//! The modules below build that statement up from dense linear algebra:
//!
//! - [`linalg`] — complex matrices, Hermitian spectral machinery, vectorized
//!   superoperators, positivity checks.
//! - [`channels`] — Kraus channels, Stinespring dilations, complementary
//!   channels, tensor powers, and the standard noise library.
//! - [`fisher`] — symmetric logarithmic derivatives, the quantum Fisher
//!   information, and candidate-based convex bounds.
//! - [`clock`] — the time/energy metrology scenario, the five Fisher
//!   quantities, equality conditions, and the two-parameter generalization.
//! - [`codes`] — metrological codes, symplectic Pauli machinery, stabilizer
//!   certification, and the equality-restoring perturbation.
//! - [`bounds`] — pinched i.i.d. upper bounds, pre-processing lower bounds,
//!   near-diagonal and energy-access bounds, weak-noise order fits.
//! - [`lindblad`] — continuous noise, reduction of a Lindblad evolution to a
//!   unitary followed by an instantaneous channel.
//! - [`manybody`] — symmetric-subspace (Dicke) computations and sparse probe
//!   states for chains up to dozens of sites.
//! - [`scenarios`] — a registry of named, parameterized experiments used by
//!   the command-line tool and the verification suites.
//!
//! A guided tour with worked examples lives in the `book/` directory of the
//! repository; its code snippets compile as part of this crate's doc tests.

// Ensure the system BLAS/LAPACK symbols are linked for ndarray's `blas`
// feature and ndarray-linalg's bindings.
extern crate openblas_src as _;

pub mod bounds;
pub mod channels;
pub mod clock;
pub mod codes;
pub mod fisher;
pub mod linalg;
pub mod lindblad;
pub mod manybody;
pub mod scenarios;
pub mod verify;

mod booktests;

pub use linalg::{ComplexMatrix, DensityOperator, HermitianOperator, C64};

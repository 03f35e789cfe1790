//! Desk-scale verification toolkit for distinguishing entangled states
//! under measurements with positive partial transpose.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`] — dense complex matrices, tensor-factor bookkeeping,
//!   partial transpose, and a Hermitian Jacobi eigensolver;
//! - [`states`] — exact constructors for the Bell basis, the four
//!   ququad-ququad product-Bell states, and their symmetry unitaries;
//! - [`symmetry`] — Bell-diagonal algebra, the group-averaging
//!   symmetrization pipeline, block decomposition, and an exact-rational
//!   infeasibility derivation;
//! - [`sdp`] — a small dense primal-dual interior-point solver with
//!   independently checked certificates, plus problem builders for
//!   optimal PPT discrimination;
//! - [`protocols`] — branch-exact simulations of teleportation-based
//!   discrimination, majorization-certified entanglement conversion,
//!   multi-copy decoding, and a two-receiver zero-error channel;
//! - [`cli`] — the experiment registry behind the `pptdisc` binary.
//!
//! Every experiment exposed by the binary also has a runnable example
//! under `examples/`.

pub mod cli;
pub mod linalg;
pub mod protocols;
pub mod sdp;
pub mod states;
pub mod symmetry;

mod error;

pub use error::{Error, Result};

/// Numerical tolerances shared across the crate.
///
/// The constructions are exact (amplitudes are dyadic or simple surds),
/// so the defaults are tight: working precision for algebraic
/// identities, looser thresholds only where eigensolves or the
/// interior-point iteration are involved.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Maximum deviation from `M = M^dagger` for a matrix to count as Hermitian.
    pub hermiticity: f64,
    /// Eigenvalue floor for positive-semidefinite checks.
    pub psd: f64,
    /// Max-norm error allowed when reconstructing `M` from its spectrum.
    pub reconstruction: f64,
    /// Deviation from unit norm allowed for state vectors.
    pub unit_norm: f64,
    /// Deviation allowed in `sum(M_i) = I` for a POVM.
    pub povm_sum: f64,
    /// Residual allowed in the symmetrized-POVM invariance equations.
    pub symmetry: f64,
    /// Magnitude threshold for entries that the block pattern forces to zero.
    pub block_pattern: f64,
    /// Generic working-precision guard for exact algebraic identities.
    pub exact: f64,
}

impl Tolerances {
    pub const fn default_const() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            psd: 1e-9,
            reconstruction: 1e-10,
            unit_norm: 1e-12,
            povm_sum: 1e-9,
            symmetry: 1e-9,
            block_pattern: 1e-10,
            exact: 1e-12,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::default_const()
    }
}

/// Default tolerances used by every module unless a caller overrides them.
pub const TOL: Tolerances = Tolerances::default_const();

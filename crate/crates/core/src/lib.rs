//! Exact state-vector simulation of total quantum teleportation.
//!
//! Alice's Bell measurement is realized two ways: as a simultaneous
//! measurement of the commuting squared total-spin components
//! ([`observables`]), and as an idealized cascade of two-photon absorption
//! stages acting on polarization modes ([`photonic`]). Both are checked
//! against analytic branch weights and by seeded Monte Carlo ([`harness`]).
//!
//! Conventions used throughout:
//!
//! * qubit 0 is the leftmost tensor factor, `|↑⟩ = (1, 0)`, `|↓⟩ = (0, 1)`;
//! * ħ = 1, so spin eigenvalues are reported in units of ħ²;
//! * states are compared up to global phase (via [`qcore::fidelity`]).

pub mod error;
pub mod harness;
pub mod observables;
pub mod photonic;
pub mod qcore;
pub mod sampling;
pub mod teleport;

pub use error::{Error, Result};

/// Numerical tolerances shared by all modules.
pub mod tol {
    /// Algebraic identities (norms, commutators, reconstructions).
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Eigenvalue residuals, projector validity and PSD checks.
    pub const EIGEN: f64 = 1e-10;
    /// Matching a measured eigenvalue against a table value.
    pub const EIGEN_MATCH: f64 = 1e-9;
    /// Teleported-state fidelity must reach `1 - FIDELITY`.
    pub const FIDELITY: f64 = 1e-10;
    /// Probabilities below this are treated as zero when sampling.
    pub const DEGENERATE_PROBABILITY: f64 = 1e-15;
}

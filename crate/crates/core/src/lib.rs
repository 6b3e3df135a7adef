//! Quantum speed limits for basis changes.
//!
//! The library computes how fast a Hamiltonian with a given mean energy can
//! map the computational basis onto an unbiased basis, a permuted basis, or a
//! maximally coherent state. It provides:
//!
//! - [`linalg`]: dense complex linear algebra for small dimensions, with a
//!   deterministic Jacobi eigensolver and unitary matrix functions;
//! - [`states`]: ordered bases, unbiasedness tests, the two-class
//!   classification of unbiased qutrit bases, Bloch vectors, and coherence
//!   quantifiers;
//! - [`bounds`]: the closed-form speed-limit bounds, the explicit optimal
//!   Hamiltonians that saturate them, and saturation/constraint checkers;
//! - [`montecarlo`]: the random-phase sampling experiment that extracts the
//!   minimal dimensionless evolution effort `Et` over unitaries achieving a
//!   basis change;
//! - [`oracle`]: independent brute-force verifiers (grid minimization over
//!   constraint simplices, exhaustive minimal-`Et` searches) used to
//!   cross-check everything else.

pub mod bounds;
pub mod linalg;
pub mod montecarlo;
pub mod oracle;
pub mod states;

/// Shared numeric tolerances.
///
/// Each constant records why that magnitude and not another.
pub mod tol {
    /// Hermiticity defect allowed in inputs, relative to the largest entry.
    /// Construction noise of products/conjugations stays well below this.
    pub const HERMITICITY_REL: f64 = 1e-12;

    /// Generic matrix equality (reconstruction, unitarity defect). Jacobi
    /// residuals on d <= 1024 stay 2-3 orders below.
    pub const EQUALITY: f64 = 1e-10;

    /// Eigenphase grouping threshold when splitting degenerate subspaces of
    /// a unitary. Distinct sampled phases separate at machine scale times
    /// conditioning; 1e-9 leaves margin on both sides.
    pub const PHASE_GROUPING: f64 = 1e-9;

    /// Default unbiasedness tolerance on |<i|j>|^2 (amplitude-squared scale).
    pub const UNBIASED: f64 = 1e-9;

    /// Eigenvalues may dip this far below zero and still count as PSD.
    pub const PSD: f64 = 1e-10;

    /// Slack added to closed-form inequalities so equality cases (boundary
    /// saturation) pass under floating point.
    pub const INEQ_SLACK: f64 = 1e-9;

    /// Strict ">" claims are verified as "> -STRICT" since floating point
    /// cannot witness strictness.
    pub const STRICT: f64 = 1e-6;
}

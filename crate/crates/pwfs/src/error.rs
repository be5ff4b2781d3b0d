//! Crate-wide error type.
//!
//! Errors are split along the boundaries the callers care about: invalid
//! inputs (`Config`), analytic-domain violations (`Domain`, `SingularResolvent`,
//! `NearSingular`), numerical contract breaches (`ContractViolation`,
//! `Lapack`), and harness-level failures (`AlignmentFailure`,
//! `InsufficientData`, `Io`, `Json`). Non-convergence of the fixed-point
//! iteration is deliberately *not* an error: it is recorded as data in
//! [`crate::eigensolver::FixedPointResult::converged`].

use thiserror::Error;

/// All failure modes surfaced by the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or mutually inconsistent inputs (bad cutoffs, mismatched
    /// period/convention between operands, malformed config fields, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// The spectral parameter λ hit (within 1e−12 relative) a Laplacian
    /// eigenvalue of the window, so the windowed resolvent is singular.
    #[error("singular resolvent: λ = {lambda} is within 1e-12 relative of window Laplacian eigenvalue {pole}")]
    SingularResolvent { lambda: f64, pole: f64 },

    /// λ left the validity domain of the coarse-space assembly
    /// (λ must stay below ρ_M by a relative margin of 1e−9).
    #[error("spectral parameter outside domain: λ = {lambda} exceeds the guard {guard} (ρ_M = {rho_m})")]
    Domain { lambda: f64, guard: f64, rho_m: f64 },

    /// A shifted solve `(H − λ)x = b` failed or looks numerically singular;
    /// carries the smallest eigenvalue magnitude found in the shifted block.
    #[error("near-singular shifted operator at λ = {lambda}: smallest |eigenvalue| = {smallest_abs_eig:e}")]
    NearSingular { lambda: f64, smallest_abs_eig: f64 },

    /// A caller-facing numerical contract was violated (non-Hermitian input,
    /// asymmetry tripwire, residual check, ...).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A LAPACK driver reported failure.
    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    /// The lifted vector has no usable overlap with the reference eigenspace.
    #[error("eigenvector alignment failure: projection norm {projection_norm:e} < 1e-8")]
    AlignmentFailure { projection_norm: f64 },

    /// Too few valid points for a least-squares rate fit.
    #[error("insufficient data for rate fit: {valid} valid points (need ≥ 3)")]
    InsufficientData { valid: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

//! Planewave spectral eigensolver for periodic 1D Schrödinger operators
//! `H = −Δ + V` with a Feshbach–Schur coarse-space reduction.
//!
//! The solver Galerkin-discretizes `H` in the planewave (Fourier) basis,
//! then reduces the fine-grid eigenproblem on `X_N` to a small eigenproblem
//! on a coarse space `X_M` that is *nonlinear in the spectral parameter λ*:
//! the coarse operator `H_σ(λ) = H_M + U_σ(λ)` carries a Schur-complement
//! correction `U_σ(λ)` assembled from a truncated Neumann expansion of the
//! resolvent on the window `X_N ⊖ X_M`. Fixed-point (SCF) iteration on λ
//! recovers fine-grid eigenvalues from the coarse problem, and a lifting
//! operator `Q_σ(λ)` reconstructs fine-grid eigenvectors.
//!
//! Module map:
//! - [`planewave`] — basis indexing, Fourier potentials, the window
//!   `X_N ⊖ X_M`, the weighted regularity norm `‖V‖_r`, and `κ_M`.
//! - [`fs`] — assembly of the Feshbach–Schur operators: windowed resolvent
//!   `G_M^N(λ)`, truncated Neumann series `R_σ(λ)`, effective interaction
//!   `U_σ(λ)`, coarse Hamiltonian `H_σ(λ)`, lifting `Q_σ(λ)`, and the
//!   quasi-exact Schur complement `U_M(λ)` used as an oracle.
//! - [`eigensolver`] — dense Hermitian eigendecomposition, the fine-grid
//!   reference solver, and the two fixed-point strategies (by index /
//!   by target) for the λ-nonlinear coarse problem.
//! - [`analysis`] — error metrics against the reference, convergence sweeps
//!   with rate fitting, and numerical audits: Feshbach–Schur isospectrality
//!   on random matrices, relative-form-bound perturbation inequalities, and
//!   the resolvent/Neumann-series operator bounds.
//! - [`cli`] — the `pwfs` command-line front end (`solve`, `sweep`, `audit`,
//!   `fsmap-check`) with reproducible, config-echoing outputs.
//!
//! Everything is assembled as dense matrices: the problem sizes of interest
//! (≲ 2000 planewaves) make dense assembly simple and exactly testable.
//! All types are immutable after construction and all operations are pure
//! functions, so independent solves and sweep points can run concurrently.

// LAPACK symbols come from the system OpenBLAS; the reference pulls in
// openblas-src's link directives.
use openblas_src as _;

pub mod analysis;
pub mod cli;
pub mod eigensolver;
pub mod error;
pub mod fs;
pub mod linalg;
pub mod planewave;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

//! Convergence experiments and numerical audits: error metrics against the
//! fine-grid reference, parameter sweeps with CSV output, log-log rate
//! fits, brute-force isospectrality checks, and bound audits for the
//! inequalities underpinning the reduction.

pub mod audits;
pub mod errors;
pub mod fsmap;
pub mod perturbation;
pub mod rate;
pub mod sweep;

pub use audits::{bound_audit_suite, to_json_lines, AuditRecord, BoundAudit, SkippedAudit};
pub use errors::{compute_errors, epsilon_bound, ErrorRecord};
pub use fsmap::{check_matrix, fs_map_check, FsMapConfig, FsMapReport, MatrixCheck};
pub use perturbation::{form_norm, perturbation_audit, perturbation_suite};
pub use rate::{fit_rate, fit_rate_window, pre_knee, RateFit};
pub use sweep::{sweep, write_csv, SweepAxis, SweepSpec};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

/// Random Hermitian matrix with entries uniform in `[−1, 1]` (both parts),
/// symmetrized as `(A + A*)/2`.
pub(crate) fn random_hermitian(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    crate::linalg::symmetrize(&a).0
}

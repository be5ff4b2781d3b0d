//! Brute-force verification that the subspace reduction is isospectral on
//! finite Hermitian matrices.
//!
//! For a Hermitian `H` split by the coarse projection `P` onto the first
//! `p` coordinates (complement `P^⊥`), the reduction map at spectral
//! parameter λ is
//!
//! ```text
//! F_P(λ) = P(H − λ)P − P H P^⊥ [P^⊥(H − λ)P^⊥]^{−1} P^⊥ H P
//! ```
//!
//! restricted to the coarse block. Whenever the complement block is
//! invertible at λ:
//!
//! - (a) λ is an eigenvalue of `H` iff `F_P(λ)` is singular;
//! - (b) the lift `φ ↦ [φ; −(P^⊥(H−λ)P^⊥)^{−1} P^⊥HP φ]` applied to
//!   `φ = Pψ` reconstructs the eigenvector ψ (up to phase, exactly in
//!   exact arithmetic);
//! - (c) the nullity of `F_P(λ)` equals the multiplicity of λ.
//!
//! The checker decomposes random instances by brute force and verifies all
//! three statements per eigenpair. Pairs where the complement block is
//! near-singular at λ (the reduction's hypothesis fails) or where `‖Pψ‖`
//! vanishes are reported as skipped, not failed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::random_hermitian;
use crate::eigensolver::hermitian_eig;
use crate::linalg;
use crate::{Error, Result};

/// Tolerance (relative to `max(1, ‖H‖)`) for singularity and
/// reconstruction checks.
pub const FS_MAP_TOL: f64 = 1e-9;

/// Nullity counting threshold, relative to `max(1, ‖H‖)`.
const NULLITY_TOL: f64 = 1e-8;

/// Minimum `σ_min` of the complement block (relative to `max(1, ‖H‖)`)
/// for a pair to count as solvable. Below this the reduction's
/// invertibility hypothesis is numerically void and roundoff amplification
/// would contaminate the 1e−9 checks.
const SOLVABLE_TOL: f64 = 1e-2;

/// Minimum coarse-projection norm for the reconstruction check.
const MIN_COARSE_NORM: f64 = 1e-6;

/// Relative clustering tolerance for degenerate eigenvalues.
const CLUSTER_TOL: f64 = 1e-8;

/// Checks for one distinct eigenvalue of one matrix.
#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueCheck {
    pub lambda: f64,
    pub multiplicity: usize,
    /// Complement block invertible at λ (with margin): the reduction's
    /// hypothesis. `false` ⇒ the pair is skipped, and the remaining fields
    /// are not meaningful.
    pub solvable: bool,
    /// `σ_min(F_P(λ))` — singularity evidence for (a).
    pub sigma_min: f64,
    /// Nullity of `F_P(λ)` versus the multiplicity — statement (c).
    pub nullity: usize,
    /// Worst per-eigenvector reconstruction error — statement (b).
    pub max_reconstruction_err: f64,
    /// Eigenvectors whose coarse projection was too small to lift.
    pub vectors_skipped: usize,
    pub passed: bool,
}

/// All eigenvalue checks for one Hermitian matrix and coarse dimension.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixCheck {
    pub dim: usize,
    pub coarse_dim: usize,
    pub eigenvalues: Vec<EigenvalueCheck>,
    pub checked: usize,
    pub skipped: usize,
    pub failed: usize,
}

/// Verify statements (a)–(c) for every eigenpair of `h` under the split
/// after coordinate `coarse_dim`. Tolerances are relative to
/// `max(1, ‖H‖)`.
pub fn check_matrix(h: &DMatrix<Complex64>, coarse_dim: usize) -> Result<MatrixCheck> {
    let n = h.nrows();
    if coarse_dim < 1 || coarse_dim >= n {
        return Err(Error::Config(format!(
            "coarse dimension must satisfy 1 ≤ p < dim, got p = {coarse_dim}, dim = {n}"
        )));
    }
    let p = coarse_dim;
    let d = hermitian_eig(h)?;
    let scale = d.eigenvalues.iter().fold(1.0f64, |m, &x| m.max(x.abs()));

    let h_pp = h.view((0, 0), (p, p)).into_owned();
    let h_wp = h.view((p, 0), (n - p, p)).into_owned();
    let h_ww = h.view((p, p), (n - p, n - p)).into_owned();

    let mut out = Vec::new();
    let (mut checked, mut skipped, mut failed) = (0usize, 0usize, 0usize);
    let mut start = 0usize;
    while start < n {
        // Cluster of numerically equal eigenvalues.
        let mut end = start + 1;
        while end < n
            && (d.eigenvalues[end] - d.eigenvalues[end - 1]).abs()
                <= CLUSTER_TOL * d.eigenvalues[end].abs().max(1.0)
        {
            end += 1;
        }
        let m = end - start;
        let lambda = d.eigenvalues[start..end].iter().sum::<f64>() / m as f64;

        // Shifted complement block and its conditioning at λ.
        let mut a_perp = h_ww.clone();
        for i in 0..(n - p) {
            a_perp[(i, i)] -= Complex64::new(lambda, 0.0);
        }
        let sigma_min_perp = linalg::eigvalsh(&a_perp)?
            .iter()
            .map(|x| x.abs())
            .fold(f64::INFINITY, f64::min);
        if sigma_min_perp <= SOLVABLE_TOL * scale {
            skipped += 1;
            out.push(EigenvalueCheck {
                lambda,
                multiplicity: m,
                solvable: false,
                // σ_min of the complement block, for diagnostics; the
                // reduction-map fields below are not meaningful.
                sigma_min: sigma_min_perp,
                nullity: 0,
                max_reconstruction_err: f64::NAN,
                vectors_skipped: 0,
                passed: false,
            });
            start = end;
            continue;
        }

        // F_P(λ) on the coarse block.
        let x = linalg::solve_hermitian(&a_perp, &h_wp)?;
        let mut f = h_pp.clone();
        for i in 0..p {
            f[(i, i)] -= Complex64::new(lambda, 0.0);
        }
        f -= h_wp.adjoint() * &x;
        let (f, _) = linalg::symmetrize(&f);
        let f_eigs = linalg::eigvalsh(&f)?;
        let sigma_min = f_eigs.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        let nullity = f_eigs.iter().filter(|x| x.abs() <= NULLITY_TOL * scale).count();

        // Reconstruction per eigenvector in the cluster.
        let mut max_err = 0.0f64;
        let mut vectors_skipped = 0usize;
        for j in start..end {
            let psi = d.eigenvectors.column(j).into_owned();
            let phi = psi.rows(0, p).into_owned();
            if phi.norm() < MIN_COARSE_NORM {
                vectors_skipped += 1;
                continue;
            }
            let phi_mat = DMatrix::from_column_slice(p, 1, phi.as_slice());
            let tail = -(linalg::solve_hermitian(&a_perp, &(&h_wp * phi_mat))?);
            let mut q = DVector::<Complex64>::zeros(n);
            q.rows_mut(0, p).copy_from(&phi);
            for i in 0..(n - p) {
                q[p + i] = tail[(i, 0)];
            }
            let q = q.unscale(q.norm());
            let overlap = psi.dotc(&q);
            let err = if overlap.norm() == 0.0 {
                2.0 // orthogonal: maximal phase-aligned distance
            } else {
                (&q - psi.scale(1.0) * (overlap / overlap.norm())).norm()
            };
            max_err = max_err.max(err);
        }

        let passed = sigma_min <= FS_MAP_TOL * scale
            && nullity == m
            && max_err <= FS_MAP_TOL * scale
            && vectors_skipped < m;
        checked += 1;
        if !passed {
            failed += 1;
        }
        out.push(EigenvalueCheck {
            lambda,
            multiplicity: m,
            solvable: true,
            sigma_min,
            nullity,
            max_reconstruction_err: max_err,
            vectors_skipped,
            passed,
        });
        start = end;
    }
    Ok(MatrixCheck { dim: n, coarse_dim: p, eigenvalues: out, checked, skipped, failed })
}

/// Configuration of the randomized checker.
#[derive(Debug, Clone, Serialize)]
pub struct FsMapConfig {
    pub trials: usize,
    /// Inclusive range of matrix dimensions.
    pub dim_range: (usize, usize),
    /// Inclusive range of coarse dimensions (clamped below `dim`).
    pub coarse_range: (usize, usize),
    pub seed: u64,
    /// Every this-many trials, construct a matrix with an exactly repeated
    /// eigenvalue to exercise the nullity statement (0 disables).
    pub degenerate_every: usize,
}

impl Default for FsMapConfig {
    fn default() -> Self {
        FsMapConfig {
            trials: 100,
            dim_range: (4, 12),
            coarse_range: (1, 4),
            seed: 7,
            degenerate_every: 5,
        }
    }
}

/// Aggregated result of the randomized checker.
#[derive(Debug, Clone, Serialize)]
pub struct FsMapReport {
    pub config: FsMapConfig,
    pub trials: usize,
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    pub pairs_failed: usize,
    /// Fraction of solvable pairs that passed.
    pub pass_rate: f64,
    pub all_passed: bool,
    pub checks: Vec<MatrixCheck>,
}

/// Build a Hermitian matrix with one eigenvalue duplicated: random spectrum
/// conjugated by the unitary factor of a random QR.
fn degenerate_hermitian(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let a = random_hermitian(n, rng);
    let q = a.qr().q();
    let mut eigs: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    eigs.sort_by(f64::total_cmp);
    // Duplicate a middle eigenvalue exactly.
    let mid = n / 2;
    eigs[mid] = eigs[mid - 1];
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        eigs.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let h = &q * d * q.adjoint();
    linalg::symmetrize(&h).0
}

/// Run [`check_matrix`] over random Hermitian instances and aggregate.
/// Deterministic for a fixed config (seeded ChaCha stream).
pub fn fs_map_check(config: &FsMapConfig) -> Result<FsMapReport> {
    if config.trials == 0 {
        return Err(Error::Config("fs_map_check needs at least one trial".into()));
    }
    let (dlo, dhi) = config.dim_range;
    let (clo, chi) = config.coarse_range;
    if dlo < 2 || dhi < dlo || clo < 1 || chi < clo {
        return Err(Error::Config(format!(
            "invalid fs_map ranges: dims {:?}, coarse {:?}",
            config.dim_range, config.coarse_range
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let n = rng.random_range(dlo..=dhi);
        let degenerate = config.degenerate_every > 0 && (trial + 1) % config.degenerate_every == 0;
        // A repeated eigenvalue needs a coarse block that can hold its
        // whole eigenspace, so force p ≥ 2 on degenerate trials.
        let p_lo = if degenerate { clo.max(2) } else { clo };
        let p_hi = chi.min(n - 1).max(p_lo);
        let p = rng.random_range(p_lo..=p_hi);
        let h = if degenerate {
            degenerate_hermitian(n, &mut rng)
        } else {
            random_hermitian(n, &mut rng)
        };
        checks.push(check_matrix(&h, p)?);
    }
    let pairs_checked: usize = checks.iter().map(|c| c.checked).sum();
    let pairs_skipped: usize = checks.iter().map(|c| c.skipped).sum();
    let pairs_failed: usize = checks.iter().map(|c| c.failed).sum();
    let pass_rate = if pairs_checked > 0 {
        (pairs_checked - pairs_failed) as f64 / pairs_checked as f64
    } else {
        f64::NAN
    };
    Ok(FsMapReport {
        config: config.clone(),
        trials: config.trials,
        pairs_checked,
        pairs_skipped,
        pairs_failed,
        pass_rate,
        all_passed: pairs_failed == 0 && pairs_checked > 0,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_matrix_coarse_pairs_pass() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(1.0),
            c(2.0),
            c(4.0),
            c(7.0),
            c(11.0),
            c(16.0),
        ]));
        for p in 1..=3 {
            let check = check_matrix(&h, p).unwrap();
            // Eigenvectors beyond the coarse block live entirely in the
            // complement, which is singular at their eigenvalues: the
            // reduction cannot see them, so they are skipped, not failed.
            assert_eq!(check.checked, p);
            assert_eq!(check.skipped, 6 - p);
            assert_eq!(check.failed, 0, "p = {p}: {check:?}");
            for e in check.eigenvalues.iter().filter(|e| e.solvable) {
                assert_eq!(e.nullity, 1);
                assert!(e.sigma_min <= 1e-12);
                assert!(e.max_reconstruction_err <= 1e-12);
            }
        }
    }

    #[test]
    fn random_instances_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let h = random_hermitian(6, &mut rng);
            let check = check_matrix(&h, 2).unwrap();
            assert_eq!(check.failed, 0, "{check:?}");
        }
    }

    #[test]
    fn constructed_degeneracy_has_nullity_two() {
        // Double eigenvalue 2 whose eigenspace is deliberately anchored in
        // the coarse block (coarse norm ≈ 0.89 for every unit eigenvector),
        // so the complement block stays well conditioned at λ = 2. A random
        // rotation would not guarantee that: the eigenspace can lean into
        // the complement and push the pair into the skipped bucket.
        let s = 5.0f64.sqrt();
        let e1 = [2.0 / s, 0.0, 0.0, 1.0 / s, 0.0];
        let e2 = [0.0, 2.0 / s, 0.0, 0.0, 1.0 / s];
        let mut basis = DMatrix::<Complex64>::zeros(5, 5);
        for i in 0..5 {
            basis[(i, 0)] = c(e1[i]);
            basis[(i, 1)] = c(e2[i]);
        }
        basis[(0, 2)] = c(1.0);
        basis[(1, 3)] = c(1.0);
        basis[(2, 4)] = c(1.0);
        let q = basis.qr().q();
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(2.0),
            c(2.0),
            c(5.0),
            c(7.0),
            c(9.0),
        ]));
        let h = linalg::symmetrize(&(&q * d * q.adjoint())).0;
        let check = check_matrix(&h, 3).unwrap();
        let deg = check
            .eigenvalues
            .iter()
            .find(|e| e.multiplicity == 2)
            .expect("the duplicated eigenvalue is detected");
        assert!(deg.solvable, "{deg:?}");
        assert_eq!(deg.nullity, 2, "{deg:?}");
        assert!(deg.passed, "{deg:?}");
        assert_eq!(check.failed, 0);
    }

    #[test]
    fn random_suite_full_pass() {
        let config = FsMapConfig { trials: 40, seed: 13, ..FsMapConfig::default() };
        let report = fs_map_check(&config).unwrap();
        assert!(report.pairs_checked > 0);
        assert_eq!(report.pairs_failed, 0, "{report:?}");
        assert!(report.all_passed);
        assert_eq!(report.pass_rate, 1.0);
    }

    #[test]
    fn deterministic_for_seed() {
        let config = FsMapConfig { trials: 10, seed: 42, ..FsMapConfig::default() };
        let a = fs_map_check(&config).unwrap();
        let b = fs_map_check(&config).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn rejects_bad_split() {
        let h = DMatrix::<Complex64>::identity(4, 4);
        assert!(check_matrix(&h, 0).is_err());
        assert!(check_matrix(&h, 4).is_err());
    }
}

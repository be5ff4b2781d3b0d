//! Feshbach–Schur operator assembly on the planewave window `X_N ⊖ X_M`.
//!
//! For a spectral parameter λ below the coarse cutoff scale `ρ_M`, the
//! effective coarse operator is `H_σ(λ) = H_M + U_σ(λ)` with
//!
//! - `G_M^N(λ) = (−Δ − λ)⁻¹` restricted to the window (diagonal),
//! - `R_σ(λ) = Σ_{k=0}^K (−1)^k [G_M^N(λ) V_M^N]^k G_M^N(λ)` — the Neumann
//!   expansion of the windowed resolvent of `−Δ + V − λ`, truncated at
//!   order `K` and accumulated in Horner form,
//! - `U_σ(λ) = −P_M V P_M^N R_σ(λ) P_M^N V P_M` — the effective interaction,
//! - `Q_σ(λ) = 1 − R_σ(λ) P_M^N V P_M` — the lifting operator that
//!   reconstructs fine-grid eigenvectors from coarse ones.
//!
//! The quasi-exact Schur complement `U_M(λ) = −P_M V P_M^⊥ (H_M^⊥ − λ)⁻¹
//! P_M^⊥ V P_M` (with the complement truncated at a large audit cutoff) is
//! provided as an oracle for the truncated assembly.
//!
//! λ-domain guard: assembly accepts `λ < ρ_M·(1 − 1e−9)` rather than
//! requiring `λ < κ_M` — the certified bound `κ_M` can be pessimistic, and
//! the fixed-point iterations routinely operate between the two. `κ_M` is
//! still reported by the audits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::planewave::{potential_block, IndexWindow, ModeSet, Problem};
use crate::{Error, Result};

/// Relative margin below `ρ_M` for the λ-domain guard.
const LAMBDA_GUARD_MARGIN: f64 = 1e-9;

/// Relative tolerance for declaring the windowed resolvent singular.
const RESOLVENT_POLE_TOL: f64 = 1e-12;

/// Maximum tolerated relative asymmetry of the assembled `U` before
/// symmetrization (roundoff tripwire).
const ASYMMETRY_TRIPWIRE: f64 = 1e-12;

/// The discretization triple `σ = (N, M, K)` plus the regularity index `r`
/// and the shift `α` used by form-norm diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsParams {
    /// Coarse cutoff `M ≥ 1`.
    pub m: u32,
    /// Fine cutoff `N ≥ M`.
    pub n: u32,
    /// Neumann truncation order `K ≥ 0`.
    pub k: u32,
    /// Regularity index `r ≥ 0` of the potential norm `‖V‖_r`.
    pub r: f64,
    /// Shift `α ≥ 0` making `H + α` positive in form-norm diagnostics.
    pub alpha: f64,
}

impl FsParams {
    pub fn new(m: u32, n: u32, k: u32, r: f64, alpha: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::Config(format!("coarse cutoff M must be ≥ 1, got {m}")));
        }
        if n < m {
            return Err(Error::Config(format!("fine cutoff N must be ≥ M, got N = {n} < M = {m}")));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Config(format!("regularity index r must be ≥ 0, got {r}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Config(format!("shift α must be ≥ 0, got {alpha}")));
        }
        Ok(Self { m, n, k, r, alpha })
    }

    /// Same parameters with a different Neumann order.
    pub fn with_k(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    /// Same parameters with a different fine cutoff (must stay ≥ M; callers
    /// sweep validated grids).
    pub fn with_n(mut self, n: u32) -> Self {
        self.n = n;
        self
    }

    /// Same parameters with a different coarse cutoff.
    pub fn with_m(mut self, m: u32) -> Self {
        self.m = m;
        self
    }
}

/// The assembled coarse operator at a fixed λ: `H_σ(λ) = h_coarse + u_sigma`.
#[derive(Debug, Clone)]
pub struct EffectiveOperator {
    /// Spectral parameter the operator was assembled at.
    pub lambda: f64,
    /// Galerkin block `H_M = P_M(−Δ + V)P_M`.
    pub h_coarse: DMatrix<Complex64>,
    /// Effective interaction `U_σ(λ)` (zero when `N = M`).
    pub u_sigma: DMatrix<Complex64>,
    /// The window `X_N ⊖ X_M` the interaction was assembled on.
    pub window: IndexWindow,
    /// Relative asymmetry of `U_σ` before symmetrization (diagnostic;
    /// guaranteed `< 1e−12` by the assembly tripwire).
    pub asymmetry: f64,
}

impl EffectiveOperator {
    /// `H_σ(λ) = H_M + U_σ(λ)`.
    pub fn h_sigma(&self) -> DMatrix<Complex64> {
        &self.h_coarse + &self.u_sigma
    }
}

/// A coarse vector together with its lift to the fine space.
#[derive(Debug, Clone)]
pub struct LiftedVector {
    /// Coefficients on `X_M`.
    pub coarse: DVector<Complex64>,
    /// Coefficients on `X_N`: the image under `Q_σ(λ)`. The first
    /// `dim X_M` entries equal `coarse` (the lift acts as the identity on
    /// the coarse block).
    pub fine: DVector<Complex64>,
}

/// Reject λ at or above `ρ_M·(1 − 1e−9)`.
fn guard_lambda(lambda: f64, rho_m: f64) -> Result<()> {
    let guard = rho_m * (1.0 - LAMBDA_GUARD_MARGIN);
    if !(lambda < guard) {
        return Err(Error::Domain { lambda, guard, rho_m });
    }
    Ok(())
}

/// Diagonal of the windowed resolvent `G_M^N(λ)`: entries `1/(ω_k² − λ)`
/// over the window modes. Errors when λ sits within `1e−12` relative of a
/// window Laplacian eigenvalue (a resolvent pole).
pub fn windowed_resolvent(window: &IndexWindow, lambda: f64) -> Result<Vec<f64>> {
    window
        .modes()
        .iter()
        .map(|&k| {
            let w2 = window.omega2(k);
            let d = w2 - lambda;
            if d.abs() <= RESOLVENT_POLE_TOL * w2.abs().max(1.0) {
                Err(Error::SingularResolvent { lambda, pole: w2 })
            } else {
                Ok(1.0 / d)
            }
        })
        .collect()
}

/// Scale row `i` of `m` by `g[i]` in place.
fn scale_rows_complex(g: &[f64], m: &mut DMatrix<Complex64>) {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= g[i];
        }
    }
}

fn scale_rows_real(g: &[f64], m: &mut DMatrix<f64>) {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= g[i];
        }
    }
}

/// The truncated Neumann series `R_σ(λ)` as a full matrix on the window:
/// `Σ_{k=0}^K (−1)^k [G V_M^N]^k G`, accumulated in Horner form
/// `R ← G(1 − V_M^N R)` starting from `R = G`.
///
/// Cost is `K` window-sized matrix products — fine for the windows the
/// tests exercise; production paths use [`neumann_apply`], which only ever
/// multiplies into narrow blocks.
pub fn neumann_series(
    window: &IndexWindow,
    problem: &Problem,
    lambda: f64,
    k: u32,
) -> Result<DMatrix<Complex64>> {
    let g = windowed_resolvent(window, lambda)?;
    let w = window.dim();
    let vw = potential_block(problem.potential(), window, window)?;
    let mut r = DMatrix::<Complex64>::zeros(w, w);
    for i in 0..w {
        r[(i, i)] = Complex64::new(g[i], 0.0);
    }
    for _ in 0..k {
        // R ← G − G V R
        let mut t = -(&vw * &r);
        for i in 0..w {
            t[(i, i)] += 1.0;
        }
        scale_rows_complex(&g, &mut t);
        r = t;
    }
    Ok(r)
}

/// Apply the truncated Neumann series to a block: `R_σ(λ)·B` without
/// forming `R_σ`. Horner form: `T = G B`, then `T ← G(B − V_M^N T)`
/// repeated `K` times. Runs in pure `f64` when the potential and `B` are
/// real (the common even-potential case).
pub fn neumann_apply(
    window: &IndexWindow,
    problem: &Problem,
    lambda: f64,
    k: u32,
    b: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    if b.nrows() != window.dim() {
        return Err(Error::Config(format!(
            "neumann_apply: block has {} rows but the window has dimension {}",
            b.nrows(),
            window.dim()
        )));
    }
    let g = windowed_resolvent(window, lambda)?;
    if window.dim() == 0 {
        return Ok(b.clone());
    }
    let vw = potential_block(problem.potential(), window, window)?;

    if linalg::is_real(&vw) && linalg::is_real(b) {
        let vwr = vw.map(|z| z.re);
        let br = b.map(|z| z.re);
        let mut t = br.clone();
        scale_rows_real(&g, &mut t);
        for _ in 0..k {
            let mut s = &br - &vwr * &t;
            scale_rows_real(&g, &mut s);
            t = s;
        }
        Ok(t.map(|x| Complex64::new(x, 0.0)))
    } else {
        let mut t = b.clone();
        scale_rows_complex(&g, &mut t);
        for _ in 0..k {
            let mut s = b - &vw * &t;
            scale_rows_complex(&g, &mut s);
            t = s;
        }
        Ok(t)
    }
}

/// Assemble `U_σ(λ)` plus its pre-symmetrization asymmetry, trip-wiring on
/// unexpectedly large roundoff.
fn assemble_u_sigma(
    problem: &Problem,
    params: &FsParams,
    lambda: f64,
    window: &IndexWindow,
) -> Result<(DMatrix<Complex64>, f64)> {
    let coarse = problem.basis(params.m)?;
    guard_lambda(lambda, coarse.rho())?;
    let m_dim = coarse.dim();
    if window.dim() == 0 {
        return Ok((DMatrix::zeros(m_dim, m_dim), 0.0));
    }
    // B = P_M^N V P_M (window × coarse); U_σ = −B* R_σ B.
    let b = potential_block(problem.potential(), window, &coarse)?;
    let t = neumann_apply(window, problem, lambda, params.k, &b)?;
    let u_raw = -(b.adjoint() * t);
    let (u, asym) = linalg::symmetrize(&u_raw);
    if asym >= ASYMMETRY_TRIPWIRE {
        return Err(Error::ContractViolation(format!(
            "effective interaction asymmetry {asym:e} exceeds the 1e-12 tripwire \
             (M = {}, N = {}, K = {}, λ = {lambda})",
            params.m, params.n, params.k
        )));
    }
    Ok((u, asym))
}

/// The effective interaction `U_σ(λ) = −P_M V P_M^N R_σ(λ) P_M^N V P_M`,
/// explicitly symmetrized. Returns the zero matrix when `N = M` (plain
/// Galerkin). Requires `λ < ρ_M·(1 − 1e−9)`.
pub fn effective_interaction(
    problem: &Problem,
    params: &FsParams,
    lambda: f64,
) -> Result<DMatrix<Complex64>> {
    let window = problem.window(params.m, params.n)?;
    Ok(assemble_u_sigma(problem, params, lambda, &window)?.0)
}

/// The quasi-exact Schur complement
/// `U_M(λ) = −P_M V P_M^⊥ (H_M^⊥ − λ)⁻¹ P_M^⊥ V P_M`
/// with the complement projector truncated at the audit cutoff `n_e`.
/// Serves as the oracle for [`effective_interaction`] (its `K → ∞`,
/// `N → n_e` limit).
///
/// The shifted window operator is factorized by a Bunch-Kaufman solve and
/// the solution is residual-checked; a failed factorization or a large
/// residual reports the smallest eigenvalue magnitude of the shifted block.
pub fn schur_exact_interaction(
    problem: &Problem,
    m: u32,
    n_e: u32,
    lambda: f64,
) -> Result<DMatrix<Complex64>> {
    let coarse = problem.basis(m)?;
    guard_lambda(lambda, coarse.rho())?;
    let window = problem.window(m, n_e)?;
    let m_dim = coarse.dim();
    if window.dim() == 0 {
        return Ok(DMatrix::zeros(m_dim, m_dim));
    }
    let b = potential_block(problem.potential(), &window, &coarse)?;
    let mut shifted = problem.hamiltonian_on(&window)?;
    for i in 0..window.dim() {
        shifted[(i, i)] -= lambda;
    }
    let near_singular = |routine_failure: Option<Error>| -> Error {
        // Failure path: report how singular the shifted block actually is.
        match linalg::eigvalsh(&shifted) {
            Ok(w) => {
                let smallest = w.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
                Error::NearSingular { lambda, smallest_abs_eig: smallest }
            }
            Err(e) => routine_failure.unwrap_or(e),
        }
    };
    let x = match linalg::solve_hermitian(&shifted, &b) {
        Ok(x) => x,
        Err(e @ Error::Lapack { .. }) => return Err(near_singular(Some(e))),
        Err(e) => return Err(e),
    };
    // Residual check guards against a silently inaccurate factorization.
    let resid = linalg::matmul(&shifted, &x) - &b;
    let scale = linalg::max_abs_entry(&b).max(1.0);
    if linalg::max_abs_entry(&resid) > 1e-8 * scale {
        return Err(near_singular(None));
    }
    let u_raw = -(b.adjoint() * x);
    let (u, asym) = linalg::symmetrize(&u_raw);
    if asym >= ASYMMETRY_TRIPWIRE {
        return Err(Error::ContractViolation(format!(
            "Schur complement asymmetry {asym:e} exceeds the 1e-12 tripwire (M = {m}, λ = {lambda})"
        )));
    }
    Ok(u)
}

/// Assemble the full effective operator `H_σ(λ) = H_M + U_σ(λ)`.
pub fn coarse_hamiltonian(
    problem: &Problem,
    params: &FsParams,
    lambda: f64,
) -> Result<EffectiveOperator> {
    let coarse = problem.basis(params.m)?;
    let window = problem.window(params.m, params.n)?;
    let h_coarse = problem.hamiltonian_on(&coarse)?;
    let (u_sigma, asymmetry) = assemble_u_sigma(problem, params, lambda, &window)?;
    Ok(EffectiveOperator { lambda, h_coarse, u_sigma, window, asymmetry })
}

/// Lift a coarse vector to the fine space:
/// `Q_σ(λ)φ = embed(φ) − R_σ(λ) P_M^N V P_M φ`, where the correction lives
/// on the window block.
pub fn lift(
    problem: &Problem,
    params: &FsParams,
    lambda: f64,
    coarse_vec: &DVector<Complex64>,
) -> Result<LiftedVector> {
    let coarse = problem.basis(params.m)?;
    guard_lambda(lambda, coarse.rho())?;
    if coarse_vec.len() != coarse.dim() {
        return Err(Error::Config(format!(
            "lift: coarse vector has length {} but dim X_M = {}",
            coarse_vec.len(),
            coarse.dim()
        )));
    }
    let fine = problem.basis(params.n)?;
    let window = problem.window(params.m, params.n)?;
    let mut out = DVector::<Complex64>::zeros(fine.dim());
    out.rows_mut(0, coarse.dim()).copy_from(coarse_vec);
    if window.dim() > 0 {
        let b = potential_block(problem.potential(), &window, &coarse)?;
        let bc = DMatrix::from_column_slice(window.dim(), 1, (&b * coarse_vec).as_slice());
        let t = neumann_apply(&window, problem, lambda, params.k, &bc)?;
        for i in 0..window.dim() {
            out[coarse.dim() + i] = -t[(i, 0)];
        }
    }
    Ok(LiftedVector { coarse: coarse_vec.clone(), fine: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planewave::{CutoffConvention, FourierPotential, PlanewaveBasis};
    use approx::assert_abs_diff_eq;

    const TAU: f64 = std::f64::consts::TAU;

    fn problem(v: FourierPotential) -> Problem {
        Problem::new(v, 1.0, CutoffConvention::StrictlyBelow).unwrap()
    }

    fn window(problem: &Problem, lo: u32, hi: u32) -> IndexWindow {
        problem.window(lo, hi).unwrap()
    }

    #[test]
    fn resolvent_diagonal_entries() {
        let p = problem(FourierPotential::zero());
        // Window {±1}: modes of X_2 ⊖ X_1 under the strict convention.
        let w = window(&p, 1, 2);
        assert_eq!(w.modes(), &[1, -1]);
        let g = windowed_resolvent(&w, 0.0).unwrap();
        assert_abs_diff_eq!(g[0], 1.0 / (TAU * TAU), epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 1.0 / (TAU * TAU), epsilon = 1e-15);
    }

    #[test]
    fn resolvent_pole_detected() {
        let p = problem(FourierPotential::zero());
        let w = window(&p, 1, 2);
        let err = windowed_resolvent(&w, TAU * TAU);
        assert!(matches!(err, Err(Error::SingularResolvent { .. })));
    }

    #[test]
    fn resolvent_negative_shift() {
        let p = problem(FourierPotential::zero());
        // Window containing k = 2 (X_3 ⊖ X_2).
        let w = window(&p, 2, 3);
        assert_eq!(w.modes(), &[2, -2]);
        let g = windowed_resolvent(&w, -1.0).unwrap();
        assert_abs_diff_eq!(g[0], 1.0 / (4.0 * TAU * TAU + 1.0), epsilon = 1e-15);
    }

    #[test]
    fn neumann_zero_potential_is_resolvent() {
        let p = problem(FourierPotential::zero());
        let w = window(&p, 1, 3);
        let g = windowed_resolvent(&w, -0.5).unwrap();
        for k in [0u32, 3, 7] {
            let r = neumann_series(&w, &p, -0.5, k).unwrap();
            for i in 0..w.dim() {
                for j in 0..w.dim() {
                    let expect = if i == j { g[i] } else { 0.0 };
                    assert_abs_diff_eq!(r[(i, j)].re, expect, epsilon = 1e-15);
                    assert_abs_diff_eq!(r[(i, j)].im, 0.0);
                }
            }
        }
    }

    #[test]
    fn neumann_k1_two_term_expansion() {
        let p = problem(FourierPotential::vt(1.0, 32));
        let w = window(&p, 2, 5);
        let lambda = 3.0;
        let g = windowed_resolvent(&w, lambda).unwrap();
        let vw = potential_block(p.potential(), &w, &w).unwrap();
        let gd = DMatrix::from_diagonal(&DVector::from_iterator(
            w.dim(),
            g.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let expect = &gd - &gd * &vw * &gd;
        let r = neumann_series(&w, &p, lambda, 1).unwrap();
        assert!(linalg::max_abs_entry(&(&r - &expect)) < 1e-15);
    }

    #[test]
    fn neumann_matches_window_inverse_oracle() {
        // M = 4 keeps the series ratio below one for the rough potential;
        // at K = 64 the truncation bound is at roundoff level, so compare
        // against the dense inverse of the windowed operator with a small
        // additive allowance for accumulated floating-point error.
        let p = problem(FourierPotential::vt(1.0, 64));
        let m_basis = PlanewaveBasis::new(1.0, 4, CutoffConvention::StrictlyBelow).unwrap();
        let w = window(&p, 4, 16);
        let lambda = 0.0;
        let r_val = 1.0;
        let norm_v = crate::planewave::regularity_norm(p.potential(), 1.0, r_val, 2000).unwrap();
        let q = 4.0 * m_basis.rho().powf(-r_val) * norm_v;
        assert!(q < 1.0, "series ratio must be < 1 for this test, got {q}");

        let k = 64u32;
        let r = neumann_series(&w, &p, lambda, k).unwrap();
        // Oracle: dense inverse of (−Δ + V_M^N − λ) on the window.
        let mut hw = p.hamiltonian_on(&w).unwrap();
        for i in 0..w.dim() {
            hw[(i, i)] -= lambda;
        }
        let inv = hw.clone().try_inverse().expect("windowed operator invertible");
        let diff = &r - &inv;
        let rel = linalg::spectral_norm_hermitian(&linalg::symmetrize(&diff).0).unwrap()
            / linalg::spectral_norm_hermitian(&inv).unwrap();
        let bound = q.powi(k as i32 + 1) / (1.0 - q);
        assert!(
            rel <= bound + 1e-12,
            "relative error {rel:e} exceeds truncation bound {bound:e} + roundoff slack"
        );
    }

    #[test]
    fn neumann_apply_agrees_with_full_series() {
        let p = problem(FourierPotential::vt(1.0, 32));
        let coarse = p.basis(2).unwrap();
        let w = window(&p, 2, 8);
        let b = potential_block(p.potential(), &w, &coarse).unwrap();
        for k in [0u32, 1, 5] {
            let full = neumann_series(&w, &p, 10.0, k).unwrap() * &b;
            let applied = neumann_apply(&w, &p, 10.0, k, &b).unwrap();
            assert!(linalg::max_abs_entry(&(&full - &applied)) < 1e-12);
        }
    }

    #[test]
    fn effective_interaction_zero_potential() {
        let p = problem(FourierPotential::zero());
        let params = FsParams::new(2, 8, 3, 1.0, 1.0).unwrap();
        let u = effective_interaction(&p, &params, 1.0).unwrap();
        assert_eq!(u.shape(), (3, 3));
        assert_abs_diff_eq!(linalg::max_abs_entry(&u), 0.0);
    }

    #[test]
    fn effective_interaction_k0_triple_product() {
        let p = problem(FourierPotential::vt(1.0, 32));
        let params = FsParams::new(2, 6, 0, 1.0, 1.0).unwrap();
        let lambda = 5.0;
        let u = effective_interaction(&p, &params, lambda).unwrap();

        let coarse = p.basis(2).unwrap();
        let w = window(&p, 2, 6);
        let b = potential_block(p.potential(), &w, &coarse).unwrap();
        let g = windowed_resolvent(&w, lambda).unwrap();
        let gd = DMatrix::from_diagonal(&DVector::from_iterator(
            w.dim(),
            g.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let expect = -(b.adjoint() * gd * &b);
        assert!(linalg::max_abs_entry(&(&u - &expect)) < 1e-14);
    }

    #[test]
    fn effective_interaction_respects_lambda_guard() {
        let p = problem(FourierPotential::vt(1.0, 32));
        let params = FsParams::new(2, 6, 0, 1.0, 1.0).unwrap();
        let rho = p.basis(2).unwrap().rho();
        assert!(matches!(
            effective_interaction(&p, &params, rho),
            Err(Error::Domain { .. })
        ));
        assert!(effective_interaction(&p, &params, rho * 0.999).is_ok());
    }

    #[test]
    fn galerkin_degenerate_case() {
        // N = M: no window, zero interaction, H_σ = plain Galerkin H_M.
        let p = problem(FourierPotential::vt(1.0, 32));
        let params = FsParams::new(3, 3, 4, 1.0, 1.0).unwrap();
        let op = coarse_hamiltonian(&p, &params, 0.0).unwrap();
        assert_eq!(op.window.dim(), 0);
        assert_abs_diff_eq!(linalg::max_abs_entry(&op.u_sigma), 0.0);
        let coarse = p.basis(3).unwrap();
        let h_m = p.hamiltonian_on(&coarse).unwrap();
        assert!(linalg::max_abs_entry(&(&op.h_sigma() - &h_m)) < 1e-15);
    }

    #[test]
    fn coarse_hamiltonian_zero_potential_is_diagonal() {
        let p = problem(FourierPotential::zero());
        let params = FsParams::new(2, 8, 2, 1.0, 1.0).unwrap();
        let op = coarse_hamiltonian(&p, &params, -1.0).unwrap();
        let d = crate::planewave::laplacian_diagonal(&p.basis(2).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { d[i] } else { 0.0 };
                assert_abs_diff_eq!(op.h_sigma()[(i, j)].re, expect, epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(op.asymmetry, 0.0);
    }

    #[test]
    fn lift_zero_potential_is_embedding() {
        let p = problem(FourierPotential::zero());
        let params = FsParams::new(2, 5, 3, 1.0, 1.0).unwrap();
        let v = DVector::from_fn(3, |i, _| Complex64::new(i as f64 + 1.0, -0.5));
        let lifted = lift(&p, &params, 0.5, &v).unwrap();
        assert_eq!(lifted.fine.len(), 9);
        for i in 0..3 {
            assert_eq!(lifted.fine[i], v[i]);
        }
        for i in 3..9 {
            assert_eq!(lifted.fine[i], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn lift_k0_single_mode_column() {
        // K = 0, coarse vector e_0: window part must be −G V̂ column for
        // mode differences k − 0.
        let p = problem(FourierPotential::vt(1.0, 32));
        let params = FsParams::new(1, 4, 0, 1.0, 1.0).unwrap();
        let lambda = 2.0;
        let e0 = DVector::from_element(1, Complex64::new(1.0, 0.0));
        let lifted = lift(&p, &params, lambda, &e0).unwrap();
        let w = window(&p, 1, 4);
        let g = windowed_resolvent(&w, lambda).unwrap();
        for (i, &k) in w.modes().iter().enumerate() {
            let expect = -g[i] * p.potential().coeff(k).re;
            assert_abs_diff_eq!(lifted.fine[1 + i].re, expect, epsilon = 1e-15);
            assert_abs_diff_eq!(lifted.fine[1 + i].im, 0.0);
        }
        // Coarse block unchanged.
        assert_eq!(lifted.fine[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn schur_exact_zero_potential() {
        let p = problem(FourierPotential::zero());
        let u = schur_exact_interaction(&p, 2, 16, 0.0).unwrap();
        assert_abs_diff_eq!(linalg::max_abs_entry(&u), 0.0);
    }

    #[test]
    fn schur_exact_matches_large_k_neumann() {
        // Self-consistency of the two assembly routes: U_σ(K large, N = N_e)
        // against the dense-solve Schur complement.
        let p = problem(FourierPotential::vt(1.0, 64));
        let n_e = 24u32;
        let lambda = 1.0;
        let u_exact = schur_exact_interaction(&p, 4, n_e, lambda).unwrap();
        let params = FsParams::new(4, n_e, 200, 1.0, 1.0).unwrap();
        let u_series = effective_interaction(&p, &params, lambda).unwrap();
        let diff = linalg::spectral_norm_hermitian(&(&u_exact - &u_series)).unwrap();
        assert!(diff <= 1e-10, "assembly routes disagree by {diff:e}");
    }

    #[test]
    fn schur_exact_monotone_in_lambda() {
        // U(λ') ⪰ U(λ) for λ' < λ: eigenvalues of U(λ) − U(λ') stay ≤ 1e−12.
        let p = problem(FourierPotential::vt(1.0, 64));
        let u1 = schur_exact_interaction(&p, 4, 32, -5.0).unwrap();
        let u2 = schur_exact_interaction(&p, 4, 32, 5.0).unwrap();
        let w = linalg::eigvalsh(&(&u2 - &u1)).unwrap();
        assert!(w.iter().all(|&x| x <= 1e-12));
        // And non-positivity of each.
        assert!(linalg::eigvalsh(&u1).unwrap().iter().all(|&x| x <= 1e-12));
        assert!(linalg::eigvalsh(&u2).unwrap().iter().all(|&x| x <= 1e-12));
    }
}

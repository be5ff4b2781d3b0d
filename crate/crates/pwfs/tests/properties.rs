//! Randomized structural invariants of the planewave reduction.
//!
//! These check the algebraic contracts that hold for *every* admissible
//! input — Hermiticity, dimension laws, norm monotonicity, sign and
//! monotonicity of the Schur complement, fixed-point self-consistency —
//! rather than convergence behavior on specific potentials (see the
//! `acceptance` test for those).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use pwfs::analysis::{check_matrix, epsilon_bound, perturbation_audit};
use pwfs::eigensolver::{
    fixed_point_by_index, fixed_point_by_target, hermitian_eig, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use pwfs::fs::{coarse_hamiltonian, lift, schur_exact_interaction, FsParams};
use pwfs::linalg;
use pwfs::planewave::{
    laplacian_diagonal, potential_block, regularity_norm, CutoffConvention, FourierPotential,
    ModeSet, PlanewaveBasis, Problem,
};

const TAU: f64 = std::f64::consts::TAU;

/// Real periodic potential with random coefficients up to `max_freq`,
/// Hermitian-completed so that `V̂_{−n} = conj(V̂_n)`.
fn arb_real_potential(max_freq: usize, amp: f64) -> impl Strategy<Value = FourierPotential> {
    (
        -amp..amp,
        proptest::collection::vec((-amp..amp, -amp..amp), 0..=max_freq),
    )
        .prop_map(|(v0, pos)| {
            let mut coeffs = vec![(0i64, Complex64::new(v0, 0.0))];
            for (j, &(re, im)) in pos.iter().enumerate() {
                let n = (j + 1) as i64;
                coeffs.push((n, Complex64::new(re, im)));
                coeffs.push((-n, Complex64::new(re, -im)));
            }
            FourierPotential::new(coeffs).expect("Hermitian coefficient set")
        })
}

/// Random Hermitian matrix of the given dimension with entries in ±`amp`.
fn arb_hermitian_fixed(n: usize, amp: f64) -> impl Strategy<Value = DMatrix<Complex64>> {
    proptest::collection::vec((-amp..amp, -amp..amp), n * n).prop_map(move |v| {
        let a = DMatrix::from_fn(n, n, |i, j| {
            let (re, im) = v[i * n + j];
            Complex64::new(re, im)
        });
        linalg::symmetrize(&a).0
    })
}

fn arb_hermitian(
    dims: std::ops::RangeInclusive<usize>,
    amp: f64,
) -> impl Strategy<Value = DMatrix<Complex64>> {
    dims.prop_flat_map(move |n| arb_hermitian_fixed(n, amp))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    /// The multiplication operator by a real potential is Hermitian on
    /// every planewave basis.
    #[test]
    fn potential_block_is_hermitian(v in arb_real_potential(5, 2.0), m in 1u32..=5) {
        let basis = PlanewaveBasis::new(1.0, m, CutoffConvention::StrictlyBelow).unwrap();
        let a = potential_block(&v, &basis, &basis).unwrap();
        prop_assert!(linalg::hermitian_violation(&a) <= 1e-13);
    }

    /// Dimension laws, canonical mode ordering `0, 1, −1, 2, −2, …`, exact
    /// Laplacian symbol `(2πk/L)²`, and `ρ_M = (2πM/L)²`.
    #[test]
    fn basis_dimensions_modes_and_symbol(m in 1u32..=8, l in 0.5f64..3.0) {
        let strict = PlanewaveBasis::new(l, m, CutoffConvention::StrictlyBelow).unwrap();
        prop_assert_eq!(strict.dim(), 2 * (m as usize - 1) + 1);
        let upto = PlanewaveBasis::new(l, m, CutoffConvention::UpTo).unwrap();
        prop_assert_eq!(upto.dim(), 2 * m as usize + 1);

        for basis in [&strict, &upto] {
            let modes = basis.modes();
            prop_assert_eq!(modes[0], 0);
            for (pos, &k) in modes.iter().enumerate().skip(1) {
                let magnitude = pos.div_ceil(2) as i64;
                let expected = if pos % 2 == 1 { magnitude } else { -magnitude };
                prop_assert_eq!(k, expected);
            }
            let lap = laplacian_diagonal(basis);
            for (&k, &w2) in modes.iter().zip(&lap) {
                let exact = (TAU * k as f64 / l).powi(2);
                prop_assert!(w2 >= 0.0);
                prop_assert!((w2 - exact).abs() <= 1e-12 * exact.max(1.0));
            }
        }
        let rho = (TAU * m as f64 / l).powi(2);
        prop_assert!((strict.rho() - rho).abs() <= 1e-12 * rho);
    }

    /// The family potentials are real: `V̂_{−n} = conj(V̂_n)`.
    #[test]
    fn family_potentials_are_real(t in 0.0f64..2.0, maxf in 1i64..64) {
        let v = FourierPotential::vt(t, maxf);
        prop_assert!(v.is_real());
        for n in 1..=maxf {
            prop_assert_eq!(v.coeff(-n), v.coeff(n).conj());
        }
    }

    /// `‖V‖_r` grows monotonically with the audit cutoff (principal
    /// submatrices cannot have larger spectral norm) and scales
    /// absolutely-homogeneously in the potential.
    #[test]
    fn regularity_norm_monotone_and_homogeneous(
        v in arb_real_potential(4, 2.0),
        r in 0.3f64..1.2,
        c1 in 3u32..=8,
        extra in 1u32..=8,
        alpha in -3.0f64..3.0,
    ) {
        let c2 = c1 + extra;
        let n1 = regularity_norm(&v, 1.0, r, c1).unwrap();
        let n2 = regularity_norm(&v, 1.0, r, c2).unwrap();
        prop_assert!(n1 <= n2 * (1.0 + 1e-10) + 1e-12, "‖V‖_r decreased with cutoff: {n1} > {n2}");
        let ns = regularity_norm(&v.scaled(alpha), 1.0, r, c2).unwrap();
        prop_assert!((ns - alpha.abs() * n2).abs() <= 1e-10 * (1.0 + n2));
    }

    /// The assembled effective interaction is Hermitian (and so is
    /// `H_σ(λ)`), with the assembly asymmetry inside the 1e−12 tripwire;
    /// for `V = 0` it vanishes identically.
    #[test]
    fn effective_interaction_is_hermitian(
        v in arb_real_potential(4, 0.5),
        m in 1u32..=3,
        extra in 0u32..=8,
        k in 0u32..=4,
        frac in 0.0f64..0.8,
    ) {
        let p = Problem::new(v, 1.0, CutoffConvention::StrictlyBelow).unwrap();
        let params = FsParams::new(m, m + extra, k, 1.0, 1.0).unwrap();
        let lambda = frac * 0.5 * p.basis(m).unwrap().rho();
        let op = coarse_hamiltonian(&p, &params, lambda).unwrap();
        prop_assert!(op.asymmetry < 1e-12);
        prop_assert!(linalg::hermitian_violation(&op.u_sigma) <= 1e-13);
        prop_assert!(linalg::hermitian_violation(&op.h_sigma()) <= 1e-13);

        let free = Problem::new(FourierPotential::zero(), 1.0, CutoffConvention::StrictlyBelow)
            .unwrap();
        let zero = coarse_hamiltonian(&free, &params, lambda).unwrap();
        prop_assert!(linalg::max_abs_entry(&zero.u_sigma) == 0.0);
    }

    /// The lift acts as the identity on the coarse block: restricting the
    /// lifted vector to `X_M` recovers the coarse vector exactly.
    #[test]
    fn lift_restricts_to_coarse_vector(
        v in arb_real_potential(4, 0.5),
        m in 1u32..=3,
        extra in 0u32..=8,
        k in 0u32..=3,
        frac in 0.0f64..0.8,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
    ) {
        let p = Problem::new(v, 1.0, CutoffConvention::StrictlyBelow).unwrap();
        let params = FsParams::new(m, m + extra, k, 1.0, 1.0).unwrap();
        let coarse = p.basis(m).unwrap();
        let lambda = frac * 0.5 * coarse.rho();
        let phi = DVector::from_fn(coarse.dim(), |i, _| {
            Complex64::new(re + i as f64, im - 0.5 * i as f64)
        });
        let lifted = lift(&p, &params, lambda, &phi).unwrap();
        prop_assert_eq!(&lifted.coarse, &phi);
        let fine_dim = p.basis(params.n).unwrap().dim();
        prop_assert_eq!(lifted.fine.len(), fine_dim);
        prop_assert!((lifted.fine.rows(0, coarse.dim()) - &phi).norm() == 0.0);
    }

    /// The exact Schur complement is non-positive and monotone
    /// non-increasing in λ below the complement spectrum.
    #[test]
    fn schur_complement_nonpositive_and_monotone(
        v in arb_real_potential(3, 0.5),
        m in 1u32..=3,
        f1 in 0.0f64..0.4,
        f2 in 0.0f64..0.4,
    ) {
        prop_assume!((f1 - f2).abs() > 1e-3);
        let p = Problem::new(v, 1.0, CutoffConvention::StrictlyBelow).unwrap();
        let rho_m = p.basis(m).unwrap().rho();
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let u_lo = schur_exact_interaction(&p, m, 16, lo * rho_m).unwrap();
        let u_hi = schur_exact_interaction(&p, m, 16, hi * rho_m).unwrap();
        let scale = linalg::max_abs_entry(&u_lo).max(linalg::max_abs_entry(&u_hi)).max(1.0);
        for u in [&u_lo, &u_hi] {
            let eigs = linalg::eigvalsh(u).unwrap();
            prop_assert!(*eigs.last().unwrap() <= 1e-12 * scale, "U(λ) not ⪯ 0");
        }
        let diff = &u_lo - &u_hi;
        let eigs = linalg::eigvalsh(&diff).unwrap();
        prop_assert!(eigs[0] >= -1e-12 * scale, "λ ↦ U(λ) not monotone: min eig {:.3e}", eigs[0]);
    }

    /// The dense Hermitian eigensolver satisfies its residual and
    /// orthonormality contract and returns ascending eigenvalues.
    #[test]
    fn eigendecomposition_contract(a in arb_hermitian(2..=12, 3.0)) {
        let dec = hermitian_eig(&a).unwrap();
        let scale = dec.eigenvalues.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
        prop_assert!(dec.max_residual(&a) <= 1e-10 * scale);
        prop_assert!(dec.orthonormality_defect() <= 1e-12);
        prop_assert!(dec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    /// Fixed-point solves are self-consistent: the iterate count matches
    /// the trace, the final increment is below tolerance, the converged λ
    /// is the selected eigenvalue of `H_σ(λ)`, and a by-target solve
    /// seeded at the answer reproduces it.
    #[test]
    fn fixed_point_self_consistency(
        v in arb_real_potential(3, 0.4),
        m in 1u32..=2,
        extra in 2u32..=8,
        k in 0u32..=3,
        i in 1usize..=3,
    ) {
        let p = Problem::new(v, 1.0, CutoffConvention::StrictlyBelow).unwrap();
        let params = FsParams::new(m, m + extra, k, 1.0, 1.0).unwrap();
        let dim_m = p.basis(m).unwrap().dim();
        prop_assume!(i <= dim_m);

        let fp = fixed_point_by_index(&p, &params, i, None, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(fp.converged);
        prop_assert_eq!(fp.scf_count, fp.iterates.len() - 1);
        if fp.iterates.len() >= 2 {
            let last = fp.iterates[fp.iterates.len() - 1];
            let prev = fp.iterates[fp.iterates.len() - 2];
            prop_assert!((last - prev).abs() < 10.0 * DEFAULT_TOL);
        }

        let op = coarse_hamiltonian(&p, &params, fp.lambda_sigma).unwrap();
        let eigs = linalg::eigvalsh(&op.h_sigma()).unwrap();
        let scale = fp.lambda_sigma.abs().max(1.0);
        prop_assert!((eigs[i - 1] - fp.lambda_sigma).abs() <= 1e-9 * scale);

        let tgt = fixed_point_by_target(
            &p, &params, fp.lambda_sigma, Some(fp.lambda_sigma), DEFAULT_TOL, DEFAULT_MAX_ITER,
        ).unwrap();
        prop_assert!(tgt.converged);
        prop_assert!((tgt.lambda_sigma - fp.lambda_sigma).abs() <= 1e-11 * scale);
    }

    /// Every coarse-visible eigenpair of a random Hermitian matrix is
    /// reproduced by the reduction; none may fail (invisible pairs are
    /// skipped, not failed).
    #[test]
    fn reduction_isospectral_on_random_matrices(
        a in arb_hermitian(3..=9, 2.0),
        p_frac in 0.1f64..0.9,
    ) {
        let n = a.nrows();
        let p = ((n as f64 * p_frac) as usize).clamp(1, n - 1);
        let check = check_matrix(&a, p).unwrap();
        prop_assert_eq!(check.failed, 0);
        prop_assert_eq!(check.checked + check.skipped,
            check.eigenvalues.iter().map(|e| e.multiplicity).sum::<usize>());
    }

    /// No perturbation inequality is violated on random Hermitian pairs
    /// with a positive-definite shift.
    #[test]
    fn perturbation_bounds_hold(
        (h0, w) in (3usize..=8).prop_flat_map(|n| (arb_hermitian_fixed(n, 2.0), arb_hermitian_fixed(n, 2.0))),
        shift in 0.1f64..2.0,
    ) {
        let eigs = linalg::eigvalsh(&h0).unwrap();
        let alpha = shift - eigs[0];
        let records = perturbation_audit(&h0, &w, alpha).unwrap();
        for rec in &records {
            prop_assert!(!rec.is_violation(), "violated: {}", rec.name());
        }
    }

    /// The a-priori truncation factor follows its closed form
    /// `ρ_N^{−r} + ρ_M^{−r} (4ρ_M^{−r}‖V‖_r)^{K+1}` exactly.
    #[test]
    fn epsilon_bound_closed_form(
        m in 1u32..=6,
        extra in 0u32..=10,
        k in 0u32..=6,
        r in 0.3f64..1.5,
        l in 0.5f64..2.0,
        norm in 0.0f64..50.0,
    ) {
        let params = FsParams::new(m, m + extra, k, r, 1.0).unwrap();
        let rho_m = (TAU * m as f64 / l).powi(2);
        let rho_n = (TAU * (m + extra) as f64 / l).powi(2);
        let q = 4.0 * rho_m.powf(-r) * norm;
        let expect = rho_n.powf(-r) + rho_m.powf(-r) * q.powi(k as i32 + 1);
        let got = epsilon_bound(&params, l, norm);
        prop_assert!((got - expect).abs() <= 1e-14 * expect.abs().max(f64::MIN_POSITIVE));
    }
}

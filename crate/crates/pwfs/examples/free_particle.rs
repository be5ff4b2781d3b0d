//! Free particle sanity check: with `V = 0` the Feshbach–Schur machinery
//! collapses to the exact answer at every level.
//!
//! The effective interaction `U_σ(λ)` is identically zero, the coarse
//! eigenvalues are the Laplacian symbols `(2πk/L)²`, the lift is the plain
//! zero-padded embedding `X_M → X_N`, and one SCF sweep per index returns
//! the exact eigenvalue.
//!
//! Run with `cargo run --example free_particle`.

use pwfs::eigensolver::{fixed_point_by_index, hermitian_eig, DEFAULT_MAX_ITER, DEFAULT_TOL};
use pwfs::fs::{coarse_hamiltonian, FsParams};
use pwfs::planewave::{laplacian_diagonal, CutoffConvention, FourierPotential, ModeSet, Problem};

fn main() -> pwfs::Result<()> {
    let problem = Problem::new(FourierPotential::zero(), 1.0, CutoffConvention::StrictlyBelow)?;
    let params = FsParams::new(4, 8, 3, 1.0, 1.0)?;

    // U_σ(λ) vanishes without a potential, at any λ in the admissible range.
    let op = coarse_hamiltonian(&problem, &params, 11.0)?;
    let u_max = op.u_sigma.iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("max |U_σ(11)| entry = {u_max:.3e} (expect exactly 0)");

    // The coarse eigenvalues are the sorted Laplacian symbols.
    let basis = problem.basis(params.m)?;
    let mut symbols = laplacian_diagonal(&basis);
    symbols.sort_by(f64::total_cmp);
    let eig = hermitian_eig(&op.h_sigma())?;
    println!("\n  k-symbol        eigenvalue      |diff|");
    for (s, e) in symbols.iter().zip(&eig.eigenvalues) {
        println!("  {s:<15.8} {e:<15.8} {:.2e}", (s - e).abs());
    }

    // Each SCF solve lands on the exact eigenvalue and the lift of the
    // coarse eigenvector is its embedding: coarse coefficients followed by
    // zeros on the window X_N ⊖ X_M.
    println!("\n  i   λ_σ             sweeps  window tail");
    for i in 1..=basis.dim() {
        let fp = fixed_point_by_index(&problem, &params, i, None, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        let tail = fp.lifted.fine.rows(basis.dim(), fp.lifted.fine.len() - basis.dim()).norm();
        println!("  {i:<3} {:<15.8} {:<7} {tail:.2e}", fp.lambda_sigma, fp.scf_count);
    }
    Ok(())
}

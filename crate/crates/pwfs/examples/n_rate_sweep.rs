//! Convergence in the fine cutoff `N`: algebraic decay whose rate tracks
//! the potential's Fourier decay, and the two-regime shape that appears
//! when the Neumann order `K` is too small to keep up.
//!
//! Sweeping `N` at a low order (`K = 2`) shows the error falling and then
//! stagnating on the Neumann-truncation floor; raising `K` pushes the
//! floor away and exposes the algebraic rate, which `pre_knee` + `fit_rate`
//! estimate from the pre-stagnation points. The rougher family member
//! (`t = 0`, fitted with `r = 0.45`) converges slower than `t = 1` (`r = 1`).
//!
//! Run with `cargo run --example n_rate_sweep` (takes ~a minute: each grid
//! point solves a dense reference problem).

use pwfs::analysis::{fit_rate, pre_knee, sweep, SweepAxis, SweepSpec};
use pwfs::eigensolver::Strategy;
use pwfs::fs::FsParams;
use pwfs::planewave::{regularity_norm, CutoffConvention, FourierPotential, Problem};

fn run_case(t: f64, r: f64, k: u32) -> pwfs::Result<()> {
    let problem = Problem::new(FourierPotential::vt(t, 4000), 1.0, CutoffConvention::StrictlyBelow)?;
    let n_e = 800;
    let norm_v_r = regularity_norm(problem.potential(), problem.period(), r, 2 * n_e)?;

    let base = FsParams::new(2, 25, k, r, 1.0)?;
    let grid = vec![25u32, 50, 100, 200, 400];
    let mut spec = SweepSpec::new(base, SweepAxis::N, grid, Strategy::ByIndex(1), n_e);
    spec.t_label = t;
    spec.norm_v_r = Some(norm_v_r);
    spec.jobs = std::thread::available_parallelism().map_or(1, |p| p.get());
    let records = sweep(&problem, &spec)?;

    println!("t = {t}, r = {r}, K = {k}:");
    println!("  N     err_val        err_vec");
    for rec in &records {
        println!("  {:<5} {:<14.4e} {:<14.4e}", rec.params.n, rec.err_val, rec.err_vec);
    }

    let xs: Vec<f64> = records.iter().map(|r| f64::from(r.params.n)).collect();
    for (label, errs) in [
        ("value", records.iter().map(|r| r.err_val).collect::<Vec<_>>()),
        ("vector", records.iter().map(|r| r.err_vec).collect::<Vec<_>>()),
    ] {
        let (px, pe) = pre_knee(&xs, &errs);
        match fit_rate(&px, &pe) {
            Ok(fit) => println!(
                "  {label} rate ≈ N^−{:.2} ({} pre-knee points)",
                fit.rate, fit.points_used
            ),
            Err(_) => println!("  {label} rate: stagnant — too few pre-knee points to fit"),
        }
    }
    println!();
    Ok(())
}

fn main() -> pwfs::Result<()> {
    // Low order: decay, then a floor once Neumann truncation dominates.
    run_case(1.0, 1.0, 2)?;
    // Enough Neumann terms: the algebraic N-rate is visible.
    run_case(1.0, 1.0, 8)?;
    run_case(0.0, 0.45, 8)?;
    Ok(())
}

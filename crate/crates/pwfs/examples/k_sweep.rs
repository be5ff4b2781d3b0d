//! Convergence in the Neumann order `K` at fixed cutoffs: the eigenvalue
//! error decays geometrically until it hits the floor set by the fine
//! cutoff `N`, and the per-step ratio shrinks as the coarse cutoff `M`
//! grows (each extra term buys a factor like `ρ_M^{−r}·‖V‖_r`).
//!
//! Run with `cargo run --example k_sweep`.

use pwfs::analysis::{sweep, SweepAxis, SweepSpec};
use pwfs::eigensolver::Strategy;
use pwfs::fs::FsParams;
use pwfs::planewave::{regularity_norm, CutoffConvention, FourierPotential, Problem};

fn main() -> pwfs::Result<()> {
    let potential = FourierPotential::vt(1.0, 4000);
    let problem = Problem::new(potential, 1.0, CutoffConvention::StrictlyBelow)?;
    let (n, n_e) = (300u32, 600u32);
    let norm_v_r = regularity_norm(problem.potential(), problem.period(), 1.0, 2 * n_e)?;

    for m in [1u32, 2, 4] {
        let base = FsParams::new(m, n, 0, 1.0, 1.0)?;
        let mut spec =
            SweepSpec::new(base, SweepAxis::K, (0..=8).collect(), Strategy::ByIndex(1), n_e);
        spec.t_label = 1.0;
        spec.norm_v_r = Some(norm_v_r);
        let records = sweep(&problem, &spec)?;

        println!("M = {m}, N = {n}, tracking the ground state:");
        println!("  K   err_val        ratio      err_vec        sweeps");
        let mut prev: Option<f64> = None;
        for rec in &records {
            let ratio = prev.map_or(String::from("—"), |p| format!("{:.4}", rec.err_val / p));
            println!(
                "  {:<3} {:<14.4e} {ratio:<10} {:<14.4e} {}",
                rec.params.k, rec.err_val, rec.err_vec, rec.scf_count
            );
            prev = Some(rec.err_val);
        }
        println!();
    }
    println!("(the late-K plateau is the N-truncation floor, not a solver limit)");
    Ok(())
}

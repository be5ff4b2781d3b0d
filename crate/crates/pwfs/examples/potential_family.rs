//! The `V_t` potential family and the weighted regularity norm that drives
//! every error bound in the crate.
//!
//! `V_t` has Fourier coefficients `V̂_0 = −10` and `V̂_n = −5/|n|^t`, so `t`
//! tunes the decay: `t = 1` is the smoother member, `t = 0` the rough one.
//! The norm `‖V‖_r = ‖(−Δ+1)^{(r−1)/2} V (−Δ+1)^{(r−1)/2}‖₂` measures the
//! potential between weighted Sobolev spaces (truncated at an audit
//! cutoff, monotonically from below); `r` must be small enough for the
//! member's decay or the truncations diverge. From it,
//! `κ_M = ρ_M − (ρ_M + 1)·ρ_M^{−r}·‖V‖_r` is the certified coercivity
//! margin of the complement block, i.e. how far λ may roam below `ρ_M`
//! with the reduction still well-posed.
//!
//! Run with `cargo run --example potential_family`.

use pwfs::planewave::{kappa, regularity_norm, CutoffConvention, FourierPotential, PlanewaveBasis};

fn main() -> pwfs::Result<()> {
    for t in [1.0, 0.0] {
        let v = FourierPotential::vt(t, 4000);
        println!("V_{t}: V̂_0 = {}, V̂_±1 = {}, V̂_±8 = {}", v.coeff(0), v.coeff(1), v.coeff(8));
        println!("  is_real = {}, stored |n| ≤ {}", v.is_real(), v.max_stored_freq());
        for r in [0.0, 0.45, 1.0] {
            let cut = |c: u32| regularity_norm(&v, 1.0, r, c);
            println!(
                "  ‖V‖_{r}: cutoff 500 → {:.4}, 1000 → {:.4}, 2000 → {:.4}",
                cut(500)?,
                cut(1000)?,
                cut(2000)?
            );
        }
        println!();
    }

    // The admissible spectral window grows quadratically with M once the
    // potential term is beaten; for the rough member with small r it takes
    // a larger M before κ_M turns positive at all.
    let v1 = FourierPotential::vt(1.0, 4000);
    let v0 = FourierPotential::vt(0.0, 4000);
    let n1 = regularity_norm(&v1, 1.0, 1.0, 2000)?;
    let n0 = regularity_norm(&v0, 1.0, 0.45, 2000)?;
    println!("  M     ρ_M          κ_M (t=1, r=1)   κ_M (t=0, r=0.45)");
    for m in [1u32, 2, 4, 8, 16, 32] {
        let basis = PlanewaveBasis::new(1.0, m, CutoffConvention::StrictlyBelow)?;
        println!(
            "  {m:<5} {:<12.2} {:<16.2} {:.2}",
            basis.rho(),
            kappa(&basis, 1.0, n1),
            kappa(&basis, 0.45, n0)
        );
    }
    Ok(())
}

//! Lower bounds assembled cell by cell from a Neumann-box GP solution.
//!
//! In a homogeneous box one cell carries the whole gas, so the assembled
//! bound can be compared to the homogeneous one directly. In the trap the
//! cellwise bound is only useful once `C Y^γ` is well below one, which at
//! `C = 8.9` needs a far more dilute gas than a desktop grid resolves.

use bosegp::bounds::{assemble_box_lower_bound, homogeneous_lower_bound, DEFAULT_C};
use bosegp::gp::{self, SolverOptions};
use bosegp::potentials::TrapPotential;

fn main() -> bosegp::Result<()> {
    let opts = SolverOptions::default();

    let (n, l, a) = (1e6, 2.0, 1e-9);
    let flat = gp::solve_box(&TrapPotential::zero_in_box(), a, n, 1.0, 0.0625, &opts)?;
    let cell = assemble_box_lower_bound(&flat, l, a, DEFAULT_C)?;
    let hom = homogeneous_lower_bound(n, l, a, DEFAULT_C);
    println!(
        "flat box: E_R = {:.6}  assembled = {:?}  homogeneous = {:.6} (valid {})",
        cell.e_box, cell.value, hom.value, hom.valid
    );

    let trap = TrapPotential::harmonic();
    for c in [DEFAULT_C, 1.0, 0.1] {
        let sol = gp::solve_box(&trap, 1e-3, 1e3, 4.0, 0.25, &opts)?;
        let lb = assemble_box_lower_bound(&sol, 0.5, 1e-3, c)?;
        println!(
            "trap, C = {c}: E_R = {:.6}  lower = {}  worst rho ratio {:.3}",
            lb.e_box,
            lb.value.map_or("vacuous".into(), |x| format!("{x:.6}")),
            lb.worst_ratio
        );
    }
    Ok(())
}

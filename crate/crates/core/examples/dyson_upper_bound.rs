//! Many-body upper bound from a GP minimiser and the Dyson correlation
//! factor, for hard spheres of diameter `a = 1/N` in a harmonic trap.

use bosegp::bounds::dyson_upper_bound;
use bosegp::gp::{self, SolverOptions};
use bosegp::potentials::{InteractionPotential, TrapPotential};

fn main() -> bosegp::Result<()> {
    let trap = TrapPotential::harmonic();
    let grid = bosegp::tf::grid_for(&trap, 1.0, 0.02)?;
    for n in [1e3, 1e4, 1e5] {
        let a = 1.0 / n;
        let v = InteractionPotential::hard_sphere(a)?;
        let sol = gp::minimize(&trap, a, n, grid, &SolverOptions::default())?;
        let ub = dyson_upper_bound(&sol, &v, a)?;
        println!(
            "N = {n:e}: E_GP = {:.6}  upper = {:.6}  refined = {}  a/b = {:.3e}  excess = {:.3e}",
            sol.energy,
            ub.total,
            ub.refined.map_or("-".into(), |x| format!("{x:.6}")),
            ub.a_over_b,
            ub.relative_excess
        );
    }
    Ok(())
}

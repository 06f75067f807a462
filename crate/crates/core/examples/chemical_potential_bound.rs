//! Minimising the sup-norm functional `E*` and bounding the energy of one
//! extra particle with it.

use bosegp::bounds::{chemical_potential_bound, estar_minimize};
use bosegp::gp::SolverOptions;
use bosegp::potentials::{InteractionPotential, TrapPotential};
use bosegp::scattering::{compute_scattering, ScatteringOptions};

fn main() -> bosegp::Result<()> {
    let trap = TrapPotential::harmonic();
    let v = InteractionPotential::square_barrier(2.0, 0.01)?;
    let a = compute_scattering(&v, &ScatteringOptions::default())?.a;
    let n = 1.0 / a;
    let grid = bosegp::tf::grid_for(&trap, n * a, 0.02)?;

    let e = estar_minimize(&trap, a, n, grid, &SolverOptions::default())?;
    for l in &e.levels {
        println!(
            "p = {:>6}: smoothed {:.8}  true {:.8}",
            l.p,
            l.smoothed / n,
            l.value / n
        );
    }
    let inc = chemical_potential_bound(&e, &v, a)?;
    println!(
        "E*(1, Na) = {:.8}  E(N+1) - E(N) <= {:.8}  factor {:.6}  refined {}",
        e.per_particle,
        inc.value,
        inc.factor,
        inc.refined.map_or("-".into(), |x| format!("{x:.8}"))
    );
    Ok(())
}

//! Ground states of the harmonic trap on a radial grid, from the free
//! oscillator up to moderately strong coupling.

use bosegp::gp::{self, Grid, SolverOptions};
use bosegp::potentials::TrapPotential;

fn main() -> bosegp::Result<()> {
    let trap = TrapPotential::harmonic();
    let grid = Grid::radial(0.02, 8.0)?;
    let opts = SolverOptions::default();

    // a = 0 is the oscillator ground state, E = 3 per particle
    let free = gp::minimize(&trap, 0.0, 1.0, grid, &opts)?;
    println!("a = 0: E = {:.8} (exact 3)", free.energy);

    for a in [0.1, 1.0, 10.0] {
        let sol = gp::minimize(&trap, a, 1.0, grid, &opts)?;
        let h2 = sol.richardson.map_or(f64::NAN, |r| r.error_estimate);
        let checks = gp::structural_assertions(&sol);
        println!(
            "Na = {a:>4}: E = {:.8}  mu = {:.8}  rho_bar = {:.6}  h^2 error ~ {h2:.1e}  structure ok = {}",
            sol.energy,
            sol.mu,
            sol.rho_bar,
            checks.all_ok()
        );
    }

    // A cubic grid and a Neumann box: V = 0 gives the constant density N/|Λ|
    let box_sol = gp::solve_box(&TrapPotential::zero_in_box(), 0.01, 8.0, 1.0, 0.0625, &opts)?;
    let exact = 4.0 * std::f64::consts::PI * 0.01 * 64.0 / 8.0;
    println!(
        "homogeneous box: E = {:.12} (exact {exact:.12})",
        box_sol.energy
    );
    Ok(())
}

//! Identities every minimiser must satisfy: the virial relation, the
//! `E(N, a) = N E(1, Na)` scaling, and `μ = E/N + 4πaρ̄` against a
//! finite difference in `N`.

use bosegp::gp::{self, Grid, SolverOptions};
use bosegp::potentials::TrapPotential;

fn main() -> bosegp::Result<()> {
    let trap = TrapPotential::harmonic();
    let opts = SolverOptions::default();

    for na in [0.1, 1.0, 10.0] {
        let grid = bosegp::tf::grid_for(&trap, na, 0.02)?;
        let sol = gp::minimize(&trap, na, 1.0, grid, &opts)?;
        let virial = gp::virial_residual(&sol)?;
        println!(
            "Na = {na:>4}: virial residual / E = {:.2e}",
            virial / sol.energy
        );
    }

    let grid = Grid::radial(0.02, 8.0)?;
    for (n, a) in [(1e2, 1e-2), (1e4, 1e-4)] {
        let s = gp::check_scaling(&trap, a, n, grid, &opts)?;
        println!(
            "N = {n:e}: |E(N,a) - N E(1,Na)|/E = {:.2e}, max |rho - N rho_1| / max rho = {:.2e}",
            s.relative_energy_gap, s.relative_density_gap
        );
    }

    let sol = gp::minimize(&trap, 0.01, 100.0, grid, &opts)?;
    let mu = gp::chemical_potential(&sol, 0.5, &opts)?;
    println!(
        "mu: formula {:.8}, finite difference {:.8}, relative gap {:.1e}",
        mu.formula,
        mu.finite_diff,
        mu.relative_gap()
    );
    Ok(())
}

//! The Thomas-Fermi limit of the harmonic trap and the approach of the
//! rescaled GP energy to it as `Na` grows.

use bosegp::gp::SolverOptions;
use bosegp::potentials::TrapPotential;
use bosegp::tf;

fn main() -> bosegp::Result<()> {
    let trap = TrapPotential::harmonic();
    let sol = tf::tf_minimize(&trap, 1.0, 1.0)?;
    println!(
        "mu~ = {:.12} (15^(2/5) = {:.12}), F(1,1) = {:.12}, support radius {:.6}",
        sol.mu_tilde,
        15f64.powf(0.4),
        sol.f_value,
        sol.support_radius
    );

    let conv = tf::gp_tf_convergence(
        &trap,
        &[1.0, 10.0, 100.0, 1000.0],
        0.02,
        &SolverOptions::default(),
    )?;
    println!(
        "{:>8} {:>14} {:>14} {:>14}",
        "Na", "E/(Na)^(2/5)", "L2 distance", "gradient bound"
    );
    for r in &conv.rows {
        println!(
            "{:>8} {:>14.8} {:>14.3e} {:>14.6}",
            r.na, r.energy_ratio, r.l2_distance, r.gradient_upper
        );
    }
    println!("limit {:.8}", conv.limit_ratio);
    Ok(())
}

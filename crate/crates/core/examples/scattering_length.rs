//! Zero-energy scattering lengths for a few interactions, with their
//! certified brackets and the second-moment upper bound where it applies.

use bosegp::potentials::InteractionPotential;
use bosegp::scattering::{compute_scattering, ScatteringOptions};

fn main() -> bosegp::Result<()> {
    let cases = [
        ("hard sphere d=1", InteractionPotential::hard_sphere(1.0)?),
        (
            "barrier V0=2 R0=1",
            InteractionPotential::square_barrier(2.0, 1.0)?,
        ),
        (
            "hard core + well",
            InteractionPotential::hard_core_well(0.5, 0.5, 1.0)?,
        ),
        (
            "r^-6 beyond r=1",
            InteractionPotential::power_law(1.0, 6.0, 1.0, Some(0.5))?,
        ),
    ];
    let opts = ScatteringOptions::default();
    println!(
        "{:<20} {:>14} {:>26} {:>12}",
        "potential", "a", "bracket", "sr bound"
    );
    for (name, v) in &cases {
        let s = compute_scattering(v, &opts)?;
        let (lo, hi) = s.certified_interval();
        let sr = s.sr_bound.map_or("inf".to_string(), |x| format!("{x:.6}"));
        println!("{name:<20} {:>14.10} [{lo:.10}, {hi:.10}] {sr:>12}", s.a);
    }
    println!(
        "exact barrier value 1 - tanh(1) = {:.10}",
        1.0 - 1f64.tanh()
    );
    Ok(())
}

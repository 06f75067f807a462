//! Lower bound, GP energy and upper bound for the hard-sphere family at
//! `Na = 1`, as `N` grows by decades.

use bosegp::bounds::{gaps_shrinking, sweep, SandwichOptions};
use bosegp::potentials::{InteractionPotential, TrapPotential};

fn main() -> bosegp::Result<()> {
    let trap = TrapPotential::harmonic();
    let v1 = InteractionPotential::hard_sphere(1.0)?;
    let opts = SandwichOptions {
        estar: false,
        ..SandwichOptions::default()
    };
    let reports = sweep(&trap, &v1, 1.0, &[1e3, 1e4, 1e5], &opts)?;

    let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6e}"));
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>12}",
        "N", "lower", "E_GP", "upper", "upper gap"
    );
    for r in &reports {
        let lower = r.lower_assembled.and_then(|b| b.value);
        println!(
            "{:>8} {:>14} {:>14} {:>14} {:>12}",
            r.n,
            show(lower),
            show(r.gp_reference),
            show(r.upper_value),
            show(r.upper_gap)
        );
    }
    let upper: Vec<_> = reports.iter().map(|r| r.upper_gap).collect();
    let lower: Vec<_> = reports.iter().map(|r| r.lower_gap).collect();
    println!("upper gap shrinking: {}", gaps_shrinking(&upper));
    println!("lower gap shrinking: {}", gaps_shrinking(&lower));
    Ok(())
}

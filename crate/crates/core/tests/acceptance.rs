//! One line per acceptance criterion, `PASS` or `FAIL`, at the pinned
//! tolerances. Runs without the libtest harness so the lines always print;
//! the process exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use bosegp::bounds::{sweep, SandwichOptions};
use bosegp::gp::{self, Boundary, Grid, Nonlinearity, SolverOptions, WaveField};
use bosegp::potentials::{InteractionPotential, TrapPotential};
use bosegp::scattering::{compute_scattering, spruch_rosenberg, ScatteringOptions};
use bosegp::tf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = bosegp::Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn quiet() -> SolverOptions {
    SolverOptions {
        richardson: false,
        ..SolverOptions::default()
    }
}

fn linear_limit() -> Outcome {
    let start = Instant::now();
    let sol = gp::minimize(
        &TrapPotential::harmonic(),
        0.0,
        1.0,
        Grid::radial(0.02, 8.0)?,
        &opts(),
    )?;
    let secs = start.elapsed().as_secs_f64();
    let err = (sol.energy - 3.0).abs();
    Ok((
        err <= 1e-3 && secs < 1.0,
        format!(
            "E = {:.8}, |E - 3| = {err:.2e} (tol 1e-3), {secs:.3} s (limit 1 s)",
            sol.energy
        ),
    ))
}

fn homogeneous_exactness() -> Outcome {
    let mut worst_e = 0.0f64;
    let mut worst_phi = 0.0f64;
    for (n, a, r, h) in [
        (8.0, 0.01, 1.0, 0.0625),
        (1e3, 1e-3, 2.0, 0.125),
        (50.0, 0.5, 1.0, 0.03125),
    ] {
        let sol = gp::solve_box(&TrapPotential::zero_in_box(), a, n, r, h, &opts())?;
        let volume = (2.0 * r).powi(3);
        let exact = 4.0 * PI * a * n * n / volume;
        worst_e = worst_e.max((sol.energy - exact).abs() / exact);
        let mean = (n / volume).sqrt();
        worst_phi = worst_phi.max(
            sol.phi
                .values
                .iter()
                .map(|x| (x - mean).abs() / mean)
                .fold(0.0, f64::max),
        );
    }
    Ok((
        worst_e <= 1e-10 && worst_phi <= 1e-10,
        format!("max relative energy error {worst_e:.2e}, max relative deviation of Φ {worst_phi:.2e} (tol 1e-10)"),
    ))
}

fn scattering_golden() -> Outcome {
    let o = ScatteringOptions::default();
    let hs = compute_scattering(&InteractionPotential::hard_sphere(1.0)?, &o)?;
    let hs_err = (hs.a - 1.0).abs();
    let sb = compute_scattering(&InteractionPotential::square_barrier(2.0, 1.0)?, &o)?;
    let sb_err = (sb.a - (1.0 - 1f64.tanh())).abs();

    let corpus = [
        InteractionPotential::square_barrier(2.0, 1.0)?,
        InteractionPotential::square_barrier(0.1, 3.0)?,
        InteractionPotential::square_barrier(50.0, 0.5)?,
        InteractionPotential::square_barrier(1e-4, 1.0)?,
        InteractionPotential::power_law(1.0, 6.0, 1.0, None)?,
        InteractionPotential::power_law(0.3, 4.0, 0.5, None)?,
        InteractionPotential::hard_sphere(0.7)?,
        InteractionPotential::power_law(1.0, 6.0, 1.0, Some(0.5))?,
    ];
    let loose = ScatteringOptions {
        tolerance: 1e-4,
        ..o
    };
    let mut sr_ok = true;
    for v in &corpus {
        let s = compute_scattering(v, &loose)?;
        let sr = spruch_rosenberg(v)?;
        sr_ok &= s.certified_interval().0 <= sr;
    }

    let tails = [
        InteractionPotential::power_law(1.0, 4.0, 1.0, None)?,
        InteractionPotential::power_law(2.0, 5.0, 0.5, None)?,
        InteractionPotential::power_law(1.0, 6.0, 1.0, Some(0.5))?,
    ];
    let mut bracket_ok = true;
    let mut widest = 0.0f64;
    for v in &tails {
        let coarse = compute_scattering(
            v,
            &ScatteringOptions {
                r_max: Some(200.0),
                tolerance: 1e-2,
                ..o
            },
        )?;
        let refined = compute_scattering(
            v,
            &ScatteringOptions {
                r_max: Some(2e4),
                tolerance: 1e-2,
                ..o
            },
        )?;
        let (lo, hi) = coarse.certified_interval();
        bracket_ok &= lo <= refined.a && refined.a <= hi;
        widest = widest.max(hi - lo);
    }
    Ok((
        hs_err <= 1e-10 && sb_err <= 1e-8 && sr_ok && bracket_ok,
        format!(
            "hard sphere |a - d| = {hs_err:.1e} (tol 1e-10), barrier |a - (1 - tanh 1)| = {sb_err:.1e} (tol 1e-8), \
             second-moment bound on {} potentials: {sr_ok}, truncation brackets (widest {widest:.1e}) hold the refined a: {bracket_ok}",
            corpus.len()
        ),
    ))
}

fn scaling_laws() -> Outcome {
    let tol = opts().tolerance;
    let grid = Grid::radial(0.02, 8.0)?;
    let mut worst_e = 0.0f64;
    let mut worst_rho = 0.0f64;
    for (n, a) in [(1e2, 1e-2), (1e4, 1e-4)] {
        let s = gp::check_scaling(&TrapPotential::harmonic(), a, n, grid, &opts())?;
        worst_e = worst_e.max(s.relative_energy_gap);
        worst_rho = worst_rho.max(s.relative_density_gap);
    }
    Ok((
        worst_e <= 2.0 * tol && worst_rho <= 2.0 * tol,
        format!("|E(N,a) - N E(1,Na)|/E ≤ {worst_e:.1e}, max-norm density gap / max ρ ≤ {worst_rho:.1e} (tol {:.0e})", 2.0 * tol),
    ))
}

fn virial() -> Outcome {
    let trap = TrapPotential::harmonic();
    let mut worst = 0.0f64;
    for na in [0.1, 1.0, 10.0] {
        let sol = gp::minimize(&trap, na, 1.0, tf::grid_for(&trap, na, 0.02)?, &opts())?;
        worst = worst.max(gp::virial_residual(&sol)?.abs() / sol.energy);
    }
    Ok((
        worst <= 1e-3,
        format!("max |(2/3)T - (2/3)P + U| / E = {worst:.2e} (tol 1e-3)"),
    ))
}

fn mu_identity() -> Outcome {
    let trap = TrapPotential::harmonic();
    let mut worst = 0.0f64;
    for (n, a) in [(100.0, 0.01), (100.0, 0.1), (1000.0, 0.1)] {
        let sol = gp::minimize(&trap, a, n, tf::grid_for(&trap, n * a, 0.02)?, &quiet())?;
        worst = worst.max(gp::chemical_potential(&sol, 0.005 * n, &quiet())?.relative_gap());
    }
    Ok((
        worst <= 1e-3,
        format!("max |μ_formula - dE/dN| / μ = {worst:.2e} (tol 1e-3)"),
    ))
}

fn tf_limit() -> Outcome {
    let trap = TrapPotential::harmonic();
    let mu_exact = 15f64.powf(0.4);
    let f_exact = mu_exact - 2.0 * 15f64.powf(1.4) / 105.0;
    let sol = tf::tf_minimize(&trap, 1.0, 1.0)?;
    let mu_err = (sol.mu_tilde - mu_exact).abs();
    let f_err = (sol.f_value - f_exact).abs();
    let conv = tf::gp_tf_convergence(&trap, &[1.0, 10.0, 100.0, 1000.0], 0.02, &opts())?;
    let decreasing = conv
        .rows
        .windows(2)
        .all(|w| w[1].energy_ratio < w[0].energy_ratio)
        && conv.rows.iter().all(|r| r.energy_ratio >= f_exact);
    let last = conv.rows.last().expect("four rows");
    let within = last.energy_ratio / f_exact - 1.0;
    let below = conv.rows.iter().all(|r| r.tf_below_gp);
    Ok((
        mu_err <= 1e-6 && f_err <= 1e-6 && decreasing && within <= 0.05 && below,
        format!(
            "μ~ error {mu_err:.1e}, F(1,1) = {:.8} error {f_err:.1e} (tol 1e-6), ratio decreasing to F: {decreasing}, \
             excess at Na = 1e3 {:.2}% (limit 5%), F ≤ E^GP everywhere: {below}",
            sol.f_value,
            100.0 * within
        ),
    ))
}

fn box_convergence() -> Outcome {
    let trap = TrapPotential::harmonic();
    let h = 0.25;
    let reference = gp::minimize(
        &trap,
        1.0,
        1.0,
        Grid::cartesian(h, 8.0, Boundary::Decay)?,
        &quiet(),
    )?
    .energy;
    let boxes = gp::solve_neumann_box(&trap, 1.0, 1.0, &[4.0, 6.0, 8.0], h, &opts())?;
    let increasing = boxes.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);
    let e8 = boxes.last().expect("three boxes").1;
    let gap = (e8 - reference).abs();
    let seq: Vec<String> = boxes
        .iter()
        .map(|(r, e)| format!("E_{r} = {e:.10}"))
        .collect();
    Ok((
        gap <= 1e-5 && increasing,
        format!(
            "{}, E^GP = {reference:.10} (same h = {h}), |E_8 - E^GP| = {gap:.1e} (tol 1e-5)",
            seq.join(", ")
        ),
    ))
}

fn sandwich_ordering() -> Outcome {
    let start = Instant::now();
    let ns = [1e3, 1e4, 1e5];
    let opts = SandwichOptions {
        estar: false,
        ..SandwichOptions::default()
    };
    let reports = sweep(
        &TrapPotential::harmonic(),
        &InteractionPotential::hard_sphere(1.0)?,
        1.0,
        &ns,
        &opts,
    )?;
    let secs = start.elapsed().as_secs_f64();

    let lower_certified = reports
        .iter()
        .all(|r| matches!((r.lower_assembled.and_then(|b| b.value), r.gp_reference), (Some(l), Some(e)) if l <= e));
    let upper_ok = reports
        .iter()
        .all(|r| matches!((r.gp_reference, r.upper_value), (Some(e), Some(u)) if e <= u));
    let ratios: Vec<f64> = reports
        .windows(2)
        .map(|w| match (w[0].upper_gap, w[1].upper_gap) {
            (Some(a), Some(b)) => a / b,
            _ => 0.0,
        })
        .collect();
    let shrink_ok = ratios.iter().all(|r| *r >= 5.0);
    let lower_gaps: Vec<Option<f64>> = reports.iter().map(|r| r.lower_gap).collect();
    let lower_shrinks =
        lower_gaps.iter().all(Option::is_some) && bosegp::bounds::gaps_shrinking(&lower_gaps);
    let lower_desc: Vec<String> = lower_gaps
        .iter()
        .map(|g| g.map_or("vacuous".into(), |g| format!("{g:.2e}")))
        .collect();
    Ok((
        lower_certified && upper_ok && shrink_ok && lower_shrinks && secs < 300.0,
        format!(
            "lower ≤ E^GP: {lower_certified}, E^GP ≤ upper: {upper_ok}, upper gap ratio per decade {} (need ≥ 5), \
             lower gaps [{}] shrinking: {lower_shrinks}, {secs:.1} s (limit 300 s)",
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", "),
            lower_desc.join(", ")
        ),
    ))
}

fn structural() -> Outcome {
    let mut cases = Vec::new();
    for na in [0.0, 0.1, 1.0, 10.0, 100.0] {
        let trap = TrapPotential::harmonic();
        cases.push((
            format!("r² Na={na}"),
            trap.clone(),
            tf::grid_for(&trap, na, 0.02)?,
            na,
        ));
    }
    for s in [1.0, 4.0] {
        let trap = TrapPotential::power(s)?;
        cases.push((
            format!("r^{s} Na=1"),
            trap.clone(),
            tf::grid_for(&trap, 1.0, 0.02)?,
            1.0,
        ));
    }
    cases.push((
        "r² cubic Na=1".into(),
        TrapPotential::harmonic(),
        Grid::cartesian(0.25, 5.0, Boundary::Decay)?,
        1.0,
    ));
    let mut failed = Vec::new();
    for (name, trap, grid, na) in &cases {
        let sol = gp::minimize(trap, *na, 1.0, *grid, &quiet())?;
        if !gp::structural_assertions(&sol).all_ok() {
            failed.push(name.clone());
        }
    }
    Ok((
        failed.is_empty(),
        format!("{} cases, failing: [{}]", cases.len(), failed.join(", ")),
    ))
}

fn gaussian(grid: Grid, sigma: f64) -> bosegp::Result<WaveField> {
    WaveField::from_fn(grid, 1.0, |x| {
        (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * sigma * sigma)).exp()
    })
}

fn gradient_check() -> Outcome {
    let cases = [
        (
            Grid::radial(0.1, 6.0)?,
            TrapPotential::harmonic(),
            Nonlinearity::Contact { a: 1.0 },
        ),
        (
            Grid::radial(0.05, 4.0)?,
            TrapPotential::power(3.0)?,
            Nonlinearity::Contact { a: 10.0 },
        ),
        (
            Grid::radial(0.1, 6.0)?,
            TrapPotential::harmonic(),
            Nonlinearity::SupNorm { a: 1.0, p: 64.0 },
        ),
        (
            Grid::cartesian(0.25, 4.0, Boundary::Decay)?,
            TrapPotential::harmonic(),
            Nonlinearity::Contact { a: 0.5 },
        ),
        (
            Grid::cartesian(0.25, 4.0, Boundary::Neumann)?,
            TrapPotential::power(4.0)?,
            Nonlinearity::Contact { a: 0.5 },
        ),
        (
            Grid::cartesian(0.125, 2.0, Boundary::Neumann)?,
            TrapPotential::zero_in_box(),
            Nonlinearity::Contact { a: 0.1 },
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6164);
    let mut worst = 0.0f64;
    for (grid, trap, nl) in &cases {
        let field = gaussian(*grid, 1.0)?;
        let g = gp::functional_gradient(&field, trap, *nl);
        for _ in 0..20 {
            // pinned nodes are zero in the field and stay fixed
            let d: Vec<f64> = field
                .values
                .iter()
                .map(|x| {
                    if *x != 0.0 {
                        rng.random_range(-1.0..1.0) * x.abs().max(1e-3)
                    } else {
                        0.0
                    }
                })
                .collect();
            let analytic: f64 = g.iter().zip(&d).map(|(g, d)| g * d).sum();
            let energy = |s: f64| {
                let mut f = field.clone();
                f.values.iter_mut().zip(&d).for_each(|(x, d)| *x += s * d);
                gp::evaluate_functional(&f, trap, *nl).map(|p| p.total())
            };
            let eps = 1e-5;
            let numeric = (energy(eps)? - energy(-eps)?) / (2.0 * eps);
            worst = worst.max((analytic - numeric).abs() / analytic.abs());
        }
    }
    Ok((
        worst <= 1e-6,
        format!(
            "{} cases × 20 directions, max relative deviation {worst:.1e} (tol 1e-6)",
            cases.len()
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("linear limit", linear_limit),
        ("homogeneous exactness", homogeneous_exactness),
        ("scattering golden values", scattering_golden),
        ("scaling laws", scaling_laws),
        ("virial", virial),
        ("μ identity", mu_identity),
        ("TF limit", tf_limit),
        ("box convergence", box_convergence),
        ("sandwich ordering", sandwich_ordering),
        ("structural assertions", structural),
        ("gradient check", gradient_check),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let status = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {name}: {detail} [{:.1} s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!ok);
    }
    println!("acceptance: {failures} failing");
    if failures > 0 {
        std::process::exit(1);
    }
}

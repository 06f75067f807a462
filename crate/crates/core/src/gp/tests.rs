use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn gaussian(grid: Grid, sigma: f64) -> WaveField {
    WaveField::from_fn(grid, 1.0, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        (-r2 / (2.0 * sigma * sigma)).exp()
    })
    .unwrap()
}

fn fast() -> SolverOptions {
    SolverOptions {
        richardson: false,
        ..SolverOptions::default()
    }
}

#[test]
fn grid_invariants() {
    assert!(Grid::radial(0.02, 8.0).is_ok());
    assert!(matches!(Grid::radial(0.3, 8.0), Err(Error::Grid(_))));
    assert!(matches!(Grid::radial(0.5, 8.0), Err(Error::Grid(_))));
    assert!(matches!(
        Grid::new(GridKind::Radial, 0.1, 8.0, Boundary::Neumann),
        Err(Error::Unsupported(_))
    ));
    assert_eq!(
        Grid::cartesian(0.25, 4.0, Boundary::Neumann)
            .unwrap()
            .intervals(),
        32
    );
}

#[test]
fn gaussian_energy_closed_forms() {
    let grid = Grid::radial(0.01, 8.0).unwrap();
    let phi = gaussian(grid, 1.0);
    let trap = TrapPotential::harmonic();
    let p = evaluate_energy(&phi, &trap, 0.0).unwrap();
    assert!((p.kinetic - 1.5).abs() < 1e-4 && (p.trap - 1.5).abs() < 1e-4);
    assert_eq!(p.interaction, 0.0);
    let p1 = evaluate_energy(&phi, &trap, 1.0).unwrap();
    let exact = 3.0 + 4.0 * PI * (2.0 * PI).powf(-1.5);
    assert!((p1.total() - exact).abs() < 1e-4, "{}", p1.total());
}

#[test]
fn rejects_bad_inputs() {
    let grid = Grid::radial(0.05, 4.0).unwrap();
    let mut phi = gaussian(grid, 1.0);
    let trap = TrapPotential::harmonic();
    assert!(matches!(
        evaluate_energy(&phi, &trap, -1.0),
        Err(Error::Unsupported(_))
    ));
    phi.values.iter_mut().for_each(|x| *x *= 2.0);
    assert!(matches!(
        evaluate_energy(&phi, &trap, 0.0),
        Err(Error::NotNormalized { .. })
    ));
    assert!(matches!(
        minimize(&trap, -0.1, 1.0, grid, &fast()),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn wide_grids_start_positive() {
    let trap = TrapPotential::power(1.0).unwrap();
    let grid = Grid::radial(0.02, 44.0).unwrap();
    let init = initial_field(&trap, 1.0, 1.0, grid, 1.0).unwrap();
    let last = init.values.len() - 1;
    assert!(init.values[..last].iter().all(|x| *x > 1e-200));
    let sol = minimize_from(&trap, 1.0, 1.0, init, &fast()).unwrap();
    assert!(!sol.floor_hit && structural_assertions(&sol).all_ok());
}

#[test]
fn linear_oscillator_ground_state() {
    let sol = minimize(
        &TrapPotential::harmonic(),
        0.0,
        1.0,
        Grid::radial(0.02, 8.0).unwrap(),
        &fast(),
    )
    .unwrap();
    assert!((sol.energy - 3.0).abs() < 1e-3, "{}", sol.energy);
    assert!((sol.mu - 3.0).abs() < 1e-3);
    assert!(sol.virial_residual.unwrap().abs() < 1e-3);
    assert!(sol.extent_adequate);
    assert!(structural_assertions(&sol).all_ok());
    // Galerkin energies bound the continuum minimum from above
    assert!(sol.energy >= 3.0);
}

#[test]
fn energy_and_mu_identities() {
    let sol = minimize(
        &TrapPotential::harmonic(),
        0.1,
        10.0,
        Grid::radial(0.05, 8.0).unwrap(),
        &fast(),
    )
    .unwrap();
    let p = sol.parts;
    assert_eq!(sol.energy, p.kinetic + p.trap + p.interaction);
    assert!(sol.mu_identity_defect().abs() < 1e-12 * sol.mu);
    assert!((sol.rho_bar - sol.int_phi4 / sol.n).abs() <= f64::EPSILON * sol.rho_bar);
    assert!(sol.energy > 30.0);
}

#[test]
fn homogeneous_box_is_exact() {
    let grid = Grid::cartesian(0.125, 2.0, Boundary::Neumann).unwrap();
    let (a, n) = (0.01, 100.0);
    let sol = minimize(&TrapPotential::zero_in_box(), a, n, grid, &fast()).unwrap();
    let exact = 4.0 * PI * a * n * n / 64.0;
    assert!((sol.energy - exact).abs() <= 1e-10 * exact);
    let c = sol.phi.values[0];
    assert!(sol.phi.values.iter().all(|x| (x - c).abs() <= 1e-12 * c));
    assert!((sol.mu - 2.0 * sol.energy / n).abs() <= 1e-10 * sol.mu);
    let s = structural_assertions(&sol);
    assert_eq!(s.positivity, Check::Pass);
    assert_eq!(s.monotonicity, Check::NotApplicable);
    assert_eq!(s.tail, Check::NotApplicable);
}

#[test]
fn perturbed_width_breaks_virial() {
    let sigma: f64 = 1.2;
    let grid = Grid::radial(0.01, 10.0).unwrap();
    let phi = gaussian(grid, sigma);
    let p = evaluate_energy(&phi, &TrapPotential::harmonic(), 0.0).unwrap();
    let t = 1.5 / (sigma * sigma);
    let v = 1.5 * sigma * sigma;
    assert!((p.kinetic - t).abs() < 1e-4 && (p.trap - v).abs() < 1e-4);
    let residual = 2.0 / 3.0 * (p.kinetic - p.trap);
    assert!((residual - 2.0 / 3.0 * (t - v)).abs() < 1e-4);
    assert!(residual < -0.7);
}

fn directional_check(field: &WaveField, trap: &TrapPotential, nl: Nonlinearity, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = functional_gradient(field, trap, nl);
    let w = field.grid.mesh();
    let free: Vec<bool> = Discretization::lumped(&w)
        .iter()
        .map(|x| *x > 0.0)
        .collect();
    for _ in 0..20 {
        let d: Vec<f64> = free
            .iter()
            .zip(&field.values)
            .map(|(f, x)| {
                if *f {
                    rng.random_range(-1.0..1.0) * x.abs().max(1e-3)
                } else {
                    0.0
                }
            })
            .collect();
        let analytic: f64 = g.iter().zip(&d).map(|(g, d)| g * d).sum();
        let eps = 1e-5;
        let shifted = |s: f64| {
            let mut f = field.clone();
            f.values.iter_mut().zip(&d).for_each(|(x, d)| *x += s * d);
            evaluate_functional(&f, trap, nl).unwrap().total()
        };
        let numeric = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
        assert!(
            (analytic - numeric).abs() <= 1e-6 * analytic.abs().max(1e-300),
            "{analytic} vs {numeric}"
        );
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let grid = Grid::radial(0.1, 6.0).unwrap();
    let phi = gaussian(grid, 1.1);
    directional_check(
        &phi,
        &TrapPotential::harmonic(),
        Nonlinearity::Contact { a: 1.0 },
        1,
    );
    directional_check(
        &phi,
        &TrapPotential::harmonic(),
        Nonlinearity::SupNorm { a: 1.0, p: 64.0 },
        2,
    );
    let cube_sup = Grid::cartesian(0.25, 4.0, Boundary::Decay).unwrap();
    directional_check(
        &gaussian(cube_sup, 0.9),
        &TrapPotential::harmonic(),
        Nonlinearity::SupNorm { a: 2.0, p: 32.0 },
        4,
    );
    let cube = Grid::cartesian(0.25, 4.0, Boundary::Neumann).unwrap();
    let psi = gaussian(cube, 1.0);
    directional_check(
        &psi,
        &TrapPotential::power(4.0).unwrap(),
        Nonlinearity::Contact { a: 0.5 },
        3,
    );
}

#[test]
fn cartesian_matches_radial_for_harmonic() {
    let cube = Grid::cartesian(0.25, 5.0, Boundary::Decay).unwrap();
    let c = minimize(&TrapPotential::harmonic(), 1.0, 1.0, cube, &fast()).unwrap();
    let r = minimize(
        &TrapPotential::harmonic(),
        1.0,
        1.0,
        Grid::radial(0.02, 8.0).unwrap(),
        &fast(),
    )
    .unwrap();
    assert!(
        (c.energy - r.energy).abs() < 0.05 * r.energy,
        "{} vs {}",
        c.energy,
        r.energy
    );
    assert!(structural_assertions(&c).all_ok());
}

#[test]
fn richardson_is_attached() {
    let sol = minimize(
        &TrapPotential::harmonic(),
        1.0,
        1.0,
        Grid::radial(0.05, 8.0).unwrap(),
        &SolverOptions::default(),
    )
    .unwrap();
    let r = sol.richardson.unwrap();
    assert!(r.error_estimate < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn refinement_does_not_raise_energy(na in 0.0f64..5.0) {
        let trap = TrapPotential::harmonic();
        let coarse = minimize(&trap, na, 1.0, Grid::radial(0.1, 8.0).unwrap(), &fast()).unwrap();
        let fine = minimize(&trap, na, 1.0, Grid::radial(0.05, 8.0).unwrap(), &fast()).unwrap();
        prop_assert!(fine.energy <= coarse.energy + 1e-9 * coarse.energy);
    }
}

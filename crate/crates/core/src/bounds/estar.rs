//! The functional `E*[Φ] = ∫ |∇Φ|² + V|Φ|² + 8πa ‖Φ‖∞² |Φ|²` bounding the
//! energy cost of one more particle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::dyson::{build_dyson_f, correlation_integrals};
use crate::gp::{self, EnergyParts, Grid, Nonlinearity, SolverOptions, WaveField};
use crate::potentials::{InteractionPotential, TrapPotential};
use crate::{Error, Result};

/// First smoothing exponent of the continuation.
pub const P_START: f64 = 64.0;
/// Last smoothing exponent tried.
pub const P_MAX: f64 = 8192.0;
/// Consecutive sup-norm energies closer than this (relative) stop the continuation.
pub const P_STOP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstarLevel {
    pub p: f64,
    /// Minimum of the `L^p`-smoothed functional.
    pub smoothed: f64,
    /// The true functional at that minimiser.
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estar {
    /// Smallest true `E*[Φ]` over the continuation, an upper estimate of `E*(N, a)`.
    pub value: f64,
    /// `value / N`, estimating `E*(1, Na)`.
    pub per_particle: f64,
    pub parts: EnergyParts,
    pub phi: WaveField,
    /// `∫ Φ*⁴ / N`.
    pub rho_bar: f64,
    /// `‖Φ*‖∞²`.
    pub sup_density: f64,
    /// Smoothing exponent of the reported trial.
    #[serde(with = "crate::float")]
    pub p: f64,
    pub levels: Vec<EstarLevel>,
    pub n: f64,
    pub a: f64,
}

/// Minimises `E*` over `∫Φ² = n` by continuation in the smoothing exponent,
/// warm-starting each level from the previous one.
pub fn estar_minimize(
    trap: &TrapPotential,
    a: f64,
    n: f64,
    grid: Grid,
    opts: &SolverOptions,
) -> Result<Estar> {
    if a < 0.0 {
        return Err(Error::Unsupported(format!(
            "negative scattering length {a}"
        )));
    }
    let quick = SolverOptions {
        richardson: false,
        cross_check: false,
        ..*opts
    };
    let mut field = gp::initial_field(trap, a, n, grid, 1.0)?;
    if a == 0.0 {
        let sol = gp::minimize_from(trap, 0.0, n, field, &quick)?;
        let sup = sol.max_density;
        return Ok(Estar {
            value: sol.energy,
            per_particle: sol.energy / n,
            parts: sol.parts,
            rho_bar: sol.rho_bar,
            sup_density: sup,
            p: f64::INFINITY,
            levels: vec![],
            phi: sol.phi,
            n,
            a,
        });
    }
    let true_nl = Nonlinearity::SupNorm {
        a,
        p: f64::INFINITY,
    };
    let mut levels: Vec<EstarLevel> = Vec::new();
    let mut best: Option<(f64, EnergyParts, WaveField, f64)> = None;
    let mut p = P_START;
    while p <= P_MAX {
        let (sol, _) = gp::solve_from(trap, Nonlinearity::SupNorm { a, p }, n, field, &quick)?;
        let parts = gp::evaluate_functional(&sol.phi, trap, true_nl)?;
        let value = parts.total();
        let prev = levels.last().map(|l| l.value);
        levels.push(EstarLevel {
            p,
            smoothed: sol.energy,
            value,
            iterations: sol.iterations,
        });
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, parts, sol.phi.clone(), p));
        }
        field = sol.phi;
        if prev.is_some_and(|q| (value - q).abs() < P_STOP * value.abs()) {
            break;
        }
        p *= 2.0;
    }
    let (value, parts, phi, p) = best.expect("at least one level");
    Ok(Estar {
        value,
        per_particle: value / n,
        parts,
        rho_bar: phi.int_phi4() / n,
        sup_density: phi.max_density(),
        p,
        levels,
        phi,
        n,
        a,
    })
}

/// Bound on `E(N+1) - E(N)` with the error factors written out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementBound {
    /// `(T*+P*)/N /(1-a/b)³ + 8πa‖Φ*‖∞² /(1-a/b)⁵`.
    pub value: f64,
    /// `(4π/3) ‖Φ*‖∞² b³ = 1`.
    #[serde(with = "crate::float")]
    pub b: f64,
    pub a_over_b: f64,
    /// `value / E*(1, Na)`, the explicit `1 + O(aρ̄*^{1/3})` factor.
    pub factor: f64,
    /// With the computed `I, J` of the Dyson factor: `(T*+P*)/N + 2J‖Φ*‖∞²` over `1 - ‖Φ*‖∞² I`.
    pub refined: Option<f64>,
}

/// Certified increment bound from an [`Estar`] minimiser and the interaction `v` of length `a`.
pub fn chemical_potential_bound(
    e: &Estar,
    v: &InteractionPotential,
    a: f64,
) -> Result<IncrementBound> {
    let s = e.sup_density;
    let lin = e.parts.linear() / e.n;
    if a == 0.0 {
        return Ok(IncrementBound {
            value: lin,
            b: f64::INFINITY,
            a_over_b: 0.0,
            factor: lin / e.per_particle,
            refined: Some(lin),
        });
    }
    let b = (3.0 / (4.0 * PI * s)).cbrt();
    let x = a / b;
    if x >= 1.0 {
        return Err(Error::Precondition(format!(
            "(4π/3)a³‖Φ*‖∞² = {} must be below 1",
            x.powi(3)
        )));
    }
    let value = lin / (1.0 - x).powi(3) + 8.0 * PI * a * s / (1.0 - x).powi(5);
    let refined = build_dyson_f(v, a, b)
        .and_then(|fd| correlation_integrals(&fd, v))
        .ok()
        .and_then(|(i, j, _)| {
            let den = 1.0 - s * i;
            (den > 0.0).then(|| (lin + 2.0 * j * s) / den)
        });
    Ok(IncrementBound {
        value,
        b,
        a_over_b: x,
        factor: value / e.per_particle,
        refined,
    })
}

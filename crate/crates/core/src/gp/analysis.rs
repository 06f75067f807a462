use serde::{Deserialize, Serialize};

use super::{
    minimize, minimize_from, Boundary, GpSolution, Grid, GridKind, SolverOptions, WaveField,
};
use crate::potentials::{TrapKind, TrapPotential};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChemicalPotential {
    /// `E/N + 4πaρ̄`.
    pub formula: f64,
    /// `(E(N+δN) - E(N-δN)) / 2δN`.
    pub finite_diff: f64,
    pub delta_n: f64,
}

impl ChemicalPotential {
    pub fn relative_gap(&self) -> f64 {
        (self.formula - self.finite_diff).abs() / self.formula.abs()
    }
}

fn quiet(opts: &SolverOptions) -> SolverOptions {
    SolverOptions {
        richardson: false,
        cross_check: false,
        ..*opts
    }
}

fn warm_start(sol: &GpSolution, n: f64) -> WaveField {
    let s = (n / sol.n).sqrt();
    WaveField {
        grid: sol.phi.grid,
        values: sol.phi.values.iter().map(|x| x * s).collect(),
        norm_target: n,
    }
}

pub fn chemical_potential(
    sol: &GpSolution,
    delta_n: f64,
    opts: &SolverOptions,
) -> Result<ChemicalPotential> {
    if !(delta_n > 0.0 && delta_n <= 0.01 * sol.n) {
        return Err(Error::Precondition(format!(
            "δN = {delta_n} must lie in (0, 0.01 N]"
        )));
    }
    let o = quiet(opts);
    let up = minimize_from(
        &sol.trap,
        sol.a,
        sol.n + delta_n,
        warm_start(sol, sol.n + delta_n),
        &o,
    )?;
    let down = minimize_from(
        &sol.trap,
        sol.a,
        sol.n - delta_n,
        warm_start(sol, sol.n - delta_n),
        &o,
    )?;
    Ok(ChemicalPotential {
        formula: sol.energy / sol.n + 4.0 * std::f64::consts::PI * sol.a * sol.rho_bar,
        finite_diff: (up.energy - down.energy) / (2.0 * delta_n),
        delta_n,
    })
}

/// `(2/3)T - (s/3)P + U`, which vanishes at the minimiser for a trap of homogeneity order `s`.
pub fn virial_residual(sol: &GpSolution) -> Result<f64> {
    let s = sol.trap.homogeneous_order().ok_or(Error::NotHomogeneous)?;
    let p = &sol.parts;
    Ok(2.0 / 3.0 * p.kinetic - s / 3.0 * p.trap + p.interaction)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub energy_n_a: f64,
    pub energy_1_na: f64,
    /// `|E(N,a) - N E(1,Na)| / E(N,a)`.
    pub relative_energy_gap: f64,
    /// `max |ρ_{N,a} - N ρ_{1,Na}|`.
    pub max_density_gap: f64,
    /// `max_density_gap / max ρ_{N,a}`.
    pub relative_density_gap: f64,
}

/// Solves at `(N, a)` and `(1, Na)` on the same grid and compares through the scaling maps.
pub fn check_scaling(
    trap: &TrapPotential,
    a: f64,
    n: f64,
    grid: Grid,
    opts: &SolverOptions,
) -> Result<ScalingReport> {
    let o = quiet(opts);
    let big = minimize(trap, a, n, grid, &o)?;
    let unit = minimize(trap, n * a, 1.0, grid, &o)?;
    let max_density_gap = big
        .phi
        .values
        .iter()
        .zip(&unit.phi.values)
        .map(|(x, y)| (x * x - n * y * y).abs())
        .fold(0.0, f64::max);
    Ok(ScalingReport {
        energy_n_a: big.energy,
        energy_1_na: unit.energy,
        relative_energy_gap: (big.energy - n * unit.energy).abs() / big.energy.abs(),
        max_density_gap,
        relative_density_gap: max_density_gap / big.max_density,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Pass,
    Fail,
    NotApplicable,
}

impl Check {
    fn from(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }

    pub fn ok(self) -> bool {
        self != Check::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub positivity: Check,
    pub monotonicity: Check,
    pub log_concavity: Check,
    pub tail: Check,
}

impl StructuralReport {
    pub fn all_ok(&self) -> bool {
        [
            self.positivity,
            self.monotonicity,
            self.log_concavity,
            self.tail,
        ]
        .iter()
        .all(|c| c.ok())
    }
}

/// Node values along lines through the origin, as `(signed distance, Φ)`.
fn lines_through_origin(sol: &GpSolution) -> Vec<Vec<(f64, f64)>> {
    let g = sol.grid();
    let phi = &sol.phi.values;
    match g.kind() {
        GridKind::Radial => {
            let n = g.intervals();
            let mut line: Vec<(f64, f64)> = (1..=n)
                .rev()
                .map(|i| (-(i as f64) * g.h(), phi[i]))
                .collect();
            line.extend((0..=n).map(|i| (i as f64 * g.h(), phi[i])));
            vec![line]
        }
        GridKind::Cartesian => {
            let m = g.intervals();
            if !m.is_multiple_of(2) {
                return vec![];
            }
            let n1 = m + 1;
            let c = m / 2;
            let idx = |i: usize, j: usize, k: usize| (k * n1 + j) * n1 + i;
            let mut lines = vec![];
            for axis in 0..3 {
                lines.push(
                    (0..n1)
                        .map(|t| {
                            let mut p = [c, c, c];
                            p[axis] = t;
                            ((t as f64 - c as f64) * g.h(), phi[idx(p[0], p[1], p[2])])
                        })
                        .collect(),
                );
            }
            lines
        }
    }
}

/// Sampled qualitative properties of a converged minimiser.
///
/// Log-concavity and tail checks only use nodes with `Φ ≥ 1e-6 max Φ`,
/// where the minimiser's relative accuracy exceeds the tested margins.
pub fn structural_assertions(sol: &GpSolution) -> StructuralReport {
    let g = sol.grid();
    let mesh_w: Vec<bool> = {
        let mesh = g.mesh();
        super::Discretization::lumped(&mesh)
            .iter()
            .map(|w| *w > 0.0)
            .collect()
    };
    let phi = &sol.phi.values;
    let positivity =
        Check::from(!sol.floor_hit && phi.iter().zip(&mesh_w).all(|(x, free)| !free || *x > 0.0));

    let in_box = g.boundary() == Boundary::Neumann;
    let flat = matches!(sol.trap.kind(), TrapKind::ZeroInBox);
    let lines = lines_through_origin(sol);
    let peak = phi.iter().fold(0.0f64, |m, x| m.max(*x));

    let monotonicity = if !sol.trap.symmetric() || in_box || lines.is_empty() {
        Check::NotApplicable
    } else {
        Check::from(lines.iter().all(|line| {
            line.windows(2).all(|w| {
                let (inner, outer) = if w[1].0.abs() > w[0].0.abs() {
                    (w[0].1, w[1].1)
                } else {
                    (w[1].1, w[0].1)
                };
                outer <= inner + 1e-12 * peak
            })
        }))
    };

    let log_concavity = if !sol.trap.convex() || lines.is_empty() {
        Check::NotApplicable
    } else {
        let cut = 1e-6 * peak;
        Check::from(lines.iter().all(|line| {
            line.windows(3).all(|w| {
                if w.iter().any(|p| p.1 < cut) {
                    return true;
                }
                // the midpoint of a node triple dominates the geometric mean of its ends
                w[0].1.ln() + w[2].1.ln() - 2.0 * w[1].1.ln() <= 1e-9
            })
        }))
    };

    let tail = if in_box || flat || lines.is_empty() {
        Check::NotApplicable
    } else {
        let start = 0.75 * g.extent();
        let cut = 1e-6 * peak;
        Check::from(lines.iter().all(|line| {
            let outer: Vec<(f64, f64)> = line
                .iter()
                .filter(|(x, v)| *x >= start && *v >= cut)
                .map(|(x, v)| (*x, v.ln() + x))
                .collect();
            // Φ e^{|x|} nonincreasing means Φ ≤ M e^{-|x|} with M fitted at the inner edge
            outer.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9)
        }))
    };

    StructuralReport {
        positivity,
        monotonicity,
        log_concavity,
        tail,
    }
}

/// Minimiser in the Neumann box `[-R, R]³` at spacing `h`.
pub fn solve_box(
    trap: &TrapPotential,
    a: f64,
    n: f64,
    extent: f64,
    h: f64,
    opts: &SolverOptions,
) -> Result<GpSolution> {
    let grid = Grid::cartesian(h, extent, Boundary::Neumann)?;
    minimize(trap, a, n, grid, &quiet(opts))
}

/// `(R, E_R)` for each box half-width in `extents`, which must increase.
pub fn solve_neumann_box(
    trap: &TrapPotential,
    a: f64,
    n: f64,
    extents: &[f64],
    h: f64,
    opts: &SolverOptions,
) -> Result<Vec<(f64, f64)>> {
    if extents.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("box sizes must increase".into()));
    }
    extents
        .iter()
        .map(|&r| Ok((r, solve_box(trap, a, n, r, h, opts)?.energy)))
        .collect()
}

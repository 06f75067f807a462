//! Upper and lower bounds around the GP energy for one particle number, and
//! sweeps over `N` at fixed `a1 = Na`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dyson::{dyson_upper_bound, UpperBound};
use super::estar::{chemical_potential_bound, estar_minimize, IncrementBound};
use super::lower::{
    assemble_box_lower_bound_with, BoxLowerBound, HomogeneousLowerBound, DEFAULT_C,
    DEFAULT_EXPONENT,
};
use crate::gp::{self, solve_box, GpSolution, Grid, SolverOptions};
use crate::potentials::{scale_interaction, InteractionPotential, TrapKind, TrapPotential};
use crate::scattering::{compute_scattering, ScatteringOptions};
use crate::{tf, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SandwichOptions {
    /// Radial spacing for the full-space GP solve.
    pub radial_h: f64,
    /// Radial extent; sized from the Thomas-Fermi radius when absent.
    pub radial_extent: Option<f64>,
    /// Half-width `R` of the Neumann box.
    pub box_extent: f64,
    pub box_h: f64,
    /// Cell side `L` of the box partition.
    pub cell: f64,
    pub c: f64,
    pub exponent: f64,
    /// Also minimise `E*` and report the increment bound.
    pub estar: bool,
    pub solver: SolverOptions,
    pub scattering: ScatteringOptions,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        Self {
            radial_h: 0.02,
            radial_extent: None,
            box_extent: 4.0,
            box_h: 0.25,
            cell: 0.5,
            c: DEFAULT_C,
            exponent: DEFAULT_EXPONENT,
            estar: true,
            solver: SolverOptions::default(),
            scattering: ScatteringOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstarSummary {
    /// `E*(1, Na)`.
    pub per_particle: f64,
    pub rho_bar: f64,
    #[serde(with = "crate::float")]
    pub p: f64,
    pub increment: Option<IncrementBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: f64,
    pub a1: f64,
    /// Scattering length of the rescaled interaction.
    pub a: f64,
    pub a_bracket: Option<(f64, f64)>,
    pub gp_reference: Option<f64>,
    /// Neumann-box GP energy `E_R`.
    pub gp_box: Option<f64>,
    pub upper: Option<UpperBound>,
    pub upper_value: Option<f64>,
    pub estar: Option<EstarSummary>,
    pub lower_homogeneous: Option<HomogeneousLowerBound>,
    pub lower_assembled: Option<BoxLowerBound>,
    /// `upper / E^GP - 1`.
    pub upper_gap: Option<f64>,
    /// `1 - lower / E^GP`; absent when the lower bound is vacuous.
    pub lower_gap: Option<f64>,
    /// `lower ≤ E^GP ≤ upper`, a vacuous lower bound counting as `-∞`.
    pub ordered: bool,
    pub valid: bool,
    pub incomplete: bool,
    pub errors: Vec<String>,
}

fn radial_grid(trap: &TrapPotential, na: f64, opts: &SandwichOptions) -> Result<Grid> {
    match opts.radial_extent {
        Some(r) => Grid::radial(opts.radial_h, r),
        None => tf::grid_for(trap, na, opts.radial_h),
    }
}

/// The interaction of scattering length `a` in the family generated by `v1`, and its bracket.
fn rescaled(
    v1: &InteractionPotential,
    a: f64,
    opts: &ScatteringOptions,
) -> Result<(InteractionPotential, f64, (f64, f64))> {
    if a == 0.0 {
        return Ok((InteractionPotential::zero(), 0.0, (0.0, 0.0)));
    }
    let base = compute_scattering(v1, opts)?;
    let v = scale_interaction(v1, base.a, a)?;
    let s = compute_scattering(&v, opts)?;
    Ok((v, s.a, s.certified_interval()))
}

/// Full set of bounds at particle number `n` with `a = a1/n`. Component
/// failures are recorded and leave the report incomplete.
pub fn sandwich_report(
    trap: &TrapPotential,
    v1: &InteractionPotential,
    a1: f64,
    n: f64,
    opts: &SandwichOptions,
) -> BoundReport {
    let mut errors = Vec::new();
    let mut note = |stage: &str, e: Error| errors.push(format!("{stage}: {e}"));
    let mut report = BoundReport {
        n,
        a1,
        a: a1 / n,
        a_bracket: None,
        gp_reference: None,
        gp_box: None,
        upper: None,
        upper_value: None,
        estar: None,
        lower_homogeneous: None,
        lower_assembled: None,
        upper_gap: None,
        lower_gap: None,
        ordered: false,
        valid: false,
        incomplete: true,
        errors: vec![],
    };
    if !(n >= 1.0 && a1 >= 0.0 && n.is_finite() && a1.is_finite()) {
        note(
            "input",
            Error::Domain(format!("need N ≥ 1 and a1 ≥ 0, got N = {n}, a1 = {a1}")),
        );
        report.errors = errors;
        return report;
    }
    let (v, a) = match rescaled(v1, a1 / n, &opts.scattering) {
        Ok((v, a, bracket)) => {
            report.a = a;
            report.a_bracket = Some(bracket);
            (v, a)
        }
        Err(e) => {
            note("scattering", e);
            report.errors = errors;
            return report;
        }
    };

    let in_box = matches!(trap.kind(), TrapKind::ZeroInBox);
    let box_sol = solve_box(trap, a, n, opts.box_extent, opts.box_h, &opts.solver);
    let full: Result<GpSolution> = if in_box {
        box_sol
            .as_ref()
            .map(Clone::clone)
            .map_err(|e| Error::Precondition(e.to_string()))
    } else {
        radial_grid(trap, n * a, opts).and_then(|g| gp::minimize(trap, a, n, g, &opts.solver))
    };
    match &full {
        Ok(sol) => {
            report.gp_reference = Some(sol.energy);
            match dyson_upper_bound(sol, &v, a) {
                Ok(u) => {
                    report.upper_value = Some(u.total);
                    report.upper = Some(u);
                }
                Err(e) => note("upper bound", e),
            }
        }
        Err(e) => note("GP solve", Error::Precondition(e.to_string())),
    }

    if opts.estar && !in_box {
        let e = radial_grid(trap, n * a, opts)
            .and_then(|g| estar_minimize(trap, a, n, g, &opts.solver));
        match e {
            Ok(e) => {
                let increment = match chemical_potential_bound(&e, &v, a) {
                    Ok(b) => Some(b),
                    Err(err) => {
                        note("increment bound", err);
                        None
                    }
                };
                report.estar = Some(EstarSummary {
                    per_particle: e.per_particle,
                    rho_bar: e.rho_bar,
                    p: e.p,
                    increment,
                });
            }
            Err(err) => note("E* minimisation", err),
        }
    }

    match box_sol {
        Ok(sol) => {
            report.gp_box = Some(sol.energy);
            match assemble_box_lower_bound_with(&sol, opts.cell, a, opts.c, opts.exponent) {
                Ok(lb) => {
                    report.lower_homogeneous = Some(lb.homogeneous);
                    report.lower_assembled = Some(lb);
                }
                Err(e) => note("lower bound", e),
            }
        }
        Err(e) => note("box solve", e),
    }

    let lower = report.lower_assembled.and_then(|l| l.value);
    if let (Some(gp), Some(up)) = (report.gp_reference, report.upper_value) {
        report.upper_gap = Some(up / gp - 1.0);
        report.lower_gap = lower.map(|l| 1.0 - l / gp);
        report.ordered = lower.is_none_or(|l| l <= gp) && gp <= up;
    }
    report.incomplete =
        !errors.is_empty() || report.lower_assembled.is_none() || report.upper.is_none();
    report.valid =
        !report.incomplete && report.ordered && report.lower_assembled.is_some_and(|l| l.valid);
    report.errors = errors;
    report
}

/// [`sandwich_report`] for each `N` (strictly increasing) at fixed `a1`.
pub fn sweep(
    trap: &TrapPotential,
    v1: &InteractionPotential,
    a1: f64,
    ns: &[f64],
    opts: &SandwichOptions,
) -> Result<Vec<BoundReport>> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "sweep values of N must increase".into(),
        ));
    }
    Ok(ns
        .par_iter()
        .map(|&n| sandwich_report(trap, v1, a1, n, opts))
        .collect())
}

/// Whether each successive gap is below the previous one; absent gaps count as infinite.
pub fn gaps_shrinking(gaps: &[Option<f64>]) -> bool {
    let g: Vec<f64> = gaps.iter().map(|x| x.unwrap_or(f64::INFINITY)).collect();
    g.windows(2).all(|w| w[1] < w[0])
}

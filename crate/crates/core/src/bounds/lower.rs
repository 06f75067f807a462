//! Lower bounds: the homogeneous-gas estimate in a Neumann box of side `L`
//! and its cellwise assembly over a trapped GP density.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gp::{Boundary, GpSolution, GridKind};
use crate::{Error, Result};

/// Default constant in the homogeneous bound.
pub const DEFAULT_C: f64 = 8.9;
/// Default exponent of `Y` in the homogeneous bound.
pub const DEFAULT_EXPONENT: f64 = 1.0 / 17.0;
/// Validity needs `Y` below this.
pub const Y_MAX: f64 = 1e-2;
/// Validity needs `L/a` above this multiple of `Y^{-6/17}`.
pub const REGIME_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousLowerBound {
    /// `4πa (N²/L³)(1 - C Y^γ)`.
    pub value: f64,
    /// `a³N/L³`.
    pub y: f64,
    pub c: f64,
    pub exponent: f64,
    /// `C Y^γ`.
    pub correction: f64,
    /// `Y < 10⁻²`, `L/a > 10 Y^{-6/17}` and `C Y^γ < 1`.
    pub valid: bool,
}

pub fn homogeneous_lower_bound(n: f64, l: f64, a: f64, c: f64) -> HomogeneousLowerBound {
    homogeneous_lower_bound_with(n, l, a, c, DEFAULT_EXPONENT)
}

/// [`homogeneous_lower_bound`] with the exponent of `Y` as a parameter.
pub fn homogeneous_lower_bound_with(
    n: f64,
    l: f64,
    a: f64,
    c: f64,
    exponent: f64,
) -> HomogeneousLowerBound {
    let y = a.powi(3) * n / l.powi(3);
    let correction = c * y.powf(exponent);
    let value = 4.0 * PI * a * n * n / l.powi(3) * (1.0 - correction);
    let regime = y > 0.0 && l / a > REGIME_FACTOR * y.powf(-6.0 / 17.0);
    HomogeneousLowerBound {
        value,
        y,
        c,
        exponent,
        correction,
        valid: y < Y_MAX && regime && correction < 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxLowerBound {
    /// `E_R + 4πa∫ρ² - 4πa L³ Σ ρ_max³ / (ρ_min (1 - CY^γ))`; absent when
    /// `CY^γ ≥ 1`, where the cellwise infimum is unbounded below.
    pub value: Option<f64>,
    pub e_box: f64,
    /// The subtracted sum, absent with `value`.
    pub defect: Option<f64>,
    pub l: f64,
    pub cells: usize,
    /// Largest `ρ_max / ρ_min` over the cells.
    pub worst_ratio: f64,
    /// The homogeneous bound at `N` particles in one cell of side `L`.
    pub homogeneous: HomogeneousLowerBound,
    pub valid: bool,
}

/// Cellwise lower bound from a Neumann-box GP solution on `[-R, R]³`.
pub fn assemble_box_lower_bound(sol: &GpSolution, l: f64, a: f64, c: f64) -> Result<BoxLowerBound> {
    assemble_box_lower_bound_with(sol, l, a, c, DEFAULT_EXPONENT)
}

pub fn assemble_box_lower_bound_with(
    sol: &GpSolution,
    l: f64,
    a: f64,
    c: f64,
    exponent: f64,
) -> Result<BoxLowerBound> {
    let grid = sol.grid();
    if grid.kind() != GridKind::Cartesian || grid.boundary() != Boundary::Neumann {
        return Err(Error::Precondition(
            "box assembly needs a Cartesian Neumann solution".into(),
        ));
    }
    if (a - sol.a).abs() > 1e-12 * a.max(sol.a) {
        return Err(Error::Precondition(format!(
            "scattering length {a} differs from the solution's {}",
            sol.a
        )));
    }
    let side = 2.0 * grid.extent();
    let per_cell = l / grid.h();
    let cells_per_axis = side / l;
    let integral = |x: f64| (x - x.round()).abs() < 1e-9 * x.max(1.0);
    if !(l > 0.0 && integral(per_cell) && integral(cells_per_axis)) {
        return Err(Error::Precondition(format!(
            "cell side {l} must be a multiple of h = {} dividing 2R = {side}",
            grid.h()
        )));
    }
    let (q, k) = (per_cell.round() as usize, cells_per_axis.round() as usize);
    let n1 = grid.intervals() + 1;
    let rho = sol.density();

    // closed cells: shared faces belong to both neighbours
    let extremes: Vec<Result<(f64, f64)>> = (0..k * k * k)
        .into_par_iter()
        .map(|cell| {
            let (ci, cj, ck) = (cell % k, (cell / k) % k, cell / (k * k));
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for z in ck * q..=(ck + 1) * q {
                for y in cj * q..=(cj + 1) * q {
                    for x in ci * q..=(ci + 1) * q {
                        let r = rho[x + n1 * (y + n1 * z)];
                        lo = lo.min(r);
                        hi = hi.max(r);
                    }
                }
            }
            if lo <= 0.0 {
                return Err(Error::ZeroDensityCell { cell: [ci, cj, ck] });
            }
            Ok((lo, hi))
        })
        .collect();
    let extremes = extremes.into_iter().collect::<Result<Vec<_>>>()?;

    let homogeneous = homogeneous_lower_bound_with(sol.n, l, a, c, exponent);
    let worst_ratio = extremes.iter().map(|(lo, hi)| hi / lo).fold(1.0, f64::max);
    let one_minus = 1.0 - homogeneous.correction;
    let (value, defect) = if a == 0.0 {
        (Some(sol.energy), Some(0.0))
    } else if one_minus > 0.0 {
        let sum: f64 = extremes.iter().map(|(lo, hi)| hi.powi(3) / lo).sum();
        let defect = 4.0 * PI * a * l.powi(3) * sum / one_minus;
        (
            Some(sol.energy + 4.0 * PI * a * sol.int_phi4 - defect),
            Some(defect),
        )
    } else {
        (None, None)
    };
    Ok(BoxLowerBound {
        value,
        e_box: sol.energy,
        defect,
        l,
        cells: k * k * k,
        worst_ratio,
        homogeneous,
        valid: value.is_some() && (a == 0.0 || homogeneous.valid),
    })
}

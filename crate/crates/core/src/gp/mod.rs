//! The GP functional `E[Φ] = ∫ |∇Φ|² + V|Φ|² + 4πa|Φ|⁴` under `∫|Φ|² = N`,
//! its discrete minimiser and the diagnostics evaluated on a minimiser.
//!
//! Two discretisations share one minimiser: a radial piecewise-linear
//! Galerkin grid for spherically symmetric traps, and a cubic finite
//! difference grid for everything else (and for Neumann boxes). Radial
//! energies are continuum energies of admissible functions, hence upper
//! bounds that decrease under refinement.

mod analysis;
mod cartesian;
pub(crate) mod minimize;
mod ops;
mod radial;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use analysis::{
    check_scaling, chemical_potential, solve_box, solve_neumann_box, structural_assertions,
    virial_residual, Check, ChemicalPotential, ScalingReport, StructuralReport,
};
use cartesian::CartesianMesh;
use minimize::Functional;
use ops::Tridiag;
use radial::RadialMesh;

use crate::potentials::{TrapKind, TrapPotential};
use crate::{Error, Result};

/// Node storage and the quadratic and quartic forms of a grid.
///
/// Pinned nodes have zero lumped weight and every operator maps them to zero.
pub(crate) trait Discretization {
    fn len(&self) -> usize;
    /// Row sums of the mass matrix.
    fn lumped(&self) -> &[f64];
    /// `⟨φ, Mφ⟩ = ∫|φ|²`.
    fn mass(&self) -> &Tridiag;
    /// Matrix of `∫ V |φ|²`.
    fn trap_operator(&self, trap: &TrapPotential) -> Tridiag;
    /// `∫|∇φ|²`.
    fn kinetic(&self, phi: &[f64]) -> f64;
    fn apply_kinetic(&self, phi: &[f64], out: &mut [f64]);
    /// `∫|φ|⁴`.
    fn quartic(&self, phi: &[f64]) -> f64;
    /// A quarter of the gradient of [`Discretization::quartic`].
    fn apply_quartic(&self, phi: &[f64], out: &mut [f64]);
    /// Approximately solves `(K + L diag(shift)) x = M rhs`.
    fn precondition(&self, shift: &[f64], rhs: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Radial,
    Cartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// `Φ = 0` at the outer radius (radial) or on the cube faces (Cartesian).
    Decay,
    /// Zero normal derivative on the faces of `[-R, R]³`.
    Neumann,
}

/// Radial grids cover `[0, R]`; Cartesian grids cover `[-R, R]³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    kind: GridKind,
    h: f64,
    extent: f64,
    boundary: Boundary,
    intervals: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    pub h: f64,
    #[serde(rename = "R")]
    pub extent: f64,
    pub boundary: Boundary,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.kind, s.h, s.extent, s.boundary)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            kind: g.kind,
            h: g.h,
            extent: g.extent,
            boundary: g.boundary,
        }
    }
}

/// Fewest intervals across a grid.
pub const MIN_INTERVALS: usize = 32;

impl Grid {
    pub fn new(kind: GridKind, h: f64, extent: f64, boundary: Boundary) -> Result<Self> {
        if !(h > 0.0 && extent > 0.0 && h.is_finite() && extent.is_finite()) {
            return Err(Error::Grid(format!(
                "need h > 0 and R > 0, got h = {h}, R = {extent}"
            )));
        }
        // radial grids count intervals on [0, R], cubes along [-R, R]
        let span = match kind {
            GridKind::Radial => extent,
            GridKind::Cartesian => 2.0 * extent,
        };
        let ratio = span / h;
        let intervals = ratio.round();
        if (ratio - intervals).abs() > 1e-9 * ratio || (intervals as usize) < MIN_INTERVALS {
            return Err(Error::Grid(format!(
                "{} / h = {ratio} must be an integer of at least {MIN_INTERVALS}",
                if kind == GridKind::Radial { "R" } else { "2R" }
            )));
        }
        if kind == GridKind::Radial && boundary == Boundary::Neumann {
            return Err(Error::Unsupported(
                "Neumann boxes are cubes; use a Cartesian grid".into(),
            ));
        }
        Ok(Self {
            kind,
            h,
            extent,
            boundary,
            intervals: intervals as usize,
        })
    }

    pub fn radial(h: f64, extent: f64) -> Result<Self> {
        Self::new(GridKind::Radial, h, extent, Boundary::Decay)
    }

    pub fn cartesian(h: f64, extent: f64, boundary: Boundary) -> Result<Self> {
        Self::new(GridKind::Cartesian, h, extent, boundary)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes, pinned ones included.
    pub fn node_count(&self) -> usize {
        match self.kind {
            GridKind::Radial => self.intervals + 1,
            GridKind::Cartesian => (self.intervals + 1).pow(3),
        }
    }

    /// Same extent at spacing `2h`, when that grid is still valid.
    pub fn coarsened(&self) -> Option<Self> {
        Self::new(self.kind, 2.0 * self.h, self.extent, self.boundary).ok()
    }

    /// Node position; radial nodes lie on the positive x axis.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        match self.kind {
            GridKind::Radial => [idx as f64 * self.h, 0.0, 0.0],
            GridKind::Cartesian => {
                let n1 = self.intervals + 1;
                let (i, j, k) = (idx % n1, (idx / n1) % n1, idx / (n1 * n1));
                let x = |t: usize| -self.extent + t as f64 * self.h;
                [x(i), x(j), x(k)]
            }
        }
    }

    pub(crate) fn mesh(&self) -> Mesh {
        match self.kind {
            GridKind::Radial => Mesh::Radial(RadialMesh::new(self.h, self.intervals)),
            GridKind::Cartesian => Mesh::Cartesian(CartesianMesh::new(
                self.h,
                self.intervals,
                self.boundary == Boundary::Decay,
            )),
        }
    }
}

pub(crate) enum Mesh {
    Radial(RadialMesh),
    Cartesian(CartesianMesh),
}

impl Discretization for Mesh {
    fn len(&self) -> usize {
        match self {
            Mesh::Radial(m) => m.len(),
            Mesh::Cartesian(m) => m.len(),
        }
    }

    fn lumped(&self) -> &[f64] {
        match self {
            Mesh::Radial(m) => m.lumped(),
            Mesh::Cartesian(m) => m.lumped(),
        }
    }

    fn mass(&self) -> &Tridiag {
        match self {
            Mesh::Radial(m) => m.mass(),
            Mesh::Cartesian(m) => m.mass(),
        }
    }

    fn trap_operator(&self, trap: &TrapPotential) -> Tridiag {
        match self {
            Mesh::Radial(m) => m.trap_operator(trap),
            Mesh::Cartesian(m) => m.trap_operator(trap),
        }
    }

    fn kinetic(&self, phi: &[f64]) -> f64 {
        match self {
            Mesh::Radial(m) => m.kinetic(phi),
            Mesh::Cartesian(m) => m.kinetic(phi),
        }
    }

    fn apply_kinetic(&self, phi: &[f64], out: &mut [f64]) {
        match self {
            Mesh::Radial(m) => m.apply_kinetic(phi, out),
            Mesh::Cartesian(m) => m.apply_kinetic(phi, out),
        }
    }

    fn quartic(&self, phi: &[f64]) -> f64 {
        match self {
            Mesh::Radial(m) => m.quartic(phi),
            Mesh::Cartesian(m) => m.quartic(phi),
        }
    }

    fn apply_quartic(&self, phi: &[f64], out: &mut [f64]) {
        match self {
            Mesh::Radial(m) => m.apply_quartic(phi, out),
            Mesh::Cartesian(m) => m.apply_quartic(phi, out),
        }
    }

    fn precondition(&self, shift: &[f64], rhs: &[f64], out: &mut [f64]) {
        match self {
            Mesh::Radial(m) => m.precondition(shift, rhs, out),
            Mesh::Cartesian(m) => m.precondition(shift, rhs, out),
        }
    }
}

/// Node values of `Φ` with the particle number they are normalised to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub norm_target: f64,
}

impl WaveField {
    /// Samples `f` at every node and rescales to `∫|Φ|² = n`; pinned nodes are zero.
    pub fn from_fn(grid: Grid, n: f64, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        let mesh = grid.mesh();
        let w = mesh.lumped();
        let mut values: Vec<f64> = (0..grid.node_count())
            .map(|i| if w[i] > 0.0 { f(grid.position(i)) } else { 0.0 })
            .collect();
        let norm = mesh.mass().form(&values, &values);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain(
                "initial field has zero or infinite norm".into(),
            ));
        }
        let s = (n / norm).sqrt();
        values.iter_mut().for_each(|x| *x *= s);
        Ok(Self {
            grid,
            values,
            norm_target: n,
        })
    }

    pub fn norm(&self) -> f64 {
        self.grid.mesh().mass().form(&self.values, &self.values)
    }

    /// `∫ ρ²` with `ρ = Φ²`.
    pub fn int_phi4(&self) -> f64 {
        self.grid.mesh().quartic(&self.values)
    }

    /// `‖ρ‖_∞`, attained at a node for both discretisations.
    pub fn max_density(&self) -> f64 {
        minimize::sup_squared(self.grid.mesh().lumped(), &self.values)
    }
}

/// Interaction term of the functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `4πa ∫|Φ|⁴`.
    Contact { a: f64 },
    /// `8πa ‖Φ‖² ∫|Φ|²`, with `‖·‖` the `L^p` norm (`p = ∞` for the sup norm).
    SupNorm { a: f64, p: f64 },
}

impl Nonlinearity {
    pub fn a(&self) -> f64 {
        match self {
            Nonlinearity::Contact { a } | Nonlinearity::SupNorm { a, .. } => *a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub trap: f64,
    pub interaction: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.trap + self.interaction
    }

    /// `T + P`.
    pub fn linear(&self) -> f64 {
        self.kinetic + self.trap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Convergence on `‖HΦ - μΦ‖ / √N ≤ tolerance · max(1, |μ|)`.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Also solve at spacing `2h` and attach an `h²` extrapolation.
    pub richardson: bool,
    /// Also solve from a second initial width and require agreement.
    pub cross_check: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iter: 20_000,
            richardson: true,
            cross_check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub coarse_energy: f64,
    pub extrapolated: f64,
    pub error_estimate: f64,
}

/// A converged discrete minimiser and everything derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSolution {
    pub phi: WaveField,
    pub trap: TrapPotential,
    pub a: f64,
    pub n: f64,
    pub energy: f64,
    pub parts: EnergyParts,
    /// `∫ Φ⁴`.
    pub int_phi4: f64,
    pub mu: f64,
    /// `(1/N) ∫ ρ²`.
    pub rho_bar: f64,
    /// `‖ρ‖_∞`.
    pub max_density: f64,
    pub residual_gp: f64,
    /// `(2/3)T - (s/3)P + U` for homogeneous traps.
    pub virial_residual: Option<f64>,
    pub iterations: usize,
    pub floor_hit: bool,
    /// `inf_{|x| ≥ R} V ≥ μ + 20`, or a Neumann box.
    pub extent_adequate: bool,
    pub richardson: Option<Richardson>,
}

impl GpSolution {
    pub fn grid(&self) -> &Grid {
        &self.phi.grid
    }

    pub fn density(&self) -> Vec<f64> {
        self.phi.values.iter().map(|x| x * x).collect()
    }

    /// `μ - E/N - 4πaρ̄`, zero up to rounding.
    pub fn mu_identity_defect(&self) -> f64 {
        self.mu - (self.energy / self.n + 4.0 * PI * self.a * self.rho_bar)
    }
}

fn check_field(field: &WaveField) -> Result<()> {
    let norm = field.norm();
    if (norm - field.norm_target).abs() > 1e-10 * field.norm_target {
        return Err(Error::NotNormalized {
            actual: norm,
            expected: field.norm_target,
        });
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if a < 0.0 {
        return Err(Error::Unsupported(format!(
            "negative scattering length {a}: attractive GP is not treated"
        )));
    }
    if !a.is_finite() {
        return Err(Error::Domain(format!(
            "scattering length must be finite, got {a}"
        )));
    }
    Ok(())
}

fn check_trap_grid(trap: &TrapPotential, grid: &Grid) -> Result<()> {
    if grid.kind() == GridKind::Radial && !trap.symmetric() {
        return Err(Error::Unsupported(
            "radial grids need a spherically symmetric nondecreasing trap".into(),
        ));
    }
    if matches!(trap.kind(), TrapKind::ZeroInBox) && grid.boundary() != Boundary::Neumann {
        return Err(Error::Unsupported(
            "the zero potential only lives in a Neumann box".into(),
        ));
    }
    if let TrapKind::Tabulated { table } = trap.kind() {
        let reach = match grid.kind() {
            GridKind::Radial => grid.extent(),
            GridKind::Cartesian => grid.extent() * 3f64.sqrt(),
        };
        if reach > table.x_max() {
            return Err(Error::Grid(format!(
                "grid reaches r = {reach} beyond the tabulated trap (last sample {})",
                table.x_max()
            )));
        }
    }
    Ok(())
}

/// Discrete GP energy of `field` with contact interaction `a`.
pub fn evaluate_energy(field: &WaveField, trap: &TrapPotential, a: f64) -> Result<EnergyParts> {
    check_a(a)?;
    check_field(field)?;
    evaluate_functional(field, trap, Nonlinearity::Contact { a })
}

/// Any supported functional, without the normalisation check.
pub fn evaluate_functional(
    field: &WaveField,
    trap: &TrapPotential,
    nl: Nonlinearity,
) -> Result<EnergyParts> {
    let mesh = field.grid.mesh();
    let f = Functional::new(&mesh, mesh.trap_operator(trap), nl);
    Ok(f.energy(&field.values))
}

/// Euclidean gradient of the discrete functional with respect to the node values.
pub fn functional_gradient(field: &WaveField, trap: &TrapPotential, nl: Nonlinearity) -> Vec<f64> {
    let mesh = field.grid.mesh();
    let f = Functional::new(&mesh, mesh.trap_operator(trap), nl);
    let mut g = vec![0.0; field.values.len()];
    f.gradient(&field.values, &mut g);
    g
}

/// Thomas-Fermi radius estimate of `trap` at coupling `n a`, for initial widths.
fn tf_radius(trap: &TrapPotential, na: f64, reach: f64) -> f64 {
    if na <= 0.0 {
        return 0.0;
    }
    let norm = |mu: f64| {
        let m = 400;
        let dr = reach / m as f64;
        (0..m)
            .map(|i| {
                let r = (i as f64 + 0.5) * dr;
                (mu - trap.at_radius(r)).max(0.0) / (8.0 * PI * na) * 4.0 * PI * r * r * dr
            })
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while norm(hi) < 1.0 && hi < 1e12 {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if norm(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = hi;
    let m = 4000;
    (0..=m)
        .map(|i| reach * i as f64 / m as f64)
        .find(|&r| trap.at_radius(r) >= mu)
        .unwrap_or(reach)
}

/// Normalised Gaussian sized to the trap, or a constant in a box.
///
/// Beyond `4σ` the Gaussian continues as the matching exponential so that
/// no node of a wide grid underflows to zero.
pub fn initial_field(
    trap: &TrapPotential,
    a: f64,
    n: f64,
    grid: Grid,
    width_factor: f64,
) -> Result<WaveField> {
    if matches!(trap.kind(), TrapKind::ZeroInBox) {
        return WaveField::from_fn(grid, n, |_| 1.0);
    }
    let ell = trap.length_scale();
    let sigma = (ell.max(0.5 * tf_radius(trap, n * a, grid.extent())) * width_factor)
        .min(0.25 * grid.extent());
    let join = 4.0 * sigma;
    WaveField::from_fn(grid, n, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let exponent = if r <= join {
            r * r / (2.0 * sigma * sigma)
        } else {
            8.0 + 4.0 * (r - join) / sigma
        };
        (-exponent).exp()
    })
}

/// Runs the minimiser from `init` and assembles the solution record.
pub(crate) fn solve_from(
    trap: &TrapPotential,
    nl: Nonlinearity,
    n: f64,
    init: WaveField,
    opts: &SolverOptions,
) -> Result<(GpSolution, f64)> {
    let grid = init.grid;
    let mesh = grid.mesh();
    let f = Functional::new(&mesh, mesh.trap_operator(trap), nl);
    let m = minimize::minimize(&f, n, init.values, opts)?;
    let phi = WaveField {
        grid,
        values: m.phi,
        norm_target: n,
    };
    let int_phi4 = phi.int_phi4();
    let a = nl.a();
    let energy = m.parts.total();
    let rho_bar = int_phi4 / n;
    let extent_adequate = match grid.boundary() {
        Boundary::Neumann => true,
        Boundary::Decay => trap.inf_outside(grid.extent()) >= m.mu + 20.0,
    };
    let virial_residual = trap
        .homogeneous_order()
        .filter(|_| {
            grid.boundary() == Boundary::Decay && matches!(nl, Nonlinearity::Contact { .. })
        })
        .map(|s| 2.0 / 3.0 * m.parts.kinetic - s / 3.0 * m.parts.trap + m.parts.interaction);
    let max_density = phi.max_density();
    let sol = GpSolution {
        phi,
        trap: trap.clone(),
        a,
        n,
        energy,
        parts: m.parts,
        int_phi4,
        mu: m.mu,
        rho_bar,
        max_density,
        residual_gp: m.residual,
        virial_residual,
        iterations: m.iterations,
        floor_hit: m.floor_hit,
        extent_adequate,
        richardson: None,
    };
    Ok((sol, energy))
}

/// Minimises the GP functional for `trap`, scattering length `a` and particle number `n` on `grid`.
pub fn minimize(
    trap: &TrapPotential,
    a: f64,
    n: f64,
    grid: Grid,
    opts: &SolverOptions,
) -> Result<GpSolution> {
    let init = initial_field(trap, a, n, grid, 1.0)?;
    minimize_from(trap, a, n, init, opts)
}

/// [`minimize`] from a given starting field (rescaled to `n`).
pub fn minimize_from(
    trap: &TrapPotential,
    a: f64,
    n: f64,
    init: WaveField,
    opts: &SolverOptions,
) -> Result<GpSolution> {
    check_a(a)?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Domain(format!(
            "particle number must be positive, got {n}"
        )));
    }
    let grid = init.grid;
    check_trap_grid(trap, &grid)?;
    let mut init = init;
    let norm = init.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Domain(
            "initial field has zero or infinite norm".into(),
        ));
    }
    let s = (n / norm).sqrt();
    init.values.iter_mut().for_each(|x| *x *= s);
    init.norm_target = n;
    let nl = Nonlinearity::Contact { a };
    let (mut sol, _) = solve_from(trap, nl, n, init, opts)?;

    if opts.cross_check && !matches!(trap.kind(), TrapKind::ZeroInBox) {
        let other = initial_field(trap, a, n, grid, 0.6)?;
        let (alt, _) = solve_from(trap, nl, n, other, opts)?;
        let gap = (alt.energy - sol.energy).abs();
        if gap > 10.0 * opts.tolerance * sol.energy.abs().max(1.0) {
            return Err(Error::NonConvergence {
                iterations: sol.iterations.max(alt.iterations),
                residual: gap,
            });
        }
    }

    if opts.richardson {
        if let Some(coarse) = grid.coarsened() {
            let quick = SolverOptions {
                richardson: false,
                cross_check: false,
                ..*opts
            };
            let c = minimize(trap, a, n, coarse, &quick)?;
            let diff = sol.energy - c.energy;
            sol.richardson = Some(Richardson {
                coarse_energy: c.energy,
                extrapolated: sol.energy + diff / 3.0,
                error_estimate: diff.abs() / 3.0,
            });
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests;

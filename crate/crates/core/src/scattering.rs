//! Zero-energy two-body scattering: `-u'' + ½ v u = 0` with `u = 0` at the
//! core edge, the scattering length `a = lim (r - u/u')`, and its two-sided
//! certificate from the potential tail.

use serde::{Deserialize, Serialize};

use crate::potentials::{tail_integral_with, InteractionKind, InteractionPotential};
use crate::quad::{self, QuadTolerance};
use crate::{Error, Result};

/// Samples kept in a [`ScatteringResult`] for output.
const MAX_OUTPUT_SAMPLES: usize = 1000;

/// One node of the zero-energy solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorMeta {
    pub steps: usize,
    /// Richardson estimate of the error in `h(r_max)`.
    pub max_local_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    /// Midpoint of `bracket`.
    pub a: f64,
    /// `[h(r_max), h(r_max) + ½∫_{r_max}^∞ v r² dr]`.
    pub bracket: (f64, f64),
    /// Width of `bracket`, the bound on `a - h(r_max)`.
    pub tail_bound: f64,
    pub r_tilde: f64,
    /// `½∫ v r² dr`; absent when it diverges (hard core) or does not apply (attractive well).
    pub sr_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_note: Option<String>,
    pub u_samples: Vec<(f64, f64)>,
    pub h_samples: Vec<(f64, f64)>,
    pub meta: IntegratorMeta,
}

impl ScatteringResult {
    pub fn bracket_width(&self) -> f64 {
        self.tail_bound
    }

    /// Bracket widened by the integrator error.
    pub fn certified_interval(&self) -> (f64, f64) {
        let e = self.meta.max_local_error;
        (self.bracket.0 - e, self.bracket.1 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatteringOptions {
    /// Outer radius; chosen from the range or the tolerance when absent.
    pub r_max: Option<f64>,
    /// Steps per feature length of the potential.
    pub steps: usize,
    /// Largest accepted bracket width.
    pub tolerance: f64,
    pub quad: QuadTolerance,
}

impl Default for ScatteringOptions {
    fn default() -> Self {
        Self {
            r_max: None,
            steps: 2000,
            tolerance: 1e-8,
            quad: QuadTolerance::default(),
        }
    }
}

/// Radius past which every feature of `v` (core, jumps, table) lies.
fn feature_length(v: &InteractionPotential) -> f64 {
    let mut l = v.core_radius();
    for p in v.breakpoints() {
        if v.cutoff().is_none_or(|c| p < c) {
            l = l.max(p);
        }
    }
    if let InteractionKind::PowerLaw { r_min, .. } = v.kind() {
        l = l.max(*r_min);
    }
    if l > 0.0 {
        l
    } else {
        1.0
    }
}

/// Largest `√(|v|/2)` seen on the feature region, bounding the local wavenumber.
fn max_wavenumber(v: &InteractionPotential, lo: f64, hi: f64) -> f64 {
    let n = 2000;
    (0..=n)
        .map(|i| {
            let r = lo + (hi - lo) * i as f64 / n as f64;
            let r = if i == 0 { r.next_up() } else { r };
            (0.5 * v.outside_core(r).abs()).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Nodes from the core edge to `r_max`: uniform inside the feature region,
/// doubling the step on each dyadic shell beyond it. Breakpoints are nodes.
fn mesh(v: &InteractionPotential, r_max: f64, steps: usize) -> Vec<f64> {
    let r0 = v.core_radius();
    let ell = feature_length(v);
    let kappa = max_wavenumber(v, r0, ell.min(r_max));
    // a bare core has no feature region; resolve one core radius instead
    let span = if ell > r0 {
        (ell - r0).max(ell * 1e-3)
    } else {
        ell
    };
    let mut h0 = span / steps as f64;
    if kappa > 0.0 {
        h0 = h0.min(0.05 / kappa);
    }
    let mut knots = vec![r0];
    knots.extend(v.breakpoints().into_iter().filter(|&p| p < r_max));
    let mut shell = ell;
    while shell < r_max {
        if shell > r0 {
            knots.push(shell);
        }
        shell *= 2.0;
    }
    knots.push(r_max);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let mut nodes = vec![r0];
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = h0 * (lo / ell).max(1.0);
        let n = ((hi - lo) / h).ceil().max(1.0) as usize;
        for k in 1..n {
            nodes.push(lo + (hi - lo) * k as f64 / n as f64);
        }
        nodes.push(hi);
    }
    nodes
}

fn refine(nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len());
    out.push(nodes[0]);
    for w in nodes.windows(2) {
        out.push(0.5 * (w[0] + w[1]));
        out.push(w[1]);
    }
    out
}

/// Classical RK4 over the given nodes, with one-sided potential values at
/// the ends of each step so jumps at nodes cost no order.
///
/// Past the feature length, where `u` grows like `r` and `r - u/u'` would
/// cancel, the state is `(h, ln u')` with `h = r - u/u'`, which obeys
/// `h' = q (r - h)²` and `(ln u')' = q (r - h)` for `q = v/2`.
fn rk4(v: &InteractionPotential, nodes: &[f64]) -> Vec<ScatteringSample> {
    let ell = feature_length(v);
    let mut out = Vec::with_capacity(nodes.len());
    let (mut u, mut du) = (0.0, 1.0);
    out.push(ScatteringSample { r: nodes[0], u, du });
    let mut phase: Option<(f64, f64)> = None;
    for w in nodes.windows(2) {
        let (r, h) = (w[0], w[1] - w[0]);
        let q0 = 0.5 * v.outside_core(r.next_up());
        let qm = 0.5 * v.outside_core(r + 0.5 * h);
        let q1 = 0.5 * v.outside_core(w[1].next_down());
        if phase.is_none() && r >= ell && u > 0.0 && du > 0.0 {
            phase = Some((r - u / du, du.ln()));
        }
        if let Some((hh, g)) = phase.as_mut() {
            let f = |q: f64, x: f64, y: f64| (q * (x - y) * (x - y), q * (x - y));
            let rm = r + 0.5 * h;
            let k1 = f(q0, r, *hh);
            let k2 = f(qm, rm, *hh + 0.5 * h * k1.0);
            let k3 = f(qm, rm, *hh + 0.5 * h * k2.0);
            let k4 = f(q1, w[1], *hh + h * k3.0);
            *hh += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            *g += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            du = g.exp();
            u = du * (w[1] - *hh);
        } else {
            let (k1u, k1d) = (du, q0 * u);
            let (k2u, k2d) = (du + 0.5 * h * k1d, qm * (u + 0.5 * h * k1u));
            let (k3u, k3d) = (du + 0.5 * h * k2d, qm * (u + 0.5 * h * k2u));
            let (k4u, k4d) = (du + h * k3d, q1 * (u + h * k3u));
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        }
        out.push(ScatteringSample { r: w[1], u, du });
    }
    out
}

fn check_inputs(v: &InteractionPotential, r_max: f64) -> Result<()> {
    let core = v.core_radius();
    if !(r_max > core && r_max.is_finite()) {
        return Err(Error::Precondition(format!(
            "r_max = {r_max} must exceed the core radius {core}"
        )));
    }
    if let Some(range) = v.range() {
        if r_max < range {
            return Err(Error::Precondition(format!(
                "r_max = {r_max} lies inside the potential range {range}"
            )));
        }
    }
    Ok(())
}

fn normalise_and_check(mut samples: Vec<ScatteringSample>) -> Result<Vec<ScatteringSample>> {
    for s in &samples[1..] {
        if !(s.u > 0.0 && s.du > 0.0) {
            return Err(Error::UnboundScattering(format!(
                "zero-energy solution turns over at r = {} (u = {:e}, u' = {:e})",
                s.r, s.u, s.du
            )));
        }
    }
    let scale = samples.last().expect("mesh has nodes").du;
    for s in &mut samples {
        s.u /= scale;
        s.du /= scale;
    }
    Ok(samples)
}

/// Solution of the zero-energy equation on `[core, r_max]`, normalised so
/// that `u'(r_max) = 1`. `steps` is the number of steps per feature length.
pub fn integrate_zero_energy(
    v: &InteractionPotential,
    r_max: f64,
    steps: usize,
) -> Result<Vec<ScatteringSample>> {
    check_inputs(v, r_max)?;
    if steps < 100 {
        return Err(Error::Precondition(format!(
            "need at least 100 steps, got {steps}"
        )));
    }
    normalise_and_check(rk4(v, &mesh(v, r_max, steps)))
}

fn h_of(s: &ScatteringSample) -> f64 {
    s.r - s.u / s.du
}

/// Smallest radius (to 1 %) beyond which the tail bracket is narrower than `tol`.
pub fn suggested_r_max(v: &InteractionPotential, tol: f64, quad: QuadTolerance) -> Result<f64> {
    let start = feature_length(v).max(v.range().unwrap_or(0.0));
    let width = |r: f64| tail_integral_with(v, r, quad);
    if width(start)? <= tol {
        return Ok(start);
    }
    let mut hi = 2.0 * start;
    while width(hi)? > tol {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Precondition(
                "tail too heavy for any practical r_max".into(),
            ));
        }
    }
    let mut lo = 0.5 * hi;
    while hi - lo > 0.01 * lo {
        let mid = 0.5 * (lo + hi);
        if width(mid)? > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn thin(samples: &[ScatteringSample]) -> Vec<&ScatteringSample> {
    let stride = samples.len().div_ceil(MAX_OUTPUT_SAMPLES).max(1);
    let mut out: Vec<_> = samples.iter().step_by(stride).collect();
    if out.last().map(|s| s.r) != samples.last().map(|s| s.r) {
        out.push(samples.last().expect("nonempty"));
    }
    out
}

/// Scattering length from a solution, with the tail bracket and the
/// Richardson error from a run at twice the step count.
pub fn scattering_length(
    v: &InteractionPotential,
    r_max: f64,
    steps: usize,
    tolerance: f64,
    quad: QuadTolerance,
) -> Result<ScatteringResult> {
    check_inputs(v, r_max)?;
    if steps < 100 {
        return Err(Error::Precondition(format!(
            "need at least 100 steps, got {steps}"
        )));
    }
    let nodes = mesh(v, r_max, steps);
    let coarse = normalise_and_check(rk4(v, &nodes))?;
    let fine = normalise_and_check(rk4(v, &refine(&nodes)))?;
    let h_coarse = h_of(coarse.last().expect("nonempty"));
    let h_fine = h_of(fine.last().expect("nonempty"));
    let integration_error = (h_fine - h_coarse).abs() / 15.0 + 8.0 * f64::EPSILON * r_max;

    let tail = tail_integral_with(v, r_max, quad)?;
    if tail > tolerance {
        return Err(Error::BracketTooWide {
            width: tail,
            tolerance,
            suggested_r_max: suggested_r_max(v, tolerance, quad)?,
        });
    }
    let bracket = (h_fine, h_fine + tail);
    let a = 0.5 * (bracket.0 + bracket.1);
    if !v.is_nonnegative() && a <= 0.0 {
        return Err(Error::UnboundScattering(format!(
            "attractive well gives nonpositive scattering length {a:e}"
        )));
    }

    let (sr_bound, sr_note) = match spruch_rosenberg(v) {
        Ok(x) if x.is_finite() => (Some(x), None),
        Ok(_) => (
            None,
            Some(
                "half the second moment of v diverges on a hard core; the bound is +infinity"
                    .to_string(),
            ),
        ),
        Err(_) => (
            None,
            Some("second-moment bound needs a nonnegative potential".to_string()),
        ),
    };

    let kept = thin(&fine);
    Ok(ScatteringResult {
        a,
        bracket,
        tail_bound: tail,
        r_tilde: r_max,
        sr_bound,
        sr_note,
        u_samples: kept.iter().map(|s| (s.r, s.u)).collect(),
        h_samples: kept
            .iter()
            .filter(|s| s.du > 0.0)
            .map(|s| (s.r, h_of(s)))
            .collect(),
        meta: IntegratorMeta {
            steps: fine.len() - 1,
            max_local_error: integration_error,
        },
    })
}

/// [`scattering_length`] with the outer radius picked automatically when absent.
pub fn compute_scattering(
    v: &InteractionPotential,
    opts: &ScatteringOptions,
) -> Result<ScatteringResult> {
    let r_max = match opts.r_max {
        Some(r) => r,
        None => {
            let r = suggested_r_max(v, 0.5 * opts.tolerance, opts.quad)?;
            let base = v.range().map_or(r, |range| r.max(range));
            (2.0 * base).max(2.0 * feature_length(v))
        }
    };
    scattering_length(v, r_max, opts.steps, opts.tolerance, opts.quad)
}

/// `½∫_0^∞ v r² dr`, an upper bound on `a` for nonnegative `v`; `+∞` with a hard core.
pub fn spruch_rosenberg(v: &InteractionPotential) -> Result<f64> {
    if !v.is_nonnegative() {
        return Err(Error::Precondition(
            "second-moment bound requires a nonnegative potential".into(),
        ));
    }
    if v.has_hard_core() {
        return Ok(f64::INFINITY);
    }
    tail_integral_with(v, 0.0, QuadTolerance::default())
}

/// `v` cut to zero beyond `r_tilde`, with the bound `a - ã ≤ ½∫_{r_tilde}^∞ v r² dr`.
pub fn truncate_with_certificate(
    v: &InteractionPotential,
    r_tilde: f64,
) -> Result<(InteractionPotential, f64)> {
    if r_tilde < v.core_radius() {
        return Err(Error::Precondition(format!(
            "truncation radius {r_tilde} lies inside the core"
        )));
    }
    let bound = tail_integral_with(v, r_tilde, QuadTolerance::default())?;
    Ok((v.truncated(r_tilde), bound))
}

/// `½∫_{max(r_tilde, a)}^∞ v (r - a)² dr`, a lower estimate of `a - ã`.
/// Reported as a diagnostic only.
pub fn truncation_lower_estimate(v: &InteractionPotential, r_tilde: f64, a: f64) -> Result<f64> {
    let lo = r_tilde.max(a).max(v.core_radius());
    let tol = QuadTolerance::default();
    let f = |r: f64| 0.5 * v.outside_core(r) * (r - a).powi(2);
    match v.range() {
        Some(range) => {
            if range <= lo {
                return Ok(0.0);
            }
            let mut pts = vec![lo];
            pts.extend(v.breakpoints().into_iter().filter(|&p| p > lo && p < range));
            pts.push(range);
            Ok(quad::integrate_piecewise(f, &pts, tol).0)
        }
        None => {
            if let Some(p) = v.tail_exponent() {
                if p <= 3.0 {
                    return Err(Error::InfiniteScatteringLength { exponent: p });
                }
            }
            // r = lo / t maps the tail onto (0, 1]
            let g = |t: f64| {
                let r = lo / t;
                f(r) * lo / (t * t)
            };
            let mut pts = vec![0.0];
            let mut inner: Vec<f64> = v
                .breakpoints()
                .into_iter()
                .filter(|&p| p > lo)
                .map(|p| lo / p)
                .collect();
            inner.sort_by(f64::total_cmp);
            pts.extend(inner);
            pts.push(1.0);
            Ok(quad::integrate_piecewise(g, &pts, tol).0)
        }
    }
}

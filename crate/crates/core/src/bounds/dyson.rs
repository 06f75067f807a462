//! The nearest-neighbour correlation factor `f` built from the zero-energy
//! scattering solution, its integrals `I, J, K`, and the resulting upper
//! bound on the many-body ground state energy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::gp::GpSolution;
use crate::potentials::{tail_integral, InteractionKind, InteractionPotential};
use crate::quad::GL5;
use crate::scattering::{integrate_zero_energy, ScatteringSample};
use crate::{Error, Result};

/// Steps per feature length used for the scattering solution behind `f`.
const STEPS: usize = 2000;
/// Slack on the invariant checks of a constructed `f`.
const SLACK: f64 = 1e-9;

/// `f(r) = (1+ε) u(r)/r` for `r ≤ b` and `1` beyond, with `ε` fixed by
/// continuity at `b`. Zero inside a hard core.
#[derive(Debug, Clone, PartialEq)]
pub struct DysonF {
    pub b: f64,
    pub epsilon: f64,
    /// Scattering length the invariants were checked against.
    pub a: f64,
    core: f64,
    nodes: Vec<ScatteringSample>,
}

/// Serializable summary of a [`DysonF`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DysonFSummary {
    pub b: f64,
    pub epsilon: f64,
    /// `a / (b - a)`, the largest admissible `ε`.
    pub epsilon_bound: f64,
    pub f_samples: Vec<(f64, f64)>,
}

impl DysonF {
    fn locate(&self, r: f64) -> usize {
        let k = self.nodes.partition_point(|s| s.r <= r);
        k.clamp(1, self.nodes.len() - 1) - 1
    }

    /// Cubic Hermite interpolant of `(u, u')` on the scattering mesh.
    fn u(&self, r: f64) -> (f64, f64) {
        let k = self.locate(r);
        let (p, q) = (&self.nodes[k], &self.nodes[k + 1]);
        let h = q.r - p.r;
        let t = (r - p.r) / h;
        let (t2, t3) = (t * t, t * t * t);
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * p.u
            + (t3 - 2.0 * t2 + t) * h * p.du
            + (-2.0 * t3 + 3.0 * t2) * q.u
            + (t3 - t2) * h * q.du;
        let du = (6.0 * t2 - 6.0 * t) / h * p.u
            + (3.0 * t2 - 4.0 * t + 1.0) * p.du
            + (-6.0 * t2 + 6.0 * t) / h * q.u
            + (3.0 * t2 - 2.0 * t) * q.du;
        (u, du)
    }

    pub fn value(&self, r: f64) -> f64 {
        if r > self.b {
            return 1.0;
        }
        if self.core > 0.0 && r <= self.core {
            return 0.0;
        }
        if r < 1e-12 * self.b {
            return (1.0 + self.epsilon) * self.nodes[0].du;
        }
        (1.0 + self.epsilon) * self.u(r).0 / r
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r > self.b || r <= self.core || r < 1e-12 * self.b {
            return 0.0;
        }
        let (u, du) = self.u(r);
        (1.0 + self.epsilon) * (du * r - u) / (r * r)
    }

    /// Mesh points on `[core, b]`, ending exactly at `b`.
    fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .nodes
            .iter()
            .map(|s| s.r)
            .filter(|&r| r < self.b)
            .collect();
        k.push(self.b);
        k
    }

    /// `∫_core^b g(r) 4πr² dr` with five Gauss points per mesh interval.
    fn shell_integral(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.knots()
            .windows(2)
            .map(|w| {
                let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                GL5.iter()
                    .map(|(x, wt)| {
                        let r = c + h * x;
                        wt * h * g(r) * 4.0 * PI * r * r
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn summary(&self, samples: usize) -> DysonFSummary {
        let n = samples.max(2);
        let f_samples = (0..n)
            .map(|i| {
                let r = 1.5 * self.b * i as f64 / (n - 1) as f64;
                (r, self.value(r))
            })
            .collect();
        DysonFSummary {
            b: self.b,
            epsilon: self.epsilon,
            epsilon_bound: self.a / (self.b - self.a),
            f_samples,
        }
    }
}

/// Builds `f` for the potential `v` with scattering length `a` and cut radius `b > a`.
pub fn build_dyson_f(v: &InteractionPotential, a: f64, b: f64) -> Result<DysonF> {
    if !(b > a) || !b.is_finite() {
        return Err(Error::Precondition(format!(
            "cut radius b = {b} must exceed the scattering length a = {a}, i.e. (4π/3)a³‖ρ‖∞ < 1"
        )));
    }
    let core = v.core_radius();
    if b <= core {
        return Err(Error::Precondition(format!(
            "cut radius {b} lies inside the hard core {core}"
        )));
    }
    let r_max = v.range().map_or(b, |range| range.max(b));
    let nodes = integrate_zero_energy(v, r_max, STEPS)?;
    let mut fd = DysonF {
        b,
        epsilon: 0.0,
        a,
        core,
        nodes,
    };
    // continuity at b: (1+ε) u(b) = b
    fd.epsilon = b / fd.u(b).0 - 1.0;

    let eps_max = a / (b - a);
    if fd.epsilon < -SLACK || fd.epsilon > eps_max * (1.0 + SLACK) + SLACK {
        return Err(Error::Domain(format!(
            "ε = {} outside [0, a/(b-a)] = [0, {eps_max}]",
            fd.epsilon
        )));
    }
    let mut prev = 0.0;
    for r in fd.knots() {
        let f = fd.value(r);
        if !(-SLACK..=1.0 + SLACK).contains(&f) || f < prev - SLACK {
            return Err(Error::Domain(format!(
                "f({r}) = {f} breaks 0 ≤ f ≤ 1 or monotonicity"
            )));
        }
        prev = f;
    }
    Ok(fd)
}

/// `f'² + ½ v f² ≥ 0` everywhere, checked at the mesh nodes and three
/// interior points per interval; beyond `b` this reduces to `v ≥ 0`.
pub fn check_soft_core_condition(v: &InteractionPotential, fd: &DysonF) -> bool {
    if v.is_nonnegative() {
        return true;
    }
    let ok = |r: f64| {
        let (f, df) = (fd.value(r), fd.derivative(r));
        df * df + 0.5 * v.outside_core(r) * f * f >= 0.0
    };
    let knots = fd.knots();
    let inside = knots.windows(2).all(|w| {
        [0.0, 0.25, 0.5, 0.75]
            .iter()
            .map(|t| w[0] + t * (w[1] - w[0]))
            .filter(|&r| r > fd.core)
            .all(ok)
    }) && ok(fd.b);
    let outside = match v.kind() {
        InteractionKind::HardCoreWell { r0, .. } => *r0 <= fd.b,
        _ => false,
    };
    inside && outside
}

/// [`check_soft_core_condition`] after building `f`; false when the
/// scattering problem itself has no admissible solution.
pub fn soft_core_certified(v: &InteractionPotential, a: f64, b: f64) -> bool {
    if v.is_nonnegative() {
        return true;
    }
    build_dyson_f(v, a, b).is_ok_and(|fd| check_soft_core_condition(v, &fd))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ingredients {
    /// `∫ (1 - f²)`.
    pub i: f64,
    /// `½ ∫ (2f'² + v f²)`.
    pub j: f64,
    /// `∫ f f'`.
    pub k: f64,
    /// Linear energy per unit `∫g²` of `g = Φ/‖Φ‖∞`.
    pub e_tilde: f64,
    /// `∫ g²`.
    pub g2: f64,
    /// `∫ g⁴`.
    pub g4: f64,
    pub i_bound: f64,
    pub j_bound: f64,
    pub k_bound: f64,
}

impl Ingredients {
    /// Each integral within its analytic estimate up to `rel` relative and `abs` absolute slack.
    pub fn within_estimates(&self, rel: f64, abs: f64) -> bool {
        let fits = |x: f64, bound: f64| x <= bound + rel * bound.abs() + abs;
        fits(self.i, self.i_bound) && fits(self.j, self.j_bound) && fits(self.k, self.k_bound)
    }
}

/// `(I, J, K)` of `f` with the analytic estimates evaluated at `fd.a`.
pub fn correlation_integrals(fd: &DysonF, v: &InteractionPotential) -> Result<(f64, f64, f64)> {
    let core = fd.core;
    let i = 4.0 * PI * core.powi(3) / 3.0 + fd.shell_integral(|r| 1.0 - fd.value(r).powi(2));
    let tail = if fd.b >= v.range().unwrap_or(f64::INFINITY) {
        0.0
    } else {
        tail_integral(v, fd.b)?
    };
    let j = fd.shell_integral(|r| {
        let (f, df) = (fd.value(r), fd.derivative(r));
        0.5 * (2.0 * df * df + v.outside_core(r) * f * f)
    }) + 4.0 * PI * tail;
    let k = fd.shell_integral(|r| fd.value(r) * fd.derivative(r));
    Ok((i, j, k))
}

/// `I, J, K, ẽ` for `f` and the GP shape `g = Φ/‖Φ‖∞`.
pub fn dyson_ingredients(
    fd: &DysonF,
    v: &InteractionPotential,
    sol: &GpSolution,
) -> Result<Ingredients> {
    let (i, j, k) = correlation_integrals(fd, v)?;
    let (a, b, eps) = (fd.a, fd.b, fd.epsilon);
    let sup = sol.max_density;
    Ok(Ingredients {
        i,
        j,
        k,
        e_tilde: sol.parts.linear() / sol.n,
        g2: sol.n / sup,
        g4: sol.int_phi4 / (sup * sup),
        i_bound: 4.0 * PI * (a.powi(3) / 3.0 + a * b * (b - a)),
        j_bound: (1.0 + eps).powi(2) * 4.0 * PI * a,
        k_bound: 4.0 * PI * (1.0 + eps) * a * (b - 0.5 * a),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    /// `(T+P)/(1-a/b)³ + 4πa∫Φ⁴ [1 + (2/c)(a/b) - (2/c)(a/b)² + (1/2c)(a/b)³]/(1-a/b)⁸`.
    pub total: f64,
    pub linear_term: f64,
    pub interaction_term: f64,
    /// `ρ̄ / ‖ρ‖∞`.
    pub c: f64,
    /// `(4π/3) ρ̄ b³ = c`.
    #[serde(with = "crate::float")]
    pub b: f64,
    pub a_over_b: f64,
    /// The same bound with the computed `I, J, K` in place of their estimates;
    /// absent when `∫g² - N I ≤ 0`.
    pub refined: Option<f64>,
    pub ingredients: Option<Ingredients>,
    pub dyson_f: Option<DysonFSummary>,
    /// `upper / E^GP - 1`.
    pub relative_excess: f64,
}

/// `b` and `c` for a GP solution.
pub fn cut_radius(sol: &GpSolution) -> (f64, f64) {
    let c = sol.rho_bar / sol.max_density;
    let b = (3.0 * c / (4.0 * PI * sol.rho_bar)).cbrt();
    (b, c)
}

/// The closed-form bound alone, from `T + P`, `∫Φ⁴`, `c` and `a/b`.
pub fn upper_bound_formula(
    linear: f64,
    int_phi4: f64,
    a: f64,
    c: f64,
    a_over_b: f64,
) -> (f64, f64) {
    let x = a_over_b;
    let lin = linear / (1.0 - x).powi(3);
    let num = 1.0 + 2.0 / c * x - 2.0 / c * x * x + 0.5 / c * x.powi(3);
    (lin, 4.0 * PI * a * int_phi4 * num / (1.0 - x).powi(8))
}

/// Upper bound on the many-body energy from the GP minimiser and the Dyson factor.
pub fn dyson_upper_bound(sol: &GpSolution, v: &InteractionPotential, a: f64) -> Result<UpperBound> {
    if a < 0.0 {
        return Err(Error::Unsupported(format!(
            "negative scattering length {a}"
        )));
    }
    let (b, c) = cut_radius(sol);
    let threshold = 4.0 * PI / 3.0 * a.powi(3) * sol.max_density;
    if threshold >= 1.0 {
        return Err(Error::Precondition(format!(
            "(4π/3)a³‖ρ‖∞ = {threshold} must be below 1"
        )));
    }
    let x = a / b;
    let (linear_term, interaction_term) =
        upper_bound_formula(sol.parts.linear(), sol.int_phi4, a, c, x);
    let total = linear_term + interaction_term;
    let excess = |u: f64| u / sol.energy - 1.0;
    if a == 0.0 {
        return Ok(UpperBound {
            total,
            linear_term,
            interaction_term,
            c,
            b,
            a_over_b: 0.0,
            refined: Some(sol.parts.linear()),
            ingredients: None,
            dyson_f: None,
            relative_excess: excess(total),
        });
    }
    if !v.is_nonnegative() && !v.has_hard_core() {
        return Err(Error::Unsupported(
            "partially negative interactions need a hard core".into(),
        ));
    }
    let fd = build_dyson_f(v, a, b)?;
    if !check_soft_core_condition(v, &fd) {
        return Err(Error::Precondition(
            "f'² + ½vf² < 0 somewhere: the well is too deep for a certified bound".into(),
        ));
    }
    let ing = dyson_ingredients(&fd, v, sol)?;
    let n = sol.n;
    let den = ing.g2 - n * ing.i;
    let refined = (den > 0.0).then(|| {
        n * (ing.e_tilde * ing.g2 / den
            + n * ing.g4 * ing.j / (den * den)
            + 2.0 / 3.0 * n * n * ing.k * ing.k / (den * den))
    });
    Ok(UpperBound {
        total,
        linear_term,
        interaction_term,
        c,
        b,
        a_over_b: x,
        refined,
        ingredients: Some(ing),
        dyson_f: Some(fd.summary(64)),
        relative_excess: excess(total),
    })
}

//! External trap potentials `V(x)` and radial pair interactions `v(r)`.
//!
//! Both kinds of potential are immutable once built and carry the metadata
//! downstream code keys off: symmetry, convexity and homogeneity order for
//! traps; core radius, range and tail exponent for interactions.

use serde::{Deserialize, Serialize};

use crate::interp::MonotoneCubic;
use crate::quad::{self, QuadTolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TrapKind {
    /// `V = r²`, the oscillator whose ground state energy is the unit 3.
    Harmonic,
    /// `V = r^s`.
    Power { s: f64 },
    /// Radial samples joined by a monotone cubic; the last value is held beyond the table.
    Tabulated { table: MonotoneCubic },
    /// `V = 0`, only meaningful inside a Neumann box.
    ZeroInBox,
}

/// External potential, minimum value zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrapKind", into = "TrapKind")]
pub struct TrapPotential {
    kind: TrapKind,
}

impl TryFrom<TrapKind> for TrapPotential {
    type Error = Error;

    fn try_from(kind: TrapKind) -> Result<Self> {
        Self::new(kind)
    }
}

impl From<TrapPotential> for TrapKind {
    fn from(t: TrapPotential) -> Self {
        t.kind
    }
}

impl TrapPotential {
    pub fn new(kind: TrapKind) -> Result<Self> {
        match &kind {
            TrapKind::Power { s } if !(*s > 0.0 && s.is_finite()) => {
                return Err(Error::Domain(format!("power trap needs s > 0, got {s}")));
            }
            TrapKind::Tabulated { table } => {
                if table.x_min() != 0.0 {
                    return Err(Error::Domain("tabulated trap must start at r = 0".into()));
                }
                if table.samples().any(|(_, v)| v < 0.0) {
                    return Err(Error::Domain("trap potential must be nonnegative".into()));
                }
            }
            _ => {}
        }
        let trap = Self { kind };
        if let Some(s) = trap.homogeneous_order() {
            for r in [0.3, 1.0, 2.5] {
                for lambda in [0.5, 2.0] {
                    let lhs = trap.at_radius(lambda * r);
                    let rhs = lambda.powf(s) * trap.at_radius(r);
                    if (lhs - rhs).abs() > 1e-12 * rhs.abs() {
                        return Err(Error::Domain(format!(
                            "trap fails homogeneity of order {s}"
                        )));
                    }
                }
            }
        }
        Ok(trap)
    }

    pub fn harmonic() -> Self {
        Self {
            kind: TrapKind::Harmonic,
        }
    }

    pub fn power(s: f64) -> Result<Self> {
        Self::new(TrapKind::Power { s })
    }

    pub fn zero_in_box() -> Self {
        Self {
            kind: TrapKind::ZeroInBox,
        }
    }

    pub fn kind(&self) -> &TrapKind {
        &self.kind
    }

    pub fn at_radius(&self, r: f64) -> f64 {
        match &self.kind {
            TrapKind::Harmonic => r * r,
            TrapKind::Power { s } => r.powf(*s),
            TrapKind::Tabulated { table } => table.eval(r),
            TrapKind::ZeroInBox => 0.0,
        }
    }

    pub fn evaluate(&self, x: [f64; 3]) -> f64 {
        self.at_radius((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
    }

    /// Spherically symmetric and nondecreasing in `r`, so the minimiser is radial and decreasing.
    ///
    /// The zero potential is excluded: it only lives in a cubic box, whose
    /// minimiser is constant rather than radially decreasing.
    pub fn symmetric(&self) -> bool {
        match &self.kind {
            TrapKind::Harmonic | TrapKind::Power { .. } => true,
            TrapKind::Tabulated { table } => table.is_nondecreasing(),
            TrapKind::ZeroInBox => false,
        }
    }

    pub fn convex(&self) -> bool {
        match &self.kind {
            TrapKind::Harmonic | TrapKind::ZeroInBox => true,
            TrapKind::Power { s } => *s >= 1.0,
            TrapKind::Tabulated { table } => table.is_nondecreasing() && table.is_convex(),
        }
    }

    pub fn homogeneous_order(&self) -> Option<f64> {
        match &self.kind {
            TrapKind::Harmonic => Some(2.0),
            TrapKind::Power { s } => Some(*s),
            _ => None,
        }
    }

    /// `inf_{|x| ≥ r} V(x)`.
    pub fn inf_outside(&self, r: f64) -> f64 {
        match &self.kind {
            TrapKind::Tabulated { table } => {
                let tail = table.last_value();
                table
                    .samples()
                    .filter(|&(x, _)| x >= r)
                    .map(|(_, v)| v)
                    .fold(tail.min(table.eval(r)), f64::min)
            }
            _ => self.at_radius(r),
        }
    }

    /// Natural length of the linear problem, `ℓ` with `V(ℓ) = 1/ℓ²`.
    pub(crate) fn length_scale(&self) -> f64 {
        match &self.kind {
            TrapKind::ZeroInBox => f64::INFINITY,
            _ => {
                let (mut lo, mut hi) = (1e-3, 1e3);
                if self.at_radius(hi) * hi * hi < 1.0 {
                    return hi;
                }
                for _ in 0..200 {
                    let mid = (lo * hi).sqrt();
                    if self.at_radius(mid) * mid * mid < 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }
}

/// Magnitude `|w(r)|` of the attractive well outside a hard core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WellProfile {
    Constant { depth: f64 },
    Tabulated { table: MonotoneCubic },
}

impl WellProfile {
    fn depth_at(&self, r: f64) -> f64 {
        match self {
            WellProfile::Constant { depth } => depth.abs(),
            WellProfile::Tabulated { table } => table.eval(r).abs(),
        }
    }

    fn rescaled(&self, s: f64) -> Self {
        match self {
            WellProfile::Constant { depth } => WellProfile::Constant {
                depth: depth * s * s,
            },
            WellProfile::Tabulated { table } => WellProfile::Tabulated {
                table: table.rescaled(s, s * s),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InteractionKind {
    /// Infinite inside `r < d`, zero outside.
    HardSphere { d: f64 },
    /// `V0` for `r ≤ R0`, zero outside.
    SquareBarrier { v0: f64, r0: f64 },
    /// Hard core `r < d`, attractive well `-|w(r)|` on `(d, R0]`, zero outside.
    HardCoreWell { d: f64, well: WellProfile, r0: f64 },
    /// `strength · r^-exponent` for `r ≥ r_min`, zero on `(core, r_min)`.
    PowerLaw {
        strength: f64,
        exponent: f64,
        r_min: f64,
        #[serde(default)]
        core: Option<f64>,
    },
    /// Monotone cubic through samples, continued by `v_last · (r_last / r)^exponent`.
    Tabulated {
        table: MonotoneCubic,
        exponent: f64,
        #[serde(default)]
        core: Option<f64>,
    },
}

/// Radial pair potential, optionally truncated to zero beyond `cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InteractionSpec", into = "InteractionSpec")]
pub struct InteractionPotential {
    kind: InteractionKind,
    cutoff: Option<f64>,
}

/// Config form of [`InteractionPotential`]: the kind's fields plus an optional `cutoff`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum InteractionSpec {
    HardSphere {
        d: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    SquareBarrier {
        v0: f64,
        r0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    HardCoreWell {
        d: f64,
        well: WellProfile,
        r0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    PowerLaw {
        strength: f64,
        exponent: f64,
        r_min: f64,
        #[serde(default)]
        core: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    Tabulated {
        table: MonotoneCubic,
        exponent: f64,
        #[serde(default)]
        core: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
}

impl TryFrom<InteractionSpec> for InteractionPotential {
    type Error = Error;

    fn try_from(s: InteractionSpec) -> Result<Self> {
        use InteractionSpec as S;
        let (kind, cutoff) = match s {
            S::HardSphere { d, cutoff } => (InteractionKind::HardSphere { d }, cutoff),
            S::SquareBarrier { v0, r0, cutoff } => {
                (InteractionKind::SquareBarrier { v0, r0 }, cutoff)
            }
            S::HardCoreWell {
                d,
                well,
                r0,
                cutoff,
            } => (InteractionKind::HardCoreWell { d, well, r0 }, cutoff),
            S::PowerLaw {
                strength,
                exponent,
                r_min,
                core,
                cutoff,
            } => (
                InteractionKind::PowerLaw {
                    strength,
                    exponent,
                    r_min,
                    core,
                },
                cutoff,
            ),
            S::Tabulated {
                table,
                exponent,
                core,
                cutoff,
            } => (
                InteractionKind::Tabulated {
                    table,
                    exponent,
                    core,
                },
                cutoff,
            ),
        };
        if let Some(c) = cutoff {
            if !(c > 0.0) {
                return Err(Error::Domain(format!("cutoff must be positive, got {c}")));
            }
        }
        let v = match kind {
            // the free potential is spelled as an empty barrier
            InteractionKind::SquareBarrier { v0, r0 } if v0 == 0.0 && r0 == 0.0 => {
                InteractionPotential::zero()
            }
            k => InteractionPotential::new(k)?,
        };
        Ok(match cutoff {
            Some(c) => v.truncated(c),
            None => v,
        })
    }
}

impl From<InteractionPotential> for InteractionSpec {
    fn from(v: InteractionPotential) -> Self {
        let cutoff = v.cutoff;
        match v.kind {
            InteractionKind::HardSphere { d } => Self::HardSphere { d, cutoff },
            InteractionKind::SquareBarrier { v0, r0 } => Self::SquareBarrier { v0, r0, cutoff },
            InteractionKind::HardCoreWell { d, well, r0 } => Self::HardCoreWell {
                d,
                well,
                r0,
                cutoff,
            },
            InteractionKind::PowerLaw {
                strength,
                exponent,
                r_min,
                core,
            } => Self::PowerLaw {
                strength,
                exponent,
                r_min,
                core,
                cutoff,
            },
            InteractionKind::Tabulated {
                table,
                exponent,
                core,
            } => Self::Tabulated {
                table,
                exponent,
                core,
                cutoff,
            },
        }
    }
}

impl InteractionPotential {
    pub fn new(kind: InteractionKind) -> Result<Self> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {x}"
                )))
            }
        };
        let nonnegative = |name: &str, x: f64| {
            if x >= 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{name} must be nonnegative and finite, got {x}"
                )))
            }
        };
        match &kind {
            InteractionKind::HardSphere { d } => positive("core diameter", *d)?,
            InteractionKind::SquareBarrier { v0, r0 } => {
                nonnegative("barrier height", *v0)?;
                nonnegative("barrier radius", *r0)?;
            }
            InteractionKind::HardCoreWell { d, well, r0 } => {
                positive("core diameter", *d)?;
                if !(r0 >= d) {
                    return Err(Error::Domain("well edge must lie outside the core".into()));
                }
                if let WellProfile::Constant { depth } = well {
                    nonnegative("well depth", depth.abs())?;
                }
            }
            InteractionKind::PowerLaw {
                strength,
                exponent,
                r_min,
                core,
            } => {
                nonnegative("strength", *strength)?;
                positive("exponent", *exponent)?;
                nonnegative("r_min", *r_min)?;
                if let Some(c) = core {
                    positive("core diameter", *c)?;
                }
                if *r_min <= core.unwrap_or(0.0) && *strength > 0.0 {
                    return Err(Error::Domain(
                        "power law must start strictly outside the core".into(),
                    ));
                }
            }
            InteractionKind::Tabulated {
                table,
                exponent,
                core,
            } => {
                positive("tail exponent", *exponent)?;
                if table.samples().any(|(_, v)| v < 0.0) {
                    return Err(Error::Domain(
                        "tabulated interaction must be nonnegative".into(),
                    ));
                }
                if let Some(c) = core {
                    positive("core diameter", *c)?;
                }
            }
        }
        Ok(Self { kind, cutoff: None })
    }

    pub fn hard_sphere(d: f64) -> Result<Self> {
        Self::new(InteractionKind::HardSphere { d })
    }

    pub fn square_barrier(v0: f64, r0: f64) -> Result<Self> {
        Self::new(InteractionKind::SquareBarrier { v0, r0 })
    }

    /// `v ≡ 0`.
    pub fn zero() -> Self {
        Self {
            kind: InteractionKind::SquareBarrier { v0: 0.0, r0: 0.0 },
            cutoff: None,
        }
    }

    pub fn hard_core_well(d: f64, depth: f64, r0: f64) -> Result<Self> {
        Self::new(InteractionKind::HardCoreWell {
            d,
            well: WellProfile::Constant { depth },
            r0,
        })
    }

    pub fn power_law(strength: f64, exponent: f64, r_min: f64, core: Option<f64>) -> Result<Self> {
        Self::new(InteractionKind::PowerLaw {
            strength,
            exponent,
            r_min,
            core,
        })
    }

    pub fn kind(&self) -> &InteractionKind {
        &self.kind
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    /// The same potential multiplied by `Θ(r_cut - r)`.
    pub fn truncated(&self, r_cut: f64) -> Self {
        let cutoff = Some(self.cutoff.map_or(r_cut, |c| c.min(r_cut)));
        Self {
            kind: self.kind.clone(),
            cutoff,
        }
    }

    pub fn core_radius(&self) -> f64 {
        match &self.kind {
            InteractionKind::HardSphere { d } | InteractionKind::HardCoreWell { d, .. } => *d,
            InteractionKind::PowerLaw { core, .. } | InteractionKind::Tabulated { core, .. } => {
                core.unwrap_or(0.0)
            }
            InteractionKind::SquareBarrier { .. } => 0.0,
        }
    }

    pub fn has_hard_core(&self) -> bool {
        self.core_radius() > 0.0
    }

    /// `v(r)`, with `+∞` inside the hard core.
    pub fn evaluate(&self, r: f64) -> f64 {
        if r < self.core_radius() {
            return f64::INFINITY;
        }
        self.outside_core(r)
    }

    /// `v(r)` for `r` at or beyond the core edge.
    pub(crate) fn outside_core(&self, r: f64) -> f64 {
        if let Some(c) = self.cutoff {
            if r > c {
                return 0.0;
            }
        }
        match &self.kind {
            InteractionKind::HardSphere { .. } => 0.0,
            InteractionKind::SquareBarrier { v0, r0 } => {
                if r <= *r0 {
                    *v0
                } else {
                    0.0
                }
            }
            InteractionKind::HardCoreWell { well, r0, .. } => {
                if r <= *r0 {
                    -well.depth_at(r)
                } else {
                    0.0
                }
            }
            InteractionKind::PowerLaw {
                strength,
                exponent,
                r_min,
                ..
            } => {
                if r >= *r_min {
                    strength * r.powf(-exponent)
                } else {
                    0.0
                }
            }
            InteractionKind::Tabulated {
                table, exponent, ..
            } => {
                if r <= table.x_max() {
                    table.eval(r)
                } else {
                    table.last_value() * (table.x_max() / r).powf(*exponent)
                }
            }
        }
    }

    /// Radius beyond which `v` vanishes identically, if any.
    pub fn range(&self) -> Option<f64> {
        let natural = match &self.kind {
            InteractionKind::HardSphere { d } => Some(*d),
            InteractionKind::SquareBarrier { v0, r0 } => Some(if *v0 == 0.0 { 0.0 } else { *r0 }),
            InteractionKind::HardCoreWell { r0, .. } => Some(*r0),
            InteractionKind::PowerLaw { strength, core, .. } if *strength == 0.0 => {
                Some(core.unwrap_or(0.0))
            }
            InteractionKind::PowerLaw { .. } => None,
            InteractionKind::Tabulated { table, .. } if table.last_value() == 0.0 => {
                Some(table.x_max())
            }
            InteractionKind::Tabulated { .. } => None,
        };
        match (natural, self.cutoff) {
            (Some(r), Some(c)) => Some(r.min(c).max(self.core_radius())),
            (None, Some(c)) => Some(c.max(self.core_radius())),
            (r, None) => r,
        }
    }

    /// Declared power-law decay exponent of an infinite tail.
    pub fn tail_exponent(&self) -> Option<f64> {
        if self.range().is_some() {
            return None;
        }
        match &self.kind {
            InteractionKind::PowerLaw { exponent, .. }
            | InteractionKind::Tabulated { exponent, .. } => Some(*exponent),
            _ => None,
        }
    }

    /// Radii where `v` (or its derivative) jumps, strictly outside the core.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match &self.kind {
            InteractionKind::HardSphere { .. } => vec![],
            InteractionKind::SquareBarrier { r0, .. }
            | InteractionKind::HardCoreWell { r0, .. } => vec![*r0],
            InteractionKind::PowerLaw { r_min, .. } => vec![*r_min],
            InteractionKind::Tabulated { table, .. } => vec![table.x_min(), table.x_max()],
        };
        if let Some(c) = self.cutoff {
            pts.push(c);
        }
        let core = self.core_radius();
        pts.retain(|&p| p > core && p.is_finite());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            InteractionKind::HardCoreWell { well, .. } => match well {
                WellProfile::Constant { depth } => *depth == 0.0,
                WellProfile::Tabulated { table } => table.samples().all(|(_, w)| w == 0.0),
            },
            _ => true,
        }
    }

    /// `s² v(s r)`.
    fn dilated(&self, s: f64) -> Self {
        let kind = match &self.kind {
            InteractionKind::HardSphere { d } => InteractionKind::HardSphere { d: d / s },
            InteractionKind::SquareBarrier { v0, r0 } => InteractionKind::SquareBarrier {
                v0: v0 * s * s,
                r0: r0 / s,
            },
            InteractionKind::HardCoreWell { d, well, r0 } => InteractionKind::HardCoreWell {
                d: d / s,
                well: well.rescaled(s),
                r0: r0 / s,
            },
            InteractionKind::PowerLaw {
                strength,
                exponent,
                r_min,
                core,
            } => InteractionKind::PowerLaw {
                strength: strength * s.powf(2.0 - exponent),
                exponent: *exponent,
                r_min: r_min / s,
                core: core.map(|c| c / s),
            },
            InteractionKind::Tabulated {
                table,
                exponent,
                core,
            } => InteractionKind::Tabulated {
                table: table.rescaled(s, s * s),
                exponent: *exponent,
                core: core.map(|c| c / s),
            },
        };
        Self {
            kind,
            cutoff: self.cutoff.map(|c| c / s),
        }
    }
}

/// The member of the one-parameter family `(a1/a)² v1(a1 r / a)` whose
/// scattering length is `a`, given that `v1` has scattering length `a1`.
pub fn scale_interaction(
    v1: &InteractionPotential,
    a1: f64,
    a: f64,
) -> Result<InteractionPotential> {
    if !(a1 > 0.0 && a > 0.0 && a1.is_finite() && a.is_finite()) {
        return Err(Error::Domain(format!(
            "scattering lengths must be positive, got a1 = {a1}, a = {a}"
        )));
    }
    if a == a1 {
        return Ok(v1.clone());
    }
    Ok(v1.dilated(a1 / a))
}

/// `½ ∫_{r_tilde}^∞ v(r) r² dr` at the default quadrature tolerance.
pub fn tail_integral(v: &InteractionPotential, r_tilde: f64) -> Result<f64> {
    tail_integral_with(v, r_tilde, QuadTolerance::default())
}

pub fn tail_integral_with(
    v: &InteractionPotential,
    r_tilde: f64,
    tol: QuadTolerance,
) -> Result<f64> {
    let core = v.core_radius();
    if r_tilde < core {
        return Err(Error::Precondition(format!(
            "tail integral must start outside the hard core ({r_tilde} < {core})"
        )));
    }
    let upper = v.cutoff.unwrap_or(f64::INFINITY);
    if r_tilde >= upper {
        return Ok(0.0);
    }
    let integrand = |r: f64| 0.5 * v.outside_core(r) * r * r;
    let quad_over = |lo: f64, hi: f64| -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mut pts = vec![lo];
        pts.extend(v.breakpoints().into_iter().filter(|&p| p > lo && p < hi));
        pts.push(hi);
        quad::integrate_piecewise(integrand, &pts, tol).0
    };
    // ½ λ ∫_lo^hi r^{2-p} dr
    let power_piece = |lambda: f64, p: f64, lo: f64, hi: f64| -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        if hi.is_infinite() {
            if p <= 3.0 {
                return Err(Error::InfiniteScatteringLength { exponent: p });
            }
            return Ok(0.5 * lambda * lo.powf(3.0 - p) / (p - 3.0));
        }
        if (p - 3.0).abs() < 1e-14 {
            return Ok(0.5 * lambda * (hi / lo).ln());
        }
        Ok(0.5 * lambda * (lo.powf(3.0 - p) - hi.powf(3.0 - p)) / (p - 3.0))
    };
    match &v.kind {
        InteractionKind::PowerLaw {
            strength,
            exponent,
            r_min,
            ..
        } => power_piece(*strength, *exponent, r_tilde.max(*r_min), upper),
        InteractionKind::Tabulated {
            table, exponent, ..
        } => {
            let x_max = table.x_max();
            let inner = quad_over(r_tilde, x_max.min(upper));
            let lambda = table.last_value() * x_max.powf(*exponent);
            let tail = if lambda == 0.0 {
                0.0
            } else {
                power_piece(lambda, *exponent, r_tilde.max(x_max), upper)?
            };
            Ok(inner + tail)
        }
        _ => {
            let range = v.range().unwrap_or(upper);
            Ok(quad_over(r_tilde, range.min(upper)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hard_sphere_scaling_maps_diameter() {
        let v1 = InteractionPotential::hard_sphere(1.0).unwrap();
        let v = scale_interaction(&v1, 1.0, 0.5).unwrap();
        assert_eq!(v.kind(), &InteractionKind::HardSphere { d: 0.5 });
    }

    #[test]
    fn interaction_config_round_trip() {
        let v: InteractionPotential = toml::from_str("kind = \"hard-sphere\"\nd = 1.0").unwrap();
        assert_eq!(v, InteractionPotential::hard_sphere(1.0).unwrap());
        let cut: InteractionPotential =
            toml::from_str("kind = \"square-barrier\"\nv0 = 2.0\nr0 = 1.0\ncutoff = 0.5").unwrap();
        assert_eq!(cut.cutoff(), Some(0.5));
        let back: InteractionPotential = toml::from_str(&toml::to_string(&cut).unwrap()).unwrap();
        assert_eq!(back, cut);
        assert!(toml::from_str::<InteractionPotential>(
            "kind = \"hard-sphere\"\nd = 1.0\nradius = 2.0"
        )
        .is_err());
        assert!(
            toml::from_str::<InteractionPotential>("kind = \"hard-sphere\"\nd = -1.0").is_err()
        );
        assert!(toml::from_str::<InteractionPotential>(
            "kind = \"hard-sphere\"\nd = 1.0\ncutoff = 0.0"
        )
        .is_err());
    }

    #[test]
    fn identity_scaling() {
        let v1 = InteractionPotential::power_law(4.0, 5.0, 1.0, Some(0.5)).unwrap();
        assert_eq!(scale_interaction(&v1, 0.7, 0.7).unwrap(), v1);
    }

    #[test]
    fn barrier_scaling_by_ten() {
        let v1 = InteractionPotential::square_barrier(2.0, 1.0).unwrap();
        let v = scale_interaction(&v1, 0.2384, 0.02384).unwrap();
        match v.kind() {
            InteractionKind::SquareBarrier { v0, r0 } => {
                assert!((v0 - 200.0).abs() < 1e-9);
                assert!((r0 - 0.1).abs() < 1e-12);
            }
            k => panic!("unexpected {k:?}"),
        }
    }

    #[test]
    fn scaling_rejects_nonpositive_lengths() {
        let v1 = InteractionPotential::hard_sphere(1.0).unwrap();
        assert!(matches!(
            scale_interaction(&v1, 1.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            scale_interaction(&v1, -1.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn tail_integral_examples() {
        let barrier = InteractionPotential::square_barrier(2.0, 1.0).unwrap();
        assert_eq!(tail_integral(&barrier, 1.0).unwrap(), 0.0);
        assert!((tail_integral(&barrier, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let inv4 = InteractionPotential::power_law(1.0, 4.0, 1.0, None).unwrap();
        assert!((tail_integral(&inv4, 2.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn slow_tails_have_infinite_scattering_length() {
        let v = InteractionPotential::power_law(1.0, 3.0, 1.0, None).unwrap();
        assert!(matches!(
            tail_integral(&v, 2.0),
            Err(Error::InfiniteScatteringLength { .. })
        ));
        // truncation makes it finite again
        assert!((tail_integral(&v.truncated(4.0), 2.0).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn tabulated_tail_is_analytic_continuation() {
        let samples: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let r = 1.0 + 0.1 * i as f64;
                (r, r.powi(-5))
            })
            .collect();
        let table = MonotoneCubic::new(samples).unwrap();
        let v = InteractionPotential::new(InteractionKind::Tabulated {
            table,
            exponent: 5.0,
            core: Some(0.5),
        })
        .unwrap();
        // beyond the last sample the tail is exactly r^-5
        assert!((v.evaluate(7.0) - 7f64.powi(-5)).abs() < 1e-18);
        let exact = 0.5 * 3f64.powi(-2) / 2.0;
        assert!((tail_integral(&v, 3.0).unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn core_and_infinity() {
        let v = InteractionPotential::hard_core_well(1.0, 0.01, 1.5).unwrap();
        assert!(v.evaluate(0.5).is_infinite());
        assert_eq!(v.evaluate(1.2), -0.01);
        assert_eq!(v.evaluate(2.0), 0.0);
        assert!(!v.is_nonnegative());
        assert!(tail_integral(&v, 0.5).is_err());
    }

    #[test]
    fn trap_metadata() {
        let h = TrapPotential::harmonic();
        assert!(h.symmetric() && h.convex());
        assert_eq!(h.homogeneous_order(), Some(2.0));
        let z = TrapPotential::zero_in_box();
        assert!(!z.symmetric());
        assert!(TrapPotential::power(0.0).is_err());
        let quartic = TrapPotential::power(4.0).unwrap();
        assert!((quartic.evaluate([1.0, 1.0, 0.0]) - 4.0).abs() < 1e-14);
        assert!((h.length_scale() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tabulated_trap_must_be_nonnegative() {
        let t = MonotoneCubic::new(vec![(0.0, -1.0), (1.0, 1.0)]).unwrap();
        assert!(TrapPotential::new(TrapKind::Tabulated { table: t }).is_err());
    }

    fn sample_interactions() -> Vec<InteractionPotential> {
        vec![
            InteractionPotential::hard_sphere(0.8).unwrap(),
            InteractionPotential::square_barrier(2.0, 1.0).unwrap(),
            InteractionPotential::hard_core_well(1.0, 0.3, 1.6).unwrap(),
            InteractionPotential::power_law(4.0, 5.0, 1.0, Some(0.5)).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn scaling_round_trip(a1 in 0.05f64..5.0, a in 0.01f64..10.0) {
            for v1 in sample_interactions() {
                let there = scale_interaction(&v1, a1, a).unwrap();
                let back = scale_interaction(&there, a, a1).unwrap();
                for k in 1..200 {
                    let r = 0.013 * k as f64;
                    let (x, y) = (v1.evaluate(r), back.evaluate(r));
                    if x.is_infinite() || y.is_infinite() {
                        // only the core edge itself can round differently
                        continue;
                    }
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300), "{x} vs {y} at {r}");
                }
            }
        }

        #[test]
        fn tail_integral_nonincreasing(r1 in 0.5f64..20.0, dr in 0.0f64..20.0) {
            let v = InteractionPotential::power_law(4.0, 5.0, 1.0, Some(0.5)).unwrap();
            let b = InteractionPotential::square_barrier(3.0, 2.0).unwrap();
            for p in [v, b] {
                prop_assert!(tail_integral(&p, r1 + dr).unwrap() <= tail_integral(&p, r1).unwrap() + 1e-15);
            }
        }

        #[test]
        fn power_traps_are_homogeneous(s in 0.2f64..6.0, r in 0.01f64..5.0) {
            let t = TrapPotential::power(s).unwrap();
            for lambda in [0.5, 2.0] {
                let lhs = t.at_radius(lambda * r);
                let rhs = lambda.powf(s) * t.at_radius(r);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            }
        }

        #[test]
        fn trap_infimum_outside_is_nondecreasing(r in 0.0f64..5.0, dr in 0.0f64..5.0) {
            let t = TrapPotential::new(TrapKind::Tabulated {
                table: MonotoneCubic::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.5), (3.0, 5.0)]).unwrap(),
            }).unwrap();
            for trap in [t, TrapPotential::harmonic(), TrapPotential::power(3.0).unwrap()] {
                prop_assert!(trap.inf_outside(r + dr) >= trap.inf_outside(r) - 1e-15);
            }
        }
    }
}

//! Discrete GP-type functionals and their minimisation on the sphere
//! `⟨φ, Mφ⟩ = N` by preconditioned nonlinear conjugate gradients in the
//! mass inner product.

use std::f64::consts::PI;

use super::ops::Tridiag;
use super::{Discretization, EnergyParts, Nonlinearity, SolverOptions};
use crate::{Error, Result};

/// Smallest amplitude kept on a free node.
pub(crate) const FLOOR: f64 = 1e-300;

pub(crate) struct Functional<'a, D: Discretization> {
    pub(crate) mesh: &'a D,
    pub(crate) trap: Tridiag,
    pub(crate) nl: Nonlinearity,
    /// Nodal trap values, only used to shape the preconditioner.
    nodal_trap: Vec<f64>,
}

/// `‖φ‖_p²` with lumped weights, evaluated via `q = φ / max φ` to avoid overflow.
struct SmoothedSup {
    max: f64,
    sum: f64,
    p: f64,
}

impl SmoothedSup {
    fn new(w: &[f64], phi: &[f64], p: f64) -> Self {
        let max = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let sum = if max == 0.0 {
            0.0
        } else {
            w.iter()
                .zip(phi)
                .map(|(w, x)| w * (x.abs() / max).powf(p))
                .sum()
        };
        Self { max, sum, p }
    }

    fn squared(&self) -> f64 {
        if self.max == 0.0 {
            return 0.0;
        }
        self.max * self.max * self.sum.powf(2.0 / self.p)
    }

    /// `∂‖φ‖_p²/∂φ_i / (2 w_i)`.
    fn half_gradient(&self, x: f64) -> f64 {
        if self.max == 0.0 {
            return 0.0;
        }
        let q = x.abs() / self.max;
        self.max * self.sum.powf(2.0 / self.p - 1.0) * q.powf(self.p - 1.0) * x.signum()
    }
}

pub(crate) fn sup_squared(w: &[f64], phi: &[f64]) -> f64 {
    phi.iter()
        .zip(w)
        .filter(|(_, w)| **w > 0.0)
        .fold(0.0f64, |m, (x, _)| m.max(x * x))
}

impl<'a, D: Discretization> Functional<'a, D> {
    pub(crate) fn new(mesh: &'a D, trap: Tridiag, nl: Nonlinearity) -> Self {
        let nodal_trap = trap
            .diag
            .iter()
            .zip(&mesh.mass().diag)
            .map(|(p, m)| if *m == 0.0 { 0.0 } else { p / m })
            .collect();
        Self {
            mesh,
            trap,
            nl,
            nodal_trap,
        }
    }

    pub(crate) fn norm(&self, phi: &[f64]) -> f64 {
        self.mesh.mass().form(phi, phi)
    }

    pub(crate) fn energy(&self, phi: &[f64]) -> EnergyParts {
        let kinetic = self.mesh.kinetic(phi);
        let trap = self.trap.form(phi, phi);
        let interaction = match self.nl {
            Nonlinearity::Contact { a } => 4.0 * PI * a * self.mesh.quartic(phi),
            Nonlinearity::SupNorm { a, p } => {
                let w = self.mesh.lumped();
                let s = if p.is_finite() {
                    SmoothedSup::new(w, phi, p).squared()
                } else {
                    sup_squared(w, phi)
                };
                8.0 * PI * a * s * self.norm(phi)
            }
        };
        EnergyParts {
            kinetic,
            trap,
            interaction,
        }
    }

    /// Euclidean gradient with respect to the node values.
    pub(crate) fn gradient(&self, phi: &[f64], out: &mut [f64]) {
        let len = phi.len();
        let mut tmp = vec![0.0; len];
        self.mesh.apply_kinetic(phi, out);
        self.trap.apply(phi, &mut tmp);
        for i in 0..len {
            out[i] = 2.0 * (out[i] + tmp[i]);
        }
        match self.nl {
            Nonlinearity::Contact { a } => {
                self.mesh.apply_quartic(phi, &mut tmp);
                for i in 0..len {
                    out[i] += 16.0 * PI * a * tmp[i];
                }
            }
            Nonlinearity::SupNorm { a, p } => {
                assert!(p.is_finite(), "the sup norm is not differentiable");
                let w = self.mesh.lumped();
                let sup = SmoothedSup::new(w, phi, p);
                let (s, n) = (sup.squared(), self.norm(phi));
                self.mesh.mass().apply(phi, &mut tmp);
                for i in 0..len {
                    out[i] += 8.0
                        * PI
                        * a
                        * (2.0 * s * tmp[i] + 2.0 * n * w[i] * sup.half_gradient(phi[i]));
                }
            }
        }
        for (o, w) in out.iter_mut().zip(self.mesh.lumped()) {
            if *w == 0.0 {
                *o = 0.0;
            }
        }
    }

    /// `Hφ = M⁻¹ ∇E / 2`.
    pub(crate) fn apply_h(&self, phi: &[f64], out: &mut [f64]) {
        let mut g = vec![0.0; phi.len()];
        self.gradient(phi, &mut g);
        g.iter_mut().for_each(|x| *x *= 0.5);
        self.mesh.mass().solve(&g, out);
    }

    fn local_shift(&self, phi: &[f64], c: f64) -> Vec<f64> {
        let g = 8.0 * PI * self.nl.a();
        match self.nl {
            Nonlinearity::Contact { .. } => phi
                .iter()
                .zip(&self.nodal_trap)
                .map(|(x, v)| v + g * x * x + c)
                .collect(),
            Nonlinearity::SupNorm { p, .. } => {
                let s = SmoothedSup::new(self.mesh.lumped(), phi, p).squared();
                self.nodal_trap.iter().map(|v| v + g * s + c).collect()
            }
        }
    }
}

pub(crate) struct Minimum {
    pub(crate) phi: Vec<f64>,
    pub(crate) parts: EnergyParts,
    pub(crate) mu: f64,
    pub(crate) residual: f64,
    pub(crate) iterations: usize,
    pub(crate) floor_hit: bool,
}

/// State at one iterate.
struct Point {
    phi: Vec<f64>,
    /// `Hφ - μφ`, `M`-orthogonal to `φ`.
    resid: Vec<f64>,
    mu: f64,
    parts: EnergyParts,
}

fn point<D: Discretization>(f: &Functional<'_, D>, phi: Vec<f64>, n: f64) -> Point {
    let mut h = vec![0.0; phi.len()];
    f.apply_h(&phi, &mut h);
    let mu = f.mesh.mass().form(&phi, &h) / n;
    let resid = h.iter().zip(&phi).map(|(h, x)| h - mu * x).collect();
    let parts = f.energy(&phi);
    Point {
        phi,
        resid,
        mu,
        parts,
    }
}

fn retract<D: Discretization>(
    f: &Functional<'_, D>,
    phi: &[f64],
    d: &[f64],
    t: f64,
    n: f64,
) -> Vec<f64> {
    let mut psi: Vec<f64> = phi.iter().zip(d).map(|(x, d)| x + t * d).collect();
    let s = (n / f.norm(&psi)).sqrt();
    psi.iter_mut().for_each(|x| *x *= s);
    psi
}

/// `d/dt E(retract(φ, d, t))`.
fn slope<D: Discretization>(f: &Functional<'_, D>, phi: &[f64], d: &[f64], t: f64, n: f64) -> f64 {
    let m = f.mesh.mass();
    let psi: Vec<f64> = phi.iter().zip(d).map(|(x, d)| x + t * d).collect();
    let nn = m.form(&psi, &psi);
    let s = (n / nn).sqrt();
    let pd = m.form(&psi, d) / nn;
    let moved: Vec<f64> = psi.iter().map(|x| x * s).collect();
    let mut g = vec![0.0; psi.len()];
    f.gradient(&moved, &mut g);
    // dφ/dt = s (d - ψ ⟨ψ,d⟩ / ⟨ψ,ψ⟩)
    g.iter()
        .zip(d.iter().zip(&psi))
        .map(|(g, (d, p))| g * s * (d - p * pd))
        .sum()
}

fn enforce_positive(w: &[f64], phi: &mut [f64]) -> (bool, bool) {
    let (mut flipped, mut floored) = (false, false);
    for (x, w) in phi.iter_mut().zip(w) {
        if *w == 0.0 {
            *x = 0.0;
            continue;
        }
        if *x < 0.0 {
            *x = -*x;
            flipped = true;
        }
        if *x < FLOOR {
            *x = FLOOR;
            floored = true;
        }
    }
    (flipped, floored)
}

/// Minimises `f` over `⟨φ, Mφ⟩ = n` starting from `init`.
pub(crate) fn minimize<D: Discretization>(
    f: &Functional<'_, D>,
    n: f64,
    init: Vec<f64>,
    opts: &SolverOptions,
) -> Result<Minimum> {
    let lumped = f.mesh.lumped();
    let mass = f.mesh.mass();
    let len = init.len();
    let mut phi = init;
    let mut floor_hit = enforce_positive(lumped, &mut phi).1;
    let s = (n / f.norm(&phi)).sqrt();
    phi.iter_mut().for_each(|x| *x *= s);

    let mut cur = point(f, phi, n);
    let mut dir = vec![0.0; len];
    let mut prev_pr = vec![0.0; len];
    let mut prev_rz = 0.0;
    let mut step = 1.0;
    let resid_norm = |p: &Point| (mass.form(&p.resid, &p.resid) / n).sqrt();

    for iter in 0..opts.max_iter {
        let res = resid_norm(&cur);
        if res <= opts.tolerance * cur.mu.abs().max(1.0) {
            return Ok(Minimum {
                parts: cur.parts,
                mu: cur.mu,
                residual: res,
                iterations: iter,
                floor_hit,
                phi: cur.phi,
            });
        }

        // preconditioned residual, projected M-orthogonally to φ
        let c = (cur.parts.kinetic / n).max(1.0);
        let shift = f.local_shift(&cur.phi, c);
        let mut pr = vec![0.0; len];
        let mut pphi = vec![0.0; len];
        f.mesh.precondition(&shift, &cur.resid, &mut pr);
        f.mesh.precondition(&shift, &cur.phi, &mut pphi);
        let beta_proj = mass.form(&cur.phi, &pr) / mass.form(&cur.phi, &pphi);
        for i in 0..len {
            pr[i] -= beta_proj * pphi[i];
        }

        // Polak-Ribière+ with vector transport by projection
        let rz = mass.form(&cur.resid, &pr);
        let beta = if prev_rz > 0.0 && iter % 50 != 0 {
            let diff: Vec<f64> = pr.iter().zip(&prev_pr).map(|(z, zp)| z - zp).collect();
            (mass.form(&cur.resid, &diff) / prev_rz).max(0.0)
        } else {
            0.0
        };
        dir.iter_mut().zip(&pr).for_each(|(d, p)| *d = -p + beta * *d);
        let along = mass.form(&cur.phi, &dir) / n;
        dir.iter_mut().zip(&cur.phi).for_each(|(d, x)| *d -= along * x);
        let mut d0 = 2.0 * mass.form(&cur.resid, &dir);
        if !(d0 < 0.0) {
            dir.iter_mut().zip(&pr).for_each(|(d, p)| *d = -p);
            d0 = 2.0 * mass.form(&cur.resid, &dir);
            if !(d0 < 0.0) {
                break;
            }
        }
        prev_pr = pr;
        prev_rz = rz;

        // secant on the directional derivative, guarded by the energy
        let e0 = cur.parts.total();
        let guard = 1e-13 * e0.abs().max(1.0);
        let d1 = slope(f, &cur.phi, &dir, step, n);
        let mut t = if d1 > d0 {
            step * d0 / (d0 - d1)
        } else {
            4.0 * step
        };
        t = t.clamp(1e-3 * step, 4.0 * step);
        let mut next = retract(f, &cur.phi, &dir, t, n);
        let mut accepted = false;
        for _ in 0..40 {
            let e = f.energy(&next).total();
            if e <= e0 + 1e-4 * t * d0 + guard {
                accepted = true;
                break;
            }
            t *= 0.5;
            next = retract(f, &cur.phi, &dir, t, n);
        }
        if !accepted {
            return Err(Error::NonConvergence {
                iterations: iter,
                residual: res,
            });
        }
        step = t;
        let (flipped, floored) = enforce_positive(lumped, &mut next);
        floor_hit |= floored;
        if flipped || floored {
            let s = (n / f.norm(&next)).sqrt();
            next.iter_mut().for_each(|x| *x *= s);
            prev_rz = 0.0;
            dir.iter_mut().for_each(|x| *x = 0.0);
        }
        cur = point(f, next, n);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: resid_norm(&cur),
    })
}

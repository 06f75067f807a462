//! Spherically symmetric piecewise-linear Galerkin discretisation on
//! `r_i = i h`, `i = 0..=n`, with `Φ(R) = 0` at the pinned node `n`.
//!
//! Every integral is exact for the interpolant (the trap term up to Gauss
//! quadrature of `V`), so the discrete energy is the continuum energy of an
//! admissible function.

use std::f64::consts::PI;

use super::ops::{solve_tridiagonal, Tridiag};
use super::Discretization;
use crate::potentials::TrapPotential;
use crate::quad::GL5;

#[derive(Debug, Clone)]
pub(crate) struct RadialMesh {
    h: f64,
    intervals: usize,
    /// `4π ∫_{r_i}^{r_{i+1}} r² dr / h²`, the stiffness of element `i`.
    stiffness: Vec<f64>,
    mass: Tridiag,
    lumped: Vec<f64>,
}

/// Barycentric coordinate and `4π r² dr` weight of the Gauss nodes of element `i`.
fn element_nodes(h: f64, i: usize) -> impl Iterator<Item = (f64, f64, f64)> {
    GL5.iter().map(move |&(x, wq)| {
        let s = 0.5 * (x + 1.0);
        let r = (i as f64 + s) * h;
        (s, r, 0.5 * h * wq * 4.0 * PI * r * r)
    })
}

impl RadialMesh {
    pub(crate) fn new(h: f64, intervals: usize) -> Self {
        let n = intervals;
        let stiffness = (0..n)
            .map(|i| {
                let (r0, r1) = (i as f64 * h, (i + 1) as f64 * h);
                4.0 * PI * (r1.powi(3) - r0.powi(3)) / (3.0 * h * h)
            })
            .collect();
        let mass = Self::assemble(h, n, |_| 1.0);
        let mut lumped = mass.diag.clone();
        for (i, o) in mass.off.iter().enumerate() {
            lumped[i] += o;
            lumped[i + 1] += o;
        }
        lumped[n] = 0.0;
        Self {
            h,
            intervals,
            stiffness,
            mass,
            lumped,
        }
    }

    /// `∫ f(r) ψ_i ψ_j 4πr² dr` over the free nodes.
    fn assemble(h: f64, n: usize, f: impl Fn(f64) -> f64) -> Tridiag {
        let mut diag = vec![0.0; n + 1];
        let mut off = vec![0.0; n];
        for i in 0..n {
            for (s, r, dv) in element_nodes(h, i) {
                let v = f(r) * dv;
                diag[i] += v * (1.0 - s) * (1.0 - s);
                diag[i + 1] += v * s * s;
                off[i] += v * s * (1.0 - s);
            }
        }
        diag[n] = 0.0;
        off[n - 1] = 0.0;
        Tridiag { diag, off }
    }
}

impl Discretization for RadialMesh {
    fn len(&self) -> usize {
        self.intervals + 1
    }

    fn lumped(&self) -> &[f64] {
        &self.lumped
    }

    fn mass(&self) -> &Tridiag {
        &self.mass
    }

    fn trap_operator(&self, trap: &TrapPotential) -> Tridiag {
        Self::assemble(self.h, self.intervals, |r| trap.at_radius(r))
    }

    fn kinetic(&self, phi: &[f64]) -> f64 {
        self.stiffness
            .iter()
            .enumerate()
            .map(|(i, c)| c * (phi[i + 1] - phi[i]).powi(2))
            .sum()
    }

    fn apply_kinetic(&self, phi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, c) in self.stiffness.iter().enumerate() {
            let flux = c * (phi[i] - phi[i + 1]);
            out[i] += flux;
            out[i + 1] -= flux;
        }
        out[self.intervals] = 0.0;
    }

    fn quartic(&self, phi: &[f64]) -> f64 {
        (0..self.intervals)
            .map(|i| {
                element_nodes(self.h, i)
                    .map(|(s, _, dv)| dv * (phi[i] * (1.0 - s) + phi[i + 1] * s).powi(4))
                    .sum::<f64>()
            })
            .sum()
    }

    fn apply_quartic(&self, phi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..self.intervals {
            for (s, _, dv) in element_nodes(self.h, i) {
                let f3 = dv * (phi[i] * (1.0 - s) + phi[i + 1] * s).powi(3);
                out[i] += f3 * (1.0 - s);
                out[i + 1] += f3 * s;
            }
        }
        out[self.intervals] = 0.0;
    }

    /// Exact solve of `(K + L diag(shift)) x = M rhs`.
    fn precondition(&self, shift: &[f64], rhs: &[f64], out: &mut [f64]) {
        let n = self.intervals;
        let mut diag = vec![0.0; n + 1];
        let mut off = vec![0.0; n];
        for (i, c) in self.stiffness.iter().enumerate() {
            diag[i] += c;
            diag[i + 1] += c;
            off[i] = -c;
        }
        for i in 0..n {
            diag[i] += self.lumped[i] * shift[i];
        }
        diag[n] = 0.0;
        off[n - 1] = 0.0;
        let mut b = vec![0.0; n + 1];
        self.mass.apply(rhs, &mut b);
        solve_tridiagonal(&diag, &off, &b, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interp(h: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=n)
            .map(|i| if i < n { f(i as f64 * h) } else { 0.0 })
            .collect()
    }

    #[test]
    fn mass_integrates_exactly() {
        // ∫ (2 - r)² over the ball of radius 2
        let (h, n) = (0.0625, 32);
        let m = RadialMesh::new(h, n);
        let phi = interp(h, n, |r| 2.0 - r);
        let norm = m.mass().form(&phi, &phi);
        let direct = 4.0 * PI * (4.0 * 8.0 / 3.0 - 16.0 + 32.0 / 5.0);
        assert!((norm - direct).abs() < 1e-12 * direct);
        // linear profile has exact gradient energy 4π R³ / 3
        assert!((m.kinetic(&phi) - 4.0 * PI * 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn preconditioner_inverts_its_operator() {
        let (h, n) = (0.05, 64);
        let m = RadialMesh::new(h, n);
        let shift: Vec<f64> = (0..=n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let x = interp(h, n, |r| (0.3 * r / h).cos());
        let mut kx = vec![0.0; n + 1];
        m.apply_kinetic(&x, &mut kx);
        let ax: Vec<f64> = (0..=n)
            .map(|i| kx[i] + m.lumped()[i] * shift[i] * x[i])
            .collect();
        // recover the right-hand side so that M rhs = A x
        let mut rhs = vec![0.0; n + 1];
        m.mass().solve(&ax, &mut rhs);
        let mut y = vec![0.0; n + 1];
        m.precondition(&shift, &rhs, &mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn quartic_gradient_is_consistent() {
        let (h, n) = (0.1, 40);
        let m = RadialMesh::new(h, n);
        let phi = interp(h, n, |r| (-r * r).exp());
        let mut g = vec![0.0; n + 1];
        m.apply_quartic(&phi, &mut g);
        let q: f64 = phi.iter().zip(&g).map(|(a, b)| a * b).sum();
        assert!((q - m.quartic(&phi)).abs() < 1e-13);
    }
}

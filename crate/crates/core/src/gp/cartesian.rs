//! Cubic grid on `[-R, R]³` with spacing `h` and `m + 1` nodes per axis.
//!
//! Neumann boxes use trapezoidal weights (half on each face), which makes the
//! discrete problem the natural-boundary one. Decay boundaries pin every face
//! node to zero.

use super::ops::Tridiag;
use super::Discretization;
use crate::potentials::TrapPotential;

#[derive(Debug, Clone)]
pub(crate) struct CartesianMesh {
    m: usize,
    h: f64,
    dirichlet: bool,
    weights: Vec<f64>,
    mass: Tridiag,
    /// Per-axis trapezoid factors.
    tau: Vec<f64>,
    /// Diagonal of the kinetic matrix.
    kdiag: Vec<f64>,
}

impl CartesianMesh {
    pub(crate) fn new(h: f64, intervals: usize, dirichlet: bool) -> Self {
        let m = intervals;
        let n1 = m + 1;
        let tau: Vec<f64> = (0..n1)
            .map(|i| if i == 0 || i == m { 0.5 } else { 1.0 })
            .collect();
        let mut mesh = Self {
            m,
            h,
            dirichlet,
            weights: vec![0.0; n1 * n1 * n1],
            tau,
            mass: Tridiag::diagonal(vec![]),
            kdiag: vec![0.0; n1 * n1 * n1],
        };
        for k in 0..n1 {
            for j in 0..n1 {
                for i in 0..n1 {
                    let idx = mesh.index(i, j, k);
                    if !mesh.is_free(i, j, k) {
                        continue;
                    }
                    mesh.weights[idx] = h.powi(3) * mesh.tau[i] * mesh.tau[j] * mesh.tau[k];
                }
            }
        }
        let mut diag = vec![0.0; mesh.len()];
        mesh.for_each_edge(|a, b, c| {
            diag[a] += c;
            diag[b] += c;
        });
        for (idx, d) in diag.iter_mut().enumerate() {
            if mesh.weights[idx] == 0.0 {
                *d = 0.0;
            }
        }
        mesh.kdiag = diag;
        mesh.mass = Tridiag::diagonal(mesh.weights.clone());
        mesh
    }

    #[inline]
    pub(crate) fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n1 = self.m + 1;
        (k * n1 + j) * n1 + i
    }

    fn is_free(&self, i: usize, j: usize, k: usize) -> bool {
        let on_face = |x: usize| x == 0 || x == self.m;
        !(self.dirichlet && (on_face(i) || on_face(j) || on_face(k)))
    }

    fn position(&self, idx: usize) -> [f64; 3] {
        let n1 = self.m + 1;
        let (i, j, k) = (idx % n1, (idx / n1) % n1, idx / (n1 * n1));
        let x = |t: usize| (t as f64 - 0.5 * self.m as f64) * self.h;
        [x(i), x(j), x(k)]
    }

    /// Calls `f(a, b, coefficient)` for every grid edge, skipping edges
    /// between two pinned nodes.
    fn for_each_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        let n1 = self.m + 1;
        let h = self.h;
        let stride = [1, n1, n1 * n1];
        for k in 0..n1 {
            for j in 0..n1 {
                for i in 0..n1 {
                    let idx = self.index(i, j, k);
                    let coords = [i, j, k];
                    for axis in 0..3 {
                        if coords[axis] == self.m {
                            continue;
                        }
                        let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
                        let c = h * self.tau[coords[p]] * self.tau[coords[q]];
                        let other = idx + stride[axis];
                        if self.weights[idx] == 0.0 && self.weights[other] == 0.0 {
                            continue;
                        }
                        f(idx, other, c);
                    }
                }
            }
        }
    }
}

impl Discretization for CartesianMesh {
    fn len(&self) -> usize {
        self.weights.len()
    }

    fn lumped(&self) -> &[f64] {
        &self.weights
    }

    fn mass(&self) -> &Tridiag {
        &self.mass
    }

    fn trap_operator(&self, trap: &TrapPotential) -> Tridiag {
        Tridiag::diagonal(
            self.weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    if *w == 0.0 {
                        0.0
                    } else {
                        w * trap.evaluate(self.position(i))
                    }
                })
                .collect(),
        )
    }

    fn kinetic(&self, phi: &[f64]) -> f64 {
        let mut t = 0.0;
        self.for_each_edge(|a, b, c| t += c * (phi[a] - phi[b]).powi(2));
        t
    }

    fn apply_kinetic(&self, phi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        self.for_each_edge(|a, b, c| {
            let flux = c * (phi[a] - phi[b]);
            out[a] += flux;
            out[b] -= flux;
        });
        for (o, w) in out.iter_mut().zip(&self.weights) {
            if *w == 0.0 {
                *o = 0.0;
            }
        }
    }

    fn quartic(&self, phi: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(phi)
            .map(|(w, x)| w * x.powi(4))
            .sum()
    }

    fn apply_quartic(&self, phi: &[f64], out: &mut [f64]) {
        for ((o, w), x) in out.iter_mut().zip(&self.weights).zip(phi) {
            *o = w * x.powi(3);
        }
    }

    /// Jacobi approximation of `(K + W diag(shift))⁻¹ W rhs`.
    fn precondition(&self, shift: &[f64], rhs: &[f64], out: &mut [f64]) {
        for i in 0..out.len() {
            let w = self.weights[i];
            out[i] = if w == 0.0 {
                0.0
            } else {
                w * rhs[i] / (self.kdiag[i] + w * shift[i])
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumann_weights_integrate_constants() {
        let m = CartesianMesh::new(0.25, 8, false);
        let vol: f64 = m.lumped().iter().sum();
        assert!((vol - 8.0).abs() < 1e-12);
        let ones = vec![1.0; m.len()];
        assert_eq!(m.kinetic(&ones), 0.0);
    }

    #[test]
    fn linear_function_has_exact_gradient_energy() {
        let m = CartesianMesh::new(0.25, 8, false);
        let phi: Vec<f64> = (0..m.len()).map(|i| m.position(i)[0]).collect();
        // ∫|∇x|² over [-1,1]³ = 8
        assert!((m.kinetic(&phi) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_pins_faces() {
        let m = CartesianMesh::new(0.25, 8, true);
        let free = m.lumped().iter().filter(|&&w| w > 0.0).count();
        assert_eq!(free, 7 * 7 * 7);
    }
}

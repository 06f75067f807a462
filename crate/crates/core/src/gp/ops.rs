//! Banded symmetric operators shared by the discretisations.

/// Symmetric tridiagonal matrix; an empty `off` makes it diagonal.
/// Rows with a zero diagonal are pinned and map to zero.
#[derive(Debug, Clone)]
pub(crate) struct Tridiag {
    pub(crate) diag: Vec<f64>,
    pub(crate) off: Vec<f64>,
}

impl Tridiag {
    pub(crate) fn diagonal(diag: Vec<f64>) -> Self {
        Self { diag, off: vec![] }
    }

    pub(crate) fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            out[i] = self.diag[i] * x[i];
        }
        for (i, o) in self.off.iter().enumerate() {
            out[i] += o * x[i + 1];
            out[i + 1] += o * x[i];
        }
    }

    pub(crate) fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s: f64 = self
            .diag
            .iter()
            .zip(x)
            .zip(y)
            .map(|((d, x), y)| d * x * y)
            .sum();
        for (i, o) in self.off.iter().enumerate() {
            s += o * (x[i] * y[i + 1] + x[i + 1] * y[i]);
        }
        s
    }

    /// Solves `self · out = rhs` on the unpinned rows.
    pub(crate) fn solve(&self, rhs: &[f64], out: &mut [f64]) {
        if self.off.is_empty() {
            for i in 0..rhs.len() {
                out[i] = if self.diag[i] == 0.0 {
                    0.0
                } else {
                    rhs[i] / self.diag[i]
                };
            }
            return;
        }
        solve_tridiagonal(&self.diag, &self.off, rhs, out);
    }
}

/// Thomas algorithm for a symmetric tridiagonal system whose unpinned rows
/// form a leading block.
pub(crate) fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64], out: &mut [f64]) {
    let n = diag.iter().take_while(|d| **d != 0.0).count();
    out.iter_mut().skip(n).for_each(|x| *x = 0.0);
    if n == 0 {
        return;
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for i in 0..n {
        let (denom, carry) = if i > 0 {
            (
                diag[i] - off[i - 1] * cp[i - 1],
                rhs[i] - off[i - 1] * dp[i - 1],
            )
        } else {
            (diag[0], rhs[0])
        };
        cp[i] = if i + 1 < n { off[i] / denom } else { 0.0 };
        dp[i] = carry / denom;
    }
    out[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = dp[i] - cp[i] * out[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_inverts_apply() {
        let n = 40;
        let diag: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { 4.0 + 0.1 * i as f64 } else { 0.0 })
            .collect();
        let off: Vec<f64> = (0..n - 1)
            .map(|i| {
                if i + 2 < n {
                    -1.0 - 0.01 * i as f64
                } else {
                    0.0
                }
            })
            .collect();
        let t = Tridiag { diag, off };
        let x: Vec<f64> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    (0.7 * i as f64).sin()
                } else {
                    0.0
                }
            })
            .collect();
        let mut b = vec![0.0; n];
        t.apply(&x, &mut b);
        let mut y = vec![0.0; n];
        t.solve(&b, &mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((t.form(&x, &x) - x.iter().zip(&b).map(|(x, b)| x * b).sum::<f64>()).abs() < 1e-12);
    }
}

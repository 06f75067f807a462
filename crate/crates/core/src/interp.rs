//! Monotone piecewise-cubic Hermite interpolation for tabulated radial data.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shape-preserving cubic through `(x_i, y_i)` samples (Fritsch-Carlson slopes).
///
/// Between samples the interpolant is monotone wherever the data are, so
/// tabulated potentials never acquire spurious wiggles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain("a table needs at least two samples".into()));
        }
        if samples
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::Domain("table contains non-finite values".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[i - 1] + secants[i])
            };
        }
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let alpha = slopes[i] / secants[i];
            let beta = slopes[i + 1] / secants[i];
            let norm = alpha.hypot(beta);
            if norm > 3.0 {
                let tau = 3.0 / norm;
                slopes[i] = tau * alpha * secants[i];
                slopes[i + 1] = tau * beta * secants[i];
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    /// Reads a two-column whitespace-separated table; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let table_err = |message: String| Error::Table {
            path: path.display().to_string(),
            message,
        };
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let cols: Vec<&str> = body.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(table_err(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| table_err(format!("line {}: {e}", lineno + 1)))
            };
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::new(samples).map_err(|e| table_err(e.to_string()))
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn last_value(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    /// Interpolated value; outside the table the end value is held.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return self.ys[0];
        }
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&xi| xi <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i]
            + h10 * h * self.slopes[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    /// Same curve with abscissae divided by `x_factor` and ordinates multiplied by `y_factor`.
    pub fn rescaled(&self, x_factor: f64, y_factor: f64) -> Self {
        Self {
            xs: self.xs.iter().map(|x| x / x_factor).collect(),
            ys: self.ys.iter().map(|y| y * y_factor).collect(),
            slopes: self
                .slopes
                .iter()
                .map(|s| s * y_factor * x_factor)
                .collect(),
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.ys.windows(2).all(|w| w[1] >= w[0])
    }

    /// Convexity of the sampled data (nondecreasing secants).
    pub fn is_convex(&self) -> bool {
        let secants: Vec<f64> = self
            .xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        secants
            .windows(2)
            .all(|s| s[1] >= s[0] - 1e-12 * s[0].abs().max(1.0))
    }
}

impl TryFrom<Vec<(f64, f64)>> for MonotoneCubic {
    type Error = Error;

    fn try_from(samples: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(samples)
    }
}

impl From<MonotoneCubic> for Vec<(f64, f64)> {
    fn from(c: MonotoneCubic) -> Self {
        c.xs.into_iter().zip(c.ys).collect()
    }
}

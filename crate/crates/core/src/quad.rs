//! Adaptive Gauss-Kronrod quadrature on finite intervals.

/// Absolute and relative tolerance for the adaptive rule.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-10,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Five-point Gauss-Legendre rule on [-1, 1], exact for degree 9.
pub(crate) const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[lo, hi]` by globally adaptive bisection.
///
/// Returns the estimate and the accumulated error estimate. The integrand
/// must be finite on the closed interval except possibly at the endpoints,
/// which are never sampled.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: QuadTolerance) -> (f64, f64) {
    if hi == lo {
        return (0.0, 0.0);
    }
    if hi < lo {
        let (v, e) = integrate(f, hi, lo, tol);
        return (-v, e);
    }
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = kronrod15(&f, lo, hi);
    intervals.push((lo, hi, v, e));
    let mut total = v;
    let mut err = e;
    let mut evaluations = 1;
    while err > tol.abs.max(tol.rel * total.abs()) && evaluations < 2000 {
        let (idx, _) =
            intervals
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, iv)| {
                    if iv.3 > best.1 {
                        (i, iv.3)
                    } else {
                        best
                    }
                });
        let (a, b, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            intervals.push((a, b, v0, e0));
            break;
        }
        let (v1, e1) = kronrod15(&f, a, mid);
        let (v2, e2) = kronrod15(&f, mid, b);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        intervals.push((a, mid, v1, e1));
        intervals.push((mid, b, v2, e2));
        evaluations += 1;
    }
    // re-sum to shed the cancellation drift of the running totals
    let total: f64 = intervals.iter().map(|iv| iv.2).sum();
    let err: f64 = intervals.iter().map(|iv| iv.3).sum();
    (total, err)
}

/// Integrates over consecutive breakpoints, summing the pieces.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: QuadTolerance,
) -> (f64, f64) {
    points.windows(2).fold((0.0, 0.0), |(v, e), w| {
        let (dv, de) = integrate(&f, w[0], w[1], tol);
        (v + dv, e + de)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let (v, _) = integrate(
            |x| x.powi(6) - 3.0 * x * x + 1.0,
            -1.0,
            2.0,
            QuadTolerance::default(),
        );
        let exact = (2f64.powi(7) + 1.0) / 7.0 - (8.0 + 1.0) + 3.0;
        assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
    }

    #[test]
    fn adapts_to_peaked_integrand() {
        let (v, e) = integrate(
            |x| 1.0 / (1e-4 + x * x),
            -1.0,
            1.0,
            QuadTolerance::default(),
        );
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-8 * exact, "{v} vs {exact} (err {e})");
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let (v, _) = integrate(|x| x.exp(), 1.0, 0.0, QuadTolerance::default());
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn gl5_is_exact_to_degree_nine() {
        let s: f64 = GL5.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-15);
    }
}

//! Gauss-Legendre rules, adaptive Gauss-Kronrod integration and the exponential integral.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` points over `[a, b]`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
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

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive 15-point Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol*|I|)`.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let f: &dyn Fn(f64) -> f64 = &f;
    let mut intervals = vec![(a, b, gk15(f, a, b))];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|iv| iv.2 .0).sum();
        let err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature { estimate: total });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        intervals.push((lo, mid, gk15(f, lo, mid)));
        intervals.push((mid, hi, gk15(f, mid, hi)));
    }
    Err(Error::Quadrature {
        estimate: intervals.iter().map(|iv| iv.2 .0).sum(),
    })
}

/// Exponential integral `Ei(x)` for `x != 0`.
///
/// Negative arguments go through `E1(-x)` (series below 1, continued fraction above);
/// positive arguments use the power series up to 40 and the asymptotic series beyond.
pub fn exp_integral_ei(x: f64) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x < 0.0 {
        return -exp_integral_e1(-x);
    }
    if x < 40.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..500 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        EULER_GAMMA + x.ln() + sum
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            let next = term * k as f64 / x;
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        x.exp() / x * sum
    }
}

/// `E1(y) = int_y^inf e^{-t}/t dt` for `y > 0`.
pub fn exp_integral_e1(y: f64) -> f64 {
    if y <= 0.0 {
        return f64::NAN;
    }
    if y <= 1.0 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 1..60 {
            fact *= -y / k as f64;
            let add = fact / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - y.ln() - sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        let tiny = 1e-300;
        let mut b = y + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-y).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_matches_known_integral() {
        let rule = CompositeRule::new(0.0, PI, 20, 8);
        assert!((rule.integrate(f64::sin) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let v = integrate_adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn exponential_integral_reference_values() {
        // Values from standard tables.
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((exp_integral_e1(0.1) - 1.822_923_958_419_390_7).abs() < 1e-14);
        assert!((exp_integral_e1(10.0) - 4.156_968_929_685_324e-6).abs() < 1e-19);
        assert!((exp_integral_ei(1.0) - 1.895_117_816_355_936_8).abs() < 1e-14);
    }

    #[test]
    fn exponential_integral_matches_quadrature() {
        for &y in &[0.01, 0.5, 1.0, 3.0, 25.0, 60.0] {
            let q = integrate_adaptive(|t| (-t).exp() / t, y, y + 80.0, 1e-300, 1e-14).unwrap();
            let e = exp_integral_e1(y);
            assert!((q - e).abs() <= 1e-12 * e, "y={y}: {q} vs {e}");
        }
    }
}

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.gen::<f64>()
}

/// Classical RK4 for a scalar ODE `y' = f(t, y)` on `[0, t_end]` with `n` steps.
pub fn rk4(f: impl Fn(f64, f64) -> f64, y0: f64, t_end: f64, n: usize) -> f64 {
    let h = t_end / n as f64;
    let mut y = y0;
    for k in 0..n {
        let t = k as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    y
}

/// RK4 for a first-order system in two unknowns.
pub fn rk4_pair(f: impl Fn([f64; 2]) -> [f64; 2], y0: [f64; 2], t_end: f64, n: usize) -> [f64; 2] {
    let h = t_end / n as f64;
    let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
    let mut y = y0;
    for _ in 0..n {
        let k1 = f(y);
        let k2 = f(add(y, k1, 0.5 * h));
        let k3 = f(add(y, k2, 0.5 * h));
        let k4 = f(add(y, k3, h));
        for d in 0..2 {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
    }
    y
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Relative error with an absolute floor, for values that may pass near zero.
pub fn rel_floor(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

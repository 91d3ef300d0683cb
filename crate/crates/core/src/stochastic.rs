//! Expected diffusion updates when the diffusivity is uniformly distributed on
//! `[lower, upper]`, plus a seeded Monte Carlo sampler used to check them.
//!
//! Neighbour data are passed in normalised form: the weighted neighbour sum divided by
//! `abar = sum_d 1/h_d^2`, so that `a0/2` is the neighbour average.

use crate::error::{invalid, Error, Result};
use crate::grid::{Field1D, Mesh};
use crate::quadrature::{exp_integral_ei, integrate_adaptive};
use crate::scalar::{lit, to_f64, Real};
use crate::temporal::{closed_form_raw, NeighborPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Highest neighbour-polynomial order accepted by [`expected_update_pk`].
pub const MAX_STOCHASTIC_ORDER: usize = 4;

const BLOCK: usize = 4096;

/// Uniform distribution of the diffusion coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformDiffusion<T> {
    lower: T,
    upper: T,
}

impl<T: Real> UniformDiffusion<T> {
    pub fn new(lower: T, upper: T) -> Result<Self> {
        if !(lower > T::zero()) || !upper.is_finite() {
            return invalid("diffusion range", format!("lower bound must be positive, got {lower}"));
        }
        if !(upper > lower) {
            return invalid("diffusion range", format!("need lower < upper, got [{lower}, {upper}]"));
        }
        Ok(Self { lower, upper })
    }

    /// Zero-width distribution concentrated at `d`.
    pub fn degenerate(d: T) -> Result<Self> {
        if !(d > T::zero()) || !d.is_finite() {
            return invalid("diffusion range", format!("diffusivity must be positive, got {d}"));
        }
        Ok(Self { lower: d, upper: d })
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn is_degenerate(&self) -> bool {
        self.upper == self.lower
    }

    pub fn midpoint(&self) -> T {
        (self.lower + self.upper) * lit(0.5)
    }
}

/// `E[exp(-2 D abar dt)]` for `D` uniform on a non-degenerate range.
fn mean_decay<T: Real>(abar: T, dist: &UniformDiffusion<T>, dt: T) -> T {
    let two_adt = lit::<T>(2.0) * abar * dt;
    let w = dist.width();
    (-two_adt * dist.lower).exp() * -(-two_adt * w).exp_m1() / (two_adt * w)
}

fn check_inputs<T: Real>(abar: T, dt: T) -> Result<()> {
    if !(abar > T::zero()) || !abar.is_finite() {
        return invalid("abar", format!("must be positive, got {abar}"));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return invalid("dt", format!("must be positive, got {dt}"));
    }
    Ok(())
}

/// Deterministic zeroth-order update at a fixed diffusivity, in normalised form.
pub fn deterministic_update_p0<T: Real>(u: T, a0: T, abar: T, d: T, dt: T) -> T {
    closed_form_raw(u, d * abar, d, T::zero(), &[a0 * abar], dt)
}

/// Expected zeroth-order update without source:
/// `(u - a0/2) E[exp(-2 D abar dt)] + a0/2`.
pub fn expected_update_p0<T: Real>(u: T, a0: T, abar: T, dist: &UniformDiffusion<T>, dt: T) -> Result<T> {
    check_inputs(abar, dt)?;
    if dist.is_degenerate() {
        return Ok(deterministic_update_p0(u, a0, abar, dist.lower, dt));
    }
    let half = lit::<T>(0.5);
    Ok((u - a0 * half) * mean_decay(abar, dist, dt) + a0 * half)
}

/// Deterministic order-P update at a fixed diffusivity, in normalised form.
pub fn deterministic_update_pk<T: Real>(u: T, poly: &NeighborPolynomial<T>, source: T, abar: T, d: T, dt: T) -> T {
    let coeffs: Vec<T> = poly.coeffs().iter().map(|&a| a * abar).collect();
    closed_form_raw(u, d * abar, d, source, &coeffs, dt)
}

/// `int_l^u x^{-q} dx`.
fn power_integral(q: usize, l: f64, u: f64) -> f64 {
    match q {
        0 => u - l,
        1 => (u / l).ln(),
        _ => {
            let e = 1.0 - q as f64;
            (u.powf(e) - l.powf(e)) / e
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Expected order-P update with source `s` for a polynomial neighbour history
/// `sum_p a_p tau^p` (normalised coefficients, `P <= 4`).
///
/// The `exp(-beta D)/D^p` integrals are evaluated by adaptive quadrature, the
/// source term through the exponential integral.
pub fn expected_update_pk<T: Real>(
    u: T,
    poly: &NeighborPolynomial<T>,
    source: T,
    abar: T,
    dist: &UniformDiffusion<T>,
    dt: T,
) -> Result<T> {
    check_inputs(abar, dt)?;
    let order = poly.order();
    if order > MAX_STOCHASTIC_ORDER {
        return invalid("polynomial order", format!("must be <= {MAX_STOCHASTIC_ORDER}, got {order}"));
    }
    if dist.is_degenerate() {
        return Ok(deterministic_update_pk(u, poly, source, abar, dist.lower, dt));
    }
    let half = lit::<T>(0.5);
    let a = poly.coeffs();
    let mut value = (u - a[0] * half) * mean_decay(abar, dist, dt) + a[0] * half;

    let (lo, hi) = (to_f64(dist.lower), to_f64(dist.upper));
    let w = hi - lo;
    let ab = to_f64(abar);
    let tdt = to_f64(dt);
    let beta = 2.0 * ab * tdt;
    let two_abar = 2.0 * ab;
    let mut extra = 0.0;
    if source != T::zero() {
        let s = to_f64(source);
        let ei = exp_integral_ei(-beta * hi) - exp_integral_ei(-beta * lo);
        extra += s / (two_abar * w) * ((hi / lo).ln() - ei);
    }
    for (p, &ap) in a.iter().enumerate().skip(1) {
        if ap == T::zero() {
            continue;
        }
        let ap = 0.5 * to_f64(ap);
        let pf = factorial(p);
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let residual = integrate_adaptive(|x| (-beta * x).exp() / x.powi(p as i32), lo, hi, 1e-13, 1e-12)?;
        extra -= ap * sign * pf / two_abar.powi(p as i32) * residual / w;
        let mut poly_part = 0.0;
        for q in 0..=p {
            let sq = if q % 2 == 0 { 1.0 } else { -1.0 };
            poly_part += tdt.powi((p - q) as i32) * sq * pf / (two_abar.powi(q as i32) * factorial(p - q))
                * power_integral(q, lo, hi)
                / w;
        }
        extra += ap * poly_part;
    }
    if extra != 0.0 {
        value = value + lit::<T>(extra);
    }
    if !value.is_finite() {
        return Err(Error::NonFinite { node: 0, iteration: 0 });
    }
    Ok(value)
}

/// Monte Carlo estimate of `E[update(D)]` with its standard error.
///
/// Samples are drawn in fixed blocks, each from its own ChaCha stream, and the block
/// statistics are combined in order, so the result depends only on `seed` and `samples`.
pub fn monte_carlo_expectation<T: Real>(
    update: &(dyn Fn(T) -> T + Sync),
    dist: &UniformDiffusion<T>,
    samples: usize,
    seed: u64,
) -> Result<(T, T)> {
    if samples < 2 {
        return invalid("samples", format!("need at least 2, got {samples}"));
    }
    if dist.is_degenerate() {
        return Ok((update(dist.lower), T::zero()));
    }
    let (lo, w) = (to_f64(dist.lower), to_f64(dist.width()));
    let blocks = samples.div_ceil(BLOCK);
    let stats: Vec<(f64, f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = BLOCK.min(samples - b * BLOCK);
            let (mut mean, mut m2) = (0.0, 0.0);
            for k in 0..n {
                let d = lo + w * rng.gen::<f64>();
                let v = to_f64(update(lit(d)));
                let delta = v - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (v - mean);
            }
            (n as f64, mean, m2)
        })
        .collect();
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for (nb, mb, m2b) in stats {
        let tot = n + nb;
        let delta = mb - mean;
        mean += delta * nb / tot;
        m2 += m2b + delta * delta * n * nb / tot;
        n = tot;
    }
    let var = m2 / (n - 1.0);
    Ok((lit(mean), lit((var / n).sqrt())))
}

/// `(1/L) int_0^L |expected - exact| dx` by the trapezoidal rule.
pub fn average_error_metric<T: Real>(expected: &Field1D<T>, exact: &Field1D<T>) -> Result<T> {
    if expected.grid() != exact.grid() {
        return Err(Error::GridMismatch("fields live on different grids".into()));
    }
    let g = expected.grid();
    let diff: Vec<T> = expected
        .values()
        .iter()
        .zip(exact.values())
        .map(|(&a, &b)| (a - b).abs())
        .collect();
    let n = g.node_count();
    let half = lit::<T>(0.5);
    let inner = diff[1..n - 1].iter().fold(T::zero(), |acc, &v| acc + v);
    let integral = g.dx() * (inner + half * (diff[0] + diff[n - 1]));
    Ok(integral / g.length())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::CompositeRule;

    #[test]
    fn p0_matches_quadrature() {
        let dist = UniformDiffusion::new(0.1, 0.9).unwrap();
        let e = expected_update_p0(0.0, 2.0, 1.0, &dist, 1.0).unwrap();
        let q = CompositeRule::new(0.1, 0.9, 40, 10).integrate(|d| deterministic_update_p0(0.0, 2.0, 1.0, d, 1.0)) / 0.8;
        assert!((e - q).abs() < 1e-10, "{e} vs {q}");
    }

    #[test]
    fn p0_limits() {
        let dist = UniformDiffusion::new(0.2, 0.4).unwrap();
        let small: f64 = expected_update_p0(0.3, 1.0, 4.0, &dist, 1e-12).unwrap();
        assert!((small - 0.3).abs() < 1e-10);
        let large: f64 = expected_update_p0(0.3, 1.0, 4.0, &dist, 1e6).unwrap();
        assert!((large - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pk_reduces_to_p0() {
        let dist = UniformDiffusion::new(0.05, 0.3).unwrap();
        let p0: f64 = expected_update_p0(0.7, 1.3, 25.0, &dist, 0.01).unwrap();
        let pk = expected_update_pk(0.7, &NeighborPolynomial::constant(1.3), 0.0, 25.0, &dist, 0.01).unwrap();
        assert_eq!(p0.to_bits(), pk.to_bits());
    }

    #[test]
    fn pk_with_source_and_slope_matches_quadrature() {
        let dist = UniformDiffusion::new(0.05, 0.3).unwrap();
        let poly = NeighborPolynomial::new(vec![1.1, -3.0, 20.0]).unwrap();
        let (u, s, abar, dt) = (0.4, 0.8, 30.0, 0.02);
        let e = expected_update_pk(u, &poly, s, abar, &dist, dt).unwrap();
        let q = CompositeRule::new(0.05, 0.3, 40, 10).integrate(|d| deterministic_update_pk(u, &poly, s, abar, d, dt)) / 0.25;
        assert!((e - q).abs() < 1e-9, "{e} vs {q}");
    }

    #[test]
    fn degenerate_width_is_deterministic() {
        let dist = UniformDiffusion::degenerate(0.2).unwrap();
        let e = expected_update_p0(0.1, 0.6, 9.0, &dist, 0.3).unwrap();
        assert_eq!(e, deterministic_update_p0(0.1, 0.6, 9.0, 0.2, 0.3));
        let (m, se) = monte_carlo_expectation(&|d: f64| d * 3.0, &dist, 100, 7).unwrap();
        assert_eq!((m, se), (0.2 * 3.0, 0.0));
        assert!(UniformDiffusion::new(0.3, 0.3).is_err());
    }

    #[test]
    fn monte_carlo_is_reproducible_and_consistent() {
        let dist = UniformDiffusion::new(0.1, 0.9).unwrap();
        let f = |d: f64| deterministic_update_p0(0.0, 2.0, 1.0, d, 1.0);
        let a = monte_carlo_expectation(&f, &dist, 100_000, 42).unwrap();
        let b = monte_carlo_expectation(&f, &dist, 100_000, 42).unwrap();
        assert_eq!(a, b);
        let exact = expected_update_p0(0.0, 2.0, 1.0, &dist, 1.0).unwrap();
        assert!((a.0 - exact).abs() < 3.0 * a.1);
    }

    #[test]
    fn average_error_of_constant_offset() {
        let g = crate::grid::Grid1D::<f64>::new(2.0, 11, 0.0).unwrap();
        let a = Field1D::sample(g, |x: f64| x * x).unwrap();
        let b = Field1D::sample(g, |x: f64| x * x + 0.25).unwrap();
        assert!((average_error_metric(&a, &b).unwrap() - 0.25).abs() < 1e-14);
        assert_eq!(average_error_metric(&a, &a).unwrap(), 0.0);
    }
}

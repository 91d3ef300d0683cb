//! Temporal-ODE updates: each node is advanced by the exact solution of
//! `du/dtau = D*U(tau) - 2*abar*u + s`, where `U(tau)` is a polynomial model of the
//! weighted neighbour sum and `abar = D * sum_d 1/h_d^2`.

use crate::error::{invalid, Error, Result};
use crate::grid::{Field, Mesh};
use crate::scalar::{count, lit, Real};
use rayon::prelude::*;

/// Highest supported polynomial order for the neighbour model.
pub const MAX_ORDER: usize = 8;

/// Where the intermediate samples `T_k` are placed on `[0, dt]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    Uniform,
    Chebyshev,
}

/// Order, sampling and corrector controls of the temporal scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig<T> {
    pub order: usize,
    pub sampling: Sampling,
    /// Corrector sweeps after the first fit; 0 disables the loop.
    pub max_corrections: usize,
    /// Max-norm change in `u(dt)` that ends the loop.
    pub tolerance: T,
}

impl<T: Real> SchemeConfig<T> {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            sampling: Sampling::Uniform,
            max_corrections: 20,
            tolerance: lit(1e-10),
        }
    }

    /// Zeroth-order update, no corrector.
    pub fn p0() -> Self {
        Self::new(0).with_corrections(0)
    }

    pub fn with_corrections(mut self, cap: usize) -> Self {
        self.max_corrections = cap;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return invalid("order", format!("{} exceeds the cap of {MAX_ORDER}", self.order));
        }
        if !(self.tolerance >= T::zero()) {
            return invalid("tolerance", "must be non-negative");
        }
        Ok(())
    }
}

impl<T: Real> Default for SchemeConfig<T> {
    fn default() -> Self {
        Self::new(0)
    }
}

/// Sample times `T_0 = 0 < ... < T_P = dt`.
pub fn sampling_nodes<T: Real>(order: usize, dt: T, sampling: Sampling) -> Result<Vec<T>> {
    if order > MAX_ORDER {
        return invalid("order", format!("{order} exceeds the cap of {MAX_ORDER}"));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return invalid("dt", format!("must be positive, got {dt}"));
    }
    if order == 0 {
        return Ok(vec![T::zero()]);
    }
    let n = count::<T>(order);
    let half = lit::<T>(0.5);
    let mut nodes: Vec<T> = (0..=order)
        .map(|k| match sampling {
            Sampling::Uniform => dt * count::<T>(k) / n,
            Sampling::Chebyshev => {
                let c = (count::<T>(k) * T::PI() / n).cos();
                dt * half * (T::one() - c)
            }
        })
        .collect();
    nodes[0] = T::zero();
    nodes[order] = dt;
    Ok(nodes)
}

/// `U(tau) = sum_p a_p tau^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborPolynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> NeighborPolynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_ORDER + 1 {
            return invalid("polynomial", format!("needs 1..={} coefficients", MAX_ORDER + 1));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(a0: T) -> Self {
        Self { coeffs: vec![a0] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, tau: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &a| acc * tau + a)
    }
}

/// Inverse of a square matrix by Gauss-Jordan elimination with partial pivoting.
fn invert<T: Real>(m: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if a[piv][col] == T::zero() || !a[piv][col].is_finite() {
            return Err(Error::Singular { row: col });
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != T::zero() {
                    for j in 0..n {
                        a[r][j] = a[r][j] - f * a[col][j];
                        inv[r][j] = inv[r][j] - f * inv[col][j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Inverse of the Vandermonde matrix built on `nodes / scale`.
fn scaled_vandermonde_inverse<T: Real>(nodes: &[T], scale: T) -> Result<Vec<Vec<T>>> {
    let m: Vec<Vec<T>> = nodes
        .iter()
        .map(|&t| {
            let s = t / scale;
            let mut row = Vec::with_capacity(nodes.len());
            let mut pw = T::one();
            for _ in 0..nodes.len() {
                row.push(pw);
                pw = pw * s;
            }
            row
        })
        .collect();
    for i in 0..nodes.len() {
        for j in 0..i {
            if nodes[i] == nodes[j] {
                return invalid("samples", format!("duplicate sample time at positions {j} and {i}"));
            }
        }
    }
    invert(&m)
}

/// `Mbar` with `M^{-1} = diag(dt^0, ..., dt^-P) * Mbar`; independent of `dt`.
pub fn normalized_vandermonde_inverse<T: Real>(order: usize, sampling: Sampling) -> Result<Vec<Vec<T>>> {
    let nodes = sampling_nodes(order, T::one(), sampling)?;
    scaled_vandermonde_inverse(&nodes, T::one())
}

/// Coefficients of the interpolant through `(T_k, U_k)`, solved as `M a = U`.
pub fn solve_polynomial_coeffs<T: Real>(samples: &[(T, T)]) -> Result<NeighborPolynomial<T>> {
    if samples.is_empty() || samples.len() > MAX_ORDER + 1 {
        return invalid("samples", format!("need 1..={} samples", MAX_ORDER + 1));
    }
    if samples.iter().any(|(t, u)| !t.is_finite() || !u.is_finite()) {
        return invalid("samples", "non-finite sample");
    }
    if samples.len() == 1 {
        return Ok(NeighborPolynomial::constant(samples[0].1));
    }
    let times: Vec<T> = samples.iter().map(|s| s.0).collect();
    let scale = times.iter().fold(T::zero(), |m, t| m.max(t.abs()));
    let inv = scaled_vandermonde_inverse(&times, scale)?;
    let mut coeffs = Vec::with_capacity(samples.len());
    let mut pw = T::one();
    for row in &inv {
        let a = row.iter().zip(samples).fold(T::zero(), |acc, (m, s)| acc + *m * s.1);
        coeffs.push(a / pw);
        pw = pw * scale;
    }
    NeighborPolynomial::new(coeffs)
}

/// Per-node inputs of the closed-form update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionUpdateParams<T> {
    /// `u_i^n`.
    pub center: T,
    /// `abar = D * sum_d 1/h_d^2`.
    pub abar: T,
    pub diffusivity: T,
    /// Source frozen at `t_n`.
    pub source: T,
}

/// Particular solution `(D/abar) sum_p (a_p/2) S_p(tau) + s/(2 abar)` with
/// `S_0 = 1`, `S_p = tau^p - p/(2 abar) S_{p-1}`.
#[inline]
fn particular<T: Real>(coeffs: &[T], ratio: T, inv_two_abar: T, s_term: T, tau: T) -> T {
    let half = lit::<T>(0.5);
    let mut sp = T::one();
    let mut pw = T::one();
    let mut sum = coeffs[0] * half;
    for (p, &a) in coeffs.iter().enumerate().skip(1) {
        pw = pw * tau;
        sp = pw - count::<T>(p) * inv_two_abar * sp;
        sum = sum + a * half * sp;
    }
    ratio * sum + s_term
}

/// Closed-form update without validation. `u(0)` returns `center` exactly.
#[inline]
pub(crate) fn closed_form_raw<T: Real>(center: T, abar: T, diffusivity: T, source: T, coeffs: &[T], tau: T) -> T {
    let two_abar = abar + abar;
    let inv_two_abar = two_abar.recip();
    let ratio = diffusivity / abar;
    let s_term = source * inv_two_abar;
    let p0 = particular(coeffs, ratio, inv_two_abar, s_term, T::zero());
    let pt = particular(coeffs, ratio, inv_two_abar, s_term, tau);
    let em1 = (-two_abar * tau).exp_m1();
    center * (em1 + T::one()) + (pt - p0) - p0 * em1
}

/// `u_i(tau)` from the exact solution of the representative ODE.
pub fn closed_form_update<T: Real>(params: &DiffusionUpdateParams<T>, poly: &NeighborPolynomial<T>, tau: T) -> Result<T> {
    if !(params.abar > T::zero()) || !params.abar.is_finite() {
        return Err(Error::DegenerateDiffusion(format!("abar must be positive, got {}", params.abar)));
    }
    if !(tau >= T::zero()) {
        return invalid("tau", format!("must be non-negative, got {tau}"));
    }
    Ok(closed_form_raw(
        params.center,
        params.abar,
        params.diffusivity,
        params.source,
        poly.coeffs(),
        tau,
    ))
}

/// Limit of the order-`order` update as `dt -> inf` with `s = 0`: the explicit
/// Gauss-Seidel value `(D/abar) U^n/2` at order 0 and the implicit value
/// `(D/abar) U^{n+1}/2` otherwise.
pub fn asymptotic_limit<T: Real>(diffusivity: T, abar: T, u_start: T, u_end: T, order: usize) -> T {
    let half = lit::<T>(0.5);
    let u = if order == 0 { u_start } else { u_end };
    diffusivity / abar * u * half
}

/// Diffusivity seen by each node during a step.
#[derive(Debug, Clone, Copy)]
pub enum Diffusivity<'a, T> {
    Uniform(T),
    /// One value per mesh node.
    PerNode(&'a [T]),
}

impl<T: Real> Diffusivity<'_, T> {
    #[inline]
    fn at(&self, k: usize) -> T {
        match self {
            Diffusivity::Uniform(d) => *d,
            Diffusivity::PerNode(v) => v[k],
        }
    }
}

/// Outcome of the corrector loop.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorReport<T> {
    /// Corrector sweeps performed after the first fit.
    pub iterations: usize,
    /// Max-norm change in `u(dt)` of each sweep.
    pub changes: Vec<T>,
}

const PARALLEL_THRESHOLD: usize = 4096;

fn map_nodes<T: Real>(active: &[usize], f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    if active.len() >= PARALLEL_THRESHOLD {
        active.par_iter().map(|&k| f(k)).collect()
    } else {
        active.iter().map(|&k| f(k)).collect()
    }
}

fn check_finite<T: Real>(active: &[usize], vals: &[T], iteration: usize) -> Result<()> {
    match vals.iter().position(|v| !v.is_finite()) {
        Some(m) => Err(Error::NonFinite {
            node: active[m],
            iteration,
        }),
        None => Ok(()),
    }
}

/// Predictor-corrector update on raw nodal values.
///
/// Only `active` nodes are advanced; every other node keeps its value from `values`
/// and `reimpose` is called on each intermediate field so that boundary data are
/// current before neighbour sums are formed. `source` holds one frozen value per node.
#[allow(clippy::too_many_arguments)]
pub fn predictor_corrector_values<T: Real, G: Mesh<T>>(
    grid: &G,
    values: &[T],
    active: &[usize],
    diffusivity: Diffusivity<'_, T>,
    source: &[T],
    config: &SchemeConfig<T>,
    dt: T,
    reimpose: &(dyn Fn(&mut [T]) + Sync),
) -> Result<(Vec<T>, CorrectorReport<T>)> {
    config.validate()?;
    let n = grid.node_count();
    if values.len() != n || source.len() != n {
        return Err(Error::GridMismatch("values/source length differs from node count".into()));
    }
    let order = config.order;
    let times = sampling_nodes(order, dt, config.sampling)?;
    let inv2 = grid.inverse_square_sum();

    let abar: Vec<T> = active.iter().map(|&k| diffusivity.at(k) * inv2).collect();
    if let Some(m) = abar.iter().position(|a| !(*a > T::zero()) || !a.is_finite()) {
        return Err(Error::DegenerateDiffusion(format!(
            "non-positive diffusivity at node {}",
            active[m]
        )));
    }
    let mut base = values.to_vec();
    reimpose(&mut base);
    let a0: Vec<T> = active.iter().map(|&k| grid.neighbor_sum(&base, k)).collect();

    let node = |m: usize, coeffs: &[T], tau: T| {
        let k = active[m];
        closed_form_raw(base[k], abar[m], diffusivity.at(k), source[k], coeffs, tau)
    };
    let idx: Vec<usize> = (0..active.len()).collect();

    let report = |iterations, changes| CorrectorReport { iterations, changes };

    if order == 0 {
        let next = map_nodes(&idx, |m| node(m, &[a0[m]], dt));
        check_finite(active, &next, 0)?;
        let mut out = base.clone();
        for (m, &k) in active.iter().enumerate() {
            out[k] = next[m];
        }
        reimpose(&mut out);
        return Ok((out, report(0, Vec::new())));
    }

    // Mbar scaled by dt^-p gives M^{-1} for the actual sample times.
    let mbar = scaled_vandermonde_inverse(&times, dt)?;
    let width = order + 1;

    // Fills `coeffs` from neighbour sums of the stage fields.
    let fit = |stages: &[Vec<T>]| -> Vec<T> {
        let mut coeffs = vec![T::zero(); active.len() * width];
        let compute = |m: usize, out: &mut [T]| {
            let k = active[m];
            let mut u = [T::zero(); MAX_ORDER + 1];
            u[0] = a0[m];
            for (j, st) in stages.iter().enumerate() {
                u[j + 1] = grid.neighbor_sum(st, k);
            }
            let mut pw = T::one();
            for p in 0..width {
                let mut acc = T::zero();
                for q in 0..width {
                    acc = acc + mbar[p][q] * u[q];
                }
                out[p] = acc / pw;
                pw = pw * dt;
            }
        };
        if active.len() >= PARALLEL_THRESHOLD {
            coeffs.par_chunks_mut(width).enumerate().for_each(|(m, out)| compute(m, out));
        } else {
            coeffs.chunks_mut(width).enumerate().for_each(|(m, out)| compute(m, out));
        }
        coeffs
    };

    let build_stages = |eval: &(dyn Fn(usize, T) -> T + Sync), iteration: usize| -> Result<Vec<Vec<T>>> {
        let mut stages = Vec::with_capacity(order);
        for &tk in &times[1..] {
            let vals = map_nodes(&idx, |m| eval(m, tk));
            check_finite(active, &vals, iteration)?;
            let mut st = base.clone();
            for (m, &k) in active.iter().enumerate() {
                st[k] = vals[m];
            }
            reimpose(&mut st);
            stages.push(st);
        }
        Ok(stages)
    };

    // Predictor: zeroth-order values at every sample time.
    let stages = build_stages(&|m, tk| node(m, &[a0[m]], tk), 0)?;
    let mut coeffs = fit(&stages);
    let mut current = map_nodes(&idx, |m| node(m, &coeffs[m * width..(m + 1) * width], dt));
    check_finite(active, &current, 0)?;

    let mut changes = Vec::new();
    for it in 1..=config.max_corrections {
        let c = &coeffs;
        let stages = build_stages(&|m, tk| node(m, &c[m * width..(m + 1) * width], tk), it)?;
        coeffs = fit(&stages);
        let cand = map_nodes(&idx, |m| node(m, &coeffs[m * width..(m + 1) * width], dt));
        check_finite(active, &cand, it)?;
        let change = cand
            .iter()
            .zip(&current)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()));
        current = cand;
        changes.push(change);
        if change < config.tolerance {
            break;
        }
    }

    let mut out = base;
    for (m, &k) in active.iter().enumerate() {
        out[k] = current[m];
    }
    reimpose(&mut out);
    let iterations = changes.len();
    Ok((out, report(iterations, changes)))
}

/// One step of the temporal-ODE scheme on a field with constant diffusivity.
///
/// `source(k, u)` is evaluated once per node at the start of the step.
pub fn predictor_corrector_step<T: Real, G: Mesh<T>>(
    field: &Field<T, G>,
    diffusivity: T,
    source: Option<&(dyn Fn(usize, T) -> T + Sync)>,
    config: &SchemeConfig<T>,
    dt: T,
) -> Result<Field<T, G>> {
    predictor_corrector_step_with_report(field, Diffusivity::Uniform(diffusivity), source, config, dt).map(|r| r.0)
}

/// As [`predictor_corrector_step`], also returning the corrector history.
pub fn predictor_corrector_step_with_report<T: Real, G: Mesh<T>>(
    field: &Field<T, G>,
    diffusivity: Diffusivity<'_, T>,
    source: Option<&(dyn Fn(usize, T) -> T + Sync)>,
    config: &SchemeConfig<T>,
    dt: T,
) -> Result<(Field<T, G>, CorrectorReport<T>)> {
    let grid = field.grid();
    let values = field.values();
    let src: Vec<T> = match source {
        Some(f) => values.iter().enumerate().map(|(k, &u)| f(k, u)).collect(),
        None => vec![T::zero(); values.len()],
    };
    let active = grid.interior_nodes();
    let boundary = field.boundary().clone();
    let reimpose = move |v: &mut [T]| grid.apply_boundary(v, &boundary);
    let (out, report) = predictor_corrector_values(grid, values, &active, diffusivity, &src, config, dt, &reimpose)?;
    Ok((field.replace_values(out), report))
}

/// Classic forward-Euler (FTCS) diffusion step, kept as the explicit baseline.
pub fn explicit_euler_step<T: Real, G: Mesh<T>>(field: &Field<T, G>, diffusivity: T, dt: T) -> Field<T, G> {
    let grid = field.grid();
    let u = field.values();
    let inv2 = grid.inverse_square_sum();
    let two = lit::<T>(2.0);
    let mut out = u.to_vec();
    for k in grid.interior_nodes() {
        out[k] = u[k] + dt * diffusivity * (grid.neighbor_sum(u, k) - two * inv2 * u[k]);
    }
    let mut f = field.replace_values(out);
    f.apply_dirichlet();
    f
}

/// How the forcing term of the wave-form advection update is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveForm {
    /// `B = c^2 (u_{i-1} + u_{i+1}) / dx^2`, consistent with `A = 2c^2/dx^2`.
    #[default]
    Derived,
    /// `B = (u_{i-1} + u_{i+1}) / dx^2` as printed alongside the update.
    Literal,
}

/// Advection update from the second-order representative ODE `u'' = -A u + B`.
#[allow(clippy::too_many_arguments)]
pub fn wave_advection_update<T: Real>(u: T, u_left: T, u_right: T, c: T, dx: T, dt: T, form: WaveForm) -> T {
    if c == T::zero() {
        return u;
    }
    let two = lit::<T>(2.0);
    let dx2 = dx * dx;
    let a = two * c * c / dx2;
    let b = match form {
        WaveForm::Derived => c * c * (u_left + u_right) / dx2,
        WaveForm::Literal => (u_left + u_right) / dx2,
    };
    let du0 = -c * (u_right - u_left) / (two * dx);
    let root = a.sqrt();
    let theta = dt * root;
    let steady = b / a;
    (u - steady) * theta.cos() + du0 / root * theta.sin() + steady
}

/// Unconditionally stable upwind-switching update of the non-split ADE
/// `du/dtau = A u + B`, with the upwind side chosen by the sign of `c`.
pub fn nonsplit_switching_update<T: Real>(u: T, u_left: T, u_right: T, c: T, diffusivity: T, dx: T, dt: T) -> T {
    let two = lit::<T>(2.0);
    let dx2 = dx * dx;
    let sum = diffusivity * (u_left + u_right) / dx2;
    let (a, b) = if c >= T::zero() {
        (-two * diffusivity / dx2 - c / dx, sum + c * u_left / dx)
    } else {
        (-two * diffusivity / dx2 + c / dx, sum - c * u_right / dx)
    };
    let steady = -b / a;
    let em1 = (a * dt).exp_m1();
    u * (em1 + T::one()) - steady * em1
}

/// Stationary point and its linear stability for `du/dtau = D(u)(A u + B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict<T> {
    pub stationary: T,
    /// `dF/du` at the stationary point, `A * D(u*)`.
    pub slope: T,
    pub stable: bool,
}

/// Zeroth-order stability test of a nonlinear diffusion law at one node.
pub fn zeroth_order_stability_check<T: Real>(
    law: impl Fn(T) -> T,
    u_left: T,
    u_right: T,
    dx: T,
) -> StabilityVerdict<T> {
    let two = lit::<T>(2.0);
    let a = -two / (dx * dx);
    let b = (u_left + u_right) / (dx * dx);
    let stationary = -b / a;
    let slope = a * law(stationary);
    StabilityVerdict {
        stationary,
        slope,
        stable: slope < T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    #[test]
    fn uniform_and_chebyshev_nodes() {
        assert_eq!(sampling_nodes::<f64>(2, 1.0, Sampling::Uniform).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(sampling_nodes::<f64>(1, 1.0, Sampling::Uniform).unwrap(), vec![0.0, 1.0]);
        let c = sampling_nodes::<f64>(2, 1.0, Sampling::Chebyshev).unwrap();
        assert!((c[1] - 0.5).abs() < 1e-15);
        assert!(sampling_nodes::<f64>(9, 1.0, Sampling::Uniform).is_err());
    }

    #[test]
    fn p0_closed_form_values() {
        let params = DiffusionUpdateParams {
            center: 0.0,
            abar: 1.0,
            diffusivity: 1.0,
            source: 0.0,
        };
        let poly = NeighborPolynomial::constant(2.0);
        let v = closed_form_update(&params, &poly, 0.1).unwrap();
        assert!((v - (1.0 - (-0.2f64).exp())).abs() < 1e-15);
        let inf = closed_form_update(&params, &poly, 1e6).unwrap();
        assert!((inf - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_tau_is_exact() {
        let params = DiffusionUpdateParams {
            center: 0.731,
            abar: 3.7,
            diffusivity: 0.9,
            source: 1.3,
        };
        let poly = NeighborPolynomial::new(vec![1.1, -2.0, 0.5, 7.0, -3.0]).unwrap();
        assert_eq!(closed_form_update(&params, &poly, 0.0).unwrap(), 0.731);
    }

    #[test]
    fn rejects_degenerate_abar() {
        let params = DiffusionUpdateParams {
            center: 0.0,
            abar: 0.0,
            diffusivity: 1.0,
            source: 0.0,
        };
        assert!(closed_form_update(&params, &NeighborPolynomial::constant(1.0), 0.1).is_err());
    }

    #[test]
    fn explicit_p2_corrector_form_agrees() {
        // Written-out second-order corrector as a check on the recurrences.
        let (u, abar, d, s): (f64, f64, f64, f64) = (0.3, 2.5, 1.5, 0.7);
        let (a0, a1, a2) = (1.2, -0.4, 0.9);
        let poly = NeighborPolynomial::new(vec![a0, a1, a2]).unwrap();
        let params = DiffusionUpdateParams {
            center: u,
            abar,
            diffusivity: d,
            source: s,
        };
        for &tau in &[0.0, 0.05, 0.4, 2.0] {
            let e = (-2.0 * abar * tau).exp();
            let explicit = s / (2.0 * abar)
                + e * (u - s / (2.0 * abar) - d / abar * (a0 / 2.0 - a1 / (4.0 * abar) + a2 / (4.0 * abar * abar)))
                + d / abar
                    * (a0 / 2.0
                        + a1 / 2.0 * (tau - 1.0 / (2.0 * abar))
                        + a2 / 2.0 * (1.0 / (2.0 * abar * abar) - tau / abar + tau * tau));
            let v = closed_form_update(&params, &poly, tau).unwrap();
            assert!((v - explicit).abs() < 1e-13, "tau={tau}");
        }
    }

    #[test]
    fn coefficient_examples() {
        let p = solve_polynomial_coeffs::<f64>(&[(0.0, 1.0), (0.2, 3.0)]).unwrap();
        assert!((p.coeffs()[1] - 10.0).abs() < 1e-12);
        let p = solve_polynomial_coeffs::<f64>(&[(0.0, 4.0), (0.5, 4.0), (1.0, 4.0)]).unwrap();
        assert_eq!(p.coeffs()[0], 4.0);
        assert!(p.coeffs()[1].abs() < 1e-14 && p.coeffs()[2].abs() < 1e-14);
        assert!(solve_polynomial_coeffs::<f64>(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn mbar_tables() {
        let m1 = normalized_vandermonde_inverse::<f64>(1, Sampling::Uniform).unwrap();
        assert_eq!(m1, vec![vec![1.0, 0.0], vec![-1.0, 1.0]]);
        let m2 = normalized_vandermonde_inverse::<f64>(2, Sampling::Uniform).unwrap();
        let expect = [[1.0, 0.0, 0.0], [-3.0, 4.0, -1.0], [2.0, -4.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m2[i][j] - expect[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(asymptotic_limit(1.0, 1.0, 2.0, 0.0, 0), 1.0);
        assert_eq!(asymptotic_limit(1.0, 1.0, 0.0, 2.0, 1), 1.0);
        assert_eq!(asymptotic_limit(1.0, 1.0, 2.0, 2.0, 2), 1.0);
    }

    #[test]
    fn wave_fixed_point_and_guard() {
        assert!((wave_advection_update::<f64>(3.0, 3.0, 3.0, 1.0, 0.1, 0.01, WaveForm::Derived) - 3.0).abs() < 1e-14);
        assert_eq!(wave_advection_update::<f64>(1.0, 5.0, 7.0, 0.0, 0.1, 0.01, WaveForm::Derived), 1.0);
    }

    #[test]
    fn switching_fixed_point_and_limit() {
        for &c in &[-2.0, 0.0, 1.5] {
            let v = nonsplit_switching_update::<f64>(0.4, 0.4, 0.4, c, 0.3, 0.1, 0.7);
            assert!((v - 0.4).abs() < 1e-14);
        }
        let (d, dx, c) = (0.1, 0.1, 1.0);
        let v = nonsplit_switching_update::<f64>(0.0, 1.0, 0.0, c, d, dx, 1e9);
        let expect = (d / (dx * dx) + c / dx) / (2.0 * d / (dx * dx) + c / dx);
        assert!((v - expect).abs() < 1e-14);
    }

    #[test]
    fn stability_examples() {
        let v = zeroth_order_stability_check(|_| 0.5, 0.0, 2.0, 0.1);
        assert_eq!(v.stationary, 1.0);
        assert!(v.stable);
        let v = zeroth_order_stability_check(|u| 1.0 - u, 2.0, 2.0, 0.1);
        assert_eq!(v.stationary, 2.0);
        assert!(!v.stable);
        let v = zeroth_order_stability_check(|_| 0.0, 1.0, 1.0, 0.1);
        assert!(!v.stable);
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid1D::<f64>::new(1.0, 11, 0.0).unwrap();
        let f = Field::constant(g, 0.0).unwrap();
        let out = predictor_corrector_step(&f, 1.0, None, &SchemeConfig::new(2), 0.01).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn p0_field_step_matches_closed_form() {
        let g = Grid1D::<f64>::new(1.0, 9, 0.0).unwrap();
        let f = Field::sample(g, |x: f64| (3.0 * x).sin() + x).unwrap();
        let (d, dt) = (0.7, 0.03);
        let out = predictor_corrector_step(&f, d, None, &SchemeConfig::p0(), dt).unwrap();
        let u = f.values();
        for k in 1..8 {
            let params = DiffusionUpdateParams {
                center: u[k],
                abar: d / (g.dx() * g.dx()),
                diffusivity: d,
                source: 0.0,
            };
            let poly = NeighborPolynomial::constant(g.neighbor_sum(u, k));
            assert_eq!(out.values()[k], closed_form_update(&params, &poly, dt).unwrap());
        }
    }
}

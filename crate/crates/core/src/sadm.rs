//! Segmented Adomian decomposition for nonlinear representative ODEs `du/dtau = N(u)`.
//!
//! On each step the solution is expanded as `u = u0 + u1(tau) + ... + uK(tau)` with
//! `u_{k+1} = int_0^tau A_k`, where `A_k` are the Adomian polynomials of `N`.

use crate::error::{invalid, Error, Result};
use crate::grid::{Field, Mesh};
use crate::law::{DiffusionLaw, RationalDiffusion};
use crate::scalar::{count, lit, Real};
use rayon::prelude::*;

/// Highest series order supported.
pub const MAX_SADM_ORDER: usize = 3;

/// Polynomial in `tau`, truncated at a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct TauPolynomial<T> {
    coeffs: Vec<T>,
    cap: usize,
}

impl<T: Real> TauPolynomial<T> {
    pub fn zero(cap: usize) -> Self {
        Self {
            coeffs: vec![T::zero()],
            cap,
        }
    }

    pub fn constant(c: T, cap: usize) -> Self {
        Self { coeffs: vec![c], cap }
    }

    pub fn from_coeffs(mut coeffs: Vec<T>, cap: usize) -> Self {
        coeffs.truncate(cap + 1);
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs, cap }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, tau: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &a| acc * tau + a)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_else(T::zero)
                    + other.coeffs.get(i).copied().unwrap_or_else(T::zero)
            })
            .collect();
        Self::from_coeffs(c, self.cap)
    }

    pub fn scale(&self, a: T) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&c| c * a).collect(), self.cap)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = (self.coeffs.len() + other.coeffs.len() - 1).min(self.cap + 1);
        let mut c = vec![T::zero(); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j < n {
                    c[i + j] = c[i + j] + a * b;
                }
            }
        }
        Self::from_coeffs(c, self.cap)
    }

    /// `int_0^tau p`.
    pub fn integrate(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(T::zero());
        for (i, &a) in self.coeffs.iter().enumerate() {
            c.push(a / count::<T>(i + 1));
        }
        Self::from_coeffs(c, self.cap)
    }
}

/// Right-hand side `N(u)` of a scalar autonomous ODE with three derivatives.
pub trait NonlinearOdeSpec<T: Real> {
    /// `[N, N', N'', N''']` at `u`.
    fn derivatives(&self, u: T) -> Result<[T; 4]>;
}

/// `N(u) = D(u)(A u + B) + C`, the frozen-neighbour form of nonlinear diffusion.
#[derive(Debug, Clone, Copy)]
pub struct DiffusionNode<'a, T, L: ?Sized> {
    pub law: &'a L,
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real, L: DiffusionLaw<T> + ?Sized> NonlinearOdeSpec<T> for DiffusionNode<'_, T, L> {
    fn derivatives(&self, u: T) -> Result<[T; 4]> {
        let g = self.a * u + self.b;
        let d = [self.law.value(u), self.law.d1(u), self.law.d2(u), self.law.d3(u)];
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateDiffusion(format!("diffusion law not finite at u = {u}")));
        }
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        Ok([
            d[0] * g + self.c,
            d[1] * g + self.a * d[0],
            d[2] * g + two * self.a * d[1],
            d[3] * g + three * self.a * d[2],
        ])
    }
}

/// Truncated Adomian series `u0 + u1 + ... + uK` on `[0, dt]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSeries<T> {
    pub terms: Vec<TauPolynomial<T>>,
    pub dt: T,
}

impl<T: Real> TauSeries<T> {
    pub fn eval(&self, tau: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, p| acc + p.eval(tau))
    }

    pub fn end_value(&self) -> T {
        self.eval(self.dt)
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }
}

/// Adomian polynomial `A_n` (n <= 3) from the series components `u_1..u_n`.
pub fn adomian_polynomial<T: Real>(n: usize, derivs: &[T; 4], comps: &[TauPolynomial<T>], cap: usize) -> Result<TauPolynomial<T>> {
    let half = lit::<T>(0.5);
    let sixth = lit::<T>(1.0 / 6.0);
    let u = |k: usize| &comps[k - 1];
    Ok(match n {
        0 => TauPolynomial::constant(derivs[0], cap),
        1 => u(1).scale(derivs[1]),
        2 => u(2).scale(derivs[1]).add(&u(1).mul(u(1)).scale(half * derivs[2])),
        3 => u(3)
            .scale(derivs[1])
            .add(&u(1).mul(u(2)).scale(derivs[2]))
            .add(&u(1).mul(u(1)).mul(u(1)).scale(sixth * derivs[3])),
        _ => return invalid("adomian order", format!("{n} exceeds 3")),
    })
}

/// Series of order `order` for `du/dtau = N(u)`, `u(0) = u0`.
pub fn adomian_expand<T: Real, S: NonlinearOdeSpec<T> + ?Sized>(spec: &S, u0: T, order: usize, dt: T) -> Result<TauSeries<T>> {
    if order == 0 || order > MAX_SADM_ORDER {
        return invalid("sadm order", format!("must be 1..={MAX_SADM_ORDER}, got {order}"));
    }
    let derivs = spec.derivatives(u0)?;
    let cap = 3 * order;
    let mut comps: Vec<TauPolynomial<T>> = Vec::with_capacity(order);
    for k in 0..order {
        let a = adomian_polynomial(k, &derivs, &comps, cap)?;
        comps.push(a.integrate());
    }
    let mut terms = vec![TauPolynomial::constant(u0, cap)];
    terms.extend(comps);
    Ok(TauSeries { terms, dt })
}

/// SADM step of `du/dtau = D0 (A u + B)/(1 + beta u) + s` with frozen neighbours,
/// `A = -2/dx^2`, `B = (u_{i-1} + u_{i+1})/dx^2`.
#[allow(clippy::too_many_arguments)]
pub fn sadm_nonlinear_diffusion_step<T: Real>(
    u: T,
    u_left: T,
    u_right: T,
    d0: T,
    beta: T,
    source: T,
    dx: T,
    dt: T,
    order: usize,
) -> Result<T> {
    if T::one() + beta * u == T::zero() {
        return Err(Error::DegenerateDiffusion("1 + beta u vanishes".into()));
    }
    let dx2 = dx * dx;
    let law = RationalDiffusion { d0, beta };
    let node = DiffusionNode {
        law: &law,
        a: -lit::<T>(2.0) / dx2,
        b: (u_left + u_right) / dx2,
        c: source,
    };
    Ok(adomian_expand(&node, u, order, dt)?.end_value())
}

/// SADM diffusion step on a field with frozen neighbours at every interior node.
///
/// `A = -2 sum_d 1/h_d^2`, `B` is the weighted neighbour sum and `C = source(k, u_k)`.
pub fn sadm_field_step<T: Real, G: Mesh<T>, L: DiffusionLaw<T> + ?Sized>(
    field: &Field<T, G>,
    law: &L,
    source: Option<&(dyn Fn(usize, T) -> T + Sync)>,
    dt: T,
    order: usize,
) -> Result<Field<T, G>> {
    let grid = field.grid();
    let u = field.values();
    let a = -lit::<T>(2.0) * grid.inverse_square_sum();
    let active = grid.interior_nodes();
    let step = |k: usize| -> Result<(T, bool)> {
        let node = DiffusionNode {
            law,
            a,
            b: grid.neighbor_sum(u, k),
            c: source.map_or(T::zero(), |f| f(k, u[k])),
        };
        let series = adomian_expand(&node, u[k], order, dt)?;
        let v = series.end_value();
        if !v.is_finite() {
            return Err(Error::NonFinite { node: k, iteration: 0 });
        }
        let last = series.terms[order].eval(dt).abs();
        Ok((v, u[k] != T::zero() && last >= u[k].abs()))
    };
    let results: Vec<Result<(T, bool)>> = if active.len() >= 4096 {
        active.par_iter().map(|&k| step(k)).collect()
    } else {
        active.iter().map(|&k| step(k)).collect()
    };
    let mut out = u.to_vec();
    let mut slow = 0usize;
    for (r, &k) in results.into_iter().zip(&active) {
        let (v, flag) = r?;
        out[k] = v;
        slow += flag as usize;
    }
    if slow > 0 {
        log::warn!("sadm: highest-order term not smaller than u0 at {slow} nodes; consider a smaller step");
    }
    let mut f = field.with_values(out)?;
    f.apply_dirichlet();
    Ok(f)
}

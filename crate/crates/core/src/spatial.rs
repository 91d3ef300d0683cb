//! Spatial-ODE updates: at `t_{n+1}` each node solves `D u'' - c u' = (u - u^n)/dt - s`
//! exactly between its neighbours, which yields an implicit three-point relation.
//! The relations are assembled into a tridiagonal system and solved with TDMA.

use crate::error::{invalid, Error, Result};
use crate::grid::Field1D;
use crate::scalar::{lit, Real};
use crate::temporal::Diffusivity;

/// `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`; `sub[0]` and `sup[n-1]` are
/// not stored (`sub`, `sup` have length `n-1`, `sub[i-1]` couples row `i` to `i-1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem<T> {
    sub: Vec<T>,
    diag: Vec<T>,
    sup: Vec<T>,
    rhs: Vec<T>,
}

impl<T: Real> TridiagonalSystem<T> {
    pub fn new(sub: Vec<T>, diag: Vec<T>, sup: Vec<T>, rhs: Vec<T>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return invalid("tridiagonal system", "size must be at least 1");
        }
        if sub.len() != n - 1 || sup.len() != n - 1 || rhs.len() != n {
            return invalid(
                "tridiagonal system",
                format!(
                    "inconsistent lengths: sub {}, diag {}, sup {}, rhs {}",
                    sub.len(),
                    n,
                    sup.len(),
                    rhs.len()
                ),
            );
        }
        Ok(Self { sub, diag, sup, rhs })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn sub(&self) -> &[T] {
        &self.sub
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn sup(&self) -> &[T] {
        &self.sup
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn solve(&self) -> Result<Vec<T>> {
        tdma_solve(self)
    }

    /// `A x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v = v + self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v = v + self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Dense row-major copy of the matrix.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.len();
        let mut m = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i > 0 {
                m[i][i - 1] = self.sub[i - 1];
            }
            if i + 1 < n {
                m[i][i + 1] = self.sup[i];
            }
        }
        m
    }
}

/// Solve a tridiagonal system with the Thomas algorithm.
pub fn tdma_solve<T: Real>(system: &TridiagonalSystem<T>) -> Result<Vec<T>> {
    let n = system.len();
    let (a, b, c, d) = (&system.sub, &system.diag, &system.sup, &system.rhs);
    let mut cp = vec![T::zero(); n];
    let mut dp = vec![T::zero(); n];
    let mut pivot = b[0];
    if pivot == T::zero() || !pivot.is_finite() {
        return Err(Error::Singular { row: 0 });
    }
    if n > 1 {
        cp[0] = c[0] / pivot;
    }
    dp[0] = d[0] / pivot;
    for i in 1..n {
        pivot = b[i] - a[i - 1] * cp[i - 1];
        if pivot == T::zero() || !pivot.is_finite() {
            return Err(Error::Singular { row: i });
        }
        if i + 1 < n {
            cp[i] = c[i] / pivot;
        }
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / pivot;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] = x[i] - cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Row `-k1 u_{i-1} + u_i - k2 u_{i+1} = k3` of the spatial scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialStencil<T> {
    pub k1: T,
    pub k2: T,
    pub k3: T,
    /// Roots of `D r^2 - c r - 1/dt = 0` scaled by `1/D`: `lambda1 > 0 > lambda2`.
    pub lambda1: T,
    pub lambda2: T,
}

fn check_positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        invalid(name, format!("must be positive and finite, got {v}"))
    }
}

/// Pure-diffusion relation `u_i = -B/A + (u_{i-1} + u_{i+1} + 2B/A) w` with
/// `A = 1/(D dt)`, `B = -u_i^n/(D dt) - s/D` and `w = 1/(e^theta + e^-theta)`,
/// `theta = sqrt(A) dx`.
pub fn spatial_diffusion_stencil<T: Real>(diffusivity: T, dt: T, dx: T, u_n: T, source: T) -> Result<SpatialStencil<T>> {
    check_positive("diffusivity", diffusivity)?;
    check_positive("dt", dt)?;
    check_positive("dx", dx)?;
    let a = (diffusivity * dt).recip();
    let b = -u_n * a - source / diffusivity;
    let root = a.sqrt();
    let theta = root * dx;
    let e = (-theta).exp();
    let w = e / (T::one() + e * e);
    let two = lit::<T>(2.0);
    Ok(SpatialStencil {
        k1: w,
        k2: w,
        k3: -b / a * (T::one() - two * w),
        lambda1: root,
        lambda2: -root,
    })
}

/// Advection-diffusion relation from the exact solution of
/// `u'' - (c/D) u' - A u = B` on `[x_{i-1}, x_{i+1}]`.
pub fn spatial_advection_diffusion_stencil<T: Real>(
    c: T,
    diffusivity: T,
    dt: T,
    dx: T,
    u_n: T,
    source: T,
) -> Result<SpatialStencil<T>> {
    check_positive("diffusivity", diffusivity)?;
    check_positive("dt", dt)?;
    check_positive("dx", dx)?;
    let a = (diffusivity * dt).recip();
    let b = -u_n * a - source / diffusivity;
    let cc = c / diffusivity;
    let four = lit::<T>(4.0);
    let half = lit::<T>(0.5);
    let disc = (cc * cc + four * a).sqrt();
    // lambda1 * lambda2 = -A; take the root without cancellation first.
    let (l1, l2) = if cc >= T::zero() {
        let l1 = half * (cc + disc);
        (l1, -a / l1)
    } else {
        let l2 = half * (cc - disc);
        (-a / l2, l2)
    };
    let r = l1 - l2;
    // Numerator and denominator scaled by exp(-r dx) so every exponent is non-positive.
    let den = (-(r + r) * dx).exp_m1();
    let k1 = (((l2 + l2 - l1) * dx).exp() - (l2 * dx).exp()) / den;
    let k2 = ((-(l1 + l1 - l2) * dx).exp() - (-l1 * dx).exp()) / den;
    Ok(SpatialStencil {
        k1,
        k2,
        k3: -b / a * (T::one() - k1 - k2),
        lambda1: l1,
        lambda2: l2,
    })
}

/// One implicit spatial-ODE step for `u_t + c u_x = D u_xx + f`.
///
/// The field's Dirichlet data are taken as the values at `t_{n+1}`.
pub fn spatial_step_1d<T: Real>(
    field: &Field1D<T>,
    diffusivity: T,
    c: T,
    source: Option<&(dyn Fn(usize, T) -> T + Sync)>,
    dt: T,
) -> Result<Field1D<T>> {
    let grid = field.grid();
    let u = field.values();
    let n = u.len();
    let dx = grid.dx();
    let b = *field.boundary();
    let mut sub = vec![T::zero(); n - 1];
    let mut diag = vec![T::one(); n];
    let mut sup = vec![T::zero(); n - 1];
    let mut rhs = vec![T::zero(); n];
    rhs[0] = b.left;
    rhs[n - 1] = b.right;
    for i in 1..n - 1 {
        let s = source.map_or(T::zero(), |f| f(i, u[i]));
        let st = if c == T::zero() {
            spatial_diffusion_stencil(diffusivity, dt, dx, u[i], s)?
        } else {
            spatial_advection_diffusion_stencil(c, diffusivity, dt, dx, u[i], s)?
        };
        sub[i - 1] = -st.k1;
        sup[i] = -st.k2;
        rhs[i] = st.k3;
    }
    let x = TridiagonalSystem::new(sub, diag.clone(), sup, rhs)?.solve()?;
    diag.clear();
    let mut out = field.with_values(x)?;
    out.apply_dirichlet();
    Ok(out)
}

/// Backward-Euler step `(u^{n+1} - u^n)/dt = D_i (u_{i-1} - 2u_i + u_{i+1})^{n+1}/dx^2 + s`.
pub fn classic_implicit_step_1d<T: Real>(
    field: &Field1D<T>,
    diffusivity: Diffusivity<'_, T>,
    source: Option<&(dyn Fn(usize, T) -> T + Sync)>,
    dt: T,
) -> Result<Field1D<T>> {
    let grid = field.grid();
    let u = field.values();
    let n = u.len();
    let dx2 = grid.dx() * grid.dx();
    let b = *field.boundary();
    let two = lit::<T>(2.0);
    let mut sub = vec![T::zero(); n - 1];
    let mut diag = vec![T::one(); n];
    let mut sup = vec![T::zero(); n - 1];
    let mut rhs = vec![T::zero(); n];
    rhs[0] = b.left;
    rhs[n - 1] = b.right;
    for i in 1..n - 1 {
        let d = match diffusivity {
            Diffusivity::Uniform(d) => d,
            Diffusivity::PerNode(v) => v[i],
        };
        let lam = d * dt / dx2;
        sub[i - 1] = -lam;
        sup[i] = -lam;
        diag[i] = T::one() + two * lam;
        rhs[i] = u[i] + dt * source.map_or(T::zero(), |f| f(i, u[i]));
    }
    let x = TridiagonalSystem::new(sub, diag, sup, rhs)?.solve()?;
    let mut out = field.with_values(x)?;
    out.apply_dirichlet();
    Ok(out)
}

//! Viscous Burgers benchmark on `[-1, 1]` with `u(x, 0) = -sin(pi x)`.

use crate::characteristics::{advect_step, Tracer};
use crate::error::{invalid, Error, Result};
use crate::grid::{Field1D, Grid1D, Interpolation};
use crate::quadrature::gauss_legendre;
use crate::spatial::{classic_implicit_step_1d, spatial_step_1d};
use crate::splitting::{split_step, FnOperator, OperatorKind, Splitting};
use crate::temporal::{predictor_corrector_step, Diffusivity, SchemeConfig};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Quadrature used by [`burgers_analytic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersQuadrature {
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Upper bound on the panel width.
    pub max_panel: f64,
    /// Panels per `sqrt(nu t)`.
    pub panels_per_width: f64,
    /// The Gaussian factor is cut where its exponent has dropped by the kernel's
    /// full variation plus this margin.
    pub margin: f64,
}

impl Default for BurgersQuadrature {
    fn default() -> Self {
        Self {
            order: 10,
            max_panel: 0.002,
            panels_per_width: 4.0,
            margin: 50.0,
        }
    }
}

impl BurgersQuadrature {
    /// Same rule with panels half as wide.
    pub fn refined(self) -> Self {
        Self {
            max_panel: self.max_panel / 2.0,
            panels_per_width: self.panels_per_width * 2.0,
            ..self
        }
    }
}

/// Cole-Hopf solution
/// `u = -int sin(pi(x-e)) f(x-e) G(e) de / int f(x-e) G(e) de`,
/// `f(y) = exp(-cos(pi y)/(2 pi nu))`, `G(e) = exp(-e^2/(4 nu t))`.
///
/// Both integrals share one log-sum-exp shift, so the large exponents at small `nu`
/// never overflow.
pub fn burgers_analytic(x: f64, t: f64, nu: f64, q: &BurgersQuadrature) -> Result<f64> {
    if !(t > 0.0) || !(nu > 0.0) {
        return invalid("burgers_analytic", format!("need t > 0 and nu > 0, got t={t}, nu={nu}"));
    }
    let kappa = 1.0 / (2.0 * PI * nu);
    let width = (nu * t).sqrt();
    let half = (4.0 * nu * t * (2.0 * kappa + q.margin)).sqrt();
    let h = q.max_panel.min(width / q.panels_per_width);
    let panels = ((2.0 * half / h).ceil() as usize).max(1);
    let h = 2.0 * half / panels as f64;
    let (nodes, weights) = gauss_legendre(q.order);
    let inv4nut = 1.0 / (4.0 * nu * t);

    let mut eta = Vec::with_capacity(panels * q.order);
    let mut w = Vec::with_capacity(panels * q.order);
    for p in 0..panels {
        let mid = -half + (p as f64 + 0.5) * h;
        for (&z, &wz) in nodes.iter().zip(&weights) {
            eta.push(mid + 0.5 * h * z);
            w.push(0.5 * h * wz);
        }
    }
    let expo: Vec<f64> = eta
        .iter()
        .map(|&e| -(PI * (x - e)).cos() * kappa - e * e * inv4nut)
        .collect();
    let shift = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&e, &wi), &ex) in eta.iter().zip(&w).zip(&expo) {
        let g = wi * (ex - shift).exp();
        num += (PI * (x - e)).sin() * g;
        den += g;
    }
    if !(den > 0.0) || !num.is_finite() {
        return Err(Error::Quadrature { estimate: den });
    }
    Ok(-num / den)
}

/// Analytic values on every node after each of the first `steps` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersTable {
    pub grid: Grid1D<f64>,
    pub dt: f64,
    pub nu: f64,
    /// `values[n][i]` is `u(x_i, (n+1) dt)`.
    pub values: Vec<Vec<f64>>,
}

impl BurgersTable {
    pub fn new(nx: usize, dt: f64, nu: f64, steps: usize, q: &BurgersQuadrature) -> Result<Self> {
        let grid = Grid1D::span(-1.0, 1.0, nx)?;
        let values = (1..=steps)
            .map(|n| {
                let t = n as f64 * dt;
                let row: Result<Vec<f64>> = (0..nx)
                    .into_par_iter()
                    .map(|i| {
                        if i == 0 || i == nx - 1 {
                            Ok(0.0)
                        } else {
                            burgers_analytic(grid.x(i), t, nu, q)
                        }
                    })
                    .collect();
                row
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, dt, nu, values })
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }
}

/// Diffusion scheme paired with characteristics in the Burgers runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurgersScheme {
    ClassicImplicit,
    SpatialOde,
    TemporalP0,
    TemporalP1,
    /// First order with 20 corrector sweeps.
    TemporalP1Loop,
}

impl BurgersScheme {
    pub const ALL: [BurgersScheme; 5] = [
        BurgersScheme::ClassicImplicit,
        BurgersScheme::SpatialOde,
        BurgersScheme::TemporalP0,
        BurgersScheme::TemporalP1,
        BurgersScheme::TemporalP1Loop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BurgersScheme::ClassicImplicit => "classic-implicit",
            BurgersScheme::SpatialOde => "spatial-ode",
            BurgersScheme::TemporalP0 => "temporal-p0",
            BurgersScheme::TemporalP1 => "temporal-p1",
            BurgersScheme::TemporalP1Loop => "temporal-p1-loop",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    fn diffuse(self, field: &Field1D<f64>, nu: f64, dt: f64) -> Result<Field1D<f64>> {
        match self {
            BurgersScheme::ClassicImplicit => classic_implicit_step_1d(field, Diffusivity::Uniform(nu), None, dt),
            BurgersScheme::SpatialOde => spatial_step_1d(field, nu, 0.0, None, dt),
            BurgersScheme::TemporalP0 => predictor_corrector_step(field, nu, None, &SchemeConfig::p0(), dt),
            BurgersScheme::TemporalP1 => {
                predictor_corrector_step(field, nu, None, &SchemeConfig::new(1).with_corrections(0), dt)
            }
            BurgersScheme::TemporalP1Loop => predictor_corrector_step(
                field,
                nu,
                None,
                &SchemeConfig::new(1).with_corrections(20).with_tolerance(0.0),
                dt,
            ),
        }
    }
}

/// Numerical fields after each step and the averaged error against the table.
#[derive(Debug, Clone)]
pub struct BurgersRun {
    pub fields: Vec<Field1D<f64>>,
    pub averaged_error: f64,
}

/// Lie-split run (characteristics with velocity `u`, then diffusion) for as many
/// steps as the table holds.
pub fn run_burgers(scheme: BurgersScheme, table: &BurgersTable) -> Result<BurgersRun> {
    let grid = table.grid.clone();
    let nu = table.nu;
    let u0 = Field1D::sample(grid, |x: f64| -(PI * x).sin())?;
    let mut u0 = u0;
    u0.set_boundary(crate::grid::Dirichlet1D { left: 0.0, right: 0.0 })?;
    u0.apply_dirichlet();

    let adv = FnOperator::new(OperatorKind::Advection, "characteristics", |f: &Field1D<f64>, t: f64, h: f64| {
        advect_step(f, &|_x: f64, _t: f64, u: f64| u, t, h, Tracer::Euler, Interpolation::Cubic)
    });
    let diff = FnOperator::new(OperatorKind::Diffusion, scheme.name(), move |f: &Field1D<f64>, _t: f64, h: f64| {
        scheme.diffuse(f, nu, h)
    });
    let mut fields = Vec::with_capacity(table.steps());
    let mut cur = u0;
    for n in 0..table.steps() {
        cur = split_step(&adv, &diff, &cur, n as f64 * table.dt, table.dt, Splitting::Lie)?;
        fields.push(cur.clone());
    }
    let averaged_error = burgers_averaged_error(&fields, table)?;
    Ok(BurgersRun { fields, averaged_error })
}

/// `(1/(steps N_x)) sum_n sum_i (u_analytic - u)^2` over the table's steps.
pub fn burgers_averaged_error(fields: &[Field1D<f64>], table: &BurgersTable) -> Result<f64> {
    if fields.len() < table.steps() {
        return Err(Error::GridMismatch(format!(
            "{} numerical steps for {} analytic steps",
            fields.len(),
            table.steps()
        )));
    }
    let nx = table.grid.len();
    let mut sum = 0.0;
    for (f, exact) in fields.iter().zip(&table.values) {
        if f.grid() != &table.grid {
            return Err(Error::GridMismatch("numerical grid differs from the analytic table".into()));
        }
        sum += f.values().iter().zip(exact).map(|(u, e)| (e - u) * (e - u)).sum::<f64>();
    }
    Ok(sum / (table.steps() * nx) as f64)
}

//! 1D heat equation runs and the asymptotic-limit check.

use crate::error::{invalid, Result};
use crate::grid::{Field1D, Grid1D, Mesh};
use crate::spatial::{classic_implicit_step_1d, spatial_step_1d};
use crate::temporal::{asymptotic_limit, explicit_euler_step, predictor_corrector_values, Diffusivity, SchemeConfig};
use std::f64::consts::PI;

/// Diffusion discretization used by the 1D runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatScheme {
    Temporal(SchemeConfig<f64>),
    /// Forward Euler.
    Explicit,
    /// Backward Euler.
    ClassicImplicit,
    SpatialOde,
}

/// One diffusion step of `field` with constant diffusivity and no source.
pub fn heat_step(field: &Field1D<f64>, scheme: &HeatScheme, d: f64, dt: f64) -> Result<Field1D<f64>> {
    match scheme {
        HeatScheme::Temporal(cfg) => crate::temporal::predictor_corrector_step(field, d, None, cfg, dt),
        HeatScheme::Explicit => Ok(explicit_euler_step(field, d, dt)),
        HeatScheme::ClassicImplicit => classic_implicit_step_1d(field, Diffusivity::Uniform(d), None, dt),
        HeatScheme::SpatialOde => spatial_step_1d(field, d, 0.0, None, dt),
    }
}

/// Result of a heat run: the final field and the value range after every step.
#[derive(Debug, Clone)]
pub struct HeatRun {
    pub field: Field1D<f64>,
    pub ranges: Vec<(f64, f64)>,
}

/// `steps` diffusion steps on `[0, 1]` from `initial`, Dirichlet data from the initial faces.
/// Stops early, keeping the ranges so far, if a value stops being finite.
pub fn run_heat_1d(
    scheme: &HeatScheme,
    nx: usize,
    d: f64,
    dt: f64,
    steps: usize,
    initial: &dyn Fn(f64) -> f64,
) -> Result<HeatRun> {
    if !(d > 0.0) || !(dt > 0.0) {
        return invalid("heat run", "diffusivity and dt must be positive");
    }
    let grid = Grid1D::new(1.0, nx, 0.0)?;
    let mut field = Field1D::sample(grid, initial)?;
    let mut ranges = Vec::with_capacity(steps);
    for _ in 0..steps {
        match heat_step(&field, scheme, d, dt) {
            Ok(f) => field = f,
            Err(crate::Error::Validation { .. }) | Err(crate::Error::NonFinite { .. }) => {
                ranges.push((f64::NAN, f64::NAN));
                break;
            }
            Err(e) => return Err(e),
        }
        let r = field.min_max();
        ranges.push(r);
        if !r.0.is_finite() || !r.1.is_finite() {
            break;
        }
    }
    Ok(HeatRun { field, ranges })
}

/// `e^{-d m^2 pi^2 t} sin(m pi x)`.
pub fn heat_mode_exact(d: f64, m: f64, x: f64, t: f64) -> f64 {
    (-d * m * m * PI * PI * t).exp() * (m * PI * x).sin()
}

/// Max-norm error of a field against the decaying first mode.
pub fn heat_mode_error(field: &Field1D<f64>, d: f64, t: f64) -> f64 {
    let g = field.grid();
    field
        .values()
        .iter()
        .enumerate()
        .fold(0.0, |m, (i, &u)| m.max((u - heat_mode_exact(d, 1.0, g.x(i), t)).abs()))
}

/// Closed-form update of the middle node of a random 1D field at `dt = 1e6/abar`,
/// with `abar = d/dx^2`, and the limit it should approach.
///
/// The update runs through the predictor with `order` samples and no corrector sweeps,
/// so the intermediate neighbour samples are the algorithm's own predictions.
pub fn asymptotic_limit_trial(order: usize, d: f64, dx: f64, values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 5 || values.len() % 2 == 0 {
        return invalid("values", "need an odd number (>= 5) of nodal values");
    }
    let n = values.len();
    let grid = Grid1D::new(dx * (n - 1) as f64, n, 0.0)?;
    let abar = d * grid.inverse_square_sum();
    let dt = 1e6 / abar;
    let active = grid.interior_nodes();
    let src = vec![0.0; n];
    let cfg = SchemeConfig::new(order).with_corrections(0);
    let k = n / 2;
    let (out, _) = predictor_corrector_values(&grid, values, &active, Diffusivity::Uniform(d), &src, &cfg, dt, &|_| {})?;
    let u_start = grid.neighbor_sum(values, k);
    let u_end = if order == 0 {
        u_start
    } else {
        // neighbour sum of the last predicted stage: the P0 update of each neighbour at dt
        let (pred, _) = predictor_corrector_values(
            &grid,
            values,
            &active,
            Diffusivity::Uniform(d),
            &src,
            &SchemeConfig::p0(),
            dt,
            &|_| {},
        )?;
        grid.neighbor_sum(&pred, k)
    };
    Ok((out[k], asymptotic_limit(d, abar, u_start, u_end, order)))
}

//! Constant-coefficient advection-diffusion on `[0, 1]` against a translating,
//! decaying Fourier mode, used to measure splitting orders.

use crate::characteristics::advect_step;
use crate::characteristics::Tracer;
use crate::error::{invalid, Result};
use crate::grid::{Dirichlet1D, Field1D, Grid1D, Interpolation};
use crate::splitting::{integrate, FnOperator, OperatorKind, Splitting};
use crate::temporal::{predictor_corrector_step, SchemeConfig};
use std::f64::consts::PI;

/// `e^{-D m^2 pi^2 t} sin(m pi (x - c t))`, an exact solution of `u_t + c u_x = D u_xx`.
pub fn linear_ade_exact(c: f64, d: f64, m: f64, x: f64, t: f64) -> f64 {
    (-d * m * m * PI * PI * t).exp() * (m * PI * (x - c * t)).sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdeSetup {
    pub c: f64,
    pub d: f64,
    pub m: f64,
    pub nx: usize,
    pub t_end: f64,
    pub interpolation: Interpolation,
    /// Diffusion sub-steps: second order, corrector sweeps up to this cap.
    pub corrections: usize,
}

impl Default for AdeSetup {
    fn default() -> Self {
        Self {
            c: 1.0,
            d: 0.05,
            m: 1.0,
            nx: 201,
            t_end: 0.5,
            interpolation: Interpolation::CubicUnlimited,
            corrections: 5000,
        }
    }
}

impl AdeSetup {
    fn exact(&self, x: f64, t: f64) -> f64 {
        linear_ade_exact(self.c, self.d, self.m, x, t)
    }

    fn boundary_at(&self, grid: &Grid1D<f64>, t: f64) -> Dirichlet1D<f64> {
        Dirichlet1D {
            left: self.exact(grid.origin(), t),
            right: self.exact(grid.end(), t),
        }
    }

    /// Split run with `steps` equal steps to `t_end`. Every sub-flow takes the exact
    /// Dirichlet data at the end of its own interval.
    pub fn run(&self, splitting: Splitting, steps: usize) -> Result<Field1D<f64>> {
        if steps == 0 {
            return invalid("steps", "must be positive");
        }
        let grid = Grid1D::new(1.0, self.nx, 0.0)?;
        let u0 = Field1D::sample(grid.clone(), |x: f64| self.exact(x, 0.0))?;
        let dt = self.t_end / steps as f64;
        let c = self.c;
        let interp = self.interpolation;
        let cfg = SchemeConfig::new(2).with_corrections(self.corrections).with_tolerance(1e-13);
        let g = grid.clone();
        let adv = FnOperator::new(OperatorKind::Advection, "characteristics", move |f: &Field1D<f64>, t: f64, h: f64| {
            let mut start = f.clone();
            start.set_boundary(self.boundary_at(&g, t))?;
            let mut out = advect_step(&start.with_dirichlet(), &|_x: f64, _t: f64, _u: f64| c, t, h, Tracer::Euler, interp)?;
            out.set_boundary(self.boundary_at(&g, t + h))?;
            Ok(out.with_dirichlet())
        });
        let g = grid.clone();
        let d = self.d;
        let diff = FnOperator::new(OperatorKind::Diffusion, "temporal-p2-loop", move |f: &Field1D<f64>, t: f64, h: f64| {
            let mut start = f.clone();
            start.set_boundary(self.boundary_at(&g, t + h))?;
            predictor_corrector_step(&start, d, None, &cfg, h)
        });
        integrate(&adv, &diff, &u0, 0.0, dt, steps, splitting)
    }

    /// Max-norm error at `t_end`.
    pub fn error(&self, splitting: Splitting, steps: usize) -> Result<f64> {
        let f = self.run(splitting, steps)?;
        let g = f.grid();
        Ok(f
            .values()
            .iter()
            .enumerate()
            .fold(0.0, |m, (i, &u)| m.max((u - self.exact(g.x(i), self.t_end)).abs())))
    }
}

/// One rung of a refinement ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRow {
    /// The refined parameter (step size or spacing).
    pub h: f64,
    pub error: f64,
    /// Order against the previous rung; `None` on the first rung or when undefined.
    pub order: Option<f64>,
}

/// Observed orders `log(e_{k-1}/e_k) / log(h_{k-1}/h_k)` between successive rungs.
/// Undefined (None) when the rungs coincide or an error is not positive and finite.
pub fn observed_orders(h: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None; errors.len().min(h.len())];
    for k in 1..out.len() {
        let (e0, e1) = (errors[k - 1], errors[k]);
        let ratio = h[k - 1] / h[k];
        let ok = |e: f64| e > 0.0 && e.is_finite();
        if ok(e0) && ok(e1) && ratio.is_finite() && ratio > 0.0 && (ratio - 1.0).abs() > 1e-12 {
            out[k] = Some((e0 / e1).ln() / ratio.ln());
        }
    }
    out
}

/// Builds ladder rows from step sizes and errors.
pub fn ladder_rows(h: &[f64], errors: &[f64]) -> Vec<LadderRow> {
    let orders = observed_orders(h, errors);
    h.iter()
        .zip(errors)
        .zip(orders)
        .map(|((&h, &error), order)| LadderRow { h, error, order })
        .collect()
}

/// `true` when every rung's error is below the previous one.
pub fn is_monotone(rows: &[LadderRow]) -> bool {
    rows.windows(2).all(|w| w[1].error < w[0].error)
}

/// Mean of the defined orders, `None` when there are none.
pub fn mean_order(rows: &[LadderRow]) -> Option<f64> {
    let v: Vec<f64> = rows.iter().filter_map(|r| r.order).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Errors of the split scheme over a ladder of step counts.
pub fn ade_split_ladder(setup: &AdeSetup, splitting: Splitting, steps: &[usize]) -> Result<Vec<LadderRow>> {
    let errors: Vec<f64> = steps.iter().map(|&n| setup.error(splitting, n)).collect::<Result<_>>()?;
    let h: Vec<f64> = steps.iter().map(|&n| setup.t_end / n as f64).collect();
    Ok(ladder_rows(&h, &errors))
}

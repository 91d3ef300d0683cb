//! Streamfunction-vorticity solver for 2D channel and back-step flows.
//!
//! The domain is `[0, aspect*W] x [0, W]` with `W = 1`. The inlet is the left face;
//! a lower step of height `h1` and an upper step of height `h2` block the parts of the
//! inlet face below `h1` and above `1 - h2`. Both horizontal walls may slide with
//! speeds `u1` (lower) and `u2` (upper). The right face is a zero-gradient outlet.
//!
//! Wall vorticity follows Thom's first-order formula, e.g. on the lower wall
//! `w = 2 (psi_wall - psi_adj)/dy^2 + 2 u_wall/dy`.

use crate::characteristics::{remap, trace_feet_with, Tracer};
use crate::error::{invalid, Error, Result};
use crate::grid::{Field2D, Grid2D, Interpolation, Mesh};
use crate::scalar::{count, lit, to_f64, Real};
use crate::spatial::{tdma_solve, TridiagonalSystem};
use crate::splitting::{split_step, FnOperator, OperatorKind, Splitting};
use crate::temporal::{predictor_corrector_values, Diffusivity, SchemeConfig};
use rayon::prelude::*;
use std::io::{self, Write};

/// Channel parameters, lengths in units of the channel width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackStepConfig<T> {
    pub u_inlet: T,
    /// Lower wall speed.
    pub u1: T,
    /// Upper wall speed.
    pub u2: T,
    /// Lower step height.
    pub h1: T,
    /// Upper step height.
    pub h2: T,
    pub re: T,
    /// `L_x / W`.
    pub aspect: T,
}

impl<T: Real> Default for BackStepConfig<T> {
    fn default() -> Self {
        Self {
            u_inlet: T::one(),
            u1: T::zero(),
            u2: T::zero(),
            h1: T::zero(),
            h2: T::zero(),
            re: lit(100.0),
            aspect: lit(10.0),
        }
    }
}

impl<T: Real> BackStepConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let all = [self.u_inlet, self.u1, self.u2, self.h1, self.h2, self.re, self.aspect];
        if all.iter().any(|v| !v.is_finite()) {
            return invalid("backstep", "parameters must be finite");
        }
        if self.h1 < T::zero() || self.h2 < T::zero() || !(self.h1 + self.h2 < T::one()) {
            return invalid("backstep", format!("need 0 <= h1, h2 and h1 + h2 < 1, got {} and {}", self.h1, self.h2));
        }
        if !(self.re > T::zero()) || !(self.aspect > T::zero()) {
            return invalid("backstep", "Re and aspect must be positive");
        }
        Ok(())
    }

    /// Five default cases: plain channel, two lower steps and two sliding lower walls.
    pub fn presets() -> Vec<(&'static str, Self)> {
        let base = Self::default();
        vec![
            ("channel", base),
            ("step-quarter", Self { h1: lit(0.25), ..base }),
            ("step-half", Self { h1: lit(0.5), ..base }),
            ("moving-wall", Self { h1: lit(0.25), u1: T::one(), ..base }),
            ("reverse-wall", Self { h1: lit(0.25), u1: -T::one(), ..base }),
        ]
    }

    pub fn preset(name: &str) -> Option<Self> {
        Self::presets().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
    }

    /// Volume flux through the open part of the inlet.
    pub fn flux(&self) -> T {
        self.u_inlet * (T::one() - self.h1 - self.h2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Fluid,
    LowerWall,
    UpperWall,
    /// Vertical wall on the inlet face.
    StepFace,
    Inlet,
    Outlet,
}

/// Node classification and fixed boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGeometry<T> {
    pub config: BackStepConfig<T>,
    pub grid: Grid2D<T>,
    kinds: Vec<NodeKind>,
    /// Fixed streamfunction on walls and inlet.
    psi_fixed: Vec<T>,
    /// Prescribed x-velocity on walls and inlet.
    u_fixed: Vec<T>,
    interior: Vec<usize>,
}

impl<T: Real> ChannelGeometry<T> {
    pub fn new(config: BackStepConfig<T>, nx: usize, ny: usize) -> Result<Self> {
        config.validate()?;
        if nx < 4 || ny < 4 {
            return invalid("channel grid", format!("need at least 4x4 nodes, got {nx}x{ny}"));
        }
        let grid = Grid2D::rectangle(config.aspect, nx, T::one(), ny)?;
        let lo = config.h1;
        let hi = T::one() - config.h2;
        let q = config.flux();
        let n = nx * ny;
        let mut kinds = vec![NodeKind::Fluid; n];
        let mut psi_fixed = vec![T::zero(); n];
        let mut u_fixed = vec![T::zero(); n];
        for j in 0..ny {
            for i in 0..nx {
                let k = grid.index(i, j);
                let y = grid.y_axis().x(j);
                kinds[k] = if j == 0 {
                    NodeKind::LowerWall
                } else if j == ny - 1 {
                    NodeKind::UpperWall
                } else if i == 0 {
                    if y < lo || y > hi {
                        NodeKind::StepFace
                    } else {
                        NodeKind::Inlet
                    }
                } else if i == nx - 1 {
                    NodeKind::Outlet
                } else {
                    NodeKind::Fluid
                };
                match kinds[k] {
                    NodeKind::LowerWall => {
                        psi_fixed[k] = T::zero();
                        u_fixed[k] = config.u1;
                    }
                    NodeKind::UpperWall => {
                        psi_fixed[k] = q;
                        u_fixed[k] = config.u2;
                    }
                    NodeKind::StepFace => {
                        psi_fixed[k] = if y < lo { T::zero() } else { q };
                    }
                    NodeKind::Inlet => {
                        psi_fixed[k] = config.u_inlet * (y - lo);
                        u_fixed[k] = config.u_inlet;
                    }
                    _ => {}
                }
            }
        }
        // Corners on the inlet face belong to the walls but carry no slip speed there.
        u_fixed[grid.index(0, 0)] = T::zero();
        u_fixed[grid.index(0, ny - 1)] = T::zero();
        let interior = (0..n).filter(|&k| kinds[k] == NodeKind::Fluid).collect();
        Ok(Self {
            config,
            grid,
            kinds,
            psi_fixed,
            u_fixed,
            interior,
        })
    }

    pub fn kind(&self, k: usize) -> NodeKind {
        self.kinds[k]
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Inlet streamfunction profile extended in `x`, used as the initial guess.
    pub fn initial_psi(&self) -> Vec<T> {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut psi = vec![T::zero(); nx * ny];
        for j in 0..ny {
            let inlet = self.psi_fixed[self.grid.index(0, j)];
            for i in 0..nx {
                let k = self.grid.index(i, j);
                psi[k] = match self.kinds[k] {
                    NodeKind::Fluid | NodeKind::Outlet => inlet,
                    _ => self.psi_fixed[k],
                };
            }
        }
        psi
    }
}

/// Vorticity, streamfunction and the velocities derived from the streamfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T: Real> {
    pub omega: Field2D<T>,
    pub psi: Field2D<T>,
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Real> FlowState<T> {
    /// Inlet profile everywhere, wall vorticity from Thom's formula.
    pub fn initial(geom: &ChannelGeometry<T>) -> Result<Self> {
        let psi = geom.initial_psi();
        let mut omega = vec![T::zero(); psi.len()];
        wall_vorticity(geom, &psi, &mut omega);
        let (u, v) = velocities(geom, &psi);
        Ok(Self {
            omega: Field2D::from_values(geom.grid, omega)?,
            psi: Field2D::from_values(geom.grid, psi)?,
            u,
            v,
        })
    }
}

/// Lexicographic Gauss-Seidel sweeps on `lap(psi) = -omega` over fluid nodes.
/// Wall and inlet values are left alone; outlet values copy their inner neighbour.
pub fn psi_gauss_seidel<T: Real>(geom: &ChannelGeometry<T>, psi: &mut [T], omega: &[T], iterations: usize) {
    let g = &geom.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let ax = (g.dx() * g.dx()).recip();
    let ay = (g.dy() * g.dy()).recip();
    let inv = (lit::<T>(2.0) * (ax + ay)).recip();
    for _ in 0..iterations {
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let k = j * nx + i;
                psi[k] = ((psi[k + 1] + psi[k - 1]) * ax + (psi[k + nx] + psi[k - nx]) * ay + omega[k]) * inv;
            }
        }
        copy_outlet(geom, psi);
    }
}

fn copy_outlet<T: Real>(geom: &ChannelGeometry<T>, values: &mut [T]) {
    let nx = geom.grid.nx();
    for j in 1..geom.grid.ny() - 1 {
        let k = j * nx + nx - 1;
        values[k] = values[k - 1];
    }
}

/// Max-norm of `lap(psi) + omega` over fluid nodes.
pub fn poisson_residual<T: Real>(geom: &ChannelGeometry<T>, psi: &[T], omega: &[T]) -> T {
    let g = &geom.grid;
    let nx = g.nx();
    let ax = (g.dx() * g.dx()).recip();
    let ay = (g.dy() * g.dy()).recip();
    let two = lit::<T>(2.0);
    geom.interior.iter().fold(T::zero(), |m, &k| {
        let r = (psi[k + 1] - two * psi[k] + psi[k - 1]) * ax + (psi[k + nx] - two * psi[k] + psi[k - nx]) * ay + omega[k];
        m.max(r.abs())
    })
}

/// Overwrites boundary vorticity: Thom on walls, zero on the inlet, copy at the outlet.
pub fn wall_vorticity<T: Real>(geom: &ChannelGeometry<T>, psi: &[T], omega: &mut [T]) {
    let g = &geom.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let (dx, dy) = (g.dx(), g.dy());
    let two = lit::<T>(2.0);
    for i in 0..nx {
        let k = i;
        omega[k] = two * (psi[k] - psi[k + nx]) / (dy * dy) + two * geom.u_fixed[k] / dy;
        let k = (ny - 1) * nx + i;
        omega[k] = two * (psi[k] - psi[k - nx]) / (dy * dy) - two * geom.u_fixed[k] / dy;
    }
    for j in 1..ny - 1 {
        let k = j * nx;
        omega[k] = match geom.kinds[k] {
            NodeKind::StepFace => two * (psi[k] - psi[k + 1]) / (dx * dx),
            _ => T::zero(),
        };
    }
    copy_outlet(geom, omega);
}

/// `u = dpsi/dy`, `v = -dpsi/dx` by central differences inside; prescribed on walls and
/// inlet; at the outlet `u` is central in `y` and `v` one-sided in `x`.
pub fn velocities<T: Real>(geom: &ChannelGeometry<T>, psi: &[T]) -> (Vec<T>, Vec<T>) {
    let g = &geom.grid;
    let (nx, n) = (g.nx(), g.node_count());
    let (dx2, dy2) = (g.dx() + g.dx(), g.dy() + g.dy());
    let mut u = geom.u_fixed.clone();
    let mut v = vec![T::zero(); n];
    for k in 0..n {
        match geom.kinds[k] {
            NodeKind::Fluid => {
                u[k] = (psi[k + nx] - psi[k - nx]) / dy2;
                v[k] = -(psi[k + 1] - psi[k - 1]) / dx2;
            }
            NodeKind::Outlet => {
                u[k] = (psi[k + nx] - psi[k - nx]) / dy2;
                v[k] = -(psi[k] - psi[k - 1]) / g.dx();
            }
            _ => {}
        }
    }
    (u, v)
}

/// Central-difference divergence of `(u, v)` at node `k`.
pub fn divergence<T: Real>(grid: &Grid2D<T>, u: &[T], v: &[T], k: usize) -> T {
    let nx = grid.nx();
    (u[k + 1] - u[k - 1]) / (grid.dx() + grid.dx()) + (v[k + nx] - v[k - nx]) / (grid.dy() + grid.dy())
}

/// One Strang step of vorticity transport: characteristics for `dt/2`, zeroth-order
/// temporal-ODE diffusion with `D = 1/Re` for `dt`, characteristics for `dt/2`.
///
/// Velocities are frozen per node; boundary vorticity is held fixed.
pub fn vorticity_step_directional<T: Real>(
    omega: &Field2D<T>,
    u: &[T],
    v: &[T],
    re: T,
    dt: T,
    interpolation: Interpolation,
) -> Result<Field2D<T>> {
    let grid = *omega.grid();
    let d = re.recip();
    let active = grid.interior_nodes();
    let zero_source = vec![T::zero(); grid.node_count()];
    let p0 = SchemeConfig::p0();
    let adv = FnOperator::new(OperatorKind::Advection, "characteristics", |w: &Field2D<T>, _t: T, h: T| {
        let feet = trace_feet_with(&grid, &|k, _p| [u[k], v[k]], h, Tracer::Euler)?;
        remap(w, &feet, interpolation)
    });
    let diff = FnOperator::new(OperatorKind::Diffusion, "temporal-p0", |w: &Field2D<T>, _t: T, h: T| {
        let (vals, _) = predictor_corrector_values(
            &grid,
            w.values(),
            &active,
            Diffusivity::Uniform(d),
            &zero_source,
            &p0,
            h,
            &|_| {},
        )?;
        w.with_values(vals)
    });
    split_step(&adv, &diff, omega, T::zero(), dt, Splitting::Strang)
}

/// Discretization of the advective term in the implicit half-steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdiAdvection {
    /// `u (w_{i+1} - w_{i-1}) / 2dx`.
    #[default]
    Central,
    /// `u (w_{i+1} - w_i) / 2dx`, the form printed for the first half-step.
    OneSidedLiteral,
}

/// Peaceman-Rachford ADI step: x-implicit half-step, then y-implicit half-step, with
/// `lambda_1 = dt/(2 Re dx^2)` and `lambda_2 = dt/(2 Re dy^2)`. Boundary vorticity is fixed.
pub fn vorticity_step_adi<T: Real>(
    omega: &Field2D<T>,
    u: &[T],
    v: &[T],
    re: T,
    dt: T,
    advection: AdiAdvection,
) -> Result<Field2D<T>> {
    let grid = *omega.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let (dx, dy) = (grid.dx(), grid.dy());
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let half_dt = dt / two;
    let l1 = dt / (two * re * dx * dx);
    let l2 = dt / (two * re * dy * dy);
    let w = omega.values();
    let literal = advection == AdiAdvection::OneSidedLiteral;

    // x-implicit rows
    let rows: Vec<Result<Vec<T>>> = (1..ny - 1)
        .into_par_iter()
        .map(|j| {
            let mut sub = vec![T::zero(); nx];
            let mut diag = vec![T::one(); nx];
            let mut sup = vec![T::zero(); nx];
            let mut rhs = vec![T::zero(); nx];
            rhs[0] = w[j * nx];
            rhs[nx - 1] = w[j * nx + nx - 1];
            for i in 1..nx - 1 {
                let k = j * nx + i;
                let c = u[k] * dt / (four * dx);
                if literal {
                    sub[i] = l1;
                    diag[i] = -T::one() - two * l1 + c;
                } else {
                    sub[i] = l1 + c;
                    diag[i] = -T::one() - two * l1;
                }
                sup[i] = l1 - c;
                rhs[i] = -w[k] + v[k] * half_dt * (w[k + nx] - w[k - nx]) / (two * dy)
                    - dt / (two * re) * (w[k + nx] - two * w[k] + w[k - nx]) / (dy * dy);
            }
            sub.remove(0);
            sup.pop();
            tdma_solve(&TridiagonalSystem::new(sub, diag, sup, rhs)?)
        })
        .collect();
    let mut star = w.to_vec();
    for (r, j) in rows.into_iter().zip(1..ny - 1) {
        star[j * nx..(j + 1) * nx].copy_from_slice(&r?);
    }

    // y-implicit columns
    let cols: Vec<Result<Vec<T>>> = (1..nx - 1)
        .into_par_iter()
        .map(|i| {
            let mut sub = vec![T::zero(); ny];
            let mut diag = vec![T::one(); ny];
            let mut sup = vec![T::zero(); ny];
            let mut rhs = vec![T::zero(); ny];
            rhs[0] = star[i];
            rhs[ny - 1] = star[(ny - 1) * nx + i];
            for j in 1..ny - 1 {
                let k = j * nx + i;
                let c = v[k] * dt / (four * dy);
                sub[j] = l2 + c;
                diag[j] = -T::one() - two * l2;
                sup[j] = l2 - c;
                let adv = if literal {
                    star[k + 1] - star[k]
                } else {
                    star[k + 1] - star[k - 1]
                };
                rhs[j] = -star[k] + u[k] * half_dt * adv / (two * dx)
                    - dt / (two * re) * (star[k + 1] - two * star[k] + star[k - 1]) / (dx * dx);
            }
            sub.remove(0);
            sup.pop();
            tdma_solve(&TridiagonalSystem::new(sub, diag, sup, rhs)?)
        })
        .collect();
    let mut out = star.clone();
    for (c, i) in cols.into_iter().zip(1..nx - 1) {
        let c = c?;
        for j in 0..ny {
            out[j * nx + i] = c[j];
        }
    }
    if let Some(k) = out.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { node: k, iteration: 0 });
    }
    omega.with_values(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowScheme {
    /// Characteristics plus zeroth-order temporal-ODE diffusion.
    #[default]
    Directional,
    Adi(AdiAdvection),
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSettings<T> {
    pub dt: T,
    pub scheme: FlowScheme,
    /// Gauss-Seidel sweeps on `psi` per step.
    pub psi_iterations: usize,
    pub interpolation: Interpolation,
    /// Stop once the steady metric falls below this value.
    pub threshold: T,
    pub max_steps: usize,
    /// Metric above which the run is declared divergent.
    pub blowup: T,
}

impl<T: Real> Default for FlowSettings<T> {
    fn default() -> Self {
        Self {
            dt: lit(0.01),
            scheme: FlowScheme::Directional,
            psi_iterations: 1,
            interpolation: Interpolation::Cubic,
            threshold: lit(1e-8),
            max_steps: 200_000,
            blowup: lit(1e6),
        }
    }
}

/// Advances the flow by one step and returns the new state with `sum (u^{n+1} - u^n)^2`.
pub fn flow_step<T: Real>(geom: &ChannelGeometry<T>, state: &FlowState<T>, settings: &FlowSettings<T>) -> Result<(FlowState<T>, T)> {
    let re = geom.config.re;
    let omega = match settings.scheme {
        FlowScheme::Directional => {
            vorticity_step_directional(&state.omega, &state.u, &state.v, re, settings.dt, settings.interpolation)?
        }
        FlowScheme::Adi(adv) => vorticity_step_adi(&state.omega, &state.u, &state.v, re, settings.dt, adv)?,
    };
    let mut w = omega.into_values();
    let mut psi = state.psi.values().to_vec();
    psi_gauss_seidel(geom, &mut psi, &w, settings.psi_iterations);
    wall_vorticity(geom, &psi, &mut w);
    let (u, v) = velocities(geom, &psi);
    let metric = u
        .iter()
        .zip(&state.u)
        .fold(T::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b));
    let next = FlowState {
        omega: Field2D::from_values(geom.grid, w)?,
        psi: Field2D::from_values(geom.grid, psi)?,
        u,
        v,
    };
    Ok((next, metric))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Converged,
    MaxSteps,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct BackStepRun<T: Real> {
    pub geometry: ChannelGeometry<T>,
    pub state: FlowState<T>,
    /// Steady metric after each step.
    pub history: Vec<T>,
    pub outcome: RunOutcome,
}

impl<T: Real> BackStepRun<T> {
    pub fn steps(&self) -> usize {
        self.history.len()
    }

    /// `step,t,metric` rows.
    pub fn write_history_csv<W: Write>(&self, dt: T, w: &mut W) -> io::Result<()> {
        writeln!(w, "step,t,metric")?;
        for (n, m) in self.history.iter().enumerate() {
            writeln!(w, "{},{:.16e},{:.16e}", n + 1, dt * count::<T>(n + 1), m)?;
        }
        Ok(())
    }
}

/// Marches from the initial state until the metric drops below the threshold, the step
/// budget runs out, or the metric exceeds the blow-up bound (or stops being finite).
pub fn run_backstep<T: Real>(config: BackStepConfig<T>, nx: usize, ny: usize, settings: &FlowSettings<T>) -> Result<BackStepRun<T>> {
    if !(settings.dt > T::zero()) || settings.psi_iterations == 0 {
        return invalid("flow settings", "dt must be positive and psi_iterations >= 1");
    }
    let geometry = ChannelGeometry::new(config, nx, ny)?;
    let mut state = FlowState::initial(&geometry)?;
    let mut history = Vec::new();
    let mut outcome = RunOutcome::MaxSteps;
    for _ in 0..settings.max_steps {
        let (next, metric) = match flow_step(&geometry, &state, settings) {
            Ok(r) => r,
            Err(Error::NonFinite { .. }) | Err(Error::Validation { .. }) => {
                outcome = RunOutcome::Diverged;
                break;
            }
            Err(e) => return Err(e),
        };
        history.push(metric);
        if !metric.is_finite() || metric > settings.blowup {
            outcome = RunOutcome::Diverged;
            break;
        }
        state = next;
        if metric < settings.threshold {
            outcome = RunOutcome::Converged;
            break;
        }
    }
    if outcome == RunOutcome::Diverged {
        log::warn!("flow run diverged after {} steps", history.len());
    }
    Ok(BackStepRun {
        geometry,
        state,
        history,
        outcome,
    })
}

/// `u(x_c, y_j)` along one vertical section.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T> {
    pub x: T,
    pub y: Vec<T>,
    pub u: Vec<T>,
}

/// Samples `u` at each section by linear interpolation in `x`.
pub fn cross_section_profiles<T: Real>(grid: &Grid2D<T>, u: &[T], sections: &[T]) -> Result<Vec<Profile<T>>> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let xs = grid.x_axis();
    sections
        .iter()
        .map(|&xc| {
            if !(xc >= xs.origin() && xc <= xs.end()) {
                return invalid("section", format!("x = {xc} outside the domain"));
            }
            let s = (xc - xs.origin()) / xs.dx();
            let r = s.round();
            let s = if (s - r).abs() <= lit::<T>(64.0) * T::epsilon() * r.max(T::one()) { r } else { s };
            let i = s.floor().to_usize().unwrap_or(0).min(nx - 2);
            let f = s - count::<T>(i);
            let y = (0..ny).map(|j| grid.y_axis().x(j)).collect();
            let prof = (0..ny)
                .map(|j| {
                    let k = j * nx + i;
                    if f == T::zero() {
                        u[k]
                    } else if f == T::one() {
                        u[k + 1]
                    } else {
                        (T::one() - f) * u[k] + f * u[k + 1]
                    }
                })
                .collect();
            Ok(Profile { x: xc, y, u: prof })
        })
        .collect()
}

/// Section positions `i W/4` for `i = 1..8` and `(i-5) W` for `i = 9..15`, clipped to the domain.
pub fn default_sections<T: Real>(aspect: T) -> Vec<T> {
    let mut out: Vec<T> = (1..=8).map(|i| lit::<T>(i as f64 * 0.25)).collect();
    out.extend((9..=15).map(|i| lit::<T>((i - 5) as f64)));
    out.retain(|&x| x <= aspect);
    out
}

/// `x_c,y,u` rows.
pub fn write_profiles_csv<T: Real, W: Write>(profiles: &[Profile<T>], w: &mut W) -> io::Result<()> {
    writeln!(w, "x_c,y,u")?;
    for p in profiles {
        for (y, u) in p.y.iter().zip(&p.u) {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", p.x, y, u)?;
        }
    }
    Ok(())
}

/// Smallest `u` on the first few rows above the lower wall, over all sections.
/// Negative values indicate recirculation.
pub fn min_near_wall_u<T: Real>(profiles: &[Profile<T>], rows: usize) -> T {
    profiles
        .iter()
        .flat_map(|p| p.u.iter().skip(1).take(rows).copied())
        .fold(T::infinity(), T::min)
}

/// Largest `|omega|`, useful as a boundedness check.
pub fn max_abs_vorticity<T: Real>(state: &FlowState<T>) -> f64 {
    state.omega.values().iter().fold(0.0, |m, &w| m.max(to_f64(w).abs()))
}

//! 2D particle propagation: nonlinear diffusion `D0/(1 + beta u)`, linear growth and a
//! divergence-free wind, advanced with Strang splitting.

use crate::characteristics::{advect_step_induced, Tracer};
use crate::error::{invalid, Result};
use crate::grid::{Dirichlet2D, Field2D, Grid2D, Interpolation};
use crate::law::{DiffusionLaw, RationalDiffusion};
use crate::sadm::sadm_field_step;
use crate::splitting::{split_step, FnOperator, OperatorKind, Splitting};
use crate::temporal::{closed_form_raw, predictor_corrector_step_with_report, Diffusivity, SchemeConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// When the wind's random parameters are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindMode {
    /// Four fresh draws every step.
    #[default]
    PerStep,
    /// One set of draws for the whole run.
    Fixed,
}

/// `v_x = 1.5(1 + k r_y1) sin y + (1 + k r_y2) cos y`,
/// `v_y = 1.5(1 + k r_x1) sin x + (1 + k r_x2) cos x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindField2D {
    pub k: f64,
    pub mode: WindMode,
    pub seed: u64,
}

/// `[r_x1, r_x2, r_y1, r_y2]`.
pub type WindDraws = [f64; 4];

impl WindField2D {
    pub fn smooth() -> Self {
        Self {
            k: 0.0,
            mode: WindMode::PerStep,
            seed: 0,
        }
    }

    pub fn noisy(seed: u64) -> Self {
        Self {
            k: 1.0,
            mode: WindMode::PerStep,
            seed,
        }
    }

    /// Standard-normal draws used during step `step`.
    pub fn draws(&self, step: usize) -> WindDraws {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(match self.mode {
            WindMode::PerStep => step as u64,
            WindMode::Fixed => 0,
        });
        let mut r = [0.0; 4];
        for v in &mut r {
            *v = StandardNormal.sample(&mut rng);
        }
        r
    }

    pub fn velocity(&self, p: [f64; 2], r: &WindDraws) -> [f64; 2] {
        let [x, y] = p;
        let k = self.k;
        [
            1.5 * (1.0 + k * r[2]) * y.sin() + (1.0 + k * r[3]) * y.cos(),
            1.5 * (1.0 + k * r[0]) * x.sin() + (1.0 + k * r[1]) * x.cos(),
        ]
    }

    /// Central-difference divergence at `p` with step `h`.
    pub fn divergence_fd(&self, p: [f64; 2], r: &WindDraws, h: f64) -> f64 {
        let [x, y] = p;
        let dvx = (self.velocity([x + h, y], r)[0] - self.velocity([x - h, y], r)[0]) / (2.0 * h);
        let dvy = (self.velocity([x, y + h], r)[1] - self.velocity([x, y - h], r)[1]) / (2.0 * h);
        dvx + dvy
    }
}

/// Line segment in unit-square coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: [f64; 2],
    pub to: [f64; 2],
}

/// Initial concentration: segments of constant value and finite thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSource {
    pub segments: Vec<Segment>,
    pub value: f64,
    /// Full thickness in unit-square coordinates.
    pub thickness: f64,
}

impl Default for LineSource {
    /// A horizontal, a vertical and a diagonal segment crossing at the centre.
    fn default() -> Self {
        let seg = |a: [f64; 2], b: [f64; 2]| Segment { from: a, to: b };
        Self {
            segments: vec![
                seg([0.2, 0.5], [0.8, 0.5]),
                seg([0.5, 0.2], [0.5, 0.8]),
                seg([0.25, 0.25], [0.75, 0.75]),
            ],
            value: 0.01,
            thickness: 0.02,
        }
    }
}

impl LineSource {
    /// Value at a point of the unit square.
    pub fn at(&self, p: [f64; 2]) -> f64 {
        let half = 0.5 * self.thickness;
        let hit = self.segments.iter().any(|s| distance_to_segment(p, s) <= half);
        if hit {
            self.value
        } else {
            0.0
        }
    }
}

fn distance_to_segment(p: [f64; 2], s: &Segment) -> f64 {
    let d = [s.to[0] - s.from[0], s.to[1] - s.from[1]];
    let w = [p[0] - s.from[0], p[1] - s.from[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { ((w[0] * d[0] + w[1] * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [w[0] - t * d[0], w[1] - t * d[1]];
    (q[0] * q[0] + q[1] * q[1]).sqrt()
}

/// Diffusion scheme for the particle runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParticleScheme {
    /// Third-order Adomian series of the nonlinear node equation.
    SadmK3,
    /// Zeroth-order closed form with `D` frozen at the start of the sub-step.
    TemporalP0,
    /// First order with corrector sweeps to convergence.
    TemporalP1Loop,
    /// Second order with corrector sweeps, each sub-step cut into `substeps` pieces.
    TemporalP2LoopRef { substeps: usize },
}

impl ParticleScheme {
    pub fn name(&self) -> String {
        match self {
            ParticleScheme::SadmK3 => "sadm-k3".into(),
            ParticleScheme::TemporalP0 => "temporal-p0".into(),
            ParticleScheme::TemporalP1Loop => "temporal-p1-loop".into(),
            ParticleScheme::TemporalP2LoopRef { substeps } => format!("temporal-p2-loop-ref:{substeps}"),
        }
    }

    /// Parses `sadm-k3`, `temporal-p0`, `temporal-p1-loop`, `temporal-p2-loop-ref[:n]`.
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "sadm-k3" => Some(ParticleScheme::SadmK3),
            "temporal-p0" => Some(ParticleScheme::TemporalP0),
            "temporal-p1-loop" => Some(ParticleScheme::TemporalP1Loop),
            "temporal-p2-loop-ref" => Some(ParticleScheme::TemporalP2LoopRef { substeps: 20 }),
            _ => {
                let n = name.strip_prefix("temporal-p2-loop-ref:")?.parse().ok()?;
                (n > 0).then_some(ParticleScheme::TemporalP2LoopRef { substeps: n })
            }
        }
    }
}

/// Initial concentration of a particle run.
#[derive(Debug, Clone, PartialEq)]
pub enum ParticleInitial {
    Lines(LineSource),
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfig {
    /// Nodes per side of `[0, 2 pi]^2`.
    pub n: usize,
    pub d0: f64,
    pub beta: f64,
    /// Growth rate.
    pub s: f64,
    pub dt: f64,
    pub wind: WindField2D,
    pub initial: ParticleInitial,
    pub interpolation: Interpolation,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        Self {
            n: 200,
            d0: 0.001,
            beta: 10.0,
            s: 0.01,
            dt: 0.01,
            wind: WindField2D::smooth(),
            initial: ParticleInitial::Lines(LineSource::default()),
            interpolation: Interpolation::Cubic,
        }
    }
}

impl ParticleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return invalid("beta", format!("must be non-negative, got {}", self.beta));
        }
        if !(self.d0 > 0.0) || !(self.dt > 0.0) {
            return invalid("particle run", "d0 and dt must be positive");
        }
        if self.n < 3 {
            return invalid("n", "need at least 3 nodes per side");
        }
        Ok(())
    }

    pub fn law(&self) -> RationalDiffusion<f64> {
        RationalDiffusion {
            d0: self.d0,
            beta: self.beta,
        }
    }

    /// Initial field; the unit square is scaled onto `[0, 2 pi]^2`, zero on the boundary.
    pub fn initial_field(&self) -> Result<Field2D<f64>> {
        let grid = Grid2D::rectangle(2.0 * PI, self.n, 2.0 * PI, self.n)?;
        let f = match &self.initial {
            ParticleInitial::Lines(src) => {
                Field2D::sample(grid.clone(), |p: [f64; 2]| src.at([p[0] / (2.0 * PI), p[1] / (2.0 * PI)]))?
            }
            ParticleInitial::Zero => Field2D::constant(grid.clone(), 0.0)?,
        };
        let mut f = f;
        f.set_boundary(Dirichlet2D::uniform(&grid, 0.0))?;
        Ok(f.with_dirichlet())
    }
}

/// Fields recorded during a particle run.
#[derive(Debug, Clone)]
pub struct ParticleRun {
    /// `(step, field)` pairs, the initial field first.
    pub snapshots: Vec<(usize, Field2D<f64>)>,
    pub last: Field2D<f64>,
}

fn diffuse(cfg: &ParticleConfig, scheme: ParticleScheme, field: &Field2D<f64>, h: f64) -> Result<Field2D<f64>> {
    let law = cfg.law();
    let s = cfg.s;
    let growth = move |_k: usize, u: f64| s * u;
    let linear = |f: &Field2D<f64>, config: &SchemeConfig<f64>, h: f64| -> Result<Field2D<f64>> {
        let d: Vec<f64> = f.values().iter().map(|&u| law.value(u)).collect();
        predictor_corrector_step_with_report(f, Diffusivity::PerNode(&d), Some(&growth), config, h).map(|r| r.0)
    };
    match scheme {
        ParticleScheme::SadmK3 => sadm_field_step(field, &law, Some(&growth), h, 3),
        ParticleScheme::TemporalP0 => linear(field, &SchemeConfig::p0(), h),
        ParticleScheme::TemporalP1Loop => linear(field, &SchemeConfig::new(1).with_corrections(20), h),
        ParticleScheme::TemporalP2LoopRef { substeps } => {
            let cfg2 = SchemeConfig::new(2).with_corrections(50).with_tolerance(1e-14);
            let hs = h / substeps as f64;
            let mut cur = field.clone();
            for _ in 0..substeps {
                cur = linear(&cur, &cfg2, hs)?;
            }
            Ok(cur)
        }
    }
}

/// Strang-split run: characteristics with velocity `v - D'(u) grad u`, then the chosen
/// diffusion scheme for `D(u) lap u + s u`. Records every `every`-th step.
pub fn run_particles_2d(cfg: &ParticleConfig, scheme: ParticleScheme, steps: usize, every: usize) -> Result<ParticleRun> {
    cfg.validate()?;
    let law = cfg.law();
    let every = every.max(1);
    let mut cur = cfg.initial_field()?;
    let mut snapshots = vec![(0, cur.clone())];
    for n in 0..steps {
        let draws = cfg.wind.draws(n);
        let wind = cfg.wind;
        let interp = cfg.interpolation;
        let adv = FnOperator::new(OperatorKind::Advection, "characteristics", |f: &Field2D<f64>, t: f64, h: f64| {
            advect_step_induced(
                f,
                &|p: [f64; 2], _t: f64, _u: f64| wind.velocity(p, &draws),
                &law,
                t,
                h,
                Tracer::Euler,
                interp,
            )
        });
        let diff = FnOperator::new(OperatorKind::Diffusion, scheme.name(), |f: &Field2D<f64>, _t: f64, h: f64| {
            diffuse(cfg, scheme, f, h)
        });
        cur = split_step(&adv, &diff, &cur, n as f64 * cfg.dt, cfg.dt, Splitting::Strang)?;
        if (n + 1) % every == 0 || n + 1 == steps {
            snapshots.push((n + 1, cur.clone()));
        }
    }
    Ok(ParticleRun { snapshots, last: cur })
}

/// One node of the nonlinear diffusion step with its neighbours frozen:
/// `du/dtau = D(u)(A u + B) + C`, `A = -2 inv2`, `C = s u0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenNode {
    pub u0: f64,
    /// Weighted neighbour sum `B`.
    pub neighbor_sum: f64,
    /// `sum_d 1/h_d^2`.
    pub inv2: f64,
    pub d0: f64,
    pub beta: f64,
    pub s: f64,
}

impl FrozenNode {
    /// Right-hand side of the node equation.
    pub fn rhs(&self, u: f64) -> f64 {
        let law = RationalDiffusion { d0: self.d0, beta: self.beta };
        law.value(u) * (-2.0 * self.inv2 * u + self.neighbor_sum) + self.s * self.u0
    }

    fn linear_update(&self, center: f64, d: f64, tau: f64) -> f64 {
        closed_form_raw(center, d * self.inv2, d, self.s * self.u0, &[self.neighbor_sum], tau)
    }
}

/// Node values at `tau = dt` from the three schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenComparison {
    pub sadm: f64,
    pub p0: f64,
    pub reference: f64,
}

/// SADM-K3 and the zeroth-order linear update of a frozen node against a refined reference:
/// `substeps` linear closed-form pieces, each with `D` taken at the midpoint value and
/// iterated to a fixed point.
pub fn compare_sadm_linear_frozen(node: &FrozenNode, dt: f64, substeps: usize) -> Result<FrozenComparison> {
    if substeps == 0 {
        return invalid("substeps", "must be positive");
    }
    let law = RationalDiffusion { d0: node.d0, beta: node.beta };
    let spec = crate::sadm::DiffusionNode {
        law: &law,
        a: -2.0 * node.inv2,
        b: node.neighbor_sum,
        c: node.s * node.u0,
    };
    let sadm = crate::sadm::adomian_expand(&spec, node.u0, 3, dt)?.end_value();
    let p0 = node.linear_update(node.u0, law.value(node.u0), dt);
    let h = dt / substeps as f64;
    let mut u = node.u0;
    for _ in 0..substeps {
        let mut next = node.linear_update(u, law.value(u), h);
        for _ in 0..100 {
            let cand = node.linear_update(u, law.value(0.5 * (u + next)), h);
            let done = (cand - next).abs() <= 1e-16 * cand.abs().max(1e-300);
            next = cand;
            if done {
                break;
            }
        }
        u = next;
    }
    Ok(FrozenComparison { sadm, p0, reference: u })
}

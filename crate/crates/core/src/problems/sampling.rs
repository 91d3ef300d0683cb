//! Expected diffusion update under an uncertain diffusivity, formula against direct sampling.

use crate::error::Result;
use crate::grid::{Field1D, Grid1D, Mesh};
use crate::stochastic::{average_error_metric, deterministic_update_p0, expected_update_p0, monte_carlo_expectation, UniformDiffusion};
use std::f64::consts::PI;

/// One zeroth-order step of `u_t = D u_xx` on `[0, 1]` from `sin(pi x)` with `D` uniform on
/// `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSetup {
    pub nx: usize,
    pub dt: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Default for SamplingSetup {
    fn default() -> Self {
        Self {
            nx: 101,
            dt: 1e-4,
            lower: 0.1,
            upper: 0.9,
        }
    }
}

impl SamplingSetup {
    fn initial(&self) -> Result<Field1D<f64>> {
        let grid = Grid1D::new(1.0, self.nx, 0.0)?;
        let mut f = Field1D::sample(grid, |x: f64| (PI * x).sin())?;
        f.set_boundary(crate::grid::Dirichlet1D { left: 0.0, right: 0.0 })?;
        Ok(f.with_dirichlet())
    }

    /// Expected field from the closed-form expectation.
    pub fn expected_field(&self) -> Result<Field1D<f64>> {
        let u0 = self.initial()?;
        let dist = UniformDiffusion::new(self.lower, self.upper)?;
        let grid = u0.grid().clone();
        let abar = grid.inverse_square_sum();
        let vals = u0.values();
        let mut out = vals.to_vec();
        for k in grid.interior_nodes() {
            let a0 = grid.neighbor_sum(vals, k) / abar;
            out[k] = expected_update_p0(vals[k], a0, abar, &dist, self.dt)?;
        }
        u0.with_values(out)
    }

    /// Expected field estimated from `samples` realisations of `D`, shared by all nodes,
    /// and the field of standard errors.
    pub fn sampled_field(&self, samples: usize, seed: u64) -> Result<(Field1D<f64>, Field1D<f64>)> {
        let u0 = self.initial()?;
        let dist = UniformDiffusion::new(self.lower, self.upper)?;
        let grid = u0.grid().clone();
        let abar = grid.inverse_square_sum();
        let vals = u0.values();
        let mut out = vals.to_vec();
        let mut se = vec![0.0; vals.len()];
        for k in grid.interior_nodes() {
            let (u, a0, dt) = (vals[k], grid.neighbor_sum(vals, k) / abar, self.dt);
            let (mean, err) = monte_carlo_expectation(&|d| deterministic_update_p0(u, a0, abar, d, dt), &dist, samples, seed)?;
            out[k] = mean;
            se[k] = err;
        }
        Ok((u0.with_values(out)?, u0.with_values(se)?))
    }
}

/// One rung of the sample-count ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingRung {
    pub samples: usize,
    /// Average error between the sampled and the closed-form expected field.
    pub error: f64,
    /// The same average taken over the per-node standard errors.
    pub noise: f64,
}

pub fn sampling_ladder(setup: &SamplingSetup, samples: &[usize], seed: u64) -> Result<Vec<SamplingRung>> {
    let exact = setup.expected_field()?;
    let zero = exact.with_values(vec![0.0; exact.values().len()])?;
    samples
        .iter()
        .map(|&n| {
            let (mean, se) = setup.sampled_field(n, seed)?;
            Ok(SamplingRung {
                samples: n,
                error: average_error_metric(&mean, &exact)?,
                noise: average_error_metric(&se, &zero)?,
            })
        })
        .collect()
}

/// `true` when no rung exceeds its predecessor by more than three noise levels.
pub fn decreasing_within_noise(rungs: &[SamplingRung]) -> bool {
    rungs.windows(2).all(|w| w[1].error <= w[0].error + 3.0 * w[1].noise)
}

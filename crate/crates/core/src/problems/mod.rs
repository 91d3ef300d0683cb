//! Benchmark problems as runnable experiments (double precision).

pub mod ade;
pub mod burgers;
pub mod heat;
pub mod nonlinear;
pub mod particles;
pub mod sampling;

pub use ade::{ade_split_ladder, ladder_rows, linear_ade_exact, observed_orders, AdeSetup, LadderRow};
pub use burgers::{burgers_analytic, burgers_averaged_error, run_burgers, BurgersQuadrature, BurgersRun, BurgersScheme, BurgersTable};
pub use heat::{asymptotic_limit_trial, heat_mode_error, heat_mode_exact, run_heat_1d, HeatRun, HeatScheme};
pub use nonlinear::{compare_nonlinear_implicit, NonlinearComparison};
pub use particles::{
    compare_sadm_linear_frozen, run_particles_2d, FrozenComparison, FrozenNode, LineSource, ParticleConfig, ParticleInitial,
    ParticleRun, ParticleScheme, WindField2D, WindMode,
};
pub use sampling::{decreasing_within_noise, sampling_ladder, SamplingRung, SamplingSetup};

//! Directional-ODE discretizations for advection-diffusion equations.
//!
//! The diffusion operator is advanced node by node with exact solutions of
//! representative ODEs (temporal form, explicit flavour) or assembled into implicit
//! tridiagonal systems (spatial form). Advection uses characteristics. The pieces are
//! combined with Lie or Strang splitting.
//!
//! All solvers are generic over [`Real`] (`f32`, `f64`); the `*64` aliases below name
//! the double-precision instantiations.

pub mod characteristics;
pub mod error;
pub mod grid;
pub mod law;
pub mod navier_stokes;
pub mod problems;
pub mod quadrature;
pub mod sadm;
pub mod scalar;
pub mod spatial;
pub mod splitting;
pub mod stochastic;
pub mod temporal;

pub use error::{Error, Result};
pub use grid::{
    Coord, Dirichlet1D, Dirichlet2D, Field, Field1D, Field2D, Grid1D, Grid2D, Interpolation, Mesh, TimeAxis,
};
pub use scalar::Real;
pub use temporal::{NeighborPolynomial, Sampling, SchemeConfig};

pub type Grid1D64 = Grid1D<f64>;
pub type Grid2D64 = Grid2D<f64>;
pub type Field1D64 = Field1D<f64>;
pub type Field2D64 = Field2D<f64>;
pub type Grid1D32 = Grid1D<f32>;
pub type Field1D32 = Field1D<f32>;
pub type SchemeConfig64 = SchemeConfig<f64>;
pub type NeighborPolynomial64 = NeighborPolynomial<f64>;

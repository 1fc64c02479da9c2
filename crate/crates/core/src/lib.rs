//! Steady incompressible Hall-MHD on the unit cube.
//!
//! Solves the steady Hall-MHD boundary-value problem
//!
//! ```text
//!   -Δu + (u·∇)u + ∇p - curl B × B = f
//!   curl(curl B + μ curl B × B - u × B) = curl g
//!   div u = div B = 0,   u = 0 and B × ν = 0 on the boundary
//! ```
//!
//! as a staggered-grid discretization: a linearized coupled solve (frozen
//! transport velocity and magnetic field), driven to a fixed point by Picard
//! iteration, with the Maxwell-type subproblem solved through a scalar
//! variable-coefficient Neumann problem and a div-curl reconstruction.

pub mod checks;
pub mod config;
pub mod driver;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod hallmat;
pub mod io;
pub mod linsys;
pub mod mms;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use grid::Grid;

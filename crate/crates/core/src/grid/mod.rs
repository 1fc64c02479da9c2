//! Staggered (MAC/Yee) discrete vector calculus on the unit cube `[0,1]^3`.
//!
//! Degrees of freedom, all stored x-fastest (`idx = i + nx*(j + ny*k)`):
//!
//! * cell centers `((i+1/2)h, (j+1/2)h, (k+1/2)h)`, `i,j,k in 0..n` — scalars (p, phi)
//! * faces — vector components normal to the face:
//!   `fx(i,j,k)` at `(ih, (j+1/2)h, (k+1/2)h)`, `i in 0..=n` (and cyclic for y, z)
//! * edges — vector components along the edge:
//!   `ex(i,j,k)` at `((i+1/2)h, jh, kh)`, `j,k in 0..=n` (and cyclic)
//!
//! Velocity-like quantities (u, curl B, forcing f) live on faces, magnetic-like
//! quantities (B, frozen H) live on edges. The boundary conditions u = 0 and
//! B x nu = 0 are exactly representable: boundary-normal face entries and
//! boundary-lying edge entries are pinned to zero.
//!
//! Every degree of freedom carries the uniform quadrature weight `h^3`; with
//! that inner product `grad` is the exact negative adjoint of `div` and
//! `curl_f2e` the exact adjoint of `curl_e2f`, which makes `div(curl E) = 0`
//! and `curl_f2e(grad psi) = 0` hold to machine precision everywhere,
//! boundary included.

mod field;
mod interp;
pub(crate) mod norms;
mod ops;
mod random;

#[cfg(test)]
mod tests;

pub use field::{EdgeField, Face, FaceField, Field3, ScalarField};
pub use interp::{
    edge_to_center, edge_to_face, face_to_center, face_to_face_full, scalar_to_face,
    spread_center_to_edge, spread_center_to_face,
};
pub use norms::{dot, norm, NormKind};
pub use ops::{curl_e2f, curl_f2e, div, div_edge, grad, grad_interior, grad_node};
pub use random::{random_edge_field, random_face_field, random_scalar_field};

use crate::error::{Error, Result};

/// Uniform grid over the unit cube: `n` cells per axis, spacing `h = 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidGrid(format!("n = {n}, need n >= 4")));
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Quadrature weight per degree of freedom.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = self.h();
        h * h * h
    }

    pub fn same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

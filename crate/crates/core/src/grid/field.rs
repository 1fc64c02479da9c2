use super::Grid;
use crate::error::{Error, Result};

/// Dense 3D array of f64, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3 {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub data: Vec<f64>,
}

impl Field3 {
    pub fn zeros(nx: usize, ny: usize, nz: usize) -> Self {
        Field3 {
            nx,
            ny,
            nz,
            data: vec![0.0; nx * ny * nz],
        }
    }

    #[inline(always)]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny && k < self.nz);
        i + self.nx * (j + self.ny * k)
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let id = self.idx(i, j, k);
        self.data[id] = v;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn fill_with(&mut self, mut f: impl FnMut(usize, usize, usize) -> f64) {
        let (nx, ny) = (self.nx, self.ny);
        for (idx, v) in self.data.iter_mut().enumerate() {
            let i = idx % nx;
            let j = (idx / nx) % ny;
            let k = idx / (nx * ny);
            *v = f(i, j, k);
        }
    }

    pub fn axpy(&mut self, a: f64, x: &Field3) {
        debug_assert_eq!(self.data.len(), x.data.len());
        for (s, &xv) in self.data.iter_mut().zip(&x.data) {
            *s += a * xv;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for v in &mut self.data {
            *v *= a;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Face orientation on the staggered grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    X,
    Y,
    Z,
}

impl Face {
    pub const ALL: [Face; 3] = [Face::X, Face::Y, Face::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Face::X => 0,
            Face::Y => 1,
            Face::Z => 2,
        }
    }
}

/// Scalar field at cell centers (pressure, potential).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Field3,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n();
        ScalarField {
            grid: *grid,
            values: Field3::zeros(n, n, n),
        }
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64, f64, f64) -> f64) -> Self {
        let h = grid.h();
        let mut s = Self::zeros(grid);
        s.values.fill_with(|i, j, k| {
            f(
                (i as f64 + 0.5) * h,
                (j as f64 + 0.5) * h,
                (k as f64 + 0.5) * h,
            )
        });
        s
    }

    pub fn mean(&self) -> f64 {
        let sum: f64 = self.values.data.iter().sum();
        sum / self.values.data.len() as f64
    }

    pub fn remove_mean(&mut self) {
        let m = self.mean();
        for v in &mut self.values.data {
            *v -= m;
        }
    }

    pub fn axpy(&mut self, a: f64, x: &ScalarField) {
        self.values.axpy(a, &x.values);
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self.values.all_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { context })
        }
    }
}

/// Vector field with components on the faces they are normal to.
///
/// `fx` has shape `(n+1, n, n)`, `fy` `(n, n+1, n)`, `fz` `(n, n, n+1)`.
/// Boundary faces are `fx` with `i in {0, n}` and cyclic. A field flagged
/// no-slip keeps those entries exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    pub grid: Grid,
    pub fx: Field3,
    pub fy: Field3,
    pub fz: Field3,
}

impl FaceField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n();
        FaceField {
            grid: *grid,
            fx: Field3::zeros(n + 1, n, n),
            fy: Field3::zeros(n, n + 1, n),
            fz: Field3::zeros(n, n, n + 1),
        }
    }

    /// Sample analytic vector components at face centers.
    pub fn from_fn(
        grid: &Grid,
        mut vx: impl FnMut(f64, f64, f64) -> f64,
        mut vy: impl FnMut(f64, f64, f64) -> f64,
        mut vz: impl FnMut(f64, f64, f64) -> f64,
    ) -> Self {
        let h = grid.h();
        let mut f = Self::zeros(grid);
        f.fx.fill_with(|i, j, k| vx(i as f64 * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h));
        f.fy.fill_with(|i, j, k| vy((i as f64 + 0.5) * h, j as f64 * h, (k as f64 + 0.5) * h));
        f.fz.fill_with(|i, j, k| vz((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, k as f64 * h));
        f
    }

    pub fn component(&self, c: Face) -> &Field3 {
        match c {
            Face::X => &self.fx,
            Face::Y => &self.fy,
            Face::Z => &self.fz,
        }
    }

    pub fn component_mut(&mut self, c: Face) -> &mut Field3 {
        match c {
            Face::X => &mut self.fx,
            Face::Y => &mut self.fy,
            Face::Z => &mut self.fz,
        }
    }

    /// Zero all boundary-normal entries (the discrete content of u = 0 for
    /// the normal components; tangential ghosts are handled by the operators).
    pub fn enforce_no_slip(&mut self) {
        let n = self.grid.n();
        for j in 0..n {
            for k in 0..n {
                self.fx.set(0, j, k, 0.0);
                self.fx.set(n, j, k, 0.0);
            }
        }
        for i in 0..n {
            for k in 0..n {
                self.fy.set(i, 0, k, 0.0);
                self.fy.set(i, n, k, 0.0);
            }
        }
        for i in 0..n {
            for j in 0..n {
                self.fz.set(i, j, 0, 0.0);
                self.fz.set(i, j, n, 0.0);
            }
        }
    }

    pub fn is_no_slip(&self) -> bool {
        let n = self.grid.n();
        let mut ok = true;
        for j in 0..n {
            for k in 0..n {
                ok &= self.fx.get(0, j, k) == 0.0 && self.fx.get(n, j, k) == 0.0;
            }
        }
        for i in 0..n {
            for k in 0..n {
                ok &= self.fy.get(i, 0, k) == 0.0 && self.fy.get(i, n, k) == 0.0;
            }
            for j in 0..n {
                ok &= self.fz.get(i, j, 0) == 0.0 && self.fz.get(i, j, n) == 0.0;
            }
        }
        ok
    }

    pub fn axpy(&mut self, a: f64, x: &FaceField) {
        self.fx.axpy(a, &x.fx);
        self.fy.axpy(a, &x.fy);
        self.fz.axpy(a, &x.fz);
    }

    pub fn scale(&mut self, a: f64) {
        self.fx.scale(a);
        self.fy.scale(a);
        self.fz.scale(a);
    }

    pub fn max_abs(&self) -> f64 {
        self.fx
            .max_abs()
            .max(self.fy.max_abs())
            .max(self.fz.max_abs())
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self.fx.all_finite() && self.fy.all_finite() && self.fz.all_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { context })
        }
    }
}

/// Vector field with components along edges.
///
/// `ex` has shape `(n, n+1, n+1)`, `ey` `(n+1, n, n+1)`, `ez` `(n+1, n+1, n)`.
/// An edge lies in the boundary when one of its node-valued coordinates is 0
/// or n; a field flagged tangential-zero keeps those entries exactly zero,
/// which is the discrete B x nu = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField {
    pub grid: Grid,
    pub ex: Field3,
    pub ey: Field3,
    pub ez: Field3,
}

impl EdgeField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n();
        EdgeField {
            grid: *grid,
            ex: Field3::zeros(n, n + 1, n + 1),
            ey: Field3::zeros(n + 1, n, n + 1),
            ez: Field3::zeros(n + 1, n + 1, n),
        }
    }

    pub fn from_fn(
        grid: &Grid,
        mut vx: impl FnMut(f64, f64, f64) -> f64,
        mut vy: impl FnMut(f64, f64, f64) -> f64,
        mut vz: impl FnMut(f64, f64, f64) -> f64,
    ) -> Self {
        let h = grid.h();
        let mut e = Self::zeros(grid);
        e.ex.fill_with(|i, j, k| vx((i as f64 + 0.5) * h, j as f64 * h, k as f64 * h));
        e.ey.fill_with(|i, j, k| vy(i as f64 * h, (j as f64 + 0.5) * h, k as f64 * h));
        e.ez.fill_with(|i, j, k| vz(i as f64 * h, j as f64 * h, (k as f64 + 0.5) * h));
        e
    }

    pub fn component(&self, c: Face) -> &Field3 {
        match c {
            Face::X => &self.ex,
            Face::Y => &self.ey,
            Face::Z => &self.ez,
        }
    }

    pub fn component_mut(&mut self, c: Face) -> &mut Field3 {
        match c {
            Face::X => &mut self.ex,
            Face::Y => &mut self.ey,
            Face::Z => &mut self.ez,
        }
    }

    /// Zero every edge entry lying in the boundary (discrete B x nu = 0).
    pub fn enforce_tangential_zero(&mut self) {
        let n = self.grid.n();
        for i in 0..n {
            for j in 0..=n {
                for k in 0..=n {
                    if j == 0 || j == n || k == 0 || k == n {
                        self.ex.set(i, j, k, 0.0);
                    }
                }
            }
        }
        for i in 0..=n {
            for j in 0..n {
                for k in 0..=n {
                    if i == 0 || i == n || k == 0 || k == n {
                        self.ey.set(i, j, k, 0.0);
                    }
                }
            }
        }
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..n {
                    if i == 0 || i == n || j == 0 || j == n {
                        self.ez.set(i, j, k, 0.0);
                    }
                }
            }
        }
    }

    pub fn is_tangential_zero(&self) -> bool {
        let n = self.grid.n();
        let mut ok = true;
        for i in 0..n {
            for j in 0..=n {
                for k in 0..=n {
                    if j == 0 || j == n || k == 0 || k == n {
                        ok &= self.ex.get(i, j, k) == 0.0;
                    }
                }
            }
        }
        for i in 0..=n {
            for j in 0..n {
                for k in 0..=n {
                    if i == 0 || i == n || k == 0 || k == n {
                        ok &= self.ey.get(i, j, k) == 0.0;
                    }
                }
            }
        }
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..n {
                    if i == 0 || i == n || j == 0 || j == n {
                        ok &= self.ez.get(i, j, k) == 0.0;
                    }
                }
            }
        }
        ok
    }

    pub fn axpy(&mut self, a: f64, x: &EdgeField) {
        self.ex.axpy(a, &x.ex);
        self.ey.axpy(a, &x.ey);
        self.ez.axpy(a, &x.ez);
    }

    pub fn scale(&mut self, a: f64) {
        self.ex.scale(a);
        self.ey.scale(a);
        self.ez.scale(a);
    }

    pub fn max_abs(&self) -> f64 {
        self.ex
            .max_abs()
            .max(self.ey.max_abs())
            .max(self.ez.max_abs())
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self.ex.all_finite() && self.ey.all_finite() && self.ez.all_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { context })
        }
    }
}

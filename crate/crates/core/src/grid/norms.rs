//! Discrete norms and inner products.
//!
//! Midpoint quadrature: every degree of freedom carries weight `h^3`.
//! H1-type seminorms use component-wise first differences between adjacent
//! entries of each component array, one-sided at the boundary (no ghosts).

use super::{EdgeField, FaceField, Field3, Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    Lq,
    Linf,
    H1Semi,
    H1,
    W1q,
}

/// Anything made of component arrays over one grid.
pub trait StaggeredField {
    fn grid(&self) -> &Grid;
    fn components(&self) -> Vec<&Field3>;
}

impl StaggeredField for ScalarField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn components(&self) -> Vec<&Field3> {
        vec![&self.values]
    }
}

impl StaggeredField for FaceField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn components(&self) -> Vec<&Field3> {
        vec![&self.fx, &self.fy, &self.fz]
    }
}

impl StaggeredField for EdgeField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn components(&self) -> Vec<&Field3> {
        vec![&self.ex, &self.ey, &self.ez]
    }
}

/// Compensated (Neumaier) sum; serial and therefore bitwise deterministic.
pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Weighted inner product of two like fields.
pub fn dot<F: StaggeredField>(a: &F, b: &F) -> f64 {
    let w = a.grid().cell_volume();
    let mut total = 0.0;
    for (ca, cb) in a.components().iter().zip(b.components()) {
        debug_assert_eq!(ca.len(), cb.len());
        total += neumaier_sum(ca.data.iter().zip(&cb.data).map(|(x, y)| x * y));
    }
    total * w
}

pub fn norm<F: StaggeredField>(field: &F, kind: NormKind, q: f64) -> f64 {
    let grid = *field.grid();
    let w = grid.cell_volume();
    match kind {
        NormKind::L2 => {
            let s = field
                .components()
                .iter()
                .map(|c| neumaier_sum(c.data.iter().map(|v| v * v)))
                .sum::<f64>();
            (s * w).sqrt()
        }
        NormKind::Lq => {
            let s = field
                .components()
                .iter()
                .map(|c| neumaier_sum(c.data.iter().map(|v| v.abs().powf(q))))
                .sum::<f64>();
            (s * w).powf(1.0 / q)
        }
        NormKind::Linf => field
            .components()
            .iter()
            .map(|c| c.max_abs())
            .fold(0.0, f64::max),
        NormKind::H1Semi => {
            let s = sum_diff_pow(field, &grid, 2.0);
            (s * w).sqrt()
        }
        NormKind::H1 => {
            let l2 = norm(field, NormKind::L2, q);
            let h1 = norm(field, NormKind::H1Semi, q);
            (l2 * l2 + h1 * h1).sqrt()
        }
        NormKind::W1q => {
            let lq = field
                .components()
                .iter()
                .map(|c| neumaier_sum(c.data.iter().map(|v| v.abs().powf(q))))
                .sum::<f64>();
            let dq = sum_diff_pow(field, &grid, q);
            ((lq + dq) * w).powf(1.0 / q)
        }
    }
}

/// Sum of |first difference / h|^p over all adjacent pairs of each component
/// array along each axis.
fn sum_diff_pow<F: StaggeredField>(field: &F, grid: &Grid, p: f64) -> f64 {
    let inv_h = 1.0 / grid.h();
    let mut total = 0.0;
    for c in field.components() {
        let (nx, ny, nz) = (c.nx, c.ny, c.nz);
        let mut acc = 0.0;
        let mut comp = 0.0;
        let mut add = |v: f64| {
            let t = acc + v;
            if acc.abs() >= v.abs() {
                comp += (acc - t) + v;
            } else {
                comp += (v - t) + acc;
            }
            acc = t;
        };
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let v = c.get(i, j, k);
                    if i + 1 < nx {
                        add(((c.get(i + 1, j, k) - v) * inv_h).abs().powf(p));
                    }
                    if j + 1 < ny {
                        add(((c.get(i, j + 1, k) - v) * inv_h).abs().powf(p));
                    }
                    if k + 1 < nz {
                        add(((c.get(i, j, k + 1) - v) * inv_h).abs().powf(p));
                    }
                }
            }
        }
        total += acc + comp;
    }
    total
}

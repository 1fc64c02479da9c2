//! Staggered-location transfers.
//!
//! The center collocations (`face_to_center`, `edge_to_center`) and their
//! exact adjoints (`spread_center_to_*`) are the single shared interpolation
//! used for every cross product in the solvers; keeping one collocation point
//! set is what preserves the pointwise identities `(a x b) . a = 0` and
//! `(a x b) . c = -(c x b) . a` in every discrete energy computation.

use super::{EdgeField, Face, FaceField, Field3, ScalarField};

/// Full 3-vector per cell center, one `Field3` per component.
pub type CenterVec = [Field3; 3];

/// Two-point component averages onto cell centers. Preserves constants.
pub fn face_to_center(f: &FaceField) -> CenterVec {
    let n = f.grid.n();
    let mut cx = Field3::zeros(n, n, n);
    let mut cy = Field3::zeros(n, n, n);
    let mut cz = Field3::zeros(n, n, n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                cx.set(i, j, k, 0.5 * (f.fx.get(i, j, k) + f.fx.get(i + 1, j, k)));
                cy.set(i, j, k, 0.5 * (f.fy.get(i, j, k) + f.fy.get(i, j + 1, k)));
                cz.set(i, j, k, 0.5 * (f.fz.get(i, j, k) + f.fz.get(i, j, k + 1)));
            }
        }
    }
    [cx, cy, cz]
}

/// Exact adjoint of [`face_to_center`] (missing cells contribute zero).
pub fn spread_center_to_face(v: &CenterVec, grid: &super::Grid) -> FaceField {
    let n = grid.n();
    let mut out = FaceField::zeros(grid);
    for k in 0..n {
        for j in 0..n {
            for i in 0..=n {
                let right = if i < n { v[0].get(i, j, k) } else { 0.0 };
                let left = if i > 0 { v[0].get(i - 1, j, k) } else { 0.0 };
                out.fx.set(i, j, k, 0.5 * (left + right));
            }
        }
    }
    for k in 0..n {
        for j in 0..=n {
            for i in 0..n {
                let right = if j < n { v[1].get(i, j, k) } else { 0.0 };
                let left = if j > 0 { v[1].get(i, j - 1, k) } else { 0.0 };
                out.fy.set(i, j, k, 0.5 * (left + right));
            }
        }
    }
    for k in 0..=n {
        for j in 0..n {
            for i in 0..n {
                let right = if k < n { v[2].get(i, j, k) } else { 0.0 };
                let left = if k > 0 { v[2].get(i, j, k - 1) } else { 0.0 };
                out.fz.set(i, j, k, 0.5 * (left + right));
            }
        }
    }
    out
}

/// Four-point component averages onto cell centers. Preserves constants.
pub fn edge_to_center(e: &EdgeField) -> CenterVec {
    let n = e.grid.n();
    let mut cx = Field3::zeros(n, n, n);
    let mut cy = Field3::zeros(n, n, n);
    let mut cz = Field3::zeros(n, n, n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                cx.set(
                    i,
                    j,
                    k,
                    0.25 * (e.ex.get(i, j, k)
                        + e.ex.get(i, j + 1, k)
                        + e.ex.get(i, j, k + 1)
                        + e.ex.get(i, j + 1, k + 1)),
                );
                cy.set(
                    i,
                    j,
                    k,
                    0.25 * (e.ey.get(i, j, k)
                        + e.ey.get(i + 1, j, k)
                        + e.ey.get(i, j, k + 1)
                        + e.ey.get(i + 1, j, k + 1)),
                );
                cz.set(
                    i,
                    j,
                    k,
                    0.25 * (e.ez.get(i, j, k)
                        + e.ez.get(i + 1, j, k)
                        + e.ez.get(i, j + 1, k)
                        + e.ez.get(i + 1, j + 1, k)),
                );
            }
        }
    }
    [cx, cy, cz]
}

/// Exact adjoint of [`edge_to_center`].
pub fn spread_center_to_edge(v: &CenterVec, grid: &super::Grid) -> EdgeField {
    let n = grid.n();
    let mut out = EdgeField::zeros(grid);
    let cell = |f: &Field3, i: isize, j: isize, k: isize| -> f64 {
        if i < 0 || j < 0 || k < 0 || i >= n as isize || j >= n as isize || k >= n as isize {
            0.0
        } else {
            f.get(i as usize, j as usize, k as usize)
        }
    };
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..n {
                let (ii, jj, kk) = (i as isize, j as isize, k as isize);
                let s = cell(&v[0], ii, jj, kk)
                    + cell(&v[0], ii, jj - 1, kk)
                    + cell(&v[0], ii, jj, kk - 1)
                    + cell(&v[0], ii, jj - 1, kk - 1);
                out.ex.set(i, j, k, 0.25 * s);
            }
        }
    }
    for k in 0..=n {
        for j in 0..n {
            for i in 0..=n {
                let (ii, jj, kk) = (i as isize, j as isize, k as isize);
                let s = cell(&v[1], ii, jj, kk)
                    + cell(&v[1], ii - 1, jj, kk)
                    + cell(&v[1], ii, jj, kk - 1)
                    + cell(&v[1], ii - 1, jj, kk - 1);
                out.ey.set(i, j, k, 0.25 * s);
            }
        }
    }
    for k in 0..n {
        for j in 0..=n {
            for i in 0..=n {
                let (ii, jj, kk) = (i as isize, j as isize, k as isize);
                let s = cell(&v[2], ii, jj, kk)
                    + cell(&v[2], ii - 1, jj, kk)
                    + cell(&v[2], ii, jj - 1, kk)
                    + cell(&v[2], ii - 1, jj - 1, kk);
                out.ez.set(i, j, k, 0.25 * s);
            }
        }
    }
    out
}

/// Count-normalized averages of all three edge components onto the face
/// lattice `target`. Preserves constants exactly.
pub fn edge_to_face(e: &EdgeField, target: Face) -> CenterVec {
    let n = e.grid.n();
    let (nx, ny, nz) = match target {
        Face::X => (n + 1, n, n),
        Face::Y => (n, n + 1, n),
        Face::Z => (n, n, n + 1),
    };
    let mut out = [
        Field3::zeros(nx, ny, nz),
        Field3::zeros(nx, ny, nz),
        Field3::zeros(nx, ny, nz),
    ];
    // Per component: average over the edge entries bracketing the face center
    // along axes where the lattices differ; axes that already agree need no
    // averaging. Out-of-range neighbors are dropped and the count adjusted.
    for comp in 0..3 {
        let src = match comp {
            0 => &e.ex,
            1 => &e.ey,
            _ => &e.ez,
        };
        let dst_dims = [nx, ny, nz];
        for k in 0..dst_dims[2] {
            for j in 0..dst_dims[1] {
                for i in 0..dst_dims[0] {
                    // Face-center coordinate in half-units of h: cell-like axes sit
                    // at 2*idx+1, node-like axes at 2*idx.
                    let tgt = half_coords_face(target, i, j, k);
                    let parities = half_coords_edge(comp, 0, 0, 0);
                    let (sum, cnt) = bracketed_average(src, tgt, parities);
                    out[comp].set(i, j, k, sum / cnt as f64);
                }
            }
        }
    }
    out
}

/// Count-normalized averages of all three face components onto the face
/// lattice `target` (the native component passes through unchanged).
pub fn face_to_face_full(f: &FaceField, target: Face) -> CenterVec {
    let n = f.grid.n();
    let (nx, ny, nz) = match target {
        Face::X => (n + 1, n, n),
        Face::Y => (n, n + 1, n),
        Face::Z => (n, n, n + 1),
    };
    let mut out = [
        Field3::zeros(nx, ny, nz),
        Field3::zeros(nx, ny, nz),
        Field3::zeros(nx, ny, nz),
    ];
    for comp in 0..3 {
        let src = match comp {
            0 => &f.fx,
            1 => &f.fy,
            _ => &f.fz,
        };
        let dst_dims = [nx, ny, nz];
        for k in 0..dst_dims[2] {
            for j in 0..dst_dims[1] {
                for i in 0..dst_dims[0] {
                    let tgt = half_coords_face(target, i, j, k);
                    let parities = half_coords_face(
                        match comp {
                            0 => Face::X,
                            1 => Face::Y,
                            _ => Face::Z,
                        },
                        0,
                        0,
                        0,
                    );
                    let (sum, cnt) = bracketed_average(src, tgt, parities);
                    out[comp].set(i, j, k, sum / cnt as f64);
                }
            }
        }
    }
    out
}

/// Scalar cell values onto faces: two-point average across interior faces,
/// adjacent-cell copy at boundary faces. Preserves constants exactly.
pub fn scalar_to_face(p: &ScalarField) -> FaceField {
    let n = p.grid.n();
    let mut out = FaceField::zeros(&p.grid);
    for k in 0..n {
        for j in 0..n {
            for i in 0..=n {
                let v = if i == 0 {
                    p.values.get(0, j, k)
                } else if i == n {
                    p.values.get(n - 1, j, k)
                } else {
                    0.5 * (p.values.get(i - 1, j, k) + p.values.get(i, j, k))
                };
                out.fx.set(i, j, k, v);
            }
        }
    }
    for k in 0..n {
        for j in 0..=n {
            for i in 0..n {
                let v = if j == 0 {
                    p.values.get(i, 0, k)
                } else if j == n {
                    p.values.get(i, n - 1, k)
                } else {
                    0.5 * (p.values.get(i, j - 1, k) + p.values.get(i, j, k))
                };
                out.fy.set(i, j, k, v);
            }
        }
    }
    for k in 0..=n {
        for j in 0..n {
            for i in 0..n {
                let v = if k == 0 {
                    p.values.get(i, j, 0)
                } else if k == n {
                    p.values.get(i, j, n - 1)
                } else {
                    0.5 * (p.values.get(i, j, k - 1) + p.values.get(i, j, k))
                };
                out.fz.set(i, j, k, v);
            }
        }
    }
    out
}

/// Grid coordinate of a face DOF in half-units of h.
#[inline]
fn half_coords_face(face: Face, i: usize, j: usize, k: usize) -> [usize; 3] {
    match face {
        Face::X => [2 * i, 2 * j + 1, 2 * k + 1],
        Face::Y => [2 * i + 1, 2 * j, 2 * k + 1],
        Face::Z => [2 * i + 1, 2 * j + 1, 2 * k],
    }
}

/// Grid coordinate of an edge DOF in half-units of h.
#[inline]
fn half_coords_edge(comp: usize, i: usize, j: usize, k: usize) -> [usize; 3] {
    match comp {
        0 => [2 * i + 1, 2 * j, 2 * k],
        1 => [2 * i, 2 * j + 1, 2 * k],
        _ => [2 * i, 2 * j, 2 * k + 1],
    }
}

/// Average the source entries whose half-unit coordinates bracket `tgt`
/// within one half-step per axis; out-of-range neighbors are dropped and the
/// count adjusted so constants survive at the boundary.
fn bracketed_average(src: &Field3, tgt: [usize; 3], parities: [usize; 3]) -> (f64, usize) {
    let dims = [src.nx, src.ny, src.nz];
    let mut ranges: [(usize, usize); 3] = [(0, 0); 3];
    for ax in 0..3 {
        let parity = parities[ax] % 2;
        if tgt[ax] % 2 == parity {
            // Lattices agree along this axis: single index.
            let idx = (tgt[ax] - parity) / 2;
            ranges[ax] = (idx, idx);
        } else {
            // Bracketing pair tgt +/- 1 in half-units.
            let hi = (tgt[ax] + 1 - parity) / 2;
            let lo = if tgt[ax] > parity {
                (tgt[ax] - 1 - parity) / 2
            } else {
                hi
            };
            ranges[ax] = (lo.min(hi), hi);
        }
    }
    let (mut sum, mut cnt) = (0.0, 0usize);
    for kk in ranges[2].0..=ranges[2].1 {
        for jj in ranges[1].0..=ranges[1].1 {
            for ii in ranges[0].0..=ranges[0].1 {
                if ii < dims[0] && jj < dims[1] && kk < dims[2] {
                    sum += src.get(ii, jj, kk);
                    cnt += 1;
                }
            }
        }
    }
    (sum, cnt)
}

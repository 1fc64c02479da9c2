//! First-order mimetic difference operators.
//!
//! `grad = -div^T` and `curl_f2e = curl_e2f^T` under the uniform `h^3`
//! weights, so summation by parts is exact and both composite identities
//! `div(curl_e2f E) = 0`, `curl_f2e(grad psi) = 0` hold to round-off at every
//! cell and edge.

use super::{EdgeField, FaceField, Field3, ScalarField};

/// Conservative face-difference divergence at all cell centers.
pub fn div(f: &FaceField) -> ScalarField {
    let grid = f.grid;
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let mut out = ScalarField::zeros(&grid);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let d = (f.fx.get(i + 1, j, k) - f.fx.get(i, j, k))
                    + (f.fy.get(i, j + 1, k) - f.fy.get(i, j, k))
                    + (f.fz.get(i, j, k + 1) - f.fz.get(i, j, k));
                out.values.set(i, j, k, d * inv_h);
            }
        }
    }
    out
}

/// Exact negative adjoint of [`div`]: centered difference across interior
/// faces, one-sided value with a zero ghost at boundary faces.
pub fn grad(p: &ScalarField) -> FaceField {
    let grid = p.grid;
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let mut out = FaceField::zeros(&grid);
    for k in 0..n {
        for j in 0..n {
            for i in 0..=n {
                let right = if i < n { p.values.get(i, j, k) } else { 0.0 };
                let left = if i > 0 {
                    p.values.get(i - 1, j, k)
                } else {
                    0.0
                };
                out.fx.set(i, j, k, (right - left) * inv_h);
            }
        }
    }
    for k in 0..n {
        for j in 0..=n {
            for i in 0..n {
                let right = if j < n { p.values.get(i, j, k) } else { 0.0 };
                let left = if j > 0 {
                    p.values.get(i, j - 1, k)
                } else {
                    0.0
                };
                out.fy.set(i, j, k, (right - left) * inv_h);
            }
        }
    }
    for k in 0..=n {
        for j in 0..n {
            for i in 0..n {
                let right = if k < n { p.values.get(i, j, k) } else { 0.0 };
                let left = if k > 0 {
                    p.values.get(i, j, k - 1)
                } else {
                    0.0
                };
                out.fz.set(i, j, k, (right - left) * inv_h);
            }
        }
    }
    out
}

/// Gradient restricted to interior faces: boundary-normal entries are zero.
///
/// This is the gradient the Neumann solver applies; combined with a flux that
/// is identically zero on boundary faces it realizes the homogeneous Neumann
/// condition by construction of the stencil.
pub fn grad_interior(p: &ScalarField) -> FaceField {
    let mut g = grad(p);
    g.enforce_no_slip();
    g
}

/// Circulation per face area: edge-based field to face-based curl.
pub fn curl_e2f(e: &EdgeField) -> FaceField {
    let grid = e.grid;
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let mut out = FaceField::zeros(&grid);
    // (curl E)_x = dEz/dy - dEy/dz on x-faces
    for k in 0..n {
        for j in 0..n {
            for i in 0..=n {
                let v = (e.ez.get(i, j + 1, k) - e.ez.get(i, j, k))
                    - (e.ey.get(i, j, k + 1) - e.ey.get(i, j, k));
                out.fx.set(i, j, k, v * inv_h);
            }
        }
    }
    // (curl E)_y = dEx/dz - dEz/dx on y-faces
    for k in 0..n {
        for j in 0..=n {
            for i in 0..n {
                let v = (e.ex.get(i, j, k + 1) - e.ex.get(i, j, k))
                    - (e.ez.get(i + 1, j, k) - e.ez.get(i, j, k));
                out.fy.set(i, j, k, v * inv_h);
            }
        }
    }
    // (curl E)_z = dEy/dx - dEx/dy on z-faces
    for k in 0..=n {
        for j in 0..n {
            for i in 0..n {
                let v = (e.ey.get(i + 1, j, k) - e.ey.get(i, j, k))
                    - (e.ex.get(i, j + 1, k) - e.ex.get(i, j, k));
                out.fz.set(i, j, k, v * inv_h);
            }
        }
    }
    out
}

/// Exact adjoint of [`curl_e2f`]: face-based field to edge-based curl.
/// Faces beyond the boundary contribute zero (one-sided at boundary edges).
pub fn curl_f2e(f: &FaceField) -> EdgeField {
    let grid = f.grid;
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let mut out = EdgeField::zeros(&grid);
    // (curl F)_x = dFz/dy - dFy/dz on x-edges
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..n {
                let fz_hi = if j < n { f.fz.get(i, j, k) } else { 0.0 };
                let fz_lo = if j > 0 { f.fz.get(i, j - 1, k) } else { 0.0 };
                let fy_hi = if k < n { f.fy.get(i, j, k) } else { 0.0 };
                let fy_lo = if k > 0 { f.fy.get(i, j, k - 1) } else { 0.0 };
                out.ex
                    .set(i, j, k, ((fz_hi - fz_lo) - (fy_hi - fy_lo)) * inv_h);
            }
        }
    }
    // (curl F)_y = dFx/dz - dFz/dx on y-edges
    for k in 0..=n {
        for j in 0..n {
            for i in 0..=n {
                let fx_hi = if k < n { f.fx.get(i, j, k) } else { 0.0 };
                let fx_lo = if k > 0 { f.fx.get(i, j, k - 1) } else { 0.0 };
                let fz_hi = if i < n { f.fz.get(i, j, k) } else { 0.0 };
                let fz_lo = if i > 0 { f.fz.get(i - 1, j, k) } else { 0.0 };
                out.ey
                    .set(i, j, k, ((fx_hi - fx_lo) - (fz_hi - fz_lo)) * inv_h);
            }
        }
    }
    // (curl F)_z = dFy/dx - dFx/dy on z-edges
    for k in 0..n {
        for j in 0..=n {
            for i in 0..=n {
                let fy_hi = if i < n { f.fy.get(i, j, k) } else { 0.0 };
                let fy_lo = if i > 0 { f.fy.get(i - 1, j, k) } else { 0.0 };
                let fx_hi = if j < n { f.fx.get(i, j, k) } else { 0.0 };
                let fx_lo = if j > 0 { f.fx.get(i, j - 1, k) } else { 0.0 };
                out.ez
                    .set(i, j, k, ((fy_hi - fy_lo) - (fx_hi - fx_lo)) * inv_h);
            }
        }
    }
    out
}

/// Edge-field divergence at interior nodes, stored on an `(n+1)^3` node array
/// whose boundary entries stay zero. This is the discrete `div B` of the
/// magnetic complex.
pub fn div_edge(e: &EdgeField) -> Field3 {
    let grid = e.grid;
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let mut out = Field3::zeros(n + 1, n + 1, n + 1);
    for k in 1..n {
        for j in 1..n {
            for i in 1..n {
                let d = (e.ex.get(i, j, k) - e.ex.get(i - 1, j, k))
                    + (e.ey.get(i, j, k) - e.ey.get(i, j - 1, k))
                    + (e.ez.get(i, j, k) - e.ez.get(i, j, k - 1));
                out.set(i, j, k, d * inv_h);
            }
        }
    }
    out
}

/// Exact negative adjoint of [`div_edge`]: interior-node scalar to edges,
/// with boundary nodes treated as zero. Boundary-lying edges receive zero,
/// so the output is always tangential-zero.
pub fn grad_node(p: &Field3, grid: &super::Grid) -> EdgeField {
    let n = grid.n();
    debug_assert_eq!(p.nx, n + 1);
    let inv_h = 1.0 / grid.h();
    let node = |i: usize, j: usize, k: usize| -> f64 {
        if i == 0 || i == n || j == 0 || j == n || k == 0 || k == n {
            0.0
        } else {
            p.get(i, j, k)
        }
    };
    let mut out = EdgeField::zeros(grid);
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..n {
                out.ex
                    .set(i, j, k, (node(i + 1, j, k) - node(i, j, k)) * inv_h);
            }
        }
    }
    for k in 0..=n {
        for j in 0..n {
            for i in 0..=n {
                out.ey
                    .set(i, j, k, (node(i, j + 1, k) - node(i, j, k)) * inv_h);
            }
        }
    }
    for k in 0..n {
        for j in 0..=n {
            for i in 0..=n {
                out.ez
                    .set(i, j, k, (node(i, j, k + 1) - node(i, j, k)) * inv_h);
            }
        }
    }
    out
}

//! Empirical discrete Poincare / div-curl constants.
//!
//! The continuous estimate `||B||_{W^{1,p}} <= C (||div B|| + ||curl B||)`
//! for tangential-zero fields is non-constructive on a Lipschitz cube, so the
//! discrete constants are measured: inverse-power iteration on the pencil
//! `(curl^T curl, M)` restricted to the divergence-free tangential-zero
//! subspace, where M is the relevant Gram matrix (L2 or H1).

use super::poisson::{project_div_free_edge, DirectSolver};
use super::BcPattern;
use crate::grid::{
    curl_e2f, dot, norm, random_edge_field, EdgeField, Face, Field3, Grid, NormKind,
};

#[derive(Debug, Clone, Copy)]
pub struct PoincareEstimate {
    /// `sup ||E||_H1 / ||curl E||_L2` over div-free tangential-zero fields.
    pub c_h1: f64,
    /// Same with the L2 norm in the numerator.
    pub c_l2: f64,
    pub iterations: usize,
}

/// Apply the curl-curl operator on the divergence-free subspace through the
/// componentwise mixed Laplacians (exact identity on this complex), invert it
/// directly, and keep the iterate divergence-free by reprojection.
pub fn estimate_div_curl_constants(
    grid: &Grid,
    ds: &DirectSolver,
    seed: u64,
    tol: f64,
    maxiter: usize,
) -> PoincareEstimate {
    let mut v = project_div_free_edge(&random_edge_field(grid, seed, true), ds);
    normalize(&mut v);

    let mut lam_h1 = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..maxiter {
        iterations = it + 1;
        // w = M_H1 v (per-component: identity + one-sided difference Gram).
        let w = apply_h1_gram(&v);
        let w = project_div_free_edge(&w, ds);
        // v_next = (curl^T curl)^{-1} w, componentwise direct solves.
        let mut next = EdgeField::zeros(grid);
        for c in Face::ALL {
            let (sol, _) = ds.solve_raw(w.component(c), BcPattern::EdgeComponent(c).bcs());
            *next.component_mut(c) = sol;
        }
        let mut next = project_div_free_edge(&next, ds);
        normalize(&mut next);
        let curl_l2 = norm(&curl_e2f(&next), NormKind::L2, 2.0);
        let h1 = norm(&next, NormKind::H1, 2.0);
        let lam = (curl_l2 / h1).powi(2);
        let done = (lam - lam_h1).abs() <= tol * lam.abs();
        lam_h1 = lam;
        v = next;
        if done && it >= 3 {
            break;
        }
    }
    let curl_l2 = norm(&curl_e2f(&v), NormKind::L2, 2.0);
    let c_h1 = norm(&v, NormKind::H1, 2.0) / curl_l2;
    let c_l2 = refine_l2_constant(grid, ds, &v, maxiter);
    PoincareEstimate {
        c_h1,
        c_l2,
        iterations,
    }
}

/// The L2 pencil has the same eigenvector structure; reuse the converged H1
/// iterate as the start and settle the Rayleigh quotient of (curl^T curl, I).
fn refine_l2_constant(grid: &Grid, ds: &DirectSolver, start: &EdgeField, maxiter: usize) -> f64 {
    let mut v = start.clone();
    let mut lam = f64::INFINITY;
    for it in 0..maxiter {
        let w = project_div_free_edge(&v, ds);
        let mut next = EdgeField::zeros(grid);
        for c in Face::ALL {
            let (sol, _) = ds.solve_raw(w.component(c), BcPattern::EdgeComponent(c).bcs());
            *next.component_mut(c) = sol;
        }
        let mut next = project_div_free_edge(&next, ds);
        normalize(&mut next);
        let curl_l2 = norm(&curl_e2f(&next), NormKind::L2, 2.0);
        let l2 = norm(&next, NormKind::L2, 2.0);
        let new_lam = (curl_l2 / l2).powi(2);
        let done = (new_lam - lam).abs() <= 1e-6 * new_lam.abs();
        lam = new_lam;
        v = next;
        if done && it >= 3 {
            break;
        }
    }
    1.0 / lam.sqrt()
}

fn normalize(v: &mut EdgeField) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.scale(1.0 / n);
    }
}

/// Per-component H1 Gram apply: `v + sum_axes D_a^T D_a v` with one-sided
/// differences over the full component arrays (pinned zeros included), then
/// restriction back to the tangential-zero subspace.
fn apply_h1_gram(v: &EdgeField) -> EdgeField {
    let grid = v.grid;
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut out = v.clone();
    for c in Face::ALL {
        let src = v.component(c);
        let dst = out.component_mut(c);
        let (nx, ny, nz) = (src.nx, src.ny, src.nz);
        let mut add = Field3::zeros(nx, ny, nz);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let u = src.get(i, j, k);
                    let mut acc = 0.0;
                    if i > 0 {
                        acc += u - src.get(i - 1, j, k);
                    }
                    if i + 1 < nx {
                        acc += u - src.get(i + 1, j, k);
                    }
                    if j > 0 {
                        acc += u - src.get(i, j - 1, k);
                    }
                    if j + 1 < ny {
                        acc += u - src.get(i, j + 1, k);
                    }
                    if k > 0 {
                        acc += u - src.get(i, j, k - 1);
                    }
                    if k + 1 < nz {
                        acc += u - src.get(i, j, k + 1);
                    }
                    add.set(i, j, k, acc * inv_h2);
                }
            }
        }
        dst.axpy(1.0, &add);
    }
    out.enforce_tangential_zero();
    out
}

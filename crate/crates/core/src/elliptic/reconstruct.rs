//! Div-curl reconstruction: given a compatible face field J (divergence-free,
//! zero boundary-normal component), find the tangential-zero, divergence-free
//! edge field B with `curl B = J`.
//!
//! Realized as three componentwise Poisson solves `-Lap B_c = (curl_f2e J)_c`
//! with mixed closures (Dirichlet zero where the component is tangential to
//! the wall, Neumann where normal). On this complex
//! `curl_f2e curl_e2f - grad_n div_e` equals that componentwise operator
//! exactly, so the reconstruction identity is structural, not approximate.

use super::krylov::{KrylovSpec, KrylovStats};
use super::poisson::{solve_poisson_mixed, BcPattern, DirectSolver};
use crate::error::{Error, Result};
use crate::grid::{curl_e2f, curl_f2e, div, norm, EdgeField, Face, FaceField, NormKind};

#[derive(Debug, Clone)]
pub struct ReconstructStats {
    pub component_stats: [KrylovStats; 3],
    /// Relative curl round-trip defect `||curl B - J|| / ||J||`.
    pub curl_defect: f64,
}

/// Compatibility tolerance: `||div J||_L2 <= 1e-8 ||J||_L2 / h`.
pub const COMPAT_RTOL: f64 = 1e-8;

pub fn reconstruct_b(
    j: &FaceField,
    spec: &KrylovSpec,
    ds: &DirectSolver,
) -> Result<(EdgeField, ReconstructStats)> {
    j.grid.same(&ds.grid)?;
    spec.validate()?;
    let grid = j.grid;
    let h = grid.h();
    let j_l2 = norm(j, NormKind::L2, 2.0);

    let div_norm = norm(&div(j), NormKind::L2, 2.0);
    let bound = COMPAT_RTOL * j_l2 / h;
    if div_norm > bound {
        return Err(Error::CompatibilityViolation {
            norm_div: div_norm,
            bound,
        });
    }
    // Boundary-normal components must vanish; the construction guarantees it
    // exactly for solver-produced fluxes.
    let mut probe = j.clone();
    probe.enforce_no_slip();
    probe.axpy(-1.0, j);
    let boundary_leak = probe.max_abs();
    if boundary_leak > COMPAT_RTOL * j.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::CompatibilityViolation {
            norm_div: boundary_leak,
            bound: COMPAT_RTOL * j.max_abs(),
        });
    }

    let rho = curl_f2e(j);
    let mut b = EdgeField::zeros(&grid);
    let mut stats = Vec::with_capacity(3);
    for c in Face::ALL {
        let (sol, st) =
            solve_poisson_mixed(rho.component(c), BcPattern::EdgeComponent(c), spec, ds)?;
        *b.component_mut(c) = sol;
        stats.push(st);
    }
    b.enforce_tangential_zero();
    b.check_finite("reconstruct_b")?;

    let mut defect = curl_e2f(&b);
    defect.axpy(-1.0, j);
    let curl_defect = norm(&defect, NormKind::L2, 2.0) / j_l2.max(f64::MIN_POSITIVE);
    let stats = ReconstructStats {
        component_stats: [stats.remove(0), stats.remove(0), stats.remove(0)],
        curl_defect,
    };
    Ok((b, stats))
}

//! The Maxwell-type subproblem `curl(A(H) curl B) = curl G`, `div B = 0`,
//! `B x nu = 0`, solved by the potential route: a scalar Neumann solve for
//! phi, the pointwise-invertible Hall coefficient applied to
//! `grad phi + G`, and a div-curl reconstruction of B from its curl.

use crate::elliptic::{
    reconstruct_b, solve_neumann_from, DirectSolver, KrylovSpec, KrylovStats, ReconstructStats,
};
use crate::error::Result;
use crate::grid::{curl_e2f, curl_f2e, norm, EdgeField, FaceField, NormKind, ScalarField};

#[derive(Debug, Clone)]
pub struct MaxwellSolution {
    pub b: EdgeField,
    pub phi: ScalarField,
    pub curl_b: FaceField,
    /// `||curl B||_L2 / ||G||_L2`; bounded by 1 + solver tolerance.
    pub energy_ratio: f64,
    /// Weak-form residual at interior edges, relative to `||G||_L2 / h`.
    pub weak_residual: f64,
    pub neumann_stats: KrylovStats,
    pub reconstruct_stats: ReconstructStats,
}

pub fn solve_maxwell_type(
    h: &EdgeField,
    g: &FaceField,
    mu: f64,
    spec: &KrylovSpec,
    ds: &DirectSolver,
) -> Result<MaxwellSolution> {
    solve_maxwell_type_warm(h, g, mu, spec, ds, None)
}

/// Warm-started variant: `phi0` seeds the scalar Neumann solve.
pub fn solve_maxwell_type_warm(
    h: &EdgeField,
    g: &FaceField,
    mu: f64,
    spec: &KrylovSpec,
    ds: &DirectSolver,
    phi0: Option<&ScalarField>,
) -> Result<MaxwellSolution> {
    h.grid.same(&g.grid)?;
    let grid = h.grid;
    let neumann = solve_neumann_from(h, g, mu, spec, ds, phi0)?;
    let cg_spec = KrylovSpec::cg(spec.rtol, spec.maxiter);
    let (b, rec) = reconstruct_b(&neumann.flux, &cg_spec, ds)?;
    let curl_b = curl_e2f(&b);

    let g_l2 = norm(g, NormKind::L2, 2.0);
    let energy_ratio = if g_l2 > 0.0 {
        norm(&curl_b, NormKind::L2, 2.0) / g_l2
    } else {
        0.0
    };

    // Weak residual: curl_f2e(A(H) curl B - G) sampled at interior edges.
    let coeff = crate::elliptic::HallCoeff::new(h, mu);
    let mut integrand = coeff.a_apply(&curl_b);
    let mut g0 = g.clone();
    g0.enforce_no_slip();
    integrand.axpy(-1.0, &g0);
    let mut r = curl_f2e(&integrand);
    r.enforce_tangential_zero();
    let weak_residual = if g_l2 > 0.0 {
        norm(&r, NormKind::L2, 2.0) / (g_l2 / grid.h())
    } else {
        norm(&r, NormKind::L2, 2.0)
    };

    Ok(MaxwellSolution {
        b,
        phi: neumann.phi,
        curl_b,
        energy_ratio,
        weak_residual,
        neumann_stats: neumann.stats,
        reconstruct_stats: rec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::project_div_free_face;
    use crate::grid::{random_edge_field, random_face_field, Grid};

    #[test]
    fn zero_source_gives_zero_solution() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let h = random_edge_field(&grid, 1, true);
        let g = FaceField::zeros(&grid);
        let spec = KrylovSpec::bicgstab(1e-10, 400);
        let sol = solve_maxwell_type(&h, &g, 1.0, &spec, &ds).unwrap();
        assert_eq!(sol.b.max_abs(), 0.0);
        assert_eq!(norm(&sol.phi, NormKind::Linf, 2.0), 0.0);
    }

    #[test]
    fn energy_inequality_for_random_data() {
        // ||curl B|| <= (1 + 1e-6) ||G|| even for rough random (H, G).
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::bicgstab(1e-10, 800);
        for seed in 0..3 {
            let h = random_edge_field(&grid, seed, true);
            let g = random_face_field(&grid, 60 + seed, true);
            let sol = solve_maxwell_type(&h, &g, 1.0, &spec, &ds).unwrap();
            assert!(
                sol.energy_ratio <= 1.0 + 1e-6,
                "seed {seed}: ratio {}",
                sol.energy_ratio
            );
            assert!(
                sol.weak_residual <= 1e-8,
                "weak residual {}",
                sol.weak_residual
            );
        }
    }

    #[test]
    fn weak_residual_small_for_projected_source() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::bicgstab(1e-11, 800);
        let h = random_edge_field(&grid, 9, true);
        let g = project_div_free_face(&random_face_field(&grid, 10, true), &ds);
        let sol = solve_maxwell_type(&h, &g, 1.0, &spec, &ds).unwrap();
        assert!(
            sol.weak_residual <= 1e-9,
            "weak residual {}",
            sol.weak_residual
        );
    }
}

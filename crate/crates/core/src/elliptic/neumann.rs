//! The scalar variable-coefficient Neumann problem
//!
//! ```text
//!   div[ A^{-1}(H) (grad phi + G) ] = 0      in the cube,
//!   [ A^{-1}(H) (grad phi + G) ] . nu = 0    on the boundary,
//! ```
//!
//! with the Hall coefficient realized as the face operator `A = I + K`,
//! `K F = Pi C_f^T [ (C_f F) x (mu H~) ]` (center collocation, adjoint
//! distribution, interior-face restriction `Pi`). `K` is exactly
//! skew-symmetric, so `<A F, F> = |F|^2` holds to round-off — the discrete
//! counterpart of the quadratic-form identity of the Hall matrix — and
//! `A^{-1}` is applied by conjugate gradients on the SPD normal form
//! `(I - K^2) J = (I - K) W`.
//!
//! The boundary flux is zero by construction: the flux field only ever has
//! interior-face entries.

use super::krylov::{bicgstab_from, cg, KrylovProblem, KrylovSpec, KrylovStats};
use super::poisson::{BcPattern, DirectSolver};
use crate::error::Result;
use crate::grid::{
    div, edge_to_center, face_to_center, grad_interior, spread_center_to_face, EdgeField,
    FaceField, Field3, NormKind, ScalarField,
};

/// Center-collocated Hall coefficient `mu * H` with the skew face operator.
pub struct HallCoeff {
    pub grid: crate::grid::Grid,
    hx: Field3,
    hy: Field3,
    hz: Field3,
    /// max |mu H~| over centers; zero means A = I.
    pub strength: f64,
}

impl HallCoeff {
    pub fn new(h: &EdgeField, mu: f64) -> Self {
        let [mut hx, mut hy, mut hz] = edge_to_center(h);
        hx.scale(mu);
        hy.scale(mu);
        hz.scale(mu);
        let mut strength = 0.0_f64;
        for idx in 0..hx.len() {
            let m = (hx.data[idx].powi(2) + hy.data[idx].powi(2) + hz.data[idx].powi(2)).sqrt();
            strength = strength.max(m);
        }
        HallCoeff {
            grid: h.grid,
            hx,
            hy,
            hz,
            strength,
        }
    }

    /// `K F`: collocate, cross with the coefficient, distribute back, restrict
    /// to interior faces. Exactly skew-symmetric on interior-face fields.
    pub fn k_apply(&self, f: &FaceField) -> FaceField {
        let [cx, cy, cz] = face_to_center(f);
        let mut px = Field3::zeros(cx.nx, cx.ny, cx.nz);
        let mut py = px.clone();
        let mut pz = px.clone();
        for idx in 0..cx.len() {
            let a = [cx.data[idx], cy.data[idx], cz.data[idx]];
            let b = [self.hx.data[idx], self.hy.data[idx], self.hz.data[idx]];
            px.data[idx] = a[1] * b[2] - a[2] * b[1];
            py.data[idx] = a[2] * b[0] - a[0] * b[2];
            pz.data[idx] = a[0] * b[1] - a[1] * b[0];
        }
        let mut out = spread_center_to_face(&[px, py, pz], &self.grid);
        out.enforce_no_slip();
        out
    }

    /// `A F = F + K F`.
    pub fn a_apply(&self, f: &FaceField) -> FaceField {
        let mut out = self.k_apply(f);
        out.axpy(1.0, f);
        out
    }

    /// `A^{-1} W` via CG on `(I + K^T K) J = (I - K) W`.
    pub fn a_inv_apply(&self, w: &FaceField, rtol: f64, maxiter: usize) -> Result<FaceField> {
        if self.strength == 0.0 {
            let mut out = w.clone();
            out.enforce_no_slip();
            return Ok(out);
        }
        let apply = |v: &FaceField| {
            // (I - K K) v; K^T = -K.
            let kv = self.k_apply(v);
            let mut kkv = self.k_apply(&kv);
            kkv.scale(-1.0);
            kkv.axpy(1.0, v);
            kkv
        };
        let mut rhs = self.k_apply(w);
        rhs.scale(-1.0);
        rhs.axpy(1.0, w);
        rhs.enforce_no_slip();
        let prob = KrylovProblem {
            apply: &apply,
            precond: None,
            project: None,
            name: "hall-normal-cg",
        };
        let (j, _) = cg(&prob, &rhs, rtol, None, maxiter)?;
        Ok(j)
    }
}

#[derive(Debug, Clone)]
pub struct NeumannSolution {
    pub phi: ScalarField,
    /// `A^{-1}(H)(grad phi + G)`; zero on boundary faces by construction.
    pub flux: FaceField,
    /// L2 norm of `div flux` (weighted).
    pub residual: f64,
    pub stats: KrylovStats,
}

/// Inner tolerance for `A^{-1}` applications nested inside outer Krylov runs.
pub(crate) const AINV_RTOL: f64 = 1e-13;

/// Solve the variable-coefficient Neumann problem; the returned potential has
/// zero mean and the flux has exactly zero boundary-normal components.
pub fn solve_neumann(
    h: &EdgeField,
    g: &FaceField,
    mu: f64,
    spec: &KrylovSpec,
    ds: &DirectSolver,
) -> Result<NeumannSolution> {
    solve_neumann_from(h, g, mu, spec, ds, None)
}

/// Warm-started variant: `phi0` seeds the outer Krylov iteration.
pub fn solve_neumann_from(
    h: &EdgeField,
    g: &FaceField,
    mu: f64,
    spec: &KrylovSpec,
    ds: &DirectSolver,
    phi0: Option<&ScalarField>,
) -> Result<NeumannSolution> {
    h.grid.same(&g.grid)?;
    h.grid.same(&ds.grid)?;
    spec.validate()?;
    let grid = h.grid;
    let coeff = HallCoeff::new(h, mu);
    solve_neumann_with(&coeff, g, spec, ds, &grid, phi0)
}

pub(crate) fn solve_neumann_with(
    coeff: &HallCoeff,
    g: &FaceField,
    spec: &KrylovSpec,
    ds: &DirectSolver,
    grid: &crate::grid::Grid,
    phi0: Option<&ScalarField>,
) -> Result<NeumannSolution> {
    let mut g0 = g.clone();
    g0.enforce_no_slip();

    let w = grid.cell_volume();
    let g_l2 = crate::grid::norm(g, NormKind::L2, 2.0);
    // Contract: weighted residual <= rtol * ||G||_L2 / h. Krylov stops on the
    // unweighted cell vector, so convert the target.
    let target_abs = spec.rtol * (g_l2 / grid.h()) / w.sqrt();

    // The normal-form CG is SPD with condition 1 + strength^2; give it room.
    let maxinner = spec.maxiter.max(4000);
    let apply = |phi_cells: &Field3| -> Field3 {
        let mut phi = ScalarField::zeros(grid);
        phi.values = phi_cells.clone();
        let gp = grad_interior(&phi);
        let flux = coeff
            .a_inv_apply(&gp, AINV_RTOL, maxinner)
            .expect("inner Hall normal-equation CG exceeded its iteration cap");
        let mut d = div(&flux);
        d.values.scale(-1.0);
        d.values
    };
    let precond = |r: &Field3| -> Field3 {
        let (mut p, _) = ds.solve_raw(r, BcPattern::PureNeumann.bcs());
        let mean: f64 = p.data.iter().sum::<f64>() / p.data.len() as f64;
        for v in &mut p.data {
            *v -= mean;
        }
        p
    };
    let project = |v: &mut Field3| {
        let mean: f64 = v.data.iter().sum::<f64>() / v.data.len() as f64;
        for x in &mut v.data {
            *x -= mean;
        }
    };

    // b = div(A^{-1} G0): the equation is -div(A^{-1} grad0 phi) = b.
    let flux_g = coeff.a_inv_apply(&g0, AINV_RTOL, maxinner)?;
    let b = div(&flux_g).values;

    let prob = KrylovProblem {
        apply: &apply,
        precond: Some(&precond),
        project: Some(&project),
        name: "neumann-bicgstab",
    };
    let (phi_cells, stats) = bicgstab_from(
        &prob,
        &b,
        phi0.map(|p| &p.values),
        spec.rtol,
        Some(target_abs),
        spec.maxiter,
    )?;

    let mut phi = ScalarField::zeros(grid);
    phi.values = phi_cells;
    phi.remove_mean();

    let mut rhs_flux = grad_interior(&phi);
    rhs_flux.axpy(1.0, &g0);
    let flux = coeff.a_inv_apply(&rhs_flux, AINV_RTOL, maxinner)?;
    let residual = crate::grid::norm(&div(&flux), NormKind::L2, 2.0);
    phi.check_finite("solve_neumann phi")?;
    flux.check_finite("solve_neumann flux")?;

    Ok(NeumannSolution {
        phi,
        flux,
        residual,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dot, norm, random_edge_field, random_face_field, Grid};

    #[test]
    fn k_is_exactly_skew() {
        let grid = Grid::new(6).unwrap();
        let h = random_edge_field(&grid, 21, true);
        let coeff = HallCoeff::new(&h, 1.0);
        let f1 = random_face_field(&grid, 22, true);
        let f2 = random_face_field(&grid, 23, true);
        let k12 = dot(&coeff.k_apply(&f1), &f2);
        let k21 = dot(&f1, &coeff.k_apply(&f2));
        let scale = norm(&f1, NormKind::L2, 2.0) * norm(&f2, NormKind::L2, 2.0);
        assert!((k12 + k21).abs() <= 1e-13 * scale.max(1e-300));
        // Quadratic form of A equals |F|^2 exactly.
        let quad = dot(&coeff.a_apply(&f1), &f1);
        let n2 = dot(&f1, &f1);
        assert!((quad - n2).abs() <= 1e-13 * n2);
    }

    #[test]
    fn a_inv_round_trip() {
        let grid = Grid::new(6).unwrap();
        let h = random_edge_field(&grid, 31, true);
        let coeff = HallCoeff::new(&h, 1.0);
        let w = random_face_field(&grid, 32, true);
        let j = coeff.a_inv_apply(&w, 1e-13, 500).unwrap();
        let mut back = coeff.a_apply(&j);
        back.axpy(-1.0, &w);
        assert!(norm(&back, NormKind::L2, 2.0) <= 1e-11 * norm(&w, NormKind::L2, 2.0));
    }

    #[test]
    fn zero_source_gives_zero_phi() {
        let grid = Grid::new(6).unwrap();
        let h = random_edge_field(&grid, 41, true);
        let g = FaceField::zeros(&grid);
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::bicgstab(1e-10, 300);
        let sol = solve_neumann(&h, &g, 1.0, &spec, &ds).unwrap();
        assert_eq!(norm(&sol.phi, NormKind::Linf, 2.0), 0.0);
        assert_eq!(norm(&sol.flux, NormKind::Linf, 2.0), 0.0);
    }

    #[test]
    fn gradient_source_is_annihilated() {
        // G = grad0(psi) for psi = cos(pi x): phi = -psi (zero-mean) for any H,
        // because grad phi + G = 0 solves the problem exactly.
        let grid = Grid::new(12).unwrap();
        let ds = DirectSolver::new(&grid);
        let h = random_edge_field(&grid, 51, true);
        let psi = ScalarField::from_fn(&grid, |x, _, _| (std::f64::consts::PI * x).cos());
        let g = grad_interior(&psi);
        let spec = KrylovSpec::bicgstab(1e-12, 400);
        let sol = solve_neumann(&h, &g, 1.0, &spec, &ds).unwrap();
        let mut want = psi.clone();
        want.remove_mean();
        let mut diff = sol.phi.clone();
        diff.axpy(1.0, &want);
        assert!(
            norm(&diff, NormKind::L2, 2.0) <= 1e-8 * norm(&want, NormKind::L2, 2.0),
            "phi should equal -psi"
        );
        assert!(norm(&sol.flux, NormKind::L2, 2.0) <= 1e-8);
    }
}

//! Linearized momentum solve: `-Lap u + (w.grad)u + grad p = rhs`,
//! `div u = 0`, `u = 0` on the boundary, with `w` frozen.
//!
//! Pressure is handled by an Uzawa-style Schur-complement iteration with
//! conjugate gradients on the pressure block of the Stokes part, whose
//! velocity inverse is the exact tensor solve. The skew transport term is
//! folded in by defect correction around the Stokes solve; its contraction
//! factor scales with the frozen velocity, so the loop is fast in the
//! small-data regimes this solver targets and reports failure loudly
//! outside them.

use super::convect::{apply_convection, cell_divergence};
use crate::elliptic::{cg_from, BcPattern, DirectSolver, KrylovProblem, KrylovSpec};
use crate::error::{Error, Result};
use crate::grid::{div, grad_interior, norm, Face, FaceField, Field3, NormKind, ScalarField};

pub struct MomentumSolution {
    pub u: FaceField,
    pub p: ScalarField,
    /// `||rhs - K u - grad p||_L2 / ||rhs||_L2`.
    pub residual: f64,
    /// `||div u||_L2`.
    pub div_residual: f64,
    pub schur_iters: usize,
    pub defect_iters: usize,
}

pub(crate) struct MomentumOperator<'a> {
    pub w: Option<&'a FaceField>,
    pub div_w: ScalarField,
    pub ds: &'a DirectSolver,
}

impl<'a> MomentumOperator<'a> {
    pub fn new(w: Option<&'a FaceField>, ds: &'a DirectSolver) -> Self {
        let div_w = match w {
            Some(w) => cell_divergence(w),
            None => ScalarField::zeros(&ds.grid),
        };
        MomentumOperator { w, div_w, ds }
    }

    /// `K u = -Lap u + N(w) u` on interior faces.
    pub fn apply(&self, u: &FaceField) -> FaceField {
        let mut out = FaceField::zeros(&u.grid);
        for c in Face::ALL {
            let lap = self
                .ds
                .apply_neg_laplacian(u.component(c), BcPattern::FaceComponent(c).bcs());
            *out.component_mut(c) = lap;
        }
        if let Some(w) = self.w {
            let conv = apply_convection(w, &self.div_w, u);
            out.axpy(1.0, &conv);
        }
        out
    }

    /// Dirichlet energy `<-Lap u, u>` (the skew convection part drops).
    pub fn dirichlet_energy(&self, u: &FaceField) -> f64 {
        let w = self.ds.grid.cell_volume();
        let mut total = 0.0;
        for c in Face::ALL {
            let lap = self
                .ds
                .apply_neg_laplacian(u.component(c), BcPattern::FaceComponent(c).bcs());
            total += crate::grid::norms::neumaier_sum(
                lap.data
                    .iter()
                    .zip(&u.component(c).data)
                    .map(|(a, b)| a * b),
            );
        }
        total * w
    }

    /// Exact Stokes velocity inverse, componentwise.
    fn stokes_inverse(&self, rhs: &FaceField) -> FaceField {
        let mut out = FaceField::zeros(&rhs.grid);
        for c in Face::ALL {
            let bcs = BcPattern::FaceComponent(c).bcs();
            let mut masked = rhs.component(c).clone();
            crate::elliptic::mask_window(bcs, self.ds.grid.n(), &mut masked);
            let (sol, _) = self.ds.solve_raw(&masked, bcs);
            *out.component_mut(c) = sol;
        }
        out
    }
}

/// One Stokes solve `-Lap u + grad p = rhs, div u = 0` by Uzawa-CG on the
/// pressure Schur complement (each application is three exact component
/// solves). Warm-startable in the pressure.
fn solve_stokes(
    rhs: &FaceField,
    op: &MomentumOperator,
    spec: &KrylovSpec,
    p0: Option<&ScalarField>,
) -> Result<(FaceField, ScalarField, usize)> {
    let grid = rhs.grid;
    let k_rhs = op.stokes_inverse(rhs);
    let mut b_s = div(&k_rhs);
    b_s.values.scale(-1.0);
    b_s.remove_mean();

    let apply_s = |p_cells: &Field3| -> Field3 {
        let mut p = ScalarField::zeros(&grid);
        p.values = p_cells.clone();
        let gp = grad_interior(&p);
        let kinv = op.stokes_inverse(&gp);
        let mut d = div(&kinv);
        d.values.scale(-1.0);
        d.values
    };
    let project = |v: &mut Field3| {
        let mean: f64 = v.data.iter().sum::<f64>() / v.data.len() as f64;
        for x in &mut v.data {
            *x -= mean;
        }
    };
    let prob = KrylovProblem {
        apply: &apply_s,
        precond: None,
        project: Some(&project),
        name: "uzawa-schur",
    };
    let (p_cells, stats) = cg_from(
        &prob,
        &b_s.values,
        p0.map(|p| &p.values),
        spec.rtol,
        None,
        spec.maxiter,
    )?;
    let mut p = ScalarField::zeros(&grid);
    p.values = p_cells;
    p.remove_mean();

    let mut face_rhs = rhs.clone();
    face_rhs.axpy(-1.0, &grad_interior(&p));
    let u = op.stokes_inverse(&face_rhs);
    Ok((u, p, stats.iters))
}

pub fn solve_momentum(
    w: Option<&FaceField>,
    rhs: &FaceField,
    spec: &KrylovSpec,
    ds: &DirectSolver,
) -> Result<MomentumSolution> {
    solve_momentum_warm(w, rhs, spec, ds, None)
}

pub fn solve_momentum_warm(
    w: Option<&FaceField>,
    rhs: &FaceField,
    spec: &KrylovSpec,
    ds: &DirectSolver,
    warm: Option<(&FaceField, &ScalarField)>,
) -> Result<MomentumSolution> {
    if let Some(w) = w {
        w.grid.same(&rhs.grid)?;
        if !w.is_no_slip() {
            return Err(Error::Config(
                "frozen transport velocity must be no-slip".into(),
            ));
        }
    }
    rhs.grid.same(&ds.grid)?;
    spec.validate()?;
    let op = MomentumOperator::new(w, ds);

    let mut rhs0 = rhs.clone();
    rhs0.enforce_no_slip();
    let rhs_l2 = norm(&rhs0, NormKind::L2, 2.0);

    let mut u = match warm {
        Some((u0, _)) => u0.clone(),
        None => FaceField::zeros(&rhs.grid),
    };
    let mut p = match warm {
        Some((_, p0)) => p0.clone(),
        None => ScalarField::zeros(&rhs.grid),
    };
    let mut schur_iters = 0;
    let mut defect_iters = 0;
    let mut residual;
    let mut prev_residual = f64::INFINITY;

    // Defect correction: each pass solves the Stokes part exactly with the
    // convection of the previous iterate moved to the right-hand side.
    let max_defect = spec.maxiter.max(50);
    loop {
        let mut r = rhs0.clone();
        r.axpy(-1.0, &op.apply(&u));
        r.axpy(-1.0, &grad_interior(&p));
        r.enforce_no_slip();
        residual = norm(&r, NormKind::L2, 2.0) / rhs_l2.max(f64::MIN_POSITIVE);
        if residual <= spec.rtol || rhs_l2 == 0.0 {
            break;
        }
        if defect_iters >= max_defect || (defect_iters > 3 && residual > 0.9 * prev_residual) {
            return Err(Error::KrylovStall {
                solver: "momentum-defect",
                iters: defect_iters,
                residual,
                target: spec.rtol,
            });
        }
        defect_iters += 1;
        prev_residual = residual;

        let mut stokes_rhs = rhs0.clone();
        if let Some(w) = op.w {
            let conv = apply_convection(w, &op.div_w, &u);
            stokes_rhs.axpy(-1.0, &conv);
        }
        let (un, pn, its) = solve_stokes(&stokes_rhs, &op, spec, Some(&p))?;
        schur_iters += its;
        u = un;
        p = pn;
    }

    let div_residual = norm(&div(&u), NormKind::L2, 2.0);
    u.check_finite("solve_momentum u")?;
    p.check_finite("solve_momentum p")?;

    Ok(MomentumSolution {
        u,
        p,
        residual,
        div_residual,
        schur_iters,
        defect_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::dot;

    #[test]
    fn zero_rhs_gives_zero() {
        let grid = crate::grid::Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::cg(1e-10, 300);
        let sol = solve_momentum(None, &FaceField::zeros(&grid), &spec, &ds).unwrap();
        assert_eq!(sol.u.max_abs(), 0.0);
        assert_eq!(norm(&sol.p, NormKind::Linf, 2.0), 0.0);
    }

    #[test]
    fn stokes_solve_meets_contract() {
        let grid = crate::grid::Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::cg(1e-10, 300);
        let f = crate::grid::random_face_field(&grid, 17, true);
        let sol = solve_momentum(None, &f, &spec, &ds).unwrap();
        assert!(sol.residual <= 1e-8, "residual {}", sol.residual);
        assert!(
            sol.div_residual <= 1e-8 * norm(&sol.u, NormKind::H1, 2.0).max(1e-300),
            "div {}",
            sol.div_residual
        );
        assert!(sol.u.is_no_slip());
        assert!(sol.p.mean().abs() <= 1e-12);
    }

    #[test]
    fn energy_identity_for_stokes() {
        // <-Lap u, u> = <f, u> at the solution (pressure drops on div-free u).
        let grid = crate::grid::Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::cg(1e-11, 400);
        let f = crate::grid::random_face_field(&grid, 23, true);
        let sol = solve_momentum(None, &f, &spec, &ds).unwrap();
        let op = MomentumOperator::new(None, &ds);
        let energy = op.dirichlet_energy(&sol.u);
        let mut f0 = f.clone();
        f0.enforce_no_slip();
        let work = dot(&f0, &sol.u);
        assert!(
            (energy - work).abs() <= 1e-7 * work.abs().max(1e-300),
            "energy {energy} work {work}"
        );
    }

    #[test]
    fn convective_solve_meets_contract() {
        let grid = crate::grid::Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::bicgstab(1e-10, 400);
        let w0 = crate::grid::random_face_field(&grid, 31, true);
        let mut w = crate::elliptic::project_div_free_face(&w0, &ds);
        w.scale(0.1);
        let f = crate::grid::random_face_field(&grid, 32, true);
        let sol = solve_momentum(Some(&w), &f, &spec, &ds).unwrap();
        assert!(sol.residual <= 1e-8, "residual {}", sol.residual);
        assert!(sol.u.is_no_slip());
    }

    #[test]
    fn large_transport_reports_failure() {
        // Far outside the small-data regime the defect loop must fail loudly,
        // not silently diverge.
        let grid = crate::grid::Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let spec = KrylovSpec::bicgstab(1e-10, 60);
        let w0 = crate::grid::random_face_field(&grid, 41, true);
        let mut w = crate::elliptic::project_div_free_face(&w0, &ds);
        w.scale(500.0);
        let f = crate::grid::random_face_field(&grid, 42, true);
        match solve_momentum(Some(&w), &f, &spec, &ds) {
            Err(Error::KrylovStall { .. }) | Err(Error::Stagnation { .. }) => {}
            Ok(sol) => panic!("expected failure, got residual {}", sol.residual),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}

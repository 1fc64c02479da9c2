//! The linearized subproblem solvers and the coupled linear solve that
//! defines the fixed-point map: given frozen `(w, H)`, find `(u, p, B)` with
//!
//! ```text
//!   -Lap u + (w.grad)u + grad p - curl B x H = f
//!   curl(curl B + mu curl B x H - u x H) = curl g
//!   div u = div B = 0, no-slip / tangential-zero boundaries.
//! ```
//!
//! Solved by block Gauss-Seidel between the Maxwell-type solve (source
//! `g + u x H`) and the momentum solve (force `f + curl B x H`); the
//! off-diagonal coupling is skew and O(|H|), hence contractive in the
//! small-data regimes this solver targets. Residuals are checked before
//! re-solving, so an already-consistent block is never perturbed and the
//! decoupled case reproduces the standalone solvers bit for bit.

mod convect;
mod maxwell;
mod momentum;
mod products;

pub use convect::{apply_convection, cell_divergence};
pub use maxwell::{solve_maxwell_type, solve_maxwell_type_warm, MaxwellSolution};
pub use momentum::{solve_momentum, solve_momentum_warm, MomentumSolution};
pub use products::{cross_face_edge, emf_source, lorentz_force};

pub(crate) use momentum::MomentumOperator;

/// Dirichlet energy `<-Lap u, u>` of a no-slip face field, evaluated with the
/// same stencil the momentum operator uses (wall ghosts included). This is
/// the seminorm the discrete energy identities are stated in.
pub fn dirichlet_energy(u: &FaceField, ds: &DirectSolver) -> f64 {
    MomentumOperator::new(None, ds).dirichlet_energy(u)
}

use crate::config::SolverConfig;
use crate::elliptic::{DirectSolver, HallCoeff, KrylovSpec};
use crate::error::{Error, Result};
use crate::grid::{
    curl_e2f, curl_f2e, div, grad_interior, norm, EdgeField, FaceField, NormKind, ScalarField,
};

/// Frozen-coefficient linear problem of one fixed-point step.
pub struct LinearizedProblem<'a> {
    pub w: &'a FaceField,
    pub h: &'a EdgeField,
    pub f: &'a FaceField,
    pub g: &'a FaceField,
    pub config: &'a SolverConfig,
}

impl LinearizedProblem<'_> {
    pub fn validate(&self, ds: &DirectSolver) -> Result<()> {
        self.w.grid.same(&self.h.grid)?;
        self.w.grid.same(&self.f.grid)?;
        self.w.grid.same(&self.g.grid)?;
        self.w.grid.same(&ds.grid)?;
        self.config.validate()?;
        if !self.h.is_tangential_zero() {
            return Err(Error::Config("frozen H must be tangential-zero".into()));
        }
        if !self.w.is_no_slip() {
            return Err(Error::Config("frozen w must be no-slip".into()));
        }
        let divw = norm(&div(self.w), NormKind::L2, 2.0);
        let bound = 1e-8 * norm(self.w, NormKind::L2, 2.0).max(f64::MIN_POSITIVE) / self.w.grid.h();
        if divw > bound {
            return Err(Error::Config(format!(
                "frozen w must be discretely divergence-free: ||div w|| = {divw:.3e} > {bound:.3e}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub u: FaceField,
    pub p: ScalarField,
    pub b: EdgeField,
    /// Potential of the last Maxwell-type solve.
    pub phi: ScalarField,
    pub sweeps: usize,
    pub momentum_residual: f64,
    pub induction_residual: f64,
    pub maxwell_energy_ratio: f64,
}

/// Relative residuals of the linearized system at a candidate state.
pub fn coupled_residuals(
    prob: &LinearizedProblem,
    u: &FaceField,
    p: &ScalarField,
    b: &EdgeField,
    ds: &DirectSolver,
) -> (f64, f64) {
    let grid = u.grid;
    let mu = prob.config.mu;
    let op = MomentumOperator::new(Some(prob.w), ds);

    let curl_b = curl_e2f(b);
    let mut mom_rhs = prob.f.clone();
    mom_rhs.enforce_no_slip();
    mom_rhs.axpy(1.0, &lorentz_force(&curl_b, prob.h));
    let mut r_m = mom_rhs.clone();
    r_m.axpy(-1.0, &op.apply(u));
    r_m.axpy(-1.0, &grad_interior(p));
    r_m.enforce_no_slip();
    let mom_scale = norm(&mom_rhs, NormKind::L2, 2.0).max(f64::MIN_POSITIVE);
    let r_mom = norm(&r_m, NormKind::L2, 2.0) / mom_scale;

    let mut g_total = prob.g.clone();
    g_total.enforce_no_slip();
    g_total.axpy(1.0, &emf_source(u, prob.h));
    let coeff = HallCoeff::new(prob.h, mu);
    let mut integrand = coeff.a_apply(&curl_b);
    integrand.axpy(-1.0, &g_total);
    let mut r_e = curl_f2e(&integrand);
    r_e.enforce_tangential_zero();
    let ind_scale = (norm(&g_total, NormKind::L2, 2.0) / grid.h()).max(f64::MIN_POSITIVE);
    let r_ind = norm(&r_e, NormKind::L2, 2.0) / ind_scale;

    (r_mom, r_ind)
}

/// Block Gauss-Seidel solve of the linearized coupled system.
pub fn solve_coupled(prob: &LinearizedProblem, ds: &DirectSolver) -> Result<CoupledSolution> {
    solve_coupled_warm(prob, ds, None)
}

/// Warm-started variant; the initial state only seeds the iteration and the
/// returned solution still satisfies the residual contracts.
pub fn solve_coupled_warm(
    prob: &LinearizedProblem,
    ds: &DirectSolver,
    initial: Option<(&FaceField, &ScalarField, &EdgeField)>,
) -> Result<CoupledSolution> {
    prob.validate(ds)?;
    let grid = prob.w.grid;
    let cfg = prob.config;
    let spec = KrylovSpec::bicgstab(cfg.inner_rtol, cfg.max_inner);

    let mut u = match initial {
        Some((u0, _, _)) => u0.clone(),
        None => FaceField::zeros(&grid),
    };
    let mut p = match initial {
        Some((_, p0, _)) => p0.clone(),
        None => ScalarField::zeros(&grid),
    };
    let mut b = match initial {
        Some((_, _, b0)) => b0.clone(),
        None => EdgeField::zeros(&grid),
    };
    let mut warm = initial.is_some();
    let mut phi = ScalarField::zeros(&grid);
    let mut energy_ratio = 0.0;

    let max_sweeps = 200usize;
    let mut prev_update = f64::INFINITY;
    let mut slow_sweeps = 0usize;
    let mut sweeps = 0usize;
    loop {
        let (r_mom, r_ind) = coupled_residuals(prob, &u, &p, &b, ds);
        if r_mom <= cfg.inner_rtol && r_ind <= cfg.inner_rtol {
            return Ok(CoupledSolution {
                u,
                p,
                b,
                phi,
                sweeps,
                momentum_residual: r_mom,
                induction_residual: r_ind,
                maxwell_energy_ratio: energy_ratio,
            });
        }
        if sweeps >= max_sweeps {
            return Err(Error::Stagnation {
                sweeps,
                last_update: prev_update,
            });
        }
        sweeps += 1;

        let mut g_total = prob.g.clone();
        g_total.enforce_no_slip();
        g_total.axpy(1.0, &emf_source(&u, prob.h));
        let phi0 = if sweeps > 1 { Some(&phi) } else { None };
        let mx = solve_maxwell_type_warm(prob.h, &g_total, cfg.mu, &spec, ds, phi0)?;
        let mut db = mx.b.clone();
        db.axpy(-1.0, &b);
        b = mx.b;
        phi = mx.phi;
        energy_ratio = mx.energy_ratio;

        let mut mom_rhs = prob.f.clone();
        mom_rhs.enforce_no_slip();
        mom_rhs.axpy(1.0, &lorentz_force(&mx.curl_b, prob.h));
        let mom_warm = if sweeps > 1 || warm {
            Some((&u, &p))
        } else {
            None
        };
        let ms = solve_momentum_warm(Some(prob.w), &mom_rhs, &spec, ds, mom_warm)?;
        warm = false;
        let mut du = ms.u.clone();
        du.axpy(-1.0, &u);
        u = ms.u;
        p = ms.p;

        // Stagnation watch: updates must keep shrinking.
        let update = norm(&du, NormKind::H1, 2.0) + norm(&db, NormKind::H1, 2.0);
        if sweeps > 1 && update > 0.99 * prev_update {
            slow_sweeps += 1;
            if slow_sweeps >= 10 {
                return Err(Error::Stagnation {
                    sweeps,
                    last_update: update,
                });
            }
        } else {
            slow_sweeps = 0;
        }
        prev_update = update;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dot, random_edge_field, random_face_field, Grid};

    fn small_config() -> SolverConfig {
        SolverConfig {
            n: 8,
            inner_rtol: 1e-10,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_forcing_gives_zero_state() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let cfg = small_config();
        let w = random_face_field(&grid, 1, true);
        let w = crate::elliptic::project_div_free_face(&w, &ds);
        let h = random_edge_field(&grid, 2, true);
        let zf = FaceField::zeros(&grid);
        let prob = LinearizedProblem {
            w: &w,
            h: &h,
            f: &zf,
            g: &zf,
            config: &cfg,
        };
        let sol = solve_coupled(&prob, &ds).unwrap();
        assert_eq!(sol.u.max_abs(), 0.0);
        assert_eq!(sol.b.max_abs(), 0.0);
        assert_eq!(sol.sweeps, 0);
    }

    #[test]
    fn decouples_at_zero_frozen_fields() {
        // w = H = 0: u solves Stokes with force f, B solves curl curl B = curl g.
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let cfg = small_config();
        let w = FaceField::zeros(&grid);
        let h = EdgeField::zeros(&grid);
        let f = random_face_field(&grid, 5, true);
        let g = random_face_field(&grid, 6, true);
        let prob = LinearizedProblem {
            w: &w,
            h: &h,
            f: &f,
            g: &g,
            config: &cfg,
        };
        let sol = solve_coupled(&prob, &ds).unwrap();

        let spec = KrylovSpec::bicgstab(cfg.inner_rtol, cfg.max_inner);
        let mx = solve_maxwell_type(&h, &g, cfg.mu, &spec, &ds).unwrap();
        let ms = solve_momentum(Some(&w), &f, &spec, &ds).unwrap();
        let mut du = sol.u.clone();
        du.axpy(-1.0, &ms.u);
        let mut db = sol.b.clone();
        db.axpy(-1.0, &mx.b);
        let u_scale = norm(&ms.u, NormKind::L2, 2.0).max(f64::MIN_POSITIVE);
        let b_scale = norm(&mx.b, NormKind::L2, 2.0).max(f64::MIN_POSITIVE);
        assert!(norm(&du, NormKind::L2, 2.0) / u_scale <= 1e-12);
        assert!(norm(&db, NormKind::L2, 2.0) / b_scale <= 1e-12);
    }

    #[test]
    fn coupled_solve_converges_and_satisfies_energy_identity() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let cfg = small_config();
        let w0 = random_face_field(&grid, 11, true);
        let mut w = crate::elliptic::project_div_free_face(&w0, &ds);
        w.scale(0.05);
        let mut h =
            crate::elliptic::project_div_free_edge(&random_edge_field(&grid, 12, true), &ds);
        h.scale(0.05);
        let mut f = random_face_field(&grid, 13, true);
        f.scale(0.01);
        let mut g = random_face_field(&grid, 14, true);
        g.scale(0.01);
        let prob = LinearizedProblem {
            w: &w,
            h: &h,
            f: &f,
            g: &g,
            config: &cfg,
        };
        let sol = solve_coupled(&prob, &ds).unwrap();
        assert!(sol.momentum_residual <= cfg.inner_rtol);
        assert!(sol.induction_residual <= cfg.inner_rtol);

        // Energy identity: <K u, u> + ||curl B||^2 = <f, u> + <g, curl B>
        // (cross terms cancel exactly by the shared collocation).
        let op = MomentumOperator::new(Some(&w), &ds);
        let curl_b = curl_e2f(&sol.b);
        let lhs = op.dirichlet_energy(&sol.u) + dot(&curl_b, &curl_b);
        let mut f0 = f.clone();
        f0.enforce_no_slip();
        let mut g0 = g.clone();
        g0.enforce_no_slip();
        let rhs = dot(&f0, &sol.u) + dot(&g0, &curl_b);
        assert!(
            (lhs - rhs).abs() <= 1e-6 * rhs.abs().max(1e-300),
            "lhs {lhs} rhs {rhs}"
        );
    }
}

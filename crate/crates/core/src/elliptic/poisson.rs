//! Component Poisson solves and the per-grid direct-solver bundle.
//!
//! `solve_poisson_mixed` is conjugate gradients preconditioned with the exact
//! tensor inverse, so it converges in one or two iterations and still returns
//! a CG-certified residual measured against the independent stencil.

use super::krylov::{cg, KrylovProblem, KrylovSpec, KrylovStats};
use super::transform::{apply_neg_laplacian, Bc1d, TensorPoisson, Transform1d};
use crate::error::{Error, Result};
use crate::grid::{div_edge, grad_node, EdgeField, Face, FaceField, Field3, Grid, ScalarField};

/// Boundary-condition pattern for [`solve_poisson_mixed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcPattern {
    /// Cell-centered, homogeneous Neumann on all sides (zero-mean solution;
    /// the right-hand side must have zero mean).
    PureNeumann,
    /// The lattice of magnetic component `c`: homogeneous Neumann along `c`
    /// (the normal direction, from div B = 0 on the boundary), Dirichlet zero
    /// on the axes where the component is tangential.
    EdgeComponent(Face),
    /// The lattice of velocity component `c`: Dirichlet zero at the walls the
    /// component is normal to, negated-mirror Dirichlet (no-slip ghost) on
    /// the other axes.
    FaceComponent(Face),
    /// Node-centered, Dirichlet zero on the whole boundary.
    NodeDirichlet,
}

impl BcPattern {
    pub fn bcs(self) -> [Bc1d; 3] {
        match self {
            BcPattern::PureNeumann => [Bc1d::NeumannCell; 3],
            BcPattern::EdgeComponent(c) => {
                let mut bcs = [Bc1d::DirichletNode; 3];
                bcs[c.index()] = Bc1d::NeumannCell;
                bcs
            }
            BcPattern::FaceComponent(c) => {
                let mut bcs = [Bc1d::DirichletCell; 3];
                bcs[c.index()] = Bc1d::DirichletNode;
                bcs
            }
            BcPattern::NodeDirichlet => [Bc1d::DirichletNode; 3],
        }
    }

    /// Array dims for this pattern on a grid with n cells.
    pub fn dims(self, n: usize) -> (usize, usize, usize) {
        match self {
            BcPattern::PureNeumann => (n, n, n),
            BcPattern::EdgeComponent(Face::X) => (n, n + 1, n + 1),
            BcPattern::EdgeComponent(Face::Y) => (n + 1, n, n + 1),
            BcPattern::EdgeComponent(Face::Z) => (n + 1, n + 1, n),
            BcPattern::FaceComponent(Face::X) => (n + 1, n, n),
            BcPattern::FaceComponent(Face::Y) => (n, n + 1, n),
            BcPattern::FaceComponent(Face::Z) => (n, n, n + 1),
            BcPattern::NodeDirichlet => (n + 1, n + 1, n + 1),
        }
    }
}

/// The three distinct 1D transforms for one grid, built once and shared by
/// every direct solve.
pub struct DirectSolver {
    pub grid: Grid,
    neumann_cell: Transform1d,
    dirichlet_node: Transform1d,
    dirichlet_cell: Transform1d,
}

impl DirectSolver {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.n();
        DirectSolver {
            grid: *grid,
            neumann_cell: Transform1d::new(Bc1d::NeumannCell, n),
            dirichlet_node: Transform1d::new(Bc1d::DirichletNode, n),
            dirichlet_cell: Transform1d::new(Bc1d::DirichletCell, n),
        }
    }

    fn transform(&self, bc: Bc1d) -> &Transform1d {
        match bc {
            Bc1d::NeumannCell => &self.neumann_cell,
            Bc1d::DirichletNode => &self.dirichlet_node,
            Bc1d::DirichletCell => &self.dirichlet_cell,
        }
    }

    /// Exact solve of `(-Laplacian) u = rhs`; for the all-Neumann case the
    /// zero mode is projected out and its magnitude returned.
    pub fn solve_raw(&self, rhs: &Field3, bcs: [Bc1d; 3]) -> (Field3, f64) {
        let tp = TensorPoisson {
            tx: self.transform(bcs[0]),
            ty: self.transform(bcs[1]),
            tz: self.transform(bcs[2]),
        };
        tp.solve(rhs)
    }

    pub fn apply_neg_laplacian(&self, src: &Field3, bcs: [Bc1d; 3]) -> Field3 {
        let mut out = Field3::zeros(src.nx, src.ny, src.nz);
        apply_neg_laplacian(bcs, self.grid.n(), src, &mut out);
        out
    }

    /// Smallest eigenvalue of the no-slip velocity Laplacian, exact from the
    /// 1D eigenvalues (the operator-level Poincare constant is its inverse
    /// square root).
    pub fn velocity_lambda_min(&self) -> f64 {
        self.dirichlet_node.lambda[0] + 2.0 * self.dirichlet_cell.lambda[0]
    }
}

/// CG-certified solve of `(-Laplacian) u = rhs` under `pattern`.
pub fn solve_poisson_mixed(
    rhs: &Field3,
    pattern: BcPattern,
    spec: &KrylovSpec,
    ds: &DirectSolver,
) -> Result<(Field3, KrylovStats)> {
    spec.validate()?;
    let n = ds.grid.n();
    let dims = pattern.dims(n);
    if (rhs.nx, rhs.ny, rhs.nz) != dims {
        return Err(Error::Config(format!(
            "rhs dims {:?} do not match pattern dims {:?}",
            (rhs.nx, rhs.ny, rhs.nz),
            dims
        )));
    }
    let bcs = pattern.bcs();
    let pure_neumann = pattern == BcPattern::PureNeumann;
    if pure_neumann {
        let mean: f64 = rhs.data.iter().sum::<f64>() / rhs.data.len() as f64;
        let scale = rhs.max_abs().max(f64::MIN_POSITIVE);
        if mean.abs() > 1e-10 * scale {
            return Err(Error::IncompatibleRhs {
                mean: mean.abs(),
                bound: 1e-10 * scale,
            });
        }
    }
    // Entries outside the unknown window are pinned boundary values, not DOFs.
    let mut rhs = rhs.clone();
    super::transform::mask_window(bcs, n, &mut rhs);
    let rhs = &rhs;

    let apply = |v: &Field3| ds.apply_neg_laplacian(v, bcs);
    let precond = |v: &Field3| ds.solve_raw(v, bcs).0;
    let project_fn = |v: &mut Field3| {
        let mean: f64 = v.data.iter().sum::<f64>() / v.data.len() as f64;
        for x in &mut v.data {
            *x -= mean;
        }
    };
    let prob = KrylovProblem {
        apply: &apply,
        precond: Some(&precond),
        project: if pure_neumann {
            Some(&project_fn)
        } else {
            None
        },
        name: "poisson-cg",
    };
    cg(&prob, rhs, spec.rtol, None, spec.maxiter)
}

/// Exact discrete Leray projection of a face field: removes the gradient part
/// so the cell divergence vanishes and boundary-normal entries stay zero.
pub fn project_div_free_face(f: &FaceField, ds: &DirectSolver) -> FaceField {
    let mut g = f.clone();
    g.enforce_no_slip();
    let d = crate::grid::div(&g);
    // div grad0 psi = -(-Lap_N) psi, so psi = (-Lap_N)^{-1} (-div f).
    let mut rhs = d.values.clone();
    rhs.scale(-1.0);
    let mean: f64 = rhs.data.iter().sum::<f64>() / rhs.data.len() as f64;
    for v in &mut rhs.data {
        *v -= mean;
    }
    let (psi, _) = ds.solve_raw(&rhs, BcPattern::PureNeumann.bcs());
    let mut psi_field = ScalarField::zeros(&ds.grid);
    psi_field.values = psi;
    let gp = crate::grid::grad_interior(&psi_field);
    let mut out = g;
    out.axpy(-1.0, &gp);
    out
}

/// Exact discrete projection of an edge field onto tangential-zero,
/// node-divergence-free fields.
pub fn project_div_free_edge(e: &EdgeField, ds: &DirectSolver) -> EdgeField {
    let mut g = e.clone();
    g.enforce_tangential_zero();
    let d = div_edge(&g);
    // div_e grad_n psi = -(-Lap_nodeDir) psi.
    let mut rhs = d.clone();
    rhs.scale(-1.0);
    let (psi, _) = ds.solve_raw(&rhs, BcPattern::NodeDirichlet.bcs());
    let gp = grad_node(&psi, &ds.grid);
    let mut out = g;
    out.axpy(-1.0, &gp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{div, norm, random_edge_field, random_face_field, NormKind};

    #[test]
    fn projection_kills_divergence_exactly() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let f = random_face_field(&grid, 11, true);
        let p = project_div_free_face(&f, &ds);
        let d = div(&p);
        assert!(p.is_no_slip());
        assert!(norm(&d, NormKind::Linf, 4.0) <= 1e-10 * f.max_abs() / grid.h());
    }

    #[test]
    fn edge_projection_kills_node_divergence() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let e = random_edge_field(&grid, 5, true);
        let p = project_div_free_edge(&e, &ds);
        let d = crate::grid::div_edge(&p);
        assert!(p.is_tangential_zero());
        assert!(d.max_abs() <= 1e-10 * e.max_abs() / grid.h());
    }

    #[test]
    fn pure_neumann_rejects_incompatible_rhs() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let mut rhs = Field3::zeros(8, 8, 8);
        rhs.fill_with(|_, _, _| 1.0);
        let spec = KrylovSpec::cg(1e-10, 100);
        assert!(matches!(
            solve_poisson_mixed(&rhs, BcPattern::PureNeumann, &spec, &ds),
            Err(Error::IncompatibleRhs { .. })
        ));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let grid = Grid::new(8).unwrap();
        let ds = DirectSolver::new(&grid);
        let rhs = Field3::zeros(8, 8, 8);
        let spec = KrylovSpec::cg(1e-10, 100);
        let (u, stats) = solve_poisson_mixed(&rhs, BcPattern::PureNeumann, &spec, &ds).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        assert_eq!(stats.iters, 0);
    }
}

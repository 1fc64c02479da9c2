//! Scalar variable-coefficient Neumann solver, div-curl reconstruction, and
//! the matrix-free Krylov kernels shared by all linear solves.

mod krylov;
mod neumann;
mod poincare;
mod poisson;
mod reconstruct;
mod transform;

pub use krylov::{
    bicgstab, bicgstab_from, cg, cg_from, KrylovMethod, KrylovProblem, KrylovSpec, KrylovStats,
    KrylovVec,
};
pub use neumann::{solve_neumann, solve_neumann_from, HallCoeff, NeumannSolution};
pub use poincare::{estimate_div_curl_constants, PoincareEstimate};
pub use poisson::{
    project_div_free_edge, project_div_free_face, solve_poisson_mixed, BcPattern, DirectSolver,
};
pub use reconstruct::{reconstruct_b, ReconstructStats, COMPAT_RTOL};
pub use transform::{apply_neg_laplacian, mask_window, Bc1d, Transform1d};

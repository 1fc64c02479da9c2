use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: operand grids have n = {left} and n = {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("{solver} did not converge: {iters} iterations, residual {residual:.3e} (target {target:.3e})")]
    KrylovStall {
        solver: &'static str,
        iters: usize,
        residual: f64,
        target: f64,
    },

    #[error("incompatible right-hand side: |mean| = {mean:.3e} exceeds {bound:.3e}")]
    IncompatibleRhs { mean: f64, bound: f64 },

    #[error("compatibility violation: ||div J|| = {norm_div:.3e} exceeds {bound:.3e}")]
    CompatibilityViolation { norm_div: f64, bound: f64 },

    #[error(
        "inner iteration stagnated after {sweeps} sweeps (last relative update {last_update:.3e})"
    )]
    Stagnation { sweeps: usize, last_update: f64 },

    #[error("non-finite value produced in {context}")]
    NonFinite { context: &'static str },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid manufactured solution: {0}")]
    InvalidSolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

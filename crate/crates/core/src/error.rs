use num_complex::Complex64;
use thiserror::Error;

use crate::dsl::DslError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {z} lies outside the open unit disk")]
    OutsideDisk { z: Complex64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value {value} at node {z}")]
    NonFinite { z: Complex64, value: f64 },

    #[error("weight is not positive at {z} (value {value})")]
    NonPositiveWeight { z: Complex64, value: f64 },

    #[error("degenerate region: area {area:.3e} below 1e-14")]
    DegenerateRegion { area: f64 },

    #[error("lattice construction failed: cover defect {defect:.6} > epsilon {epsilon} at probe {worst}")]
    LatticeCover {
        defect: f64,
        epsilon: f64,
        worst: Complex64,
    },

    #[error("gram matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e}); lower N or refine the quadrature")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("gram matrix condition number {condition:.3e} exceeds 1e12; use a smaller N or a finer quadrature")]
    IllConditioned { condition: f64 },

    #[error("atom system is rank deficient (numerical rank {rank} of {dimension}) and cannot represent the target")]
    RankDeficient { rank: usize, dimension: usize },

    #[error("spectral routine failed: {0}")]
    Spectral(String),

    #[error("zero-norm test function `{0}`")]
    ZeroNorm(String),

    #[error(transparent)]
    Dsl(#[from] DslError),

    #[error("parse error: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Spec(_) | Error::Io(_) | Error::OutsideDisk { .. }
        ) || matches!(self, Error::Dsl(e) if e.is_syntax())
    }
}

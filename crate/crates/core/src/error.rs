use thiserror::Error;

use crate::pair_gf::DivergenceClass;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("Wronskian residual {residual:e} exceeds tolerance {tolerance:e}")]
    WronskianViolation { residual: f64, tolerance: f64 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("coincident arguments: the Green's function diverges at r1 = r2")]
    CoincidentArguments,

    #[error("pair Green's function diverges for arguments of class {0:?}")]
    DivergentArguments(DivergenceClass),

    #[error("quadrature tolerance not met: estimate {err_est:e}, target {target:e}")]
    ToleranceNotMet { err_est: f64, target: f64 },

    #[error("a cutoff energy W is required for the real part of g0")]
    CutoffRequired,

    #[error("linear system is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

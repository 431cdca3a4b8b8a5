use thiserror::Error;

/// Errors raised by the numerical and physical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model outside validity: lower normal frequency {omega2} is not positive")]
    NonPositiveFrequency { omega2: f64 },

    #[error("unphysical covariance: det = {det} < 1")]
    UnphysicalCovariance { det: f64 },

    #[error("symplectic eigenvalue {nu} < 1")]
    UnphysicalNu { nu: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("ODE step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("inverse Laplace transform diverged: {0}")]
    IltDivergence(String),

    #[error("work integral grid too coarse: Simpson error estimate {estimate} exceeds {limit}")]
    GridTooCoarse { estimate: f64, limit: f64 },

    #[error("Fock truncation leakage {leakage} exceeds {limit}; increase n_max")]
    TruncationLeakage { leakage: f64, limit: f64 },

    #[error("matrix is rank deficient (smallest eigenvalue {min_eig})")]
    RankDeficient { min_eig: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

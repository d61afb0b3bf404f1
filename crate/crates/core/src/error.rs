//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Young function: {0}")]
    InvalidYoung(String),

    #[error("numeric inversion failed to converge: {0}")]
    InversionFailed(String),

    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),

    #[error("cube {0} outside the grid domain")]
    CubeOutsideDomain(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("zero-mass cell {cell} makes w^(-1/(p-1)) undefined")]
    ZeroMassCell { cell: usize },

    #[error("tau {tau} outside reachable mass range [{min}, {max}]")]
    TauOutOfRange { tau: f64, min: f64, max: f64 },

    #[error("domain exhausted: found {found} of {requested} disjoint cubes")]
    DomainExhausted { found: usize, requested: usize },

    #[error("unsupported wavelet family: {0}")]
    UnsupportedFamily(String),

    #[error("Luxemburg solver did not converge: {0}")]
    NormSolverFailed(String),

    #[error("exhaustive sigma oracle limited to 20 nonzero coefficients, got {0}")]
    OracleTooLarge(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rho must be positive, got {0}")]
    NonPositiveRho(f64),

    #[error("covariance row {0} is all zeros")]
    DegenerateRow(usize),

    #[error("half-space normal vector is zero")]
    ZeroNormal,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),

    #[error("no feasible rho up to rho_max = {rho_max}")]
    RhoExhausted { rho_max: f64 },

    #[error("both polarity hypotheses are infeasible at node {node}")]
    BothInfeasible { node: usize },

    #[error("edge ({i}, {j}) is inconsistent with the polarity vector")]
    Inconsistent { i: usize, j: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("need more samples than variables: n = {n}, K = {k}")]
    InsufficientSamples { n: usize, k: usize },

    #[error("row {0} has zero variance")]
    ZeroVariance(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

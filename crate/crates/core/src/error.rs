use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} outside supported range 1..=8")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("form is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("geodesic parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("ellipsoid must be centered at the origin")]
    NotCentered,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("origin is not inside the domain (rho(0) = {0:e})")]
    OriginOutside(f64),
    #[error("seed ellipsoid is not inscribed (max rho {0:e})")]
    SeedNotInscribed(f64),
    #[error("geodesic endpoint {index} is not inscribed (max rho {value:e})")]
    EndpointNotInscribed { index: usize, value: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("no inscribed step of length at least {0:e}")]
    StepStall(f64),
    #[error("could not find an inscribed ellipsoid after {0} halvings")]
    NoInscribedSeed(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

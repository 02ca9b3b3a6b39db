use thiserror::Error;

/// Failures raised by the analytic key-rate pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("non-physical covariance matrix: discriminant Δ²-4det = {0:e}")]
    NegativeDiscriminant(f64),

    #[error("re-displacement variance V_bd = {0} <= -1; rescaling gain undefined")]
    NonPhysicalRescale(f64),

    #[error("worst-case correlation c_min = {0} <= 0; block too small for estimation")]
    NonPositiveCorrelation(f64),

    #[error("link transmittance {0:e} below 1e-12")]
    DegenerateLink(f64),

    #[error("empty grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("endpoint lists differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("end time {end} must exceed start time {start}")]
    InvalidTimes { start: i64, end: i64 },

    #[error("time {t} outside 0..={horizon}")]
    TimeOutOfRange { t: i64, horizon: i64 },

    #[error("enumeration would produce {count} families, above the cap of {cap}")]
    CapExceeded { count: String, cap: u64 },

    #[error("degenerate Hahn parameters: {0}")]
    DegenerateParameters(String),

    #[error("parameter regime error: {0}")]
    ParameterRegime(String),

    #[error("{n} particles do not fit on a support of {size} sites")]
    SupportTooSmall { n: usize, size: usize },

    #[error("subset sampler supports at most {max} paths, got {n}")]
    SamplerLimit { n: usize, max: usize },

    #[error("gauge-singular evaluation: {0}")]
    GaugeSingular(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("gauge function vanishes at ({x}, {t})")]
    ZeroGauge { x: i64, t: i64 },

    #[error("regime point lies on the boundary of its box: {0}")]
    BoundaryRegime(String),

    #[error("integration contour passes through a pole: {0}")]
    PoleOnContour(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("rounded model is infeasible: {0}")]
    InfeasibleRounding(String),

    #[error("exact identity failed: {0}")]
    Inconsistent(String),
}

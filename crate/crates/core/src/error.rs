use thiserror::Error;

/// Errors raised by scene loading and the geometric computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed scene document: {0}")]
    Parse(String),
    #[error("invalid value: {0}")]
    Validation(String),
    #[error("point {0} does not lie on the primitive")]
    OffPrimitive(String),
    #[error("point {0} does not lie on X")]
    NotOnX(String),
    #[error("point {0} lies on X")]
    OnX(String),
    #[error("witness {0} does not have the base point among its nearest points")]
    BadWitness(String),
    #[error("probe {0} lies on X")]
    ProbeOnX(String),
    #[error("scan region is empty")]
    EmptyRegion,
    #[error("segment does not cross the medial axis")]
    NoCrossing,
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("medial cloud is empty")]
    EmptyCloud,
    #[error("direction {0} is not normal at the base point")]
    NotNormal(String),
    #[error("direction {0} is not in the limiting normal fan")]
    DirectionNotLimiting(String),
    #[error("limiting radius {radius} does not exceed the offset {eps}")]
    RadiusTooSmall { radius: f64, eps: f64 },
    #[error("point {0} lies on the medial axis")]
    OnMedial(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

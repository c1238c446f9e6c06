use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("norm mismatch: operands use different ambient norms")]
    NormMismatch,
    #[error("point list must be nonempty")]
    EmptyPointList,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("dimension {0} exceeds the double-description bound {1}")]
    DimensionTooLarge(usize, usize),
    #[error("degenerate cone: {0}")]
    DegenerateCone(String),
    #[error("cone is not solid (empty interior)")]
    NotSolid,
    #[error("base point is not in the set")]
    PointNotInSet,
    #[error("unsupported set: {0}")]
    UnsupportedSet(&'static str),
    #[error("component blowup: Minkowski sum would create {0} components (cap {1})")]
    ComponentBlowup(usize, usize),
    #[error("components carry mixed ball radii; convexification refused")]
    MixedRadii,
    #[error("unbounded below along ray {ray:?}")]
    Unbounded { ray: Vec<f64> },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("range dimension {0} exceeds the box-vertex cap {1}")]
    RangeDimTooLarge(usize, usize),
    #[error("missing object: {0}")]
    MissingObject(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

pub type Result<T> = std::result::Result<T, Error>;

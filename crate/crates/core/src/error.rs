use thiserror::Error;

/// Errors raised by the geometry, metric and squeezing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("image lies on the hyperplane at infinity")]
    ImageAtInfinity,
    #[error("projective map is singular")]
    SingularMap,
    #[error("points are not collinear")]
    NotCollinear,
    #[error("coincident points in cross-ratio")]
    CoincidentPoints,
    #[error("point is outside the unit ball")]
    OutsideBall,
    #[error("point not interior")]
    PointNotInterior,
    #[error("origin is not an interior point")]
    OriginNotInterior,
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("operation not supported for {0}")]
    UnsupportedBody(&'static str),
    #[error("boundary point is not strictly convex")]
    NotStrictlyConvex,
    #[error("nearest boundary point is not unique")]
    NoUniqueProjection,
    #[error("segment leaves the body")]
    SegmentExits,
    #[error("body is unbounded")]
    Unbounded,
    #[error("singular hyperplane of the map meets the body")]
    SingularHyperplaneCrossing,
    #[error("body is not convex")]
    NotConvex,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("line {line}: {message}")]
    Spec { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::golden::IndexVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in the golden field")]
    DivisionByZero,

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    /// A lattice point fell exactly on a window boundary.
    #[error("singular offset: lattice point {point:?} (level {level}) lies on a window boundary")]
    SingularOffset { point: IndexVector, level: u8 },

    /// A perpendicular-space point fell exactly on a region boundary.
    #[error("point on a region boundary: {0}")]
    OnBoundary(String),

    #[error("vertex {0:?} does not have a complete star inside the patch")]
    StarIncomplete(IndexVector),

    #[error("cannot classify {0}")]
    Unclassifiable(String),

    /// Two independent constructions disagree; always a bug or a broken invariant.
    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("sampling window of radius {window} around a disc of radius {disc} overflows a patch of radius {patch}")]
    WindowOverflow { window: f64, disc: f64, patch: f64 },

    #[error("missing annotation layer `{layer}`; run `{step}` first")]
    MissingLayer { layer: String, step: String },

    #[error("document error: {0}")]
    Document(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

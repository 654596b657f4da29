use core::fmt;

/// Errors reported by index construction, search, and descriptor extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    /// An operation that needs at least one vector received none.
    EmptyCluster,
    /// All vectors of a cluster are identical; there is no principal
    /// direction to split along.
    DegenerateCluster,
    /// A direction vector was expected to have unit length.
    UnnormalizedDirection,
    /// Vector or rectangle dimensions disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// A split left one side empty (pathological numerics).
    DegenerateSplit,
    /// The image is smaller than the detector requires.
    ImageTooSmall { width: usize, height: usize },
    /// A pixel raster with zero area or mismatched buffer length.
    InvalidRaster,
    /// Pixel intensities outside [0, 1] or non-finite.
    InvalidIntensity,
    /// The descriptor patch does not fit inside the image.
    PatchOutOfBounds,
    /// The query image has no detectable features.
    FeaturelessQuery,
    /// A vector contains NaN or infinite components.
    NonFiniteComponent,
    /// `k` or another count parameter must be at least one.
    InvalidCount,
    /// Tree parts do not assemble into a valid index.
    MalformedTree,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyCluster => write!(f, "empty cluster"),
            Error::DegenerateCluster => write!(f, "degenerate cluster"),
            Error::UnnormalizedDirection => write!(f, "unnormalized direction"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DegenerateSplit => write!(f, "unbalanced degenerate split"),
            Error::ImageTooSmall { width, height } => {
                write!(f, "image too small: {width}x{height} (minimum 16x16)")
            }
            Error::InvalidRaster => write!(f, "invalid raster dimensions"),
            Error::InvalidIntensity => write!(f, "pixel intensity outside [0, 1]"),
            Error::PatchOutOfBounds => write!(f, "descriptor patch out of bounds"),
            Error::FeaturelessQuery => write!(f, "featureless query"),
            Error::NonFiniteComponent => write!(f, "non-finite vector component"),
            Error::InvalidCount => write!(f, "count parameter must be at least 1"),
            Error::MalformedTree => write!(f, "malformed index tree"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the geometry, functional and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ambient dimension {0} is not supported (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("face dimension {j} out of range 0..={max}")]
    FaceDimension { j: usize, max: usize },

    #[error("negative scale factor {0}")]
    NegativeScale(f64),

    #[error("face dimensions {dims:?} do not satisfy sum = (k-1)*{d} + j with 0 <= j <= {d}")]
    IndexConstraint { dims: Vec<usize>, d: usize },

    #[error("the polytope itself has no proper normal cone")]
    ImproperFace,

    #[error("cone is not pointed")]
    NonPointedCone,

    #[error("cone is the zero cone; its sphere section is empty")]
    ZeroCone,

    #[error("spherical dimension {0} is not supported (expected 0, 1 or 2)")]
    SphericalDimension(usize),

    #[error("union is not certified to be in mutual general position")]
    NotCertified,

    #[error("general position certification failed: {0}")]
    CertificationFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by lattice, gauge, dressing and state operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("DimensionError: {0}")]
    Dimension(String),
    #[error("CapacityError: lattice volume {volume} exceeds cap {cap}")]
    Capacity { volume: usize, cap: usize },
    #[error("DirectionError: direction {mu} out of range for a {ndim}-dimensional lattice")]
    Direction { mu: usize, ndim: usize },
    #[error("LatticeMismatchError: {0}")]
    LatticeMismatch(String),
    #[error("SiteError: site {site} out of range for volume {volume}")]
    Site { site: usize, volume: usize },
    #[error("NonNeutralSourceError: source mean {mean:e} exceeds tolerance {tolerance:e}")]
    NonNeutralSource { mean: f64, tolerance: f64 },
    #[error("CouplingMismatchError: {left} vs {right}")]
    CouplingMismatch { left: f64, right: f64 },
    #[error("InvalidCouplingError: coupling must be finite and nonzero, got {0}")]
    InvalidCoupling(f64),
    #[error("NonFiniteError: {0}")]
    NonFinite(String),
    #[error("EmptyPathError: a path kernel needs at least one step")]
    EmptyPath,
    #[error("PathStepError: cannot parse step {0:?}")]
    PathStep(String),
    #[error("ConstraintViolationError: divergence residual {residual:e} exceeds tolerance {tolerance:e}")]
    ConstraintViolation { residual: f64, tolerance: f64 },
    #[error("NormalizationError: squared norm deviates from 1 by {excess:e}")]
    Normalization { excess: f64 },
    #[error("DivergenceMismatchError: kernel divergences differ by {max_diff:e}; the overlap phase would be gauge dependent")]
    DivergenceMismatch { max_diff: f64 },
    #[error("SiteCollisionError: qubits share site {0}")]
    SiteCollision(usize),
    #[error("ArityError: expected {expected} qubits, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("CutError: cut {0} is not a qubit index of a 2-qubit state")]
    Cut(usize),
    #[error("ChargeError: charge sign must be +1 or -1, got {0}")]
    Charge(i32),
    #[error("BinError: need at least 2 bins, got {0}")]
    Bin(usize),
    #[error("FormatError: {0}")]
    Format(String),
    #[error("IoError: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the solvers and constructors in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("color {color} at cell ({x},{y}) is outside 0..{nz}")]
    InvalidColor { x: usize, y: usize, color: usize, nz: usize },
    #[error("malformed problem: {0}")]
    InvalidShape(String),
    #[error("cell ({x},{y}) lies outside the {nx}x{ny} domain")]
    InvalidCell { x: usize, y: usize, nx: usize, ny: usize },
    #[error("rectangle is empty")]
    EmptyRect,
    #[error("cell set is empty")]
    EmptyCellSet,
    #[error("size cap exceeded: {what} is {got}, limit {limit}")]
    SizeCap { what: &'static str, got: usize, limit: usize },
    #[error("problem is not a product; no projection metadata")]
    NotAProduct,
    #[error("cell ({x},{y}) has no valid color")]
    Uncoverable { x: usize, y: usize },
    #[error("no protocol exists: cell ({x},{y}) has no valid color")]
    NoProtocol { x: usize, y: usize },
    #[error("problem is not total: cell ({x},{y}) has no valid color")]
    NotTotal { x: usize, y: usize },
    #[error("delta must lie in (0, 1], got {0}")]
    InvalidDelta(String),
    #[error("rho must lie in (0, 1), got {0}")]
    InvalidRho(f64),
    #[error("c must be at least 1, got {0}")]
    InvalidExponent(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("measure of the base set is zero")]
    ZeroMeasure,
    #[error("subset is not contained in the ground set")]
    NotASubset,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn cap(what: &'static str, got: usize, limit: usize) -> Result<()> {
    if got > limit {
        Err(Error::SizeCap { what, got, limit })
    } else {
        Ok(())
    }
}

//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A distribution or parameter failed validation.
    InvalidSpec(String),
    /// A query vertex is not contained in the region it was issued against.
    OutsideRegion { what: &'static str },
    /// A geodesic or optimal-vertex set touched the clipping box; the caller
    /// must enlarge the region (see `clip_region`).
    RegionTooSmall { margin: f64 },
    /// An estimator precondition failed (grid too small, degenerate data, ...).
    Estimator(String),
    /// Exponent undefined because every sample is zero (constant weights).
    DegenerateAllZero,
    /// Origin-conditioned simulation exhausted its retry budget.
    ConditioningBudget { attempts: u64 },
    /// No percolation point was certified before the detection horizon.
    NoBreakPoints,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(msg) => write!(f, "invalid spec: {msg}"),
            Error::OutsideRegion { what } => write!(f, "{what} lies outside the region"),
            Error::RegionTooSmall { margin } => {
                write!(f, "optimal path touched the clip box at margin {margin}; enlarge region")
            }
            Error::Estimator(msg) => write!(f, "estimator: {msg}"),
            Error::DegenerateAllZero => {
                write!(f, "exponent undefined: all samples are zero")
            }
            Error::ConditioningBudget { attempts } => {
                write!(f, "origin cluster never survived the horizon after {attempts} attempts")
            }
            Error::NoBreakPoints => write!(f, "no break points before the detection horizon"),
        }
    }
}

impl core::error::Error for Error {}

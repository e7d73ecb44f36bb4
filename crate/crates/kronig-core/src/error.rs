//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building potentials, assembling
/// Hamiltonians, or solving for eigenvalues and band edges.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented domain (named field, reason).
    InvalidInput { what: &'static str, details: String },
    /// The grid's box length is not a whole number of potential periods.
    GridMismatch { box_length: f64, expected: f64 },
    /// A potential or matrix entry is NaN or infinite.
    NonFinite { what: &'static str },
    /// The iterative eigensolver exhausted its budget without meeting the
    /// residual target. Never silently truncated: the caller sees this.
    NonConvergence { details: String },
    /// The dispersion function failed its strict-monotonicity check inside
    /// a band, so a bisection root could not be certified unique.
    MonotonicityViolation { band: usize },
    /// The band-edge scan hit its energy ceiling before finding the
    /// requested number of bands.
    ScanCeiling { found: usize, requested: usize },
    /// Requested band index does not exist in the computed edge table.
    BandOutOfRange { band: usize, available: usize },
    /// Energy outside the domain of a dispersion function.
    OutOfDomain { what: &'static str, value: f64 },
    /// Attempted to normalize a zero vector.
    ZeroVector,
}

impl Error {
    /// True for failures of the numerics (as opposed to bad inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::MonotonicityViolation { .. }
                | Error::ScanCeiling { .. }
                | Error::ZeroVector
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput { what, details } => {
                write!(f, "invalid input `{what}`: {details}")
            }
            Error::GridMismatch {
                box_length,
                expected,
            } => write!(
                f,
                "grid box length {box_length} is not a whole number of periods \
                 (nearest commensurate length {expected})"
            ),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::NonConvergence { details } => {
                write!(f, "eigensolver failed to converge: {details}")
            }
            Error::MonotonicityViolation { band } => write!(
                f,
                "dispersion function is not strictly monotone inside band {band}; \
                 root uniqueness cannot be certified"
            ),
            Error::ScanCeiling { found, requested } => write!(
                f,
                "energy scan ceiling reached after {found} bands (requested {requested})"
            ),
            Error::BandOutOfRange { band, available } => {
                write!(f, "band {band} out of range (edge table holds {available})")
            }
            Error::OutOfDomain { what, value } => {
                write!(f, "{what} = {value} outside the function domain")
            }
            Error::ZeroVector => write!(f, "cannot normalize a zero vector"),
        }
    }
}

impl core::error::Error for Error {}

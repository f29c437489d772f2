use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical kernels and the hull machinery.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shapes or lengths do not agree.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A matrix expected to be symmetric is not.
    NotSymmetric,
    /// A matrix expected to be positive definite is not.
    NotPositiveDefinite,
    /// A point of W is required to lie in the range cone K.
    NotInCone,
    /// The set C does not meet K, so its spectral preimage is empty.
    Infeasible,
    /// The operation is not available for this system or set variant.
    Unsupported(String),
    /// The requested enumeration would exceed its size budget.
    Resource(String),
    /// A set passed where an invariant set is required is not invariant.
    NotInvariant,
    /// The point is a member, so no separating direction exists.
    IsMember,
    /// Malformed input that is not a pure shape error.
    InvalidInput(String),
    /// An iterative kernel failed to converge or lost accuracy.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, got {got}"),
            Error::NotSymmetric => f.write_str("matrix is not symmetric"),
            Error::NotPositiveDefinite => f.write_str("matrix is not positive definite"),
            Error::NotInCone => f.write_str("point does not lie in the range cone K"),
            Error::Infeasible => f.write_str("set is infeasible: C does not meet K"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::Resource(msg) => write!(f, "resource limit: {msg}"),
            Error::NotInvariant => {
                f.write_str("set is not invariant under the reduced system (not a union of orbits)")
            }
            Error::IsMember => f.write_str("point is a member; nothing to separate"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}

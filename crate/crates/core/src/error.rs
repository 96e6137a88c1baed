use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor argument violated a type invariant.
    InvalidInput(String),
    /// The one-sided Jacobi sweep limit was reached before convergence.
    SvdNotConverged { sweeps: usize, off_norm: f64 },
    /// A tail integral diverges and no monotone hint allows a verdict.
    UnboundedTail,
    /// A symbol was unbounded on the evaluation grid.
    UnboundedSymbol { at: f64 },
    /// A tabulated weight does not reach far enough for an asymptotic test.
    InsufficientRange { needed: f64, available: f64 },
    /// The operator is not in `I_h`; carries the last profile point seen.
    NotMember { t: f64, value: f64 },
    /// The normalisation convention has no meaning for this weight.
    NormalisationUndefined(String),
    /// An operation was requested for an input outside its domain.
    Precondition(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::SvdNotConverged { sweeps, off_norm } => {
                write!(f, "singular values did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")
            }
            Error::UnboundedTail => write!(f, "unbounded tail: tail integral diverges"),
            Error::UnboundedSymbol { at } => write!(f, "symbol is unbounded near t = {at:e}"),
            Error::InsufficientRange { needed, available } => {
                write!(f, "insufficient range: table reaches {available:e}, criterion needs {needed:e}")
            }
            Error::NotMember { t, value } => {
                write!(f, "operator is not in I_h (profile reaches {value:e} at t = {t:e})")
            }
            Error::NormalisationUndefined(msg) => write!(f, "normalisation undefined: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;

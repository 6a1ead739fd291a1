//! Error type shared by the whole library.

use alloc::string::String;
use core::fmt;

/// Failure modes of exact-arithmetic operations.
///
/// Every error carries a short human-readable message naming the operation
/// and, where it helps remediation, the limiting bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A value indistinguishable from zero was used where a unit is needed,
    /// or an operation consumed all certified digits.
    PrecisionLoss(String),
    /// A requested coefficient cannot be certified from the stored window;
    /// the message names the limiting bound (enlarge the window or raise
    /// the precision).
    WindowExhausted(String),
    /// An integral element was required.
    NotIntegral(String),
    /// The input does not have the required shape (e.g. not Weierstrass,
    /// not monic, not Eisenstein).
    Shape(String),
    /// A derivative or discriminant is zero to the working precision.
    InseparableToPrecision(String),
    /// The proposed parameter change is not admissible.
    NotAParameter(String),
    /// A borderline valuation could not be decided at the working
    /// precision; the caller must not treat this as PASS or FAIL.
    Undecided(String),
    /// An extension or field presentation is outside the supported shapes.
    Presentation(String),
    /// Two independent computations of the same quantity disagree; this
    /// indicates a bug or a precision fault and is never reconciled.
    Disagreement(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrecisionLoss(m) => write!(f, "precision-loss: {m}"),
            Error::WindowExhausted(m) => write!(f, "window-exhausted: {m}"),
            Error::NotIntegral(m) => write!(f, "not integral: {m}"),
            Error::Shape(m) => write!(f, "shape: {m}"),
            Error::InseparableToPrecision(m) => write!(f, "inseparable-to-precision: {m}"),
            Error::NotAParameter(m) => write!(f, "not-a-parameter: {m}"),
            Error::Undecided(m) => write!(f, "undecided: {m}"),
            Error::Presentation(m) => write!(f, "presentation: {m}"),
            Error::Disagreement(m) => write!(f, "disagreement: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

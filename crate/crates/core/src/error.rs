use core::fmt;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix with no entries.
    Empty,
    /// An input entry was NaN or infinite.
    NonFinite {
        /// Position of the first offending entry.
        index: usize,
    },
    /// Two operands have different lengths.
    DimensionMismatch {
        /// Length of the left operand.
        expected: usize,
        /// Length of the right operand.
        found: usize,
    },
    /// `rows * cols` does not match the number of entries.
    ShapeMismatch {
        /// Requested rows.
        rows: usize,
        /// Requested columns.
        cols: usize,
        /// Entries supplied.
        len: usize,
    },
    /// A denominator fell below the singularity guard.
    NearSingular {
        /// The offending denominator.
        denominator: f64,
    },
    /// An iterative routine ran out of iterations.
    IterationLimit {
        /// Iterations performed.
        iterations: usize,
        /// Best estimate available when the limit was hit.
        estimate: f64,
    },
    /// A computed iterate or map value is not finite.
    Divergence,
    /// A configuration parameter is out of range.
    InvalidParameter(&'static str),
    /// A metric is undefined for its input (e.g. zero reference PSNR).
    UndefinedMetric(&'static str),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Empty => f.write_str("empty vector"),
            Error::NonFinite { index } => write!(f, "non-finite entry at index {index}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ShapeMismatch { rows, cols, len } => {
                write!(f, "shape {rows}x{cols} does not match {len} entries")
            }
            Error::NearSingular { denominator } => {
                write!(f, "near-singular denominator {denominator:e}")
            }
            Error::IterationLimit {
                iterations,
                estimate,
            } => write!(
                f,
                "no convergence after {iterations} iterations (best estimate {estimate})"
            ),
            Error::Divergence => f.write_str("iteration produced non-finite values"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::UndefinedMetric(what) => write!(f, "undefined metric: {what}"),
        }
    }
}

impl core::error::Error for Error {}

//! Error type shared by every module of the crate.

use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised by validation and numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operands (or ensemble members) do not share a dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch {
        /// Dimension required by the operation.
        expected: usize,
        /// Dimension actually supplied.
        found: usize,
    },
    /// A matrix was empty or its rows had unequal lengths.
    #[error("matrix must be square with dim >= 1 (row {row} has {len} entries, expected {dim})")]
    NotSquare {
        /// Expected row length.
        dim: usize,
        /// Offending row.
        row: usize,
        /// Its length.
        len: usize,
    },
    /// NaN or infinite entry.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite {
        /// Row index.
        row: usize,
        /// Column index.
        col: usize,
    },
    /// `‖M − M†‖_max` exceeded the Hermiticity tolerance.
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    /// Smallest eigenvalue below the PSD tolerance.
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    /// Operator is not bounded above by the identity.
    #[error("operator exceeds the identity (max eigenvalue {0})")]
    AboveIdentity(f64),
    /// `‖U†U − I‖_max` exceeded the unitarity tolerance.
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    /// Density operator trace differs from one.
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    /// A probability outside `(0, 1]`.
    #[error("probability {value} at index {index} is not in (0, 1]")]
    BadProbability {
        /// Position in the list.
        index: usize,
        /// Supplied value.
        value: f64,
    },
    /// Probabilities do not sum to one.
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    /// Lists that must be aligned have different lengths.
    #[error("length mismatch for {what}: expected {expected}, found {found}")]
    LengthMismatch {
        /// Which list.
        what: &'static str,
        /// Expected length.
        expected: usize,
        /// Supplied length.
        found: usize,
    },
    /// An empty ensemble or POVM.
    #[error("{0} must not be empty")]
    Empty(&'static str),
    /// POVM elements do not sum to the identity.
    #[error("POVM elements do not sum to the identity (residual {0:e})")]
    Incomplete(f64),
    /// `B_y†B_y` differs from `F_y`.
    #[error("implementation operator {index} does not reproduce its POVM element (residual {residual:e})")]
    ImplementationMismatch {
        /// Outcome index.
        index: usize,
        /// `‖B†B − F‖_max`.
        residual: f64,
    },
    /// Post-measurement state requested for an outcome that (almost) never happens.
    #[error("outcome {index} has probability {prob:e}; post-measurement state undefined")]
    ZeroProbabilityOutcome {
        /// Outcome index.
        index: usize,
        /// Its Born probability.
        prob: f64,
    },
    /// A scalar parameter outside its documented range.
    #[error("parameter {name} = {value} is outside its valid range")]
    OutOfRange {
        /// Parameter name.
        name: &'static str,
        /// Supplied value.
        value: f64,
    },
    /// A conditional probability matrix with bad entries or column sums.
    #[error("malformed conditional probability matrix: {0}")]
    MalformedChannel(String),
    /// Operation only supports one dimension.
    #[error("operation requires dim = {required}, found {found}")]
    UnsupportedDimension {
        /// Required dimension.
        required: usize,
        /// Supplied dimension.
        found: usize,
    },
    /// Jacobi sweeps did not reduce the off-diagonal mass below tolerance.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence {
        /// Sweeps performed.
        sweeps: usize,
        /// Remaining off-diagonal Frobenius norm.
        residual: f64,
    },
    /// Validation failure of one member of a collection.
    #[error("{what} {index}: {source}")]
    Item {
        /// Collection name (`state`, `element`, ...).
        what: &'static str,
        /// Index of the offending member.
        index: usize,
        /// Underlying failure.
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn item(what: &'static str, index: usize, source: Error) -> Self {
        Error::Item {
            what,
            index,
            source: Box::new(source),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the library.
///
/// Everything except [`Error::AssertionFailed`] is a violated precondition
/// or a validation failure of user data. `AssertionFailed` means an
/// identity the library checks internally did not hold.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable-mismatch: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),

    #[error("too-many-variables: {0} (at most {max})", max = crate::powerseries::MAX_VARS)]
    TooManyVariables(usize),

    #[error("unknown-variable: `{0}`")]
    UnknownVariable(String),

    #[error("parse-error: at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("zero-series: the series vanishes to truncation {truncation}")]
    ZeroSeries { truncation: u32 },

    #[error("nonzero-constant-term: image of `{0}` has a nonzero constant term")]
    NonzeroConstantTerm(String),

    #[error("unit-ideal: generator {0} has a nonzero constant term")]
    UnitIdeal(usize),

    #[error("invalid-model: {0}")]
    InvalidModel(String),

    #[error("divisor-contains-branch: f vanishes to truncation on branch {0}")]
    DivisorContainsBranch(String),

    #[error("node-constraint: both images of u{0} and v{0} are nonzero")]
    NodeConstraint(usize),

    #[error("relation-violation: relation {index} is nonzero mod t^{}", .precision + 1)]
    RelationViolation { index: usize, precision: usize },

    #[error("arc-inside-divisor: the arc factors through the divisor to order {0}")]
    ArcInsideDivisor(usize),

    #[error("candidate-directions-exhausted: no generic arc found after {0} attempts")]
    DirectionsExhausted(usize),

    #[error("invalid-curve: {0}")]
    InvalidCurve(String),

    #[error("invalid-sheaf: {0}")]
    InvalidSheaf(String),

    #[error("invalid-family: {0}")]
    InvalidFamily(String),

    #[error("point-at-node: {0} coincides with a node point")]
    PointAtNode(String),

    #[error("degree-mismatch: sheaf degree {degree}, expected {expected}")]
    DegreeMismatch { degree: i64, expected: i64 },

    #[error("no-sections: h0 = 0 but the operation needs h0 >= 1")]
    NoSections,

    #[error("genericity-budget-exhausted: {0}")]
    GenericityExhausted(String),

    #[error("indeterminate-at-truncation: det vanishes mod t^{}", .0 + 1)]
    IndeterminateAtTruncation(usize),

    #[error("h1-nonvanishing: auxiliary twist still has h1 > 0")]
    H1Nonvanishing,

    #[error("invalid-argument: {0}")]
    InvalidArgument(String),

    #[error("assertion-failed: {0}")]
    AssertionFailed(String),
}

impl Error {
    /// Whether the error is an internal identity failure rather than bad input.
    pub fn is_assertion(&self) -> bool {
        matches!(self, Error::AssertionFailed(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series vanishes to its truncation order")]
    ZeroSeries,
    #[error("branch at infinity is not simple (dQ/dv vanishes at the anchor)")]
    NotSimpleBranch,
    #[error("anchor does not lie on the curve at infinity (|Q(0, v0)| = {residual:e})")]
    AnchorMismatch { residual: f64 },
    #[error("expression has a pole at infinity (valuation {valuation})")]
    PoleAtInfinity { valuation: i64 },
    #[error("denominator vanishes on the curve to truncation order")]
    DenominatorVanishes,
    #[error("fiber over {z} is degenerate: within clearance {clearance:e} of critical value {critical}")]
    DegenerateFiber {
        z: String,
        critical: String,
        clearance: f64,
    },
    #[error("continuation step collapsed below {floor:e} near z = {z}")]
    StepCollapse { z: String, floor: f64 },
    #[error("continuation could not identify a unique sheet at z = {z}")]
    SheetAmbiguity { z: String },
    #[error("germs are truncated at t^{have}, need t^{need}")]
    TruncationTooShort { have: i64, need: i64 },
    #[error("numerical nullspace is empty under the rank threshold")]
    EmptyNullspace,
    #[error("tracked roots collided after continuation around {critical}")]
    PermutationCollision { critical: String },
    #[error("denominator polynomial nearly vanishes at z = {z} (|P_I(z)| = {value:e})")]
    DenominatorNearZero { z: String, value: f64 },
    #[error("minor of the branch-value matrix is singular")]
    SingularMinor,
    #[error("fewer than two usable n values survived")]
    NoUsableN,
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("refusing reconstruction guarantee: {0}")]
    Refused(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    /// Whether the failure comes from the numerics (continuation, rank
    /// decisions, residuals) rather than from malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ZeroSeries
                | Error::DegenerateFiber { .. }
                | Error::StepCollapse { .. }
                | Error::SheetAmbiguity { .. }
                | Error::EmptyNullspace
                | Error::PermutationCollision { .. }
                | Error::DenominatorNearZero { .. }
                | Error::SingularMinor
                | Error::NoUsableN
        )
    }
}

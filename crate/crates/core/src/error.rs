use thiserror::Error;

/// Errors raised by tiltlab operations.
///
/// The three broad classes map onto the CLI exit codes: `Parse` is a usage
/// problem, `Invariant` is an internal consistency failure, everything else
/// is a domain or precondition violation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TiltError {
    #[error("malformed value for `{field}`: {reason}")]
    Parse { field: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("class component v{index} = {value} is not on the lattice (step {step})")]
    OffLattice {
        index: usize,
        value: String,
        step: String,
    },

    #[error("class has no v3 component")]
    MissingV3,

    #[error("point ({b}, {w}) is outside the region w > b^2/2 + {defect}")]
    OutsideRegion {
        b: String,
        w: String,
        defect: String,
    },

    #[error("classes are proportional; the wall equation vanishes identically")]
    Proportional,

    #[error("arithmetic mixes sqrt({0}) with sqrt({1})")]
    MixedRadicals(String, String),

    #[error("enumeration box is smaller than the certified bound: {0}")]
    BoxTooSmall(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

impl TiltError {
    pub fn pre(msg: impl Into<String>) -> Self {
        TiltError::Precondition(msg.into())
    }

    pub fn parse(field: impl Into<String>, reason: impl Into<String>) -> Self {
        TiltError::Parse {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, TiltError>;

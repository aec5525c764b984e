//! Error type shared by every engine in the crate.

use thiserror::Error;

/// Errors raised by propensity construction, the engines, and the document
/// format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiqError {
    /// A rational was built with denominator zero.
    #[error("denominator must be nonzero")]
    ZeroDenominator,

    /// A propensity fell outside the unit interval.
    #[error("propensity {value} is outside [0, 1]")]
    OutOfRange { value: String },

    /// An operation was called with an argument its contract rejects.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Multiplication by zero is not representable as shift-and-add.
    #[error("scale factor must be >= 1 (a zero product is the deterministic zero quantity)")]
    ZeroScale,

    /// A carry model was paired with operand tails it does not describe.
    #[error("carry model {model} requires {required} tails, got {got}")]
    ModelTailMismatch {
        model: &'static str,
        required: &'static str,
        got: String,
    },

    /// A joint-law window was requested beyond the explicit bit region.
    #[error("window depth {window} exceeds the explicit depth {depth}")]
    WindowTooDeep { window: u32, depth: u32 },

    /// A queried position lies outside a law's window.
    #[error("position {0} is outside the law's window")]
    PositionOutOfWindow(i32),

    /// Enumeration would visit more indeterminate bits than the cap allows.
    #[error("enumeration over {bits} indeterminate bits exceeds the cap of {cap}")]
    EnumerationLimit { bits: u32, cap: u32 },

    /// Scaled integer arithmetic would overflow the supported bit width.
    #[error("bit depth {bits} exceeds the supported scaled-arithmetic width of {max}")]
    DepthLimit { bits: u32, max: u32 },

    /// A document failed to parse; `field` locates the offending entry.
    #[error("parse error at {field}: {message}")]
    Parse { field: String, message: String },
}

pub type Result<T> = core::result::Result<T, FiqError>;

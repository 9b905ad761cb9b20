//! Error type shared across the library.

use thiserror::Error;

/// Errors reported by geometry, channel, precoding and optimization code.
#[derive(Debug, Error)]
pub enum Error {
    /// A shape cannot be constructed from the given parameters.
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// An input is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Transmit element and receive point coincide (zero distance).
    #[error("singular geometry: transmit element coincides with receive point")]
    Singularity,

    /// A channel vector (or gain) is identically zero where a nonzero one is required.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// Mismatched vector dimensions between caller-supplied arguments.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A scenario violates one of its invariants.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// Internal guard: the positivity shift left a non-positive coordinate.
    #[error("positivity shift failed: {0}")]
    ShiftFailure(String),

    /// A problem handed to the GP layer is malformed.
    #[error("malformed GP problem: {0}")]
    Gp(String),

    /// An optimization run produced no usable deployment.
    #[error("optimization failed: {0}")]
    Optimization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

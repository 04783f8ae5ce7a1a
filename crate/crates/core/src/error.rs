use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Exact integer arithmetic exceeded the fixed-width capacity.
    #[error("integer overflow in exact arithmetic ({context})")]
    Overflow { context: &'static str },

    /// The requested chain length exceeds the enumeration cap.
    #[error("chain length {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The free energy per site divides by beta.
    #[error("free energy is undefined at beta = 0")]
    UndefinedAtZeroBeta,

    #[error("no root: {0}")]
    NoRoot(String),

    /// The closed-form flow hits its pole at `1 + x u0 ell = 0`.
    #[error("flow pole: 1 + x*u0*ell = {value} <= 0")]
    Pole { value: f64 },

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

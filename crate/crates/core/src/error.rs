use thiserror::Error;

/// Errors raised by the solver and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, partition or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Operands live on different lattices.
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    /// Input violates an operation precondition.
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// Requested norm or law is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Time-periodic collocation would alias the cubic nonlinearity.
    #[error("aliasing: {0}")]
    Aliasing(String),

    /// Per-mode eigen decomposition refused near the Jordan point.
    #[error("degenerate mode at |xi| = {xi_norm}: use the direct exponential path")]
    Degenerate { xi_norm: f64 },

    /// NaN or overflow detected during time stepping.
    #[error("blow-up detected at t = {time}")]
    BlowUp { time: f64 },

    /// Empty input where data is required.
    #[error("empty input: {0}")]
    Empty(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("snapshot format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

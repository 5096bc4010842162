use thiserror::Error;

/// Errors produced by the evaluation and scanning routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested working precision cannot resolve the value at this height.
    #[error("insufficient precision: {given} digits given, {required} required")]
    Precision { required: u32, given: u32 },

    /// A hard resource cap (series length, audit rounds) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A numerical procedure failed to converge or to certify its error.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Evaluation requested at a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// A point excluded from the operation's contract (not a pole of the result).
    #[error("excluded point: {0}")]
    ExcludedPoint(String),

    /// A supplied kernel violated its declared decay bound.
    #[error("kernel contract violated: {0}")]
    Contract(String),

    /// Invalid configuration value.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The bracketing grid proved too coarse and the audit loop gave up.
    #[error("rescan required: {0}")]
    Rescan(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A request would exceed a configured size ceiling.
    #[error("size limit exceeded: {what} needs {}, ceiling is {ceiling}", show_size(*.requested))]
    Size {
        what: &'static str,
        requested: u128,
        ceiling: u128,
    },

    /// An intermediate value does not fit the integer width in use.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or malformed arguments.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A Dirichlet series was requested at or left of its pole.
    #[error("series diverges at s = {0}")]
    Divergent(i64),

    /// The operation is not defined for this lattice dimension.
    #[error("unsupported dimension {0}")]
    Dimension(usize),

    #[error("cannot render an image from zero peaks")]
    EmptyImage,
}

pub type Result<T> = std::result::Result<T, Error>;

/// `u128::MAX` stands for any request too large to represent.
fn show_size(n: u128) -> String {
    if n == u128::MAX {
        "at least 2^128".into()
    } else {
        n.to_string()
    }
}

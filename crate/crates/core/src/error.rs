use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("map is not dominant (composition vanished identically)")]
    NotDominant,
    #[error("map does not preserve the fibration x = const")]
    NotJonquieres,
    #[error("unsupported field/place combination: {0}")]
    UnsupportedPlace(String),
    #[error("element is not semisimple of infinite order")]
    NoneFiniteOrder,
    #[error("vertices live over different places")]
    PlaceMismatch,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("set is not invariant under the group: {0}")]
    NotInvariant(String),
    #[error("closure exceeded the bound of {0} elements")]
    ClosureBoundExceeded(usize),
    #[error("word ball exceeds the budget of {0} elements")]
    BallTooLarge(usize),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("internal verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

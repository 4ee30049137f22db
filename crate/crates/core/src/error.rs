use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed board string: {0}")]
    MalformedBoard(String),

    /// An E2/E3 evaluator was asked about a feature pair its table does not cover.
    #[error("feature table has no entry for moves_remaining={moves_remaining}, ones={ones}")]
    MissingTableEntry { moves_remaining: u32, ones: u32 },

    #[error("evaluator {evaluator} cannot be used on {game} games")]
    IncompatibleEvaluator {
        evaluator: &'static str,
        game: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

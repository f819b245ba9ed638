use std::path::PathBuf;

use thiserror::Error;

use crate::bpe::BpeError;
use crate::hangul::HangulError;
use crate::morph::MorphError;
use crate::stats::StatsError;
use crate::strategy::StrategyError;
use crate::vocab::VocabError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Hangul(#[from] HangulError),
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Bpe(#[from] BpeError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Problems with how the tool was invoked or configured, as opposed to
    /// problems with the data it was given.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::File { .. }
                | Error::Bpe(BpeError::VocabTooSmall { .. })
                | Error::Vocab(VocabError::TooSmall { .. })
                | Error::Strategy(StrategyError::MissingComponent { .. })
                | Error::Strategy(StrategyError::UnknownKind(_))
        )
    }
}

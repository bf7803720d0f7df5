use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lexicon construction failed: {0}")]
    Construction(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("duplicate surface {surface:?} in {class} inventory")]
    DuplicateSurface {
        class: &'static str,
        surface: String,
    },

    #[error("{class} weights sum to {sum}, expected 1")]
    WeightSum { class: &'static str, sum: f64 },

    #[error("invalid inventory: {0}")]
    InvalidInventory(String),

    #[error("constraint admitted no word in {attempts} attempts")]
    InfeasibleConstraint { attempts: u64 },

    #[error("{count} analyses exceed the enumeration budget of {budget}; use Monte Carlo generation instead")]
    TooLarge { count: u128, budget: u64 },

    #[error("input is not valid UTF-8 at byte offset {offset}")]
    Decode { offset: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

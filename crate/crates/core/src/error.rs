use thiserror::Error;

use crate::bayes_opt::Observation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied inconsistent or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Reading or writing a file failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A file did not match its declared format.
    #[error("malformed file at byte offset {offset}: {detail}")]
    Format { offset: u64, detail: String },

    /// A kernel system could not be factorized even after the jitter ladder.
    #[error(
        "ill-conditioned kernel system (condition estimate {condition_estimate:.3e}): {detail}"
    )]
    Conditioning {
        condition_estimate: f64,
        detail: String,
    },

    /// The optimizer cannot continue from its current state.
    #[error("invalid optimizer state: {0}")]
    State(String),

    /// Objective evaluation failed for a specific reconstruction slice.
    #[error("objective evaluation failed on slice {slice}: {source}")]
    Slice {
        slice: usize,
        #[source]
        source: Box<Error>,
    },

    /// An optimization run stopped early; the observations gathered so far are kept.
    #[error("run aborted after {} observations: {source}", partial.len())]
    Aborted {
        partial: Vec<Observation>,
        #[source]
        source: Box<Error>,
    },

    /// A grid sweep stopped early; entries evaluated before the failure are kept.
    #[error("grid sweep aborted with {} of {} entries evaluated: {source}", partial.iter().flatten().count(), partial.len())]
    Sweep {
        partial: Vec<Option<f64>>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

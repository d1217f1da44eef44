use thiserror::Error;

use crate::model::RequestId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown request id {0}")]
    UnknownRequest(RequestId),

    #[error("instance has no requests")]
    EmptyInstance,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("parents do not cover the same request set")]
    MismatchedParents,

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("episode is not complete: {realized} of {expected} epochs realized")]
    IncompleteEpisode { realized: usize, expected: usize },

    #[error("dispatch and postpone sets overlap on request {0}")]
    OverlappingDecisions(RequestId),

    #[error("dispatch threshold {dispatch} is below postpone threshold {postpone}")]
    ThresholdOrder { dispatch: f64, postpone: f64 },

    #[error("no scenario solutions to aggregate")]
    NoScenarioSolutions,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

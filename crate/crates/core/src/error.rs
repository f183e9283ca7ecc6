use thiserror::Error;

use crate::model::{Stage, Tier};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Compute(String),
    #[error("simulated time overflow")]
    TimeOverflow,
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("analysis error: {0}")]
    Analysis(String),
    #[error("strategy `{label}`: {source}")]
    Strategy { label: String, source: Box<Error> },
}

impl Error {
    /// The underlying error, looking through strategy labels.
    pub fn root(&self) -> &Error {
        match self {
            Error::Strategy { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Raised before any simulation step when a placement cannot be executed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("task {0} is not assigned to any resource")]
    UnassignedTask(u64),
    #[error("assignment references task {0}, which is not in the workload")]
    UnknownTask(u64),
    #[error("task {task} is assigned to unknown resource `{resource}`")]
    UnknownResource { task: u64, resource: String },
    #[error("task {task} has unknown origin resource `{resource}`")]
    UnknownOrigin { task: u64, resource: String },
    #[error("missing link ({src}, {dst})")]
    MissingLink { src: String, dst: String },
    #[error("no resource in tier `{0}`")]
    EmptyTier(Tier),
    #[error("stage `{0}` has no tier mapping")]
    UnmappedStage(Stage),
    #[error("duplicate task id {0}")]
    DuplicateTask(u64),
    #[error("duplicate resource id `{0}`")]
    DuplicateResource(String),
    #[error("duplicate link ({src}, {dst})")]
    DuplicateLink { src: String, dst: String },
}

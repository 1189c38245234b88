use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed document: {source}", path.display())]
    Document {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("unsupported knowledge base schema version {found:?} (this build reads {expected:?})")]
    SchemaVersion { found: String, expected: String },

    #[error("knowledge base invariant violated: {0}")]
    Invariant(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("prompt template {template}: {message}")]
    Template { template: String, message: String },

    #[error(transparent)]
    Llm(#[from] crate::llm::LlmError),

    #[error("could not parse a ranked list from the model reply")]
    RankParse,

    #[error("build aborted in repository {repo}: {reason} (completed: [{}])", completed.join(", "))]
    BuildAborted {
        repo: String,
        reason: String,
        completed: Vec<String>,
    },

    #[error("dataset line {line}: {message}")]
    Dataset { line: usize, message: String },

    #[error("localization failed for every routed repository")]
    AllReposFailed,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("document {id}: {message}")]
    Document { id: String, message: String },

    #[error("remote service unavailable after {attempts} attempts: {message}")]
    RemoteUnavailable { attempts: u32, message: String },

    #[error("remote response malformed: {0}")]
    RemoteMalformed(String),

    #[error("remote response failed validation: {0}")]
    RemoteValidation(String),

    #[error("pipeline stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("no sensitive n-grams in reference corpus")]
    NoSensitiveNgrams,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

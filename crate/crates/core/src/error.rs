use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed edit set: {0}")]
    MalformedEditSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("source mismatch: {0}")]
    SourceMismatch(String),

    /// Hypotheses and gold sentences could not be paired one-to-one by id.
    #[error("corpus alignment failed: {}", describe_alignment(.missing, .duplicate, .unknown))]
    CorpusAlignment {
        missing: Vec<String>,
        duplicate: Vec<String>,
        unknown: Vec<String>,
    },

    #[error("unknown sentence id `{0}`")]
    UnknownSentence(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

fn describe_alignment(missing: &[String], duplicate: &[String], unknown: &[String]) -> String {
    let mut parts = Vec::new();
    if missing.is_empty() && duplicate.is_empty() && unknown.is_empty() {
        return "empty corpus".to_string();
    }
    if !missing.is_empty() {
        parts.push(format!("missing hypotheses for [{}]", missing.join(", ")));
    }
    if !duplicate.is_empty() {
        parts.push(format!("duplicate hypotheses for [{}]", duplicate.join(", ")));
    }
    if !unknown.is_empty() {
        parts.push(format!("hypotheses without gold for [{}]", unknown.join(", ")));
    }
    parts.join("; ")
}

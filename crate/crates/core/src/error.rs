use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: label {label:?} is not in the label space")]
    UnknownLabel { line: usize, label: String },

    #[error("invalid label space: {0}")]
    LabelSpace(String),

    #[error("label space is already merged (no B-/I- prefixed classes)")]
    AlreadyMerged,

    #[error("sentence {id}: {message}")]
    Sentence { id: u64, message: String },

    #[error("sentence {id} has no ground-truth labels")]
    MissingTruth { id: u64 },

    #[error("dataset carries no predicted probabilities")]
    MissingProbs,

    #[error("probability matrix: {0}")]
    Probs(String),

    #[error("word {word} ({text}) at chars {start}..{end} overlaps no subword token")]
    Alignment {
        word: usize,
        text: String,
        start: usize,
        end: usize,
    },

    #[error("unknown {kind} {name:?}; expected one of: {valid}")]
    UnknownName {
        kind: &'static str,
        name: String,
        valid: String,
    },

    #[error("{0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("evaluation: {0}")]
    Eval(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("{path}, record {record}: {message}")]
    Format {
        path: String,
        record: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn unknown_name(kind: &'static str, name: &str, valid: &[&str]) -> Self {
        Error::UnknownName {
            kind,
            name: name.to_string(),
            valid: valid.join(", "),
        }
    }
}

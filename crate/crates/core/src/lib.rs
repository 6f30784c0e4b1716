//! Detection of label errors in token classification datasets.
//!
//! A model's per-token class probabilities are turned into token quality
//! scores, aggregated into one quality score per sentence, and ranked so that
//! the sentences most likely to hold a wrong label come first.

pub mod conll;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod formats;
pub mod label_space;
pub mod pooling;
pub mod preprocess;
pub mod sentence_scores;
pub mod token_scores;

pub use dataset::{
    mark_errors, merge_prefixes, CharSpan, Dataset, ErrorMarks, ProbMatrix, TokenizedSentence,
};
pub use error::{Error, Result};
pub use evaluation::{EvalInput, Metric, MetricReport, Unit};
pub use label_space::LabelSpace;
pub use pooling::{align, pool, pool_dataset, PoolStrategy, SubwordProbs};
pub use sentence_scores::{
    MethodCombo, ScoreConfig, SentenceMethod, SentenceScoreRecord, TokenEvidence,
};
pub use token_scores::{ClassThresholds, TokenScoreMethod};

//! In-memory model of a token classification dataset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label_space::LabelSpace;

/// Row sums of a probability matrix must be within this distance of 1.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Half-open interval of Unicode scalar positions in a sentence's text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
}

impl CharSpan {
    pub fn new(start: usize, end: usize) -> Self {
        CharSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Number of characters shared with `other`.
    pub fn overlap(&self, other: &CharSpan) -> usize {
        self.end
            .min(other.end)
            .saturating_sub(self.start.max(other.start))
    }
}

impl From<[usize; 2]> for CharSpan {
    fn from([start, end]: [usize; 2]) -> Self {
        CharSpan { start, end }
    }
}

impl From<CharSpan> for [usize; 2] {
    fn from(s: CharSpan) -> Self {
        [s.start, s.end]
    }
}

/// Checks that spans are non-empty, strictly increasing and non-overlapping.
pub(crate) fn check_spans(spans: &[CharSpan]) -> std::result::Result<(), String> {
    for (i, s) in spans.iter().enumerate() {
        if s.is_empty() {
            return Err(format!("span {i} ({}..{}) is empty", s.start, s.end));
        }
        if i > 0 && spans[i - 1].end > s.start {
            return Err(format!(
                "span {i} ({}..{}) overlaps or precedes span {}",
                s.start,
                s.end,
                i - 1
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedSentence {
    pub id: u64,
    pub tokens: Vec<String>,
    pub char_spans: Vec<CharSpan>,
    pub given_labels: Vec<usize>,
    pub true_labels: Option<Vec<usize>>,
}

impl TokenizedSentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Reconstructs the sentence text from tokens and their character spans.
    pub fn text(&self) -> String {
        let mut out = String::new();
        let mut pos = 0;
        for (tok, span) in self.tokens.iter().zip(&self.char_spans) {
            while pos < span.start {
                out.push(' ');
                pos += 1;
            }
            out.push_str(tok);
            pos = span.end;
        }
        out
    }

    pub fn validate(&self, num_classes: usize) -> Result<()> {
        let err = |message: String| Error::Sentence {
            id: self.id,
            message,
        };
        let n = self.tokens.len();
        if n == 0 {
            return Err(err("sentence has no tokens".into()));
        }
        if self.given_labels.len() != n || self.char_spans.len() != n {
            return Err(err(format!(
                "{} tokens but {} labels and {} spans",
                n,
                self.given_labels.len(),
                self.char_spans.len()
            )));
        }
        check_spans(&self.char_spans).map_err(err)?;
        for (i, (tok, span)) in self.tokens.iter().zip(&self.char_spans).enumerate() {
            if tok.chars().count() != span.len() {
                return Err(err(format!(
                    "token {i} {tok:?} does not match its span length"
                )));
            }
        }
        let labels = std::iter::once(&self.given_labels).chain(self.true_labels.as_ref());
        for (kind, labels) in ["given", "true"].iter().zip(labels) {
            if labels.len() != n {
                return Err(err(format!(
                    "{kind} labels: expected {n}, got {}",
                    labels.len()
                )));
            }
            if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
                return Err(err(format!(
                    "{kind} label {bad} out of range for {num_classes} classes"
                )));
            }
        }
        Ok(())
    }
}

/// Row-major `rows × cols` matrix of predicted class probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ProbMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Probs(format!(
                "expected {rows}x{cols}={} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if cols == 0 {
            return Err(Error::Probs("zero classes".into()));
        }
        let m = ProbMatrix { rows, cols, values };
        for (i, row) in m.iter_rows().enumerate() {
            if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::Probs(format!("row {i} has invalid entry {v}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Probs(format!("row {i} sums to {sum}")));
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Probs("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.cols)
    }

    /// Index of the largest entry of row `i`; the lowest index wins ties.
    pub fn argmax(&self, i: usize) -> usize {
        argmax(self.row(i))
    }
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Checks that `p` and `labels` describe the same tokens.
pub(crate) fn check_shape(p: &ProbMatrix, labels: &[usize]) -> Result<()> {
    if p.rows() != labels.len() {
        return Err(Error::Shape(format!(
            "{} probability rows for {} labels",
            p.rows(),
            labels.len()
        )));
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= p.cols()) {
        return Err(Error::Shape(format!(
            "label {l} out of range for {} classes",
            p.cols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub label_space: LabelSpace,
    pub sentences: Vec<TokenizedSentence>,
    /// One matrix per sentence, aligned with `sentences`, or `None` when no
    /// predictions have been attached yet.
    pub probs: Option<Vec<ProbMatrix>>,
}

impl Dataset {
    pub fn new(
        label_space: LabelSpace,
        sentences: Vec<TokenizedSentence>,
        probs: Option<Vec<ProbMatrix>>,
    ) -> Result<Self> {
        let ds = Dataset {
            label_space,
            sentences,
            probs,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.label_space.len();
        let mut ids = std::collections::HashSet::with_capacity(self.sentences.len());
        for s in &self.sentences {
            s.validate(k)?;
            if !ids.insert(s.id) {
                return Err(Error::Sentence {
                    id: s.id,
                    message: "duplicate sentence id".into(),
                });
            }
        }
        if let Some(probs) = &self.probs {
            if probs.len() != self.sentences.len() {
                return Err(Error::Probs(format!(
                    "{} matrices for {} sentences",
                    probs.len(),
                    self.sentences.len()
                )));
            }
            for (s, p) in self.sentences.iter().zip(probs) {
                if p.rows() != s.len() || p.cols() != k {
                    return Err(Error::Sentence {
                        id: s.id,
                        message: format!(
                            "probabilities are {}x{}, expected {}x{k}",
                            p.rows(),
                            p.cols(),
                            s.len()
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn require_probs(&self) -> Result<&[ProbMatrix]> {
        self.probs.as_deref().ok_or(Error::MissingProbs)
    }

    pub fn position(&self, id: u64) -> Option<usize> {
        self.sentences.iter().position(|s| s.id == id)
    }
}

/// Per-token and per-sentence disagreement between given and true labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorMarks {
    pub sentences: Vec<bool>,
    pub tokens: Vec<Vec<bool>>,
}

impl ErrorMarks {
    pub fn num_flagged_sentences(&self) -> usize {
        self.sentences.iter().filter(|&&f| f).count()
    }
}

/// A token is mislabeled when its given label differs from the ground truth;
/// a sentence is mislabeled when any of its tokens is.
pub fn mark_errors(ds: &Dataset) -> Result<ErrorMarks> {
    let mut sentences = Vec::with_capacity(ds.len());
    let mut tokens = Vec::with_capacity(ds.len());
    for s in &ds.sentences {
        let truth = s
            .true_labels
            .as_ref()
            .ok_or(Error::MissingTruth { id: s.id })?;
        let marks: Vec<bool> = s
            .given_labels
            .iter()
            .zip(truth)
            .map(|(g, t)| g != t)
            .collect();
        sentences.push(marks.iter().any(|&m| m));
        tokens.push(marks);
    }
    Ok(ErrorMarks { sentences, tokens })
}

/// Drops `B-`/`I-` prefixes: labels are remapped to their entity type and the
/// probability columns of each entity type are summed.
pub fn merge_prefixes(ds: &Dataset) -> Result<Dataset> {
    if ds.label_space.is_merged() {
        return Err(Error::AlreadyMerged);
    }
    let (merged, mapping) = ds.label_space.merged();
    let remap = |labels: &[usize]| labels.iter().map(|&l| mapping[l]).collect::<Vec<_>>();
    let sentences = ds
        .sentences
        .iter()
        .map(|s| TokenizedSentence {
            given_labels: remap(&s.given_labels),
            true_labels: s.true_labels.as_deref().map(remap),
            ..s.clone()
        })
        .collect();
    let probs = match &ds.probs {
        None => None,
        Some(probs) => Some(
            probs
                .iter()
                .map(|p| merge_columns(p, &mapping, merged.len()))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Dataset::new(merged, sentences, probs)
}

fn merge_columns(p: &ProbMatrix, mapping: &[usize], cols: usize) -> Result<ProbMatrix> {
    let mut values = vec![0.0; p.rows() * cols];
    for (i, row) in p.iter_rows().enumerate() {
        for (j, v) in row.iter().enumerate() {
            values[i * cols + mapping[j]] += v;
        }
    }
    ProbMatrix::new(p.rows(), cols, values)
}

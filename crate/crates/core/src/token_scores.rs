//! Per-token label quality scores and Confident-Learning style flags.
//!
//! Quality scores live in `[0, 1]`; higher means the given label is more
//! likely correct. Normalized margin is stored as `(raw + 1) / 2` so that all
//! methods share that range.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{check_shape, ProbMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenScoreMethod {
    SelfConfidence,
    NormalizedMargin,
    Cwe,
}

impl TokenScoreMethod {
    pub const ALL: [TokenScoreMethod; 3] = [
        TokenScoreMethod::SelfConfidence,
        TokenScoreMethod::NormalizedMargin,
        TokenScoreMethod::Cwe,
    ];
    pub const NAMES: [&'static str; 3] = ["self-confidence", "normalized-margin", "cwe"];

    pub fn name(self) -> &'static str {
        match self {
            TokenScoreMethod::SelfConfidence => "self-confidence",
            TokenScoreMethod::NormalizedMargin => "normalized-margin",
            TokenScoreMethod::Cwe => "cwe",
        }
    }

    pub fn score(self, p: &ProbMatrix, labels: &[usize]) -> Result<TokenQualityVector> {
        match self {
            TokenScoreMethod::SelfConfidence => self_confidence(p, labels),
            TokenScoreMethod::NormalizedMargin => normalized_margin(p, labels),
            TokenScoreMethod::Cwe => confidence_weighted_entropy(p, labels),
        }
    }
}

impl fmt::Display for TokenScoreMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TokenScoreMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::unknown_name("token score", s, &Self::NAMES))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenQualityVector {
    pub q: Vec<f64>,
    pub method: TokenScoreMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenFlagVector {
    pub b: Vec<bool>,
}

/// Predicted probability of the given label.
pub fn self_confidence(p: &ProbMatrix, labels: &[usize]) -> Result<TokenQualityVector> {
    check_shape(p, labels)?;
    let q = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| p.row(i)[l])
        .collect();
    Ok(TokenQualityVector {
        q,
        method: TokenScoreMethod::SelfConfidence,
    })
}

/// Given-label probability minus the best competing class, mapped to `[0, 1]`.
pub fn normalized_margin(p: &ProbMatrix, labels: &[usize]) -> Result<TokenQualityVector> {
    check_shape(p, labels)?;
    if p.cols() < 2 {
        return Err(Error::Shape(
            "normalized margin needs at least two classes".into(),
        ));
    }
    let q = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let row = p.row(i);
            let rival = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != l)
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max);
            let raw = row[l] - rival;
            ((raw + 1.0) / 2.0).clamp(0.0, 1.0)
        })
        .collect();
    Ok(TokenQualityVector {
        q,
        method: TokenScoreMethod::NormalizedMargin,
    })
}

/// Entropy of a probability row normalized by `ln K`, with `0 ln 0 = 0`.
pub fn normalized_entropy(row: &[f64]) -> f64 {
    let k = row.len() as f64;
    let h: f64 = row.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
    (h / k.ln()).max(0.0)
}

/// Given-label probability divided by the normalized entropy of the row,
/// clamped to `[0, 1]`. A zero-entropy row scores 1 when it is one-hot at the
/// given label and 0 otherwise.
pub fn confidence_weighted_entropy(p: &ProbMatrix, labels: &[usize]) -> Result<TokenQualityVector> {
    check_shape(p, labels)?;
    if p.cols() < 2 {
        return Err(Error::Shape(
            "confidence-weighted entropy needs at least two classes".into(),
        ));
    }
    let q = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let row = p.row(i);
            let h = normalized_entropy(row);
            if h == 0.0 {
                if row[l] == 1.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (row[l] / h).clamp(0.0, 1.0)
            }
        })
        .collect();
    Ok(TokenQualityVector {
        q,
        method: TokenScoreMethod::Cwe,
    })
}

/// Per-class confidence thresholds: the mean predicted probability of class
/// `j` over the tokens labeled `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassThresholds {
    pub t: Vec<f64>,
    pub support: Vec<usize>,
}

impl ClassThresholds {
    /// A class without labeled tokens has no threshold and never becomes a candidate.
    pub fn usable(&self, class: usize) -> bool {
        self.support[class] > 0
    }
}

/// Running sums for [`ClassThresholds`]. Accumulators over disjoint parts of a
/// dataset can be merged in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAccumulator {
    sums: Vec<f64>,
    counts: Vec<usize>,
}

impl ThresholdAccumulator {
    pub fn new(num_classes: usize) -> Self {
        ThresholdAccumulator {
            sums: vec![0.0; num_classes],
            counts: vec![0; num_classes],
        }
    }

    pub fn add(&mut self, p: &ProbMatrix, labels: &[usize]) -> Result<()> {
        check_shape(p, labels)?;
        if p.cols() != self.sums.len() {
            return Err(Error::Shape(format!(
                "{} classes in probabilities, {} expected",
                p.cols(),
                self.sums.len()
            )));
        }
        for (i, &l) in labels.iter().enumerate() {
            self.sums[l] += p.row(i)[l];
            self.counts[l] += 1;
        }
        Ok(())
    }

    pub fn merge(mut self, other: &ThresholdAccumulator) -> Self {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self
    }

    pub fn finish(self) -> ClassThresholds {
        let t = self
            .sums
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| {
                if c > 0 {
                    (s / c as f64).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        ClassThresholds {
            t,
            support: self.counts,
        }
    }
}

/// Thresholds computed jointly over every token of the given sentences.
pub fn class_thresholds<'a, I>(num_classes: usize, sentences: I) -> Result<ClassThresholds>
where
    I: IntoIterator<Item = (&'a ProbMatrix, &'a [usize])>,
{
    let mut acc = ThresholdAccumulator::new(num_classes);
    for (p, labels) in sentences {
        acc.add(p, labels)?;
    }
    Ok(acc.finish())
}

/// Flags a token when the most probable class among those reaching their
/// threshold differs from its given label. Tokens reaching no threshold are
/// not flagged.
pub fn flag_tokens(
    p: &ProbMatrix,
    labels: &[usize],
    t: &ClassThresholds,
) -> Result<TokenFlagVector> {
    check_shape(p, labels)?;
    if t.t.len() != p.cols() {
        return Err(Error::Shape(format!(
            "{} thresholds for {} classes",
            t.t.len(),
            p.cols()
        )));
    }
    let b = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let row = p.row(i);
            let mut best: Option<usize> = None;
            for (j, &v) in row.iter().enumerate() {
                if t.usable(j) && v >= t.t[j] && best.is_none_or(|b| v > row[b]) {
                    best = Some(j);
                }
            }
            best.is_some_and(|j| j != l)
        })
        .collect();
    Ok(TokenFlagVector { b })
}

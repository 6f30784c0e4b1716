//! Reduction of subword-level predicted probabilities to word-level rows.
//!
//! Words and subwords are matched by character overlap in the detokenized
//! sentence text. A word covered by several subwords pools their rows; a
//! subword covering several words gives each of them a copy of its row.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::dataset::{check_spans, CharSpan, Dataset, ProbMatrix, ROW_SUM_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolStrategy {
    /// Unweighted mean of the overlapping subword rows.
    Average,
    /// Mean weighted by the number of overlapping characters.
    Weighted,
    /// Row of the first overlapping subword.
    First,
}

impl PoolStrategy {
    pub const NAMES: [&'static str; 3] = ["average", "weighted", "first"];

    pub fn name(self) -> &'static str {
        match self {
            PoolStrategy::Average => "average",
            PoolStrategy::Weighted => "weighted",
            PoolStrategy::First => "first",
        }
    }
}

impl fmt::Display for PoolStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PoolStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(PoolStrategy::Average),
            "weighted" => Ok(PoolStrategy::Weighted),
            "first" => Ok(PoolStrategy::First),
            _ => Err(Error::unknown_name("pooling strategy", s, &Self::NAMES)),
        }
    }
}

/// Subword spans with one probability row per subword.
#[derive(Debug, Clone, PartialEq)]
pub struct SubwordProbs {
    pub spans: Vec<CharSpan>,
    pub values: ProbMatrix,
}

impl SubwordProbs {
    pub fn new(spans: Vec<CharSpan>, values: ProbMatrix) -> Result<Self> {
        if spans.len() != values.rows() {
            return Err(Error::Shape(format!(
                "{} subword spans but {} probability rows",
                spans.len(),
                values.rows()
            )));
        }
        for (i, s) in spans.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Shape(format!("subword {i} has an empty span")));
            }
            if i > 0 && spans[i - 1].start > s.start {
                return Err(Error::Shape(format!("subword spans are not sorted at {i}")));
            }
        }
        Ok(SubwordProbs { spans, values })
    }
}

/// A subword overlapping a word, with the number of shared characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub subword: usize,
    pub chars: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// For each word, the overlapping subwords in increasing index order.
    pub words: Vec<Vec<Overlap>>,
}

/// Matches each word span to the subword spans it overlaps.
///
/// Both span lists must be sorted by start. Fails on the first word that no
/// subword touches.
pub fn align(word_spans: &[CharSpan], subword_spans: &[CharSpan]) -> Result<Alignment> {
    check_spans(word_spans).map_err(Error::Shape)?;
    if subword_spans.windows(2).any(|w| w[0].start > w[1].start) {
        return Err(Error::Shape("subword spans are not sorted".into()));
    }
    let mut words = Vec::with_capacity(word_spans.len());
    // first subword that may still overlap the current or a later word
    let mut lo = 0;
    for (w, word) in word_spans.iter().enumerate() {
        while lo < subword_spans.len() && subword_spans[lo].end <= word.start {
            lo += 1;
        }
        let overlaps: Vec<Overlap> = subword_spans[lo..]
            .iter()
            .enumerate()
            .take_while(|(_, s)| s.start < word.end)
            .filter_map(|(k, s)| {
                let chars = word.overlap(s);
                (chars > 0).then_some(Overlap {
                    subword: lo + k,
                    chars,
                })
            })
            .collect();
        if overlaps.is_empty() {
            return Err(Error::Alignment {
                word: w,
                text: String::new(),
                start: word.start,
                end: word.end,
            });
        }
        words.push(overlaps);
    }
    Ok(Alignment { words })
}

/// Same as [`align`], with the word text filled into alignment errors.
pub fn align_tokens<S: AsRef<str>>(
    tokens: &[S],
    word_spans: &[CharSpan],
    subword_spans: &[CharSpan],
) -> Result<Alignment> {
    align(word_spans, subword_spans).map_err(|e| match e {
        Error::Alignment {
            word, start, end, ..
        } => Error::Alignment {
            word,
            text: tokens
                .get(word)
                .map(|t| t.as_ref().to_string())
                .unwrap_or_default(),
            start,
            end,
        },
        other => other,
    })
}

/// Builds one word-level row per aligned word. Output rows are renormalized
/// to sum to one.
pub fn pool(
    sub: &SubwordProbs,
    alignment: &Alignment,
    strategy: PoolStrategy,
) -> Result<ProbMatrix> {
    let k = sub.values.cols();
    let mut values = Vec::with_capacity(alignment.words.len() * k);
    for (w, overlaps) in alignment.words.iter().enumerate() {
        if overlaps.is_empty() {
            return Err(Error::Shape(format!("word {w} has no aligned subword")));
        }
        if let Some(o) = overlaps.iter().find(|o| o.subword >= sub.values.rows()) {
            return Err(Error::Shape(format!(
                "word {w} aligned to subword {} but only {} exist",
                o.subword,
                sub.values.rows()
            )));
        }
        let mut row = vec![0.0; k];
        match strategy {
            PoolStrategy::First => {
                let first = overlaps.iter().map(|o| o.subword).min().expect("non-empty");
                row.copy_from_slice(sub.values.row(first));
            }
            PoolStrategy::Average | PoolStrategy::Weighted => {
                let weight = |o: &Overlap| match strategy {
                    PoolStrategy::Weighted => o.chars as f64,
                    _ => 1.0,
                };
                let total: f64 = overlaps.iter().map(weight).sum();
                for o in overlaps {
                    let wgt = weight(o) / total;
                    for (acc, p) in row.iter_mut().zip(sub.values.row(o.subword)) {
                        *acc += wgt * p;
                    }
                }
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE * 10.0 || sum <= 0.0 {
            return Err(Error::Probs(format!("pooled row {w} sums to {sum}")));
        }
        values.extend(row.iter().map(|v| v / sum));
    }
    ProbMatrix::new(alignment.words.len(), k, values)
}

/// Word-level probabilities for every sentence of `ds`, pooled from subword
/// predictions keyed by sentence id. Subword spans refer to the sentence text
/// reconstructed from the dataset's character spans.
pub fn pool_dataset(
    ds: &Dataset,
    subwords: &HashMap<u64, SubwordProbs>,
    strategy: PoolStrategy,
) -> Result<Vec<ProbMatrix>> {
    ds.sentences
        .iter()
        .map(|s| {
            let sub = subwords.get(&s.id).ok_or_else(|| Error::Sentence {
                id: s.id,
                message: "no subword probabilities".into(),
            })?;
            if sub.values.cols() != ds.label_space.len() {
                return Err(Error::Sentence {
                    id: s.id,
                    message: format!(
                        "{} probability columns for {} classes",
                        sub.values.cols(),
                        ds.label_space.len()
                    ),
                });
            }
            let alignment = align_tokens(&s.tokens, &s.char_spans, &sub.spans).map_err(|e| {
                Error::Sentence {
                    id: s.id,
                    message: e.to_string(),
                }
            })?;
            pool(sub, &alignment, strategy)
        })
        .collect()
}

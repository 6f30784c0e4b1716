//! Sentence-level label quality scores.
//!
//! Every method maps a sentence's predicted probabilities, given labels, token
//! quality scores `q` and flags `b` to one number; lower scores mark sentences
//! more likely to contain a label error.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{check_shape, Dataset, ProbMatrix};
use crate::error::{Error, Result};
use crate::token_scores::{class_thresholds, flag_tokens, ClassThresholds, TokenScoreMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SentenceMethod {
    PredictedDifference,
    BadTokenCounts,
    BadTokenCountsAvg,
    BadTokenCountsMin,
    GoodFraction,
    PenalizeBadTokens,
    AverageQuality,
    Product,
    ExpectedBad,
    ExpectedAlt,
    WorstToken,
    WorstTokenMinAlt,
    WorstTokenSoftmin,
}

impl SentenceMethod {
    pub const ALL: [SentenceMethod; 13] = [
        SentenceMethod::PredictedDifference,
        SentenceMethod::BadTokenCounts,
        SentenceMethod::BadTokenCountsAvg,
        SentenceMethod::BadTokenCountsMin,
        SentenceMethod::GoodFraction,
        SentenceMethod::PenalizeBadTokens,
        SentenceMethod::AverageQuality,
        SentenceMethod::Product,
        SentenceMethod::ExpectedBad,
        SentenceMethod::ExpectedAlt,
        SentenceMethod::WorstToken,
        SentenceMethod::WorstTokenMinAlt,
        SentenceMethod::WorstTokenSoftmin,
    ];

    /// The eleven methods of the main comparison table, without the two
    /// worst-token variants.
    pub const MAIN: [SentenceMethod; 11] = [
        SentenceMethod::PredictedDifference,
        SentenceMethod::BadTokenCounts,
        SentenceMethod::BadTokenCountsAvg,
        SentenceMethod::BadTokenCountsMin,
        SentenceMethod::GoodFraction,
        SentenceMethod::AverageQuality,
        SentenceMethod::PenalizeBadTokens,
        SentenceMethod::Product,
        SentenceMethod::ExpectedBad,
        SentenceMethod::ExpectedAlt,
        SentenceMethod::WorstToken,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SentenceMethod::PredictedDifference => "predicted-difference",
            SentenceMethod::BadTokenCounts => "bad-token-counts",
            SentenceMethod::BadTokenCountsAvg => "bad-token-counts-avg",
            SentenceMethod::BadTokenCountsMin => "bad-token-counts-min",
            SentenceMethod::GoodFraction => "good-fraction",
            SentenceMethod::PenalizeBadTokens => "penalize-bad-tokens",
            SentenceMethod::AverageQuality => "average-quality",
            SentenceMethod::Product => "product",
            SentenceMethod::ExpectedBad => "expected-bad",
            SentenceMethod::ExpectedAlt => "expected-alt",
            SentenceMethod::WorstToken => "worst-token",
            SentenceMethod::WorstTokenMinAlt => "worst-token-min-alt",
            SentenceMethod::WorstTokenSoftmin => "worst-token-softmin",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|m| m.name()).collect()
    }

    /// Whether the method reads token quality scores.
    pub fn uses_token_scores(self) -> bool {
        !matches!(
            self,
            SentenceMethod::PredictedDifference
                | SentenceMethod::BadTokenCounts
                | SentenceMethod::GoodFraction
        )
    }

    /// Whether the method reads Confident-Learning flags.
    pub fn uses_flags(self) -> bool {
        matches!(
            self,
            SentenceMethod::BadTokenCounts
                | SentenceMethod::BadTokenCountsAvg
                | SentenceMethod::BadTokenCountsMin
                | SentenceMethod::GoodFraction
                | SentenceMethod::PenalizeBadTokens
                | SentenceMethod::WorstTokenMinAlt
        )
    }

    fn is_worst_token_family(self) -> bool {
        matches!(
            self,
            SentenceMethod::WorstToken
                | SentenceMethod::WorstTokenMinAlt
                | SentenceMethod::WorstTokenSoftmin
        )
    }
}

impl fmt::Display for SentenceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SentenceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::unknown_name("sentence method", s, &Self::names()))
    }
}

/// Hyperparameters of the sentence scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreConfig {
    /// Weight of the unflagged-token term in `bad-token-counts-avg/min`.
    pub epsilon: f64,
    /// Offset inside the logarithm of `product`.
    pub c: f64,
    /// Number of lowest token scores used by `expected-bad/alt`.
    pub j: usize,
    /// Penalty added to flagged tokens by `worst-token-min-alt`.
    pub d: f64,
    /// Softmax temperature of `worst-token-softmin`.
    pub temperature: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            epsilon: 1e-4,
            c: 1e-3,
            j: 2,
            d: 0.1,
            temperature: 10f64.powf(-1.5),
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c must be positive");
        }
        if self.j < 1 {
            return bad("j must be at least 1");
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return bad("d must be non-negative");
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be positive");
        }
        Ok(())
    }
}

/// `−|R| − max_{i∈R} p[i, argmax_i]` where `R` holds the tokens whose
/// predicted class differs from the given label; 0 when `R` is empty.
pub fn predicted_difference(p: &ProbMatrix, labels: &[usize]) -> Result<f64> {
    check_shape(p, labels)?;
    let mut count = 0usize;
    let mut top = 0.0f64;
    for (i, &l) in labels.iter().enumerate() {
        let pred = p.argmax(i);
        if pred != l {
            count += 1;
            top = top.max(p.row(i)[pred]);
        }
    }
    Ok(-(count as f64) - top)
}

fn flagged(b: &[bool]) -> usize {
    b.iter().filter(|&&f| f).count()
}

/// Negated number of flagged tokens.
pub fn bad_token_counts(b: &[bool]) -> f64 {
    -(flagged(b) as f64)
}

fn partitioned<'a>(q: &'a [f64], b: &'a [bool], want: bool) -> impl Iterator<Item = f64> + 'a {
    q.iter()
        .zip(b)
        .filter(move |(_, &f)| f == want)
        .map(|(&v, _)| v)
}

fn mean_or_one(it: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        1.0
    } else {
        sum / n as f64
    }
}

fn min_or_one(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
        .unwrap_or(1.0)
}

/// Flag count with ties broken by the mean quality of flagged tokens, then by
/// `epsilon` times the mean quality of the others. Empty means count as 1.
pub fn bad_token_counts_avg(q: &[f64], b: &[bool], epsilon: f64) -> f64 {
    bad_token_counts(b)
        + mean_or_one(partitioned(q, b, true))
        + epsilon * mean_or_one(partitioned(q, b, false))
}

/// As [`bad_token_counts_avg`] with minima in place of means.
pub fn bad_token_counts_min(q: &[f64], b: &[bool], epsilon: f64) -> f64 {
    bad_token_counts(b)
        + min_or_one(partitioned(q, b, true))
        + epsilon * min_or_one(partitioned(q, b, false))
}

/// Negated fraction of flagged tokens.
pub fn good_fraction(b: &[bool]) -> f64 {
    -(flagged(b) as f64) / b.len() as f64
}

pub fn penalize_bad_tokens(q: &[f64], b: &[bool]) -> f64 {
    let penalty: f64 = partitioned(q, b, true).map(|v| 1.0 - v).sum();
    1.0 - penalty / q.len() as f64
}

pub fn average_quality(q: &[f64]) -> f64 {
    q.iter().sum::<f64>() / q.len() as f64
}

/// Sum of `ln(q_i + c)`.
pub fn product(q: &[f64], c: f64) -> f64 {
    q.iter().map(|v| (v + c).ln()).sum()
}

/// Token qualities in ascending order; equal values keep token order.
fn sorted_quality(q: &[f64]) -> Vec<f64> {
    let mut sorted = q.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    sorted
}

/// `Σ_{j=1}^{min(n,J)} j · q_(j)` over the ascending token qualities.
pub fn expected_bad(q: &[f64], j: usize) -> f64 {
    sorted_quality(q)
        .iter()
        .take(j)
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v)
        .sum()
}

/// `Σ_{j=1}^{min(n,J)} q_(j)` over the ascending token qualities.
pub fn expected_alt(q: &[f64], j: usize) -> f64 {
    sorted_quality(q).iter().take(j).sum()
}

/// Index of the smallest value; the lowest index wins ties.
fn argmin(values: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    values.enumerate().fold(None, |best, (i, v)| match best {
        Some((_, m)) if m <= v => best,
        _ => Some((i, v)),
    })
}

/// Minimum token quality and the index of the token attaining it.
pub fn worst_token(q: &[f64]) -> (f64, usize) {
    let (i, v) = argmin(q.iter().copied()).expect("sentence has tokens");
    (v, i)
}

/// Minimum of `q_i + d · b_i`.
pub fn worst_token_min_alt(q: &[f64], b: &[bool], d: f64) -> (f64, usize) {
    let penalized = q.iter().zip(b).map(|(&v, &f)| if f { v + d } else { v });
    let (i, v) = argmin(penalized).expect("sentence has tokens");
    (v, i)
}

/// `⟨q, softmax((1 − q) / t)⟩`, computed with the maximum exponent subtracted.
pub fn worst_token_softmin(q: &[f64], temperature: f64) -> f64 {
    let logits: Vec<f64> = q.iter().map(|v| (1.0 - v) / temperature).collect();
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|z| (z - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    q.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / total
}

/// Everything a sentence method may read for one sentence.
#[derive(Debug, Clone, Copy)]
pub struct SentenceInput<'a> {
    pub probs: &'a ProbMatrix,
    pub labels: &'a [usize],
    pub quality: Option<&'a [f64]>,
    pub flags: Option<&'a [bool]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceScore {
    pub score: f64,
    pub worst_token_index: Option<usize>,
}

impl SentenceMethod {
    pub fn score(self, input: &SentenceInput<'_>, cfg: &ScoreConfig) -> Result<SentenceScore> {
        let n = input.labels.len();
        if n == 0 {
            return Err(Error::Shape("sentence has no tokens".into()));
        }
        let q = || {
            input
                .quality
                .filter(|q| q.len() == n)
                .ok_or_else(|| Error::Shape(format!("{self} needs {n} token quality scores")))
        };
        let b = || {
            input
                .flags
                .filter(|b| b.len() == n)
                .ok_or_else(|| Error::Shape(format!("{self} needs {n} token flags")))
        };
        let plain = |score: f64| SentenceScore {
            score,
            worst_token_index: None,
        };
        let worst = |(score, idx): (f64, usize)| SentenceScore {
            score,
            worst_token_index: Some(idx),
        };

        let out = match self {
            SentenceMethod::PredictedDifference => {
                plain(predicted_difference(input.probs, input.labels)?)
            }
            SentenceMethod::BadTokenCounts => plain(bad_token_counts(b()?)),
            SentenceMethod::BadTokenCountsAvg => {
                plain(bad_token_counts_avg(q()?, b()?, cfg.epsilon))
            }
            SentenceMethod::BadTokenCountsMin => {
                plain(bad_token_counts_min(q()?, b()?, cfg.epsilon))
            }
            SentenceMethod::GoodFraction => plain(good_fraction(b()?)),
            SentenceMethod::PenalizeBadTokens => plain(penalize_bad_tokens(q()?, b()?)),
            SentenceMethod::AverageQuality => plain(average_quality(q()?)),
            SentenceMethod::Product => plain(product(q()?, cfg.c)),
            SentenceMethod::ExpectedBad => plain(expected_bad(q()?, cfg.j)),
            SentenceMethod::ExpectedAlt => plain(expected_alt(q()?, cfg.j)),
            SentenceMethod::WorstToken => worst(worst_token(q()?)),
            SentenceMethod::WorstTokenMinAlt => worst(worst_token_min_alt(q()?, b()?, cfg.d)),
            SentenceMethod::WorstTokenSoftmin => {
                let q = q()?;
                worst((worst_token_softmin(q, cfg.temperature), worst_token(q).1))
            }
        };
        // Other token-based methods still point reviewers at the lowest-quality token.
        let out = match (out.worst_token_index, self.uses_token_scores()) {
            (None, true) if !self.is_worst_token_family() => SentenceScore {
                worst_token_index: Some(worst_token(q()?).1),
                ..out
            },
            _ => out,
        };
        if !out.score.is_finite() {
            return Err(Error::Shape(format!("{self} produced a non-finite score")));
        }
        Ok(out)
    }
}

/// A sentence method paired with the token score it reads, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MethodCombo {
    pub method: SentenceMethod,
    pub token_method: Option<TokenScoreMethod>,
}

impl MethodCombo {
    pub fn new(method: SentenceMethod, token_method: Option<TokenScoreMethod>) -> Self {
        let token_method = if method.uses_token_scores() {
            token_method
        } else {
            None
        };
        MethodCombo {
            method,
            token_method,
        }
    }
}

impl fmt::Display for MethodCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.token_method {
            Some(t) => write!(f, "{}/{}", self.method, t),
            None => write!(f, "{}", self.method),
        }
    }
}

/// Every applicable combination, in method order then token-method order.
/// Methods that ignore token scores appear once.
pub fn combos(methods: &[SentenceMethod], token_methods: &[TokenScoreMethod]) -> Vec<MethodCombo> {
    let mut out = Vec::new();
    for &m in methods {
        if m.uses_token_scores() {
            out.extend(token_methods.iter().map(|&t| MethodCombo::new(m, Some(t))));
        } else {
            out.push(MethodCombo::new(m, None));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScoreRecord {
    pub sentence_id: u64,
    pub method: SentenceMethod,
    pub token_method: Option<TokenScoreMethod>,
    pub score: f64,
    pub worst_token_index: Option<usize>,
}

impl SentenceScoreRecord {
    pub fn combo(&self) -> MethodCombo {
        MethodCombo {
            method: self.method,
            token_method: self.token_method,
        }
    }
}

/// Token-level evidence for a whole dataset: class thresholds, flags and
/// quality scores, computed once and shared by every sentence method.
#[derive(Debug, Clone)]
pub struct TokenEvidence<'a> {
    dataset: &'a Dataset,
    probs: &'a [ProbMatrix],
    thresholds: ClassThresholds,
    flags: Vec<Vec<bool>>,
}

impl<'a> TokenEvidence<'a> {
    pub fn new(dataset: &'a Dataset) -> Result<Self> {
        let probs = dataset.require_probs()?;
        let thresholds = class_thresholds(
            dataset.label_space.len(),
            probs
                .iter()
                .zip(&dataset.sentences)
                .map(|(p, s)| (p, s.given_labels.as_slice())),
        )?;
        let flags = probs
            .iter()
            .zip(&dataset.sentences)
            .map(|(p, s)| flag_tokens(p, &s.given_labels, &thresholds).map(|f| f.b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TokenEvidence {
            dataset,
            probs,
            thresholds,
            flags,
        })
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn probs(&self) -> &'a [ProbMatrix] {
        self.probs
    }

    pub fn thresholds(&self) -> &ClassThresholds {
        &self.thresholds
    }

    /// Flags of the sentence at position `idx`.
    pub fn flags(&self, idx: usize) -> &[bool] {
        &self.flags[idx]
    }

    /// Token quality scores of every sentence, by position.
    pub fn quality(&self, method: TokenScoreMethod) -> Result<Vec<Vec<f64>>> {
        self.probs
            .iter()
            .zip(&self.dataset.sentences)
            .map(|(p, s)| method.score(p, &s.given_labels).map(|v| v.q))
            .collect()
    }

    /// Scores every sentence with one combination, in dataset order.
    pub fn score_combo(
        &self,
        combo: MethodCombo,
        cfg: &ScoreConfig,
    ) -> Result<Vec<SentenceScoreRecord>> {
        let quality = match (combo.method.uses_token_scores(), combo.token_method) {
            (true, Some(t)) => Some(self.quality(t)?),
            (true, None) => {
                return Err(Error::Config(format!(
                    "{} requires a token score method",
                    combo.method
                )))
            }
            (false, _) => None,
        };
        self.dataset
            .sentences
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let input = SentenceInput {
                    probs: &self.probs[i],
                    labels: &s.given_labels,
                    quality: quality.as_ref().map(|q| q[i].as_slice()),
                    flags: Some(&self.flags[i]),
                };
                let out = combo.method.score(&input, cfg)?;
                Ok(SentenceScoreRecord {
                    sentence_id: s.id,
                    method: combo.method,
                    token_method: combo.token_method,
                    score: out.score,
                    worst_token_index: out.worst_token_index,
                })
            })
            .collect()
    }
}

/// Scores the dataset with every combination of the requested methods.
///
/// Records are grouped by combination (in [`combos`] order) and, within a
/// combination, follow the dataset's sentence order.
pub fn score_all(
    dataset: &Dataset,
    methods: &[SentenceMethod],
    token_methods: &[TokenScoreMethod],
    cfg: &ScoreConfig,
) -> Result<Vec<SentenceScoreRecord>> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Ok(Vec::new());
    }
    let evidence = TokenEvidence::new(dataset)?;
    let mut out = Vec::new();
    for combo in combos(methods, token_methods) {
        out.extend(evidence.score_combo(combo, cfg)?);
    }
    Ok(out)
}

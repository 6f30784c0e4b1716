//! Rank metrics for label error detection.
//!
//! Inputs are quality scores (higher = more likely correct) and ground-truth
//! error flags. Items with low quality are treated as detections, so every
//! metric only depends on the ordering of the scores.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Sentence,
    Token,
}

impl Unit {
    pub fn name(self) -> &'static str {
        match self {
            Unit::Sentence => "sentence",
            Unit::Token => "token",
        }
    }
}

impl std::str::FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentence" => Ok(Unit::Sentence),
            "token" => Ok(Unit::Token),
            _ => Err(Error::unknown_name("unit", s, &["sentence", "token"])),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalInput {
    scores: Vec<f64>,
    positives: Vec<bool>,
    pub unit: Unit,
}

impl EvalInput {
    pub fn new(scores: Vec<f64>, positives: Vec<bool>, unit: Unit) -> Result<Self> {
        if scores.len() != positives.len() {
            return Err(Error::Eval(format!(
                "{} scores for {} ground-truth flags",
                scores.len(),
                positives.len()
            )));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::Eval(format!("score {i} is not finite")));
        }
        Ok(EvalInput {
            scores,
            positives,
            unit,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn positives(&self) -> &[bool] {
        &self.positives
    }

    pub fn num_positives(&self) -> usize {
        self.positives.iter().filter(|&&p| p).count()
    }

    /// Indices by ascending quality; equal scores keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.scores[a]
                .partial_cmp(&self.scores[b])
                .unwrap_or(Ordering::Equal)
        });
        idx
    }

    /// Groups of equal scores in ascending order, as (positives, total) counts.
    fn tie_blocks(&self) -> Vec<(usize, usize)> {
        let order = self.ranking();
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        let mut prev: Option<f64> = None;
        for i in order {
            let s = self.scores[i];
            if prev != Some(s) {
                blocks.push((0, 0));
                prev = Some(s);
            }
            let last = blocks.last_mut().expect("pushed above");
            last.0 += usize::from(self.positives[i]);
            last.1 += 1;
        }
        blocks
    }
}

/// Probability that a random error scores below a random clean item, with
/// ties counted half (the Mann–Whitney statistic).
pub fn auroc(e: &EvalInput) -> Result<f64> {
    let pos = e.num_positives();
    let neg = e.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Eval(format!(
            "AUROC needs both classes, got {pos} errors and {neg} clean items"
        )));
    }
    // doubled to keep half-credit ties in integers
    let mut twice_correct: u128 = 0;
    let mut neg_below: usize = 0;
    for (p, total) in e.tie_blocks() {
        let n = total - p;
        let neg_above = neg - neg_below - n;
        twice_correct += (p as u128) * (2 * neg_above as u128 + n as u128);
        neg_below += n;
    }
    Ok(twice_correct as f64 / (2.0 * pos as f64 * neg as f64))
}

/// Average precision of the ranking by ascending quality. All errors inside a
/// block of tied scores share the precision reached at the end of the block.
pub fn auprc(e: &EvalInput) -> Result<f64> {
    let pos = e.num_positives();
    if pos == 0 {
        return Err(Error::Eval("AUPRC needs at least one error".into()));
    }
    let mut seen = 0usize;
    let mut tp = 0usize;
    let mut sum = 0.0;
    for (p, total) in e.tie_blocks() {
        seen += total;
        tp += p;
        sum += p as f64 * (tp as f64 / seen as f64);
    }
    Ok(sum / pos as f64)
}

/// Precision among the `k` lowest-quality items.
fn precision_top(e: &EvalInput, order: &[usize], k: usize) -> f64 {
    let hits = order[..k].iter().filter(|&&i| e.positives[i]).count();
    hits as f64 / k as f64
}

/// Error prevalence among the `top_t` lowest-quality items relative to the
/// overall prevalence. `top_t` defaults to the number of errors.
pub fn lift_at_errors(e: &EvalInput, top_t: Option<usize>) -> Result<f64> {
    let pos = e.num_positives();
    if pos == 0 {
        return Err(Error::Eval("lift needs at least one error".into()));
    }
    let t = top_t.unwrap_or(pos);
    if t == 0 || t > e.len() {
        return Err(Error::Eval(format!("top-T of {t} outside 1..={}", e.len())));
    }
    let base = pos as f64 / e.len() as f64;
    Ok(precision_top(e, &e.ranking(), t) / base)
}

/// Precision among the `k` lowest-quality items for each requested `k`.
pub fn precision_at_k(e: &EvalInput, ks: &[usize]) -> Result<Vec<(usize, f64)>> {
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > e.len()) {
        return Err(Error::Eval(format!("K = {k} outside 1..={}", e.len())));
    }
    let order = e.ranking();
    Ok(ks
        .iter()
        .map(|&k| (k, precision_top(e, &order, k)))
        .collect())
}

/// Points of the precision-recall curve, one per block of tied scores,
/// starting from the most suspicious items.
pub fn pr_curve(e: &EvalInput) -> Result<Vec<(f64, f64)>> {
    let pos = e.num_positives();
    if pos == 0 {
        return Err(Error::Eval(
            "precision-recall needs at least one error".into(),
        ));
    }
    let mut seen = 0usize;
    let mut tp = 0usize;
    Ok(e.tie_blocks()
        .into_iter()
        .map(|(p, total)| {
            seen += total;
            tp += p;
            (tp as f64 / pos as f64, tp as f64 / seen as f64)
        })
        .collect())
}

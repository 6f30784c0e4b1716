//! Evaluation of label quality scores against ground-truth label errors.

mod metrics;
mod noise;

pub use metrics::{auprc, auroc, lift_at_errors, pr_curve, precision_at_k, EvalInput, Unit};
pub use noise::{noise_matrix, NoiseMatrix};

use serde::{Deserialize, Serialize};

use crate::dataset::{mark_errors, Dataset, ErrorMarks};
use crate::error::{Error, Result};
use crate::sentence_scores::{MethodCombo, ScoreConfig, TokenEvidence};
use crate::token_scores::TokenScoreMethod;

/// Metric selector for reports and tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Auprc,
    Auroc,
    Lift,
    PrecisionAtK,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Auprc,
        Metric::Auroc,
        Metric::Lift,
        Metric::PrecisionAtK,
    ];
    pub const NAMES: [&'static str; 4] = ["auprc", "auroc", "lift", "precision-at-k"];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::NAMES
            .iter()
            .position(|&n| n == s)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| Error::unknown_name("metric", s, &Self::NAMES))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub method: MethodCombo,
    pub unit: Unit,
    pub auroc: f64,
    pub auprc: f64,
    pub lift_at_errors: f64,
    /// Cutoff used for the lift.
    pub top_t: usize,
    pub precision_at_k: Vec<(usize, f64)>,
    pub n_positives: usize,
    pub n_items: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Lift cutoff; defaults to the number of errors.
    pub top_t: Option<usize>,
    /// Precision@K cutoffs; defaults to [`default_ks`].
    pub ks: Option<Vec<usize>>,
}

/// Multiples of 10 up to `min(n, 1000)`, or `[n]` for fewer than 10 items.
pub fn default_ks(n: usize) -> Vec<usize> {
    let ks: Vec<usize> = (10..=n.min(1000)).step_by(10).collect();
    if ks.is_empty() && n > 0 {
        vec![n]
    } else {
        ks
    }
}

/// All four metrics for one set of scores.
pub fn report(method: MethodCombo, e: &EvalInput, opts: &EvalOptions) -> Result<MetricReport> {
    let top_t = opts.top_t.unwrap_or_else(|| e.num_positives());
    let ks = opts.ks.clone().unwrap_or_else(|| default_ks(e.len()));
    // cutoffs past the end are dropped rather than rejected when defaulted
    let ks: Vec<usize> = if opts.ks.is_some() {
        ks
    } else {
        ks.into_iter().filter(|&k| k <= e.len()).collect()
    };
    Ok(MetricReport {
        method,
        unit: e.unit,
        auroc: auroc(e)?,
        auprc: auprc(e)?,
        lift_at_errors: lift_at_errors(e, Some(top_t))?,
        top_t,
        precision_at_k: precision_at_k(e, &ks)?,
        n_positives: e.num_positives(),
        n_items: e.len(),
    })
}

/// Scores and ground truth for one combination, ready for the metrics.
///
/// At sentence granularity the items are sentences; at token granularity they
/// are individual tokens scored by the combination's token method.
pub fn eval_input(
    evidence: &TokenEvidence<'_>,
    marks: &ErrorMarks,
    combo: MethodCombo,
    cfg: &ScoreConfig,
    unit: Unit,
) -> Result<EvalInput> {
    match unit {
        Unit::Sentence => {
            let scores = evidence
                .score_combo(combo, cfg)?
                .into_iter()
                .map(|r| r.score)
                .collect();
            EvalInput::new(scores, marks.sentences.clone(), unit)
        }
        Unit::Token => {
            let method = combo.token_method.ok_or_else(|| {
                Error::Config("token-level evaluation needs a token score method".into())
            })?;
            let scores = evidence.quality(method)?.into_iter().flatten().collect();
            EvalInput::new(
                scores,
                marks.tokens.iter().flatten().copied().collect(),
                unit,
            )
        }
    }
}

/// Evaluates each combination against the dataset's ground truth.
pub fn evaluate_methods(
    ds: &Dataset,
    combos: &[MethodCombo],
    cfg: &ScoreConfig,
    unit: Unit,
    opts: &EvalOptions,
) -> Result<Vec<MetricReport>> {
    cfg.validate()?;
    let marks = mark_errors(ds)?;
    let evidence = TokenEvidence::new(ds)?;
    combos
        .iter()
        .map(|&combo| {
            report(
                combo,
                &eval_input(&evidence, &marks, combo, cfg, unit)?,
                opts,
            )
        })
        .collect()
}

pub fn evaluate_method(
    ds: &Dataset,
    combo: MethodCombo,
    cfg: &ScoreConfig,
    unit: Unit,
    opts: &EvalOptions,
) -> Result<MetricReport> {
    evaluate_methods(ds, &[combo], cfg, unit, opts).map(|mut v| v.remove(0))
}

/// Token-level combinations: one per token score method.
pub fn token_combos(token_methods: &[TokenScoreMethod]) -> Vec<MethodCombo> {
    use crate::sentence_scores::SentenceMethod;
    token_methods
        .iter()
        .map(|&t| MethodCombo::new(SentenceMethod::WorstToken, Some(t)))
        .collect()
}

/// Aligned text table with one row per sentence score and token score and a
/// column per selected metric.
/// Precision@K has no column; it is emitted as plot data instead.
pub fn format_table(reports: &[MetricReport], metrics: &[Metric]) -> String {
    let mut header = vec!["Sentence score", "Token score"];
    let has = |m: Metric| metrics.contains(&m);
    for (m, title) in [(Metric::Auprc, "AUPRC"), (Metric::Auroc, "AUROC")] {
        if has(m) {
            header.push(title);
        }
    }
    if has(Metric::Lift) {
        header.extend(["Lift@T", "T"]);
    }
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let sentence = match r.unit {
                Unit::Sentence => r.method.method.name().to_string(),
                Unit::Token => "(token level)".to_string(),
            };
            let mut row = vec![
                sentence,
                r.method
                    .token_method
                    .map(|t| t.name().to_string())
                    .unwrap_or_default(),
            ];
            if has(Metric::Auprc) {
                row.push(format!("{:.4}", r.auprc));
            }
            if has(Metric::Auroc) {
                row.push(format!("{:.4}", r.auroc));
            }
            if has(Metric::Lift) {
                row.push(format!("{:.2}", r.lift_at_errors));
                row.push(r.top_t.to_string());
            }
            row
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (i, (cell, &w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            if i < 2 {
                s.push_str(&format!("{cell:<w$}"));
            } else {
                s.push_str(&format!("{cell:>w$}"));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&header);
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    let mut prev: Option<&str> = None;
    for (row, r) in rows.iter().zip(reports) {
        // repeat the sentence method only on the first row of its group
        let name = r.method.method.name();
        let first = if prev == Some(name) && r.unit == Unit::Sentence {
            ""
        } else {
            row[0].as_str()
        };
        prev = Some(name);
        let cells: Vec<&str> = std::iter::once(first)
            .chain(row[1..].iter().map(String::as_str))
            .collect();
        out.push_str(&line(&cells));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{CharSpan, ProbMatrix, TokenizedSentence};
    use crate::label_space::LabelSpace;
    use crate::sentence_scores::{combos, SentenceMethod};

    /// Three sentences; sentence 1 holds the only error (token 0 labeled PER, truly O).
    fn fixture() -> Dataset {
        let ls = LabelSpace::new(&["O", "PER"]).unwrap();
        let rows = [
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            vec![vec![0.95, 0.05], vec![0.9, 0.1]],
            vec![vec![0.7, 0.3], vec![0.6, 0.4]],
        ];
        let given = [vec![0, 1], vec![1, 0], vec![0, 0]];
        let truth = [vec![0, 1], vec![0, 0], vec![0, 0]];
        let sentences = (0..3)
            .map(|i| TokenizedSentence {
                id: i as u64,
                tokens: vec!["a".into(), "b".into()],
                char_spans: vec![CharSpan::new(0, 1), CharSpan::new(2, 3)],
                given_labels: given[i].clone(),
                true_labels: Some(truth[i].clone()),
            })
            .collect();
        let probs = rows
            .iter()
            .map(|r| ProbMatrix::from_rows(r).unwrap())
            .collect();
        Dataset::new(ls, sentences, Some(probs)).unwrap()
    }

    #[test]
    fn perfect_detector_scores_one() {
        let ds = fixture();
        let combo = MethodCombo::new(
            SentenceMethod::WorstToken,
            Some(TokenScoreMethod::SelfConfidence),
        );
        let r = evaluate_method(
            &ds,
            combo,
            &ScoreConfig::default(),
            Unit::Sentence,
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(r.auroc, 1.0);
        assert_eq!(r.auprc, 1.0);
        assert_eq!(r.n_positives, 1);
        assert_eq!(r.top_t, 1);
        // 1 / base rate
        assert!((r.lift_at_errors - 3.0).abs() < 1e-12);
        assert_eq!(r.precision_at_k, vec![(3, 1.0 / 3.0)]);
    }

    #[test]
    fn identical_rankings_identical_reports() {
        let ds = fixture();
        let cfg = ScoreConfig {
            j: 1,
            ..Default::default()
        };
        let opts = EvalOptions::default();
        let a = MethodCombo::new(
            SentenceMethod::WorstToken,
            Some(TokenScoreMethod::SelfConfidence),
        );
        let b = MethodCombo::new(
            SentenceMethod::ExpectedAlt,
            Some(TokenScoreMethod::SelfConfidence),
        );
        let ra = evaluate_method(&ds, a, &cfg, Unit::Sentence, &opts).unwrap();
        let rb = evaluate_method(&ds, b, &cfg, Unit::Sentence, &opts).unwrap();
        assert_eq!(MetricReport { method: a, ..rb }, ra);
    }

    #[test]
    fn token_unit_uses_token_flags() {
        let ds = fixture();
        let reports = evaluate_methods(
            &ds,
            &token_combos(&TokenScoreMethod::ALL),
            &ScoreConfig::default(),
            Unit::Token,
            &EvalOptions {
                top_t: None,
                ks: Some(vec![1, 6]),
            },
        )
        .unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert_eq!(r.n_items, 6);
            assert_eq!(r.n_positives, 1);
            assert_eq!(r.precision_at_k[1], (6, 1.0 / 6.0));
        }
        // the mislabeled token has the lowest self-confidence (0.05)
        assert_eq!(reports[0].auprc, 1.0);
    }

    #[test]
    fn table_has_a_row_per_combo() {
        let ds = fixture();
        let all = combos(&SentenceMethod::ALL, &TokenScoreMethod::ALL);
        let reports = evaluate_methods(
            &ds,
            &all,
            &ScoreConfig::default(),
            Unit::Sentence,
            &EvalOptions::default(),
        )
        .unwrap();
        let table = format_table(&reports, &Metric::ALL);
        assert_eq!(table.lines().count(), 2 + all.len());
        assert!(table.contains("worst-token-softmin"));
        let lift_only = format_table(&reports, &[Metric::Lift]);
        assert!(lift_only.starts_with("Sentence score"));
        assert!(!lift_only.contains("AUPRC") && lift_only.contains("Lift@T"));
    }

    #[test]
    fn default_ks_shape() {
        assert_eq!(default_ks(5), vec![5]);
        assert_eq!(default_ks(35), vec![10, 20, 30]);
        assert_eq!(default_ks(0), Vec::<usize>::new());
    }

    #[test]
    fn missing_truth_propagates() {
        let mut ds = fixture();
        ds.sentences[2].true_labels = None;
        let combo = MethodCombo::new(
            SentenceMethod::WorstToken,
            Some(TokenScoreMethod::SelfConfidence),
        );
        assert!(matches!(
            evaluate_method(
                &ds,
                combo,
                &ScoreConfig::default(),
                Unit::Sentence,
                &EvalOptions::default()
            ),
            Err(Error::MissingTruth { id: 2 })
        ));
    }
}

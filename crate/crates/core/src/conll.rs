//! Reader and writer for CoNLL-style column files.
//!
//! One token per line with whitespace-separated columns; the last column is the
//! label. Blank lines separate sentences and `-DOCSTART-` lines are skipped.
//! Intermediate columns (POS, chunk tags) are discarded.

use crate::dataset::{Dataset, TokenizedSentence};
use crate::error::{Error, Result};
use crate::label_space::LabelSpace;
use crate::preprocess::detokenize;

const DOCSTART: &str = "-DOCSTART-";

/// Parses column text into sentences numbered from 0 in file order.
pub fn parse_conll(text: &str, label_space: &LabelSpace) -> Result<Vec<TokenizedSentence>> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();

    let mut flush = |tokens: &mut Vec<String>, labels: &mut Vec<usize>| {
        if tokens.is_empty() {
            return;
        }
        let (_, char_spans) = detokenize(tokens);
        sentences.push(TokenizedSentence {
            id: sentences.len() as u64,
            tokens: std::mem::take(tokens),
            char_spans,
            given_labels: std::mem::take(labels),
            true_labels: None,
        });
    };

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            flush(&mut tokens, &mut labels);
            continue;
        }
        if line.starts_with(DOCSTART) {
            flush(&mut tokens, &mut labels);
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected a token and a label column, got {line:?}"),
            });
        }
        let label = fields[fields.len() - 1];
        let class = label_space
            .index_of(label)
            .ok_or_else(|| Error::UnknownLabel {
                line: line_no,
                label: label.to_string(),
            })?;
        tokens.push(fields[0].to_string());
        labels.push(class);
    }
    flush(&mut tokens, &mut labels);
    Ok(sentences)
}

/// Writes sentences back as two-column `token label` text.
pub fn to_conll(sentences: &[TokenizedSentence], label_space: &LabelSpace) -> String {
    let mut out = String::new();
    for (i, s) in sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (tok, &l) in s.tokens.iter().zip(&s.given_labels) {
            out.push_str(tok);
            out.push(' ');
            out.push_str(label_space.name(l));
            out.push('\n');
        }
    }
    out
}

/// Attaches ground-truth labels read from a corrected copy of the same file.
///
/// Both lists must hold the same sentences in the same order with identical
/// tokens; only labels may differ.
pub fn attach_truth(
    sentences: &mut [TokenizedSentence],
    truth: &[TokenizedSentence],
) -> Result<()> {
    if sentences.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} sentences but {} ground-truth sentences",
            sentences.len(),
            truth.len()
        )));
    }
    for (s, t) in sentences.iter_mut().zip(truth) {
        if s.tokens != t.tokens {
            return Err(Error::Sentence {
                id: s.id,
                message: "tokens differ from the ground-truth file".into(),
            });
        }
        s.true_labels = Some(t.given_labels.clone());
    }
    Ok(())
}

/// Convenience for building a probability-free dataset from column text.
pub fn dataset_from_conll(text: &str, label_space: LabelSpace) -> Result<Dataset> {
    let sentences = parse_conll(text, &label_space)?;
    Dataset::new(label_space, sentences, None)
}

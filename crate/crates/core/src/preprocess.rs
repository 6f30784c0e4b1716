//! Sentence cleanup applied before scoring: filtering, all-caps rewriting and
//! detokenization with character spans.

use crate::dataset::{CharSpan, TokenizedSentence};

/// No space is inserted before a token starting with one of these.
const NO_SPACE_BEFORE: &[char] = &[',', '.', ';', ':', '!', '?', ')', '\u{2019}', '\u{201D}'];
/// No space is inserted after a token ending with one of these.
const NO_SPACE_AFTER: &[char] = &['(', '\u{2018}', '\u{201C}'];

/// Joins tokens with single spaces, except around attached punctuation, and
/// returns the text together with each token's character span.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> (String, Vec<CharSpan>) {
    let mut text = String::new();
    let mut spans = Vec::with_capacity(tokens.len());
    let mut pos = 0;
    for (i, tok) in tokens.iter().enumerate() {
        let tok = tok.as_ref();
        if i > 0 {
            let prev = tokens[i - 1].as_ref();
            let attach = tok.starts_with(NO_SPACE_BEFORE) || prev.ends_with(NO_SPACE_AFTER);
            if !attach {
                text.push(' ');
                pos += 1;
            }
        }
        let len = tok.chars().count();
        text.push_str(tok);
        spans.push(CharSpan::new(pos, pos + len));
        pos += len;
    }
    (text, spans)
}

/// Rewrites a token with at least two letters, all uppercase, so that only its
/// first letter stays uppercase (`JAPAN` becomes `Japan`). Other tokens are
/// returned unchanged.
pub fn fix_all_caps(token: &str) -> String {
    let mut letters = token.chars().filter(|c| c.is_alphabetic());
    let all_caps = letters.clone().count() >= 2 && letters.all(char::is_uppercase);
    if !all_caps {
        return token.to_string();
    }
    let mut out = String::with_capacity(token.len());
    let mut seen_letter = false;
    for c in token.chars() {
        if c.is_alphabetic() && seen_letter {
            out.extend(c.to_lowercase());
        } else {
            seen_letter |= c.is_alphabetic();
            out.push(c);
        }
    }
    out
}

/// Applies the cleanup rules to a list of sentences:
///
/// * all-caps tokens are rewritten with [`fix_all_caps`];
/// * sentences containing `#` are dropped;
/// * sentences whose detokenized text is at most one character long are dropped;
/// * character spans are recomputed from the cleaned text.
pub fn preprocess(sentences: Vec<TokenizedSentence>) -> Vec<TokenizedSentence> {
    sentences
        .into_iter()
        .filter_map(preprocess_sentence)
        .collect()
}

fn preprocess_sentence(mut s: TokenizedSentence) -> Option<TokenizedSentence> {
    if s.tokens.iter().any(|t| t.contains('#')) {
        return None;
    }
    s.tokens = s.tokens.iter().map(|t| fix_all_caps(t)).collect();
    let (text, spans) = detokenize(&s.tokens);
    if text.chars().count() <= 1 {
        return None;
    }
    s.char_spans = spans;
    Some(s)
}

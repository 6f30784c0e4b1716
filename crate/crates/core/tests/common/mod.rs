#![allow(dead_code)]

use proptest::prelude::*;
use seqlint_core::ProbMatrix;

/// A strictly positive probability vector of length `k`.
pub fn prob_row(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1.0, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

/// Probabilities and given labels for one sentence of 1..=`max_n` tokens.
pub fn sentence(k: usize, max_n: usize) -> impl Strategy<Value = (ProbMatrix, Vec<usize>)> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(prob_row(k), n),
            prop::collection::vec(0..k, n),
        )
            .prop_map(|(rows, labels)| (ProbMatrix::from_rows(&rows).unwrap(), labels))
    })
}

/// Quality scores in [0, 1].
pub fn quality(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_n)
}

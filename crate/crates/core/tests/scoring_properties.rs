mod common;

use proptest::prelude::*;
use seqlint_core::sentence_scores::{
    average_quality, expected_alt, expected_bad, predicted_difference, worst_token,
    worst_token_min_alt, worst_token_softmin, SentenceInput,
};
use seqlint_core::token_scores::{class_thresholds, flag_tokens};
use seqlint_core::{ProbMatrix, ScoreConfig, SentenceMethod, TokenScoreMethod};

const K: usize = 4;

fn permute_rows(p: &ProbMatrix, perm: &[usize]) -> ProbMatrix {
    let rows: Vec<Vec<f64>> = perm.iter().map(|&i| p.row(i).to_vec()).collect();
    ProbMatrix::from_rows(&rows).unwrap()
}

fn one_hot(k: usize, at: usize) -> Vec<f64> {
    (0..k).map(|j| if j == at { 1.0 } else { 0.0 }).collect()
}

fn sentence_with_perm() -> impl Strategy<Value = ((ProbMatrix, Vec<usize>), Vec<usize>)> {
    common::sentence(K, 12).prop_flat_map(|(p, l)| {
        let n = l.len();
        (
            Just((p, l)),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
    })
}

proptest! {
    #[test]
    fn token_scores_are_equivariant(((p, l), perm) in sentence_with_perm()) {
        let pp = permute_rows(&p, &perm);
        let pl: Vec<usize> = perm.iter().map(|&i| l[i]).collect();
        for m in TokenScoreMethod::ALL {
            let q = m.score(&p, &l).unwrap().q;
            let qp = m.score(&pp, &pl).unwrap().q;
            for (j, &i) in perm.iter().enumerate() {
                prop_assert_eq!(qp[j], q[i]);
            }
        }
        let t = class_thresholds(K, [(&p, l.as_slice())]).unwrap();
        let b = flag_tokens(&p, &l, &t).unwrap().b;
        let bp = flag_tokens(&pp, &pl, &t).unwrap().b;
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(bp[j], b[i]);
        }
    }

    #[test]
    fn self_confidence_is_monotone(row in common::prob_row(K), label in 0..K, boost in 0.0f64..1.0) {
        let raised = row[label] + boost * (1.0 - row[label]);
        let rest = 1.0 - row[label];
        let new_row: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(j, &v)| if j == label { raised } else if rest > 0.0 { v * (1.0 - raised) / rest } else { 0.0 })
            .collect();
        let before = TokenScoreMethod::SelfConfidence.score(&ProbMatrix::from_rows(&[row]).unwrap(), &[label]).unwrap().q[0];
        let after = TokenScoreMethod::SelfConfidence.score(&ProbMatrix::from_rows(&[new_row]).unwrap(), &[label]).unwrap().q[0];
        prop_assert!(after >= before);
    }

    #[test]
    fn one_hot_rows(k in 2usize..8, at in 0usize..8, label in 0usize..8) {
        let (at, label) = (at % k, label % k);
        let p = ProbMatrix::from_rows(&[one_hot(k, at)]).unwrap();
        for m in TokenScoreMethod::ALL {
            let q = m.score(&p, &[label]).unwrap().q[0];
            if at == label {
                prop_assert_eq!(q, 1.0);
            } else if m != TokenScoreMethod::Cwe {
                prop_assert_eq!(q, 0.0);
            }
        }
    }

    #[test]
    fn confident_argmax_tokens_are_never_flagged(
        sents in prop::collection::vec(common::sentence(K, 10), 1..6),
    ) {
        let t = class_thresholds(K, sents.iter().map(|(p, l)| (p, l.as_slice()))).unwrap();
        for (p, l) in &sents {
            let b = flag_tokens(p, l, &t).unwrap().b;
            for (i, &li) in l.iter().enumerate() {
                if p.argmax(i) == li && p.row(i)[li] >= t.t[li] {
                    prop_assert!(!b[i]);
                }
            }
        }
    }

    #[test]
    fn worst_token_bounds_average(q in common::quality(20)) {
        prop_assert!(worst_token(&q).0 <= average_quality(&q) + 1e-15);
    }

    #[test]
    fn identities_reduce_to_worst_token(q in common::quality(20), flags in prop::collection::vec(any::<bool>(), 20)) {
        let w = worst_token(&q);
        prop_assert_eq!(expected_bad(&q, 1), w.0);
        prop_assert_eq!(expected_alt(&q, 1), w.0);
        prop_assert_eq!(worst_token_min_alt(&q, &flags[..q.len()], 0.0), w);
    }

    #[test]
    fn softmin_lies_between_min_and_mean(q in common::quality(20), log_t in -6.0f64..6.0) {
        let s = worst_token_softmin(&q, 10f64.powf(log_t));
        prop_assert!(s >= worst_token(&q).0 - 1e-12);
        prop_assert!(s <= average_quality(&q) + 1e-12);
    }

    #[test]
    fn sentence_scores_ignore_token_order(((p, l), perm) in sentence_with_perm(), tm in prop::sample::select(TokenScoreMethod::ALL.to_vec())) {
        let cfg = ScoreConfig::default();
        let pp = permute_rows(&p, &perm);
        let pl: Vec<usize> = perm.iter().map(|&i| l[i]).collect();
        let t = class_thresholds(K, [(&p, l.as_slice())]).unwrap();
        let (q, b) = (tm.score(&p, &l).unwrap().q, flag_tokens(&p, &l, &t).unwrap().b);
        let (qp, bp) = (tm.score(&pp, &pl).unwrap().q, flag_tokens(&pp, &pl, &t).unwrap().b);
        let a = SentenceInput { probs: &p, labels: &l, quality: Some(&q), flags: Some(&b) };
        let c = SentenceInput { probs: &pp, labels: &pl, quality: Some(&qp), flags: Some(&bp) };
        for m in SentenceMethod::ALL {
            let (x, y) = (m.score(&a, &cfg).unwrap().score, m.score(&c, &cfg).unwrap().score);
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{}: {} vs {}", m, x, y);
        }
    }

    #[test]
    fn predicted_difference_ignores_token_evidence(
        (p, l) in common::sentence(K, 10),
        q in prop::collection::vec(0.0f64..=1.0, 10),
        b in prop::collection::vec(any::<bool>(), 10),
    ) {
        let n = l.len();
        let cfg = ScoreConfig::default();
        let bare = SentenceInput { probs: &p, labels: &l, quality: None, flags: None };
        let full = SentenceInput { probs: &p, labels: &l, quality: Some(&q[..n]), flags: Some(&b[..n]) };
        let expected = predicted_difference(&p, &l).unwrap();
        prop_assert_eq!(SentenceMethod::PredictedDifference.score(&bare, &cfg).unwrap().score, expected);
        prop_assert_eq!(SentenceMethod::PredictedDifference.score(&full, &cfg).unwrap().score, expected);
    }
}

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use seqlint_core::evaluation::{auprc, auroc, lift_at_errors, noise_matrix, precision_at_k};
use seqlint_core::{CharSpan, Dataset, EvalInput, LabelSpace, TokenizedSentence, Unit};

/// Pairwise count over every (error, clean) pair.
fn brute_auroc(s: &[f64], y: &[bool]) -> f64 {
    let (mut num, mut pairs) = (0.0, 0.0);
    for i in 0..s.len() {
        for j in 0..s.len() {
            if y[i] && !y[j] {
                pairs += 1.0;
                if s[i] < s[j] {
                    num += 1.0;
                } else if s[i] == s[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / pairs
}

/// Mean over errors of the precision among all items scoring at or below it.
fn brute_auprc(s: &[f64], y: &[bool]) -> f64 {
    let pos: Vec<usize> = (0..s.len()).filter(|&i| y[i]).collect();
    let total: f64 = pos
        .iter()
        .map(|&i| {
            let at_or_below = (0..s.len()).filter(|&j| s[j] <= s[i]);
            let (hits, seen) = at_or_below.fold((0, 0), |(h, n), j| (h + usize::from(y[j]), n + 1));
            hits as f64 / seen as f64
        })
        .sum();
    total / pos.len() as f64
}

/// Scores drawn from a small grid so that ties are common, with both classes present.
fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..60)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((0u8..12).prop_map(|v| v as f64 / 11.0), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(s, mut y)| {
            y[0] = true;
            y[1] = false;
            (s, y)
        })
}

/// A random strictly increasing map.
fn monotone(s: &[f64], a: f64, b: f64, c: f64) -> Vec<f64> {
    s.iter()
        .map(|&x| a * x.powi(3) + b * x + c + (x * 0.5).exp())
        .collect()
}

proptest! {
    #[test]
    fn matches_brute_force((s, y) in instance()) {
        let e = EvalInput::new(s.clone(), y.clone(), Unit::Sentence).unwrap();
        prop_assert!((auroc(&e).unwrap() - brute_auroc(&s, &y)).abs() <= 1e-12);
        prop_assert!((auprc(&e).unwrap() - brute_auprc(&s, &y)).abs() <= 1e-12);
    }

    #[test]
    fn invariant_under_increasing_transforms((s, y) in instance(), a in 0.0f64..5.0, b in 0.01f64..5.0, c in -3.0f64..3.0) {
        let e = EvalInput::new(s.clone(), y.clone(), Unit::Sentence).unwrap();
        let f = EvalInput::new(monotone(&s, a, b, c), y, Unit::Sentence).unwrap();
        let ks: Vec<usize> = (1..=s.len()).collect();
        prop_assert!((auroc(&e).unwrap() - auroc(&f).unwrap()).abs() <= 1e-12);
        prop_assert!((auprc(&e).unwrap() - auprc(&f).unwrap()).abs() <= 1e-12);
        prop_assert_eq!(lift_at_errors(&e, None).unwrap(), lift_at_errors(&f, None).unwrap());
        prop_assert_eq!(precision_at_k(&e, &ks).unwrap(), precision_at_k(&f, &ks).unwrap());
    }

    #[test]
    fn full_cutoffs_give_base_rate((s, y) in instance()) {
        let n = s.len();
        let pos = y.iter().filter(|&&v| v).count();
        let e = EvalInput::new(s, y, Unit::Token).unwrap();
        prop_assert_eq!(precision_at_k(&e, &[n]).unwrap()[0].1, pos as f64 / n as f64);
        prop_assert_eq!(lift_at_errors(&e, Some(n)).unwrap(), 1.0);
    }

    #[test]
    fn noise_rows_sum_to_error_rate(pairs in prop::collection::vec((0usize..3, 0usize..3), 1..40)) {
        let n = pairs.len();
        let s = TokenizedSentence {
            id: 0,
            tokens: vec!["w".into(); n],
            char_spans: (0..n).map(|i| CharSpan::new(2 * i, 2 * i + 1)).collect(),
            given_labels: pairs.iter().map(|p| p.0).collect(),
            true_labels: Some(pairs.iter().map(|p| p.1).collect()),
        };
        let ds = Dataset::new(LabelSpace::new(&["O", "PER", "LOC"]).unwrap(), vec![s], None).unwrap();
        let m = noise_matrix(&ds).unwrap();
        for i in 0..3 {
            let support = pairs.iter().filter(|p| p.1 == i).count();
            if support == 0 {
                prop_assert!(m.cells[i].iter().all(Option::is_none));
                continue;
            }
            let wrong = pairs.iter().filter(|p| p.1 == i && p.0 != i).count();
            let sum: f64 = m.cells[i].iter().flatten().sum();
            prop_assert!((sum - 100.0 * wrong as f64 / support as f64).abs() <= 1e-9);
        }
    }
}

#[test]
fn random_scores_give_base_rate_auprc() {
    let mut rng = StdRng::seed_from_u64(7);
    for rate in [0.05, 0.2, 0.5] {
        let mut total = 0.0;
        let trials = 20;
        for _ in 0..trials {
            let n = 2000;
            let y: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < rate).collect();
            let s: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            total += auprc(&EvalInput::new(s, y, Unit::Sentence).unwrap()).unwrap();
        }
        let mean = total / trials as f64;
        assert!(
            (mean - rate).abs() <= 0.05,
            "rate {rate}: mean AUPRC {mean}"
        );
    }
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn seqlint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqlint"))
        .args(args)
        .env_remove("SEQLINT_CONFIG")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = seqlint(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn jsonl(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Ingests the fixture with truth and pooled probabilities into `dir`.
fn ingest(dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("ds.jsonl");
    let (conll, truth, sp) = (
        fixture("test.conll"),
        fixture("truth.conll"),
        fixture("subword_probs.jsonl"),
    );
    let mut args = vec![
        "ingest",
        "--conll",
        s(&conll),
        "--truth",
        s(&truth),
        "--subword-probs",
        s(&sp),
        "--out",
        s(&out),
    ];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

#[test]
fn ingest_preprocesses_and_pools() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let lines = jsonl(&ds);
    assert_eq!(lines[0]["format"], "seqlint-dataset");
    assert_eq!(lines[0]["classes"].as_array().unwrap().len(), 9);
    let ids: Vec<u64> = lines[1..]
        .iter()
        .map(|l| l["id"].as_u64().unwrap())
        .collect();
    assert_eq!(ids, [0, 1, 2, 4, 6, 7]);
    assert_eq!(lines[1]["tokens"][0], "Soccer");
    assert_eq!(lines[5]["tokens"][3], "Min");
    for l in &lines[1..] {
        let n = l["tokens"].as_array().unwrap().len();
        let probs: Vec<f64> = l["probs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        assert_eq!(probs.len(), n * 9);
        for row in probs.chunks(9) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn merge_prefixes_gives_entity_classes() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &["--merge-prefixes"]);
    let header = &jsonl(&ds)[0];
    assert_eq!(
        header["classes"],
        serde_json::json!(["O", "MISC", "PER", "ORG", "LOC"])
    );
}

#[test]
fn no_preprocess_keeps_everything() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("raw.jsonl");
    let conll = fixture("test.conll");
    let run = ok(&[
        "ingest",
        "--conll",
        s(&conll),
        "--no-preprocess",
        "--out",
        s(&out),
    ]);
    assert_eq!(jsonl(&out).len() - 1, 8);
    assert!(String::from_utf8_lossy(&run.stderr).contains("dropped 0"));

    // A file with nothing to clean keeps its sentence count either way.
    let clean = dir.path().join("clean.conll");
    std::fs::write(&clean, "Nadim B-PER\nLadki I-PER\n\nHe O\nsaid O\n.\tO\n").unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    ok(&["ingest", "--conll", s(&clean), "--out", s(&a)]);
    ok(&[
        "ingest",
        "--conll",
        s(&clean),
        "--no-preprocess",
        "--out",
        s(&b),
    ]);
    assert_eq!(jsonl(&a).len(), 3);
    assert_eq!(jsonl(&b).len(), 3);
}

#[test]
fn missing_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let conll = fixture("test.conll");
    let out = dir.path().join("o.jsonl");
    let run = seqlint(&[
        "ingest",
        "--conll",
        s(&conll),
        "--subword-probs",
        s(&missing),
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains(s(&missing)));
    let run = seqlint(&["score", "--dataset", s(&missing)]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn score_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let run = ok(&[
        "score",
        "--dataset",
        s(&ds),
        "--method",
        "worst-token",
        "--token-score",
        "self-confidence",
    ]);
    let golden =
        std::fs::read_to_string(fixture("worst_token_self_confidence.golden.jsonl")).unwrap();
    assert_eq!(String::from_utf8(run.stdout).unwrap(), golden);
}

#[test]
fn all_methods_cover_every_combination() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let out = dir.path().join("scores.jsonl");
    ok(&[
        "score",
        "--dataset",
        s(&ds),
        "--method",
        "all",
        "--out",
        s(&out),
    ]);
    let lines = jsonl(&out);
    assert_eq!(lines.len(), 33 * 6);
    let mut combos: Vec<(String, String)> = lines
        .iter()
        .map(|l| (l["method"].to_string(), l["token_method"].to_string()))
        .collect();
    combos.sort();
    combos.dedup();
    assert_eq!(combos.len(), 33);

    ok(&[
        "score",
        "--dataset",
        s(&ds),
        "--method",
        "main",
        "--out",
        s(&out),
    ]);
    assert_eq!(jsonl(&out).len(), 27 * 6);
}

#[test]
fn empty_dataset_scores_to_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("empty.jsonl");
    std::fs::write(
        &ds,
        "{\"format\":\"seqlint-dataset\",\"version\":1,\"classes\":[\"O\",\"B-PER\"]}\n",
    )
    .unwrap();
    let out = dir.path().join("scores.jsonl");
    ok(&["score", "--dataset", s(&ds), "--out", s(&out)]);
    assert_eq!(std::fs::read(&out).unwrap(), b"");
}

#[test]
fn unknown_method_lists_choices() {
    let run = seqlint(&["score", "--dataset", "x.jsonl", "--method", "worst-tokn"]);
    assert!(!run.status.success());
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(
        err.contains("worst-token-softmin") && err.contains("predicted-difference"),
        "{err}"
    );
}

#[test]
fn eval_without_truth_fails_clearly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nt.jsonl");
    let (conll, sp) = (fixture("test.conll"), fixture("subword_probs.jsonl"));
    ok(&[
        "ingest",
        "--conll",
        s(&conll),
        "--subword-probs",
        s(&sp),
        "--out",
        s(&out),
    ]);
    let run = seqlint(&["eval", "--dataset", s(&out)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("--truth"));
}

#[test]
fn eval_honors_metrics_and_top_t() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let report = dir.path().join("report.jsonl");
    let run = ok(&[
        "eval",
        "--dataset",
        s(&ds),
        "--metrics",
        "lift",
        "--top-t",
        "3",
        "--out",
        s(&report),
    ]);
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.starts_with("2 errors among 6 sentences"));
    assert!(stdout.contains("Lift@T") && !stdout.contains("AUPRC"));
    let lines = jsonl(&report);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["top_t"], 3);
    assert!(lines[0].get("auprc").is_none());
    // Sentences 0 and 7 are the two errors; both rank in the top 3.
    assert_eq!(lines[0]["lift_at_errors"], 2.0);

    let rendered = ok(&["report", "--reports", s(&report)]);
    assert!(String::from_utf8(rendered.stdout)
        .unwrap()
        .contains("worst-token"));
}

#[test]
fn eval_full_table_has_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let report = dir.path().join("report.jsonl");
    ok(&[
        "eval",
        "--dataset",
        s(&ds),
        "--method",
        "all",
        "--quiet",
        "--out",
        s(&report),
    ]);
    let lines = jsonl(&report);
    assert_eq!(lines.len(), 33);
    for l in &lines {
        let auroc = l["auroc"].as_f64().unwrap();
        let auprc = l["auprc"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&auroc) && (0.0..=1.0).contains(&auprc));
        assert!(l["precision_at_k"].is_array());
    }
}

#[test]
fn token_unit_writes_pr_curves() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let curves = dir.path().join("pr.jsonl");
    let run = ok(&[
        "eval",
        "--dataset",
        s(&ds),
        "--unit",
        "token",
        "--token-score",
        "all",
        "--pr-curves",
        s(&curves),
    ]);
    let stdout = String::from_utf8(run.stdout).unwrap();
    let n_tokens = 12 + 2 + 6 + 10 + 9 + 7;
    assert!(
        stdout.starts_with(&format!("2 errors among {n_tokens} tokens")),
        "{stdout}"
    );
    let lines = jsonl(&curves);
    assert_eq!(lines.len(), 3);
    for l in &lines {
        assert_eq!(l["unit"], "token");
        let points = l["points"].as_array().unwrap();
        assert!(!points.is_empty());
        let last = points.last().unwrap();
        assert_eq!(last[0], 1.0);
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let other = tempfile::tempdir().unwrap();
    let a = ingest(other.path(), &[]);
    let first = std::fs::read(&a).unwrap();
    let sa = dir.path().join("s1.jsonl");
    let sb = dir.path().join("s2.jsonl");
    ok(&[
        "score",
        "--dataset",
        s(&a),
        "--method",
        "all",
        "--out",
        s(&sa),
    ]);
    let b = ingest(dir.path(), &[]);
    assert_eq!(first, std::fs::read(&b).unwrap());
    ok(&[
        "score",
        "--dataset",
        s(&b),
        "--method",
        "all",
        "--out",
        s(&sb),
    ]);
    assert_eq!(std::fs::read(&sa).unwrap(), std::fs::read(&sb).unwrap());
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let cfg = dir.path().join("seqlint.toml");
    std::fs::write(&cfg, "temperature = 1e-6\n").unwrap();
    let args = [
        "score",
        "--dataset",
        s(&ds),
        "--method",
        "worst-token-softmin",
    ];
    let default = ok(&args).stdout;
    let mut with_flag = args.to_vec();
    with_flag.extend(["--config", s(&cfg)]);
    let flagged = ok(&with_flag).stdout;
    assert_ne!(default, flagged);

    let env = Command::new(env!("CARGO_BIN_EXE_seqlint"))
        .args(args)
        .env("SEQLINT_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(env.stdout, flagged);

    // Command-line overrides win over the file.
    let mut overridden = with_flag.clone();
    overridden.extend(["--temperature", "0.0316227766"]);
    let near_default: Vec<Value> = String::from_utf8(ok(&overridden).stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let base: Vec<Value> = String::from_utf8(default)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    for (x, y) in near_default.iter().zip(&base) {
        assert!((x["score"].as_f64().unwrap() - y["score"].as_f64().unwrap()).abs() < 1e-4);
    }

    std::fs::write(&cfg, "temperature = -1\n").unwrap();
    assert!(!seqlint(&with_flag).status.success());
}

#[test]
fn noise_matrix_report() {
    let dir = tempfile::tempdir().unwrap();
    let ds = ingest(dir.path(), &[]);
    let run = ok(&["report", "--noise-matrix", s(&ds)]);
    let text = String::from_utf8(run.stdout).unwrap();
    let loc = text.lines().find(|l| l.starts_with("B-LOC")).unwrap();
    assert!(loc.contains("%"));
}

//! Line-delimited JSON interchange files.
//!
//! Canonical dataset file: a header line followed by one sentence per line.
//!
//! ```text
//! {"format":"seqlint-dataset","version":1,"classes":["O","B-PER",...]}
//! {"id":0,"tokens":["Japan","wins"],"char_spans":[[0,5],[6,10]],"given_labels":[7,0],"true_labels":[7,0],"probs":[...]}
//! ```
//!
//! `probs` is the `n × K` matrix in row-major order. `true_labels`, `probs`
//! and `char_spans` are optional; `probs` must be present on every record or
//! on none.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{CharSpan, Dataset, ProbMatrix, TokenizedSentence};
use crate::error::{Error, Result};
use crate::evaluation::{Metric, MetricReport, Unit};
use crate::label_space::LabelSpace;
use crate::pooling::SubwordProbs;
use crate::preprocess::detokenize;
use crate::sentence_scores::{MethodCombo, SentenceMethod, SentenceScoreRecord};
use crate::token_scores::TokenScoreMethod;

pub const DATASET_FORMAT: &str = "seqlint-dataset";
pub const DATASET_VERSION: u32 = 1;

/// Significant digits kept for scores and metrics written to output files.
pub const OUTPUT_DIGITS: usize = 6;

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

fn round_out(x: f64) -> f64 {
    round_sig(x, OUTPUT_DIGITS)
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetHeader {
    format: String,
    version: u32,
    classes: Vec<String>,
}

/// Probability rows given either flat (row-major) or as nested rows.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ProbsField {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl ProbsField {
    fn into_matrix(self, rows: usize, cols: usize) -> Result<ProbMatrix> {
        match self {
            ProbsField::Flat(v) => ProbMatrix::new(rows, cols, v),
            ProbsField::Rows(r) => {
                if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                    return Err(Error::Probs(format!(
                        "expected {rows} rows of {cols} values"
                    )));
                }
                ProbMatrix::new(rows, cols, r.concat())
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRecord {
    id: u64,
    tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    char_spans: Option<Vec<CharSpan>>,
    given_labels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    true_labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<ProbsField>,
}

fn format_err(source: &str, record: usize, message: impl ToString) -> Error {
    Error::Format {
        path: source.to_string(),
        record,
        message: message.to_string(),
    }
}

fn io_err(source: &str, e: io::Error) -> Error {
    Error::Io {
        path: source.to_string(),
        source: e,
    }
}

fn open(path: &Path) -> Result<io::BufReader<std::fs::File>> {
    std::fs::File::open(path)
        .map(io::BufReader::new)
        .map_err(|e| io_err(&path.display().to_string(), e))
}

/// Non-blank lines with their 1-based line numbers.
fn lines<'a, R: BufRead + 'a>(
    reader: R,
    source: &'a str,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader
        .lines()
        .enumerate()
        .map(move |(i, l)| l.map(|l| (i + 1, l)).map_err(|e| io_err(source, e)))
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty()))
}

/// Reads a canonical dataset file. `source` names the input in error messages.
pub fn read_dataset<R: BufRead>(reader: R, source: &str) -> Result<Dataset> {
    let mut it = lines(reader, source);
    let (line, header) = it
        .next()
        .transpose()?
        .ok_or_else(|| format_err(source, 0, "empty file"))?;
    let header: DatasetHeader =
        serde_json::from_str(&header).map_err(|e| format_err(source, line, e))?;
    if header.format != DATASET_FORMAT || header.version != DATASET_VERSION {
        return Err(format_err(
            source,
            line,
            format!(
                "unsupported format {} version {}",
                header.format, header.version
            ),
        ));
    }
    let label_space = LabelSpace::new(&header.classes)?;
    let k = label_space.len();

    let mut sentences = Vec::new();
    let mut probs: Vec<ProbMatrix> = Vec::new();
    let mut with_probs = None;
    for item in it {
        let (line, text) = item?;
        let rec: SentenceRecord =
            serde_json::from_str(&text).map_err(|e| format_err(source, line, e))?;
        let n = rec.tokens.len();
        if *with_probs.get_or_insert(rec.probs.is_some()) != rec.probs.is_some() {
            return Err(format_err(
                source,
                line,
                "probs must be given on every record or on none",
            ));
        }
        if let Some(p) = rec.probs {
            probs.push(
                p.into_matrix(n, k)
                    .map_err(|e| format_err(source, line, e))?,
            );
        }
        let char_spans = rec.char_spans.unwrap_or_else(|| detokenize(&rec.tokens).1);
        let sentence = TokenizedSentence {
            id: rec.id,
            tokens: rec.tokens,
            char_spans,
            given_labels: rec.given_labels,
            true_labels: rec.true_labels,
        };
        sentence
            .validate(k)
            .map_err(|e| format_err(source, line, e))?;
        sentences.push(sentence);
    }
    let probs = with_probs.unwrap_or(false).then_some(probs);
    Dataset::new(label_space, sentences, probs).map_err(|e| format_err(source, 0, e))
}

pub fn read_dataset_file(path: &Path) -> Result<Dataset> {
    read_dataset(open(path)?, &path.display().to_string())
}

/// Writes the canonical form. Output is a deterministic function of the dataset.
pub fn write_dataset<W: Write>(ds: &Dataset, mut w: W) -> io::Result<()> {
    let header = DatasetHeader {
        format: DATASET_FORMAT.to_string(),
        version: DATASET_VERSION,
        classes: ds.label_space.classes().to_vec(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (i, s) in ds.sentences.iter().enumerate() {
        let rec = SentenceRecord {
            id: s.id,
            tokens: s.tokens.clone(),
            char_spans: Some(s.char_spans.clone()),
            given_labels: s.given_labels.clone(),
            true_labels: s.true_labels.clone(),
            probs: ds
                .probs
                .as_ref()
                .map(|p| ProbsField::Flat(p[i].values().to_vec())),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn dataset_to_bytes(ds: &Dataset) -> Vec<u8> {
    let mut buf = Vec::new();
    write_dataset(ds, &mut buf).expect("writing to memory cannot fail");
    buf
}

#[derive(Debug, Deserialize)]
struct ClassesHeader {
    classes: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct ProbRecord {
    id: u64,
    #[serde(default)]
    spans: Option<Vec<CharSpan>>,
    probs: ProbsField,
}

/// Column order of a probability file relative to the label space: entry `j`
/// gives the file column holding class `j`.
fn column_order(file_classes: Option<&[String]>, space: &LabelSpace) -> Result<Vec<usize>> {
    let Some(file_classes) = file_classes else {
        return Ok((0..space.len()).collect());
    };
    let pos: HashMap<&str, usize> = file_classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    if file_classes.len() != space.len() || pos.len() != space.len() {
        return Err(Error::LabelSpace(format!(
            "probability file classes {:?} do not match {:?}",
            file_classes,
            space.classes()
        )));
    }
    space
        .classes()
        .iter()
        .map(|c| {
            pos.get(c.as_str())
                .copied()
                .ok_or_else(|| Error::LabelSpace(format!("probability file lacks class {c:?}")))
        })
        .collect()
}

fn reorder(m: ProbMatrix, order: &[usize]) -> Result<ProbMatrix> {
    if order.iter().enumerate().all(|(i, &j)| i == j) {
        return Ok(m);
    }
    let values = m
        .iter_rows()
        .flat_map(|row| order.iter().map(move |&j| row[j]))
        .collect();
    ProbMatrix::new(m.rows(), m.cols(), values)
}

/// Parses a probability file keyed by sentence id.
///
/// An optional first line `{"classes":[...]}` gives the column order; columns
/// are permuted into the order of `space`. Without it, columns are assumed to
/// follow `space` already. Records carry `spans` in subword files and omit it
/// in word-level files.
/// Per sentence id: subword spans, when the file has them, and the rows.
type ProbRecords = HashMap<u64, (Option<Vec<CharSpan>>, ProbMatrix)>;

fn read_prob_records<R: BufRead>(
    reader: R,
    source: &str,
    space: &LabelSpace,
    need_spans: bool,
) -> Result<ProbRecords> {
    let k = space.len();
    let mut out = HashMap::new();
    let mut order: Option<Vec<usize>> = None;
    for (idx, item) in lines(reader, source).enumerate() {
        let (line, text) = item?;
        if idx == 0 {
            if let Ok(h) = serde_json::from_str::<ClassesHeader>(&text) {
                order = Some(column_order(Some(&h.classes), space)?);
                continue;
            }
        }
        let order = order.get_or_insert_with(|| (0..k).collect());
        let rec: ProbRecord =
            serde_json::from_str(&text).map_err(|e| format_err(source, line, e))?;
        if need_spans && rec.spans.is_none() {
            return Err(format_err(source, line, "record has no subword spans"));
        }
        let rows = match (&rec.spans, &rec.probs) {
            (Some(s), _) => s.len(),
            (None, ProbsField::Rows(r)) => r.len(),
            (None, ProbsField::Flat(v)) => v.len() / k,
        };
        let m = rec
            .probs
            .into_matrix(rows, k)
            .and_then(|m| reorder(m, order));
        let m = m.map_err(|e| format_err(source, line, e))?;
        if out.insert(rec.id, (rec.spans, m)).is_some() {
            return Err(format_err(
                source,
                line,
                format!("duplicate sentence id {}", rec.id),
            ));
        }
    }
    Ok(out)
}

/// Subword probability file: `{"id":..,"spans":[[s,e],..],"probs":[..]}` per sentence.
pub fn read_subword_probs<R: BufRead>(
    reader: R,
    source: &str,
    space: &LabelSpace,
) -> Result<HashMap<u64, SubwordProbs>> {
    read_prob_records(reader, source, space, true)?
        .into_iter()
        .map(|(id, (spans, m))| {
            let sub =
                SubwordProbs::new(spans.expect("checked"), m).map_err(|e| Error::Sentence {
                    id,
                    message: e.to_string(),
                })?;
            Ok((id, sub))
        })
        .collect()
}

pub fn read_subword_probs_file(
    path: &Path,
    space: &LabelSpace,
) -> Result<HashMap<u64, SubwordProbs>> {
    read_subword_probs(open(path)?, &path.display().to_string(), space)
}

/// Word-level probability file: `{"id":..,"probs":[..]}` per sentence.
pub fn read_word_probs<R: BufRead>(
    reader: R,
    source: &str,
    space: &LabelSpace,
) -> Result<HashMap<u64, ProbMatrix>> {
    Ok(read_prob_records(reader, source, space, false)?
        .into_iter()
        .map(|(id, (_, m))| (id, m))
        .collect())
}

pub fn read_word_probs_file(path: &Path, space: &LabelSpace) -> Result<HashMap<u64, ProbMatrix>> {
    read_word_probs(open(path)?, &path.display().to_string(), space)
}

/// Score file record, in its on-disk field order.
#[derive(Debug, Serialize, Deserialize)]
struct ScoreLine {
    sentence_id: u64,
    method: SentenceMethod,
    token_method: Option<TokenScoreMethod>,
    score: f64,
    worst_token_index: Option<usize>,
}

pub fn write_scores<W: Write>(records: &[SentenceScoreRecord], mut w: W) -> io::Result<()> {
    for r in records {
        let line = ScoreLine {
            sentence_id: r.sentence_id,
            method: r.method,
            token_method: r.token_method,
            score: round_out(r.score),
            worst_token_index: r.worst_token_index,
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_scores<R: BufRead>(reader: R, source: &str) -> Result<Vec<SentenceScoreRecord>> {
    lines(reader, source)
        .map(|item| {
            let (line, text) = item?;
            let l: ScoreLine =
                serde_json::from_str(&text).map_err(|e| format_err(source, line, e))?;
            Ok(SentenceScoreRecord {
                sentence_id: l.sentence_id,
                method: l.method,
                token_method: l.token_method,
                score: l.score,
                worst_token_index: l.worst_token_index,
            })
        })
        .collect()
}

pub fn read_scores_file(path: &Path) -> Result<Vec<SentenceScoreRecord>> {
    read_scores(open(path)?, &path.display().to_string())
}

/// Report record, in its on-disk field order. Unselected metrics are omitted.
#[derive(Debug, Serialize, Deserialize)]
struct ReportLine {
    method: SentenceMethod,
    token_method: Option<TokenScoreMethod>,
    unit: Unit,
    n_items: usize,
    n_positives: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    auprc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    auroc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lift_at_errors: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    top_t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision_at_k: Option<Vec<(usize, f64)>>,
}

pub fn write_reports<W: Write>(
    reports: &[MetricReport],
    metrics: &[Metric],
    mut w: W,
) -> io::Result<()> {
    let has = |m: Metric| metrics.contains(&m);
    for r in reports {
        let line = ReportLine {
            method: r.method.method,
            token_method: r.method.token_method,
            unit: r.unit,
            n_items: r.n_items,
            n_positives: r.n_positives,
            auprc: has(Metric::Auprc).then(|| round_out(r.auprc)),
            auroc: has(Metric::Auroc).then(|| round_out(r.auroc)),
            lift_at_errors: has(Metric::Lift).then(|| round_out(r.lift_at_errors)),
            top_t: has(Metric::Lift).then_some(r.top_t),
            precision_at_k: has(Metric::PrecisionAtK).then(|| {
                r.precision_at_k
                    .iter()
                    .map(|&(k, p)| (k, round_out(p)))
                    .collect()
            }),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Reads a report file back. Metrics that were not written come back as NaN
/// (or 0 and empty for the cutoffs), together with the list of metrics present.
pub fn read_reports<R: BufRead>(
    reader: R,
    source: &str,
) -> Result<(Vec<MetricReport>, Vec<Metric>)> {
    let mut present: Vec<Metric> = Vec::new();
    let reports = lines(reader, source)
        .map(|item| {
            let (line, text) = item?;
            let l: ReportLine =
                serde_json::from_str(&text).map_err(|e| format_err(source, line, e))?;
            let found = [
                (Metric::Auprc, l.auprc.is_some()),
                (Metric::Auroc, l.auroc.is_some()),
                (Metric::Lift, l.lift_at_errors.is_some()),
                (Metric::PrecisionAtK, l.precision_at_k.is_some()),
            ];
            for (m, ok) in found {
                if ok && !present.contains(&m) {
                    present.push(m);
                }
            }
            Ok(MetricReport {
                method: MethodCombo {
                    method: l.method,
                    token_method: l.token_method,
                },
                unit: l.unit,
                auroc: l.auroc.unwrap_or(f64::NAN),
                auprc: l.auprc.unwrap_or(f64::NAN),
                lift_at_errors: l.lift_at_errors.unwrap_or(f64::NAN),
                top_t: l.top_t.unwrap_or(0),
                precision_at_k: l.precision_at_k.unwrap_or_default(),
                n_positives: l.n_positives,
                n_items: l.n_items,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    present.sort_by_key(|m| *m as usize);
    Ok((reports, present))
}

pub fn read_reports_file(path: &Path) -> Result<(Vec<MetricReport>, Vec<Metric>)> {
    read_reports(open(path)?, &path.display().to_string())
}

#[derive(Debug, Serialize)]
struct CurveLine {
    method: SentenceMethod,
    token_method: Option<TokenScoreMethod>,
    unit: Unit,
    /// (recall, precision) pairs
    points: Vec<(f64, f64)>,
}

/// A combination's (recall, precision) points at one evaluation unit.
pub type PrCurve = (MethodCombo, Unit, Vec<(f64, f64)>);

/// One record per combination with its precision-recall points.
pub fn write_pr_curves<W: Write>(curves: &[PrCurve], mut w: W) -> io::Result<()> {
    for (combo, unit, points) in curves {
        let line = CurveLine {
            method: combo.method,
            token_method: combo.token_method,
            unit: *unit,
            points: points
                .iter()
                .map(|&(r, p)| (round_out(r), round_out(p)))
                .collect(),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Dataset {
        let ls = LabelSpace::new(&["O", "B-LOC", "I-LOC"]).unwrap();
        let (_, spans) = detokenize(&["win", ",", "China"]);
        let s = TokenizedSentence {
            id: 3,
            tokens: vec!["win".into(), ",".into(), "China".into()],
            char_spans: spans,
            given_labels: vec![0, 0, 1],
            true_labels: Some(vec![0, 0, 1]),
        };
        let p = ProbMatrix::new(3, 3, vec![0.9, 0.05, 0.05, 1.0, 0.0, 0.0, 0.1, 0.7, 0.2]).unwrap();
        Dataset::new(ls, vec![s], Some(vec![p])).unwrap()
    }

    #[test]
    fn dataset_round_trip_is_byte_stable() {
        let ds = small();
        let bytes = dataset_to_bytes(&ds);
        let back = read_dataset(&bytes[..], "mem").unwrap();
        assert_eq!(back, ds);
        assert_eq!(dataset_to_bytes(&back), bytes);
        let first = String::from_utf8(bytes).unwrap();
        assert!(first.starts_with(
            r#"{"format":"seqlint-dataset","version":1,"classes":["O","B-LOC","I-LOC"]}"#
        ));
        assert!(first.contains(r#"{"id":3,"tokens":["win",",","China"],"char_spans":[[0,3],[3,4],[5,10]],"given_labels":[0,0,1]"#));
    }

    #[test]
    fn dataset_without_probs_or_spans() {
        let text = "{\"format\":\"seqlint-dataset\",\"version\":1,\"classes\":[\"O\",\"PER\"]}\n\
                    {\"id\":0,\"tokens\":[\"Bo\",\".\"],\"given_labels\":[1,0]}\n";
        let ds = read_dataset(text.as_bytes(), "mem").unwrap();
        assert!(ds.probs.is_none());
        assert_eq!(
            ds.sentences[0].char_spans,
            vec![CharSpan::new(0, 2), CharSpan::new(2, 3)]
        );
    }

    #[test]
    fn mixed_probs_rejected() {
        let text = "{\"format\":\"seqlint-dataset\",\"version\":1,\"classes\":[\"O\",\"PER\"]}\n\
                    {\"id\":0,\"tokens\":[\"a\"],\"given_labels\":[1],\"probs\":[0.5,0.5]}\n\
                    {\"id\":1,\"tokens\":[\"b\"],\"given_labels\":[1]}\n";
        let err = read_dataset(text.as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, Error::Format { record: 3, .. }), "{err}");
    }

    #[test]
    fn bad_header_rejected() {
        assert!(read_dataset(
            "{\"format\":\"x\",\"version\":1,\"classes\":[\"O\"]}\n".as_bytes(),
            "m"
        )
        .is_err());
        assert!(read_dataset("".as_bytes(), "m").is_err());
    }

    #[test]
    fn subword_file_reorders_columns() {
        let space = LabelSpace::new(&["O", "PER"]).unwrap();
        let text =
            "{\"classes\":[\"PER\",\"O\"]}\n{\"id\":5,\"spans\":[[0,2]],\"probs\":[[0.8,0.2]]}\n";
        let m = read_subword_probs(text.as_bytes(), "mem", &space).unwrap();
        assert_eq!(m[&5].values.row(0), &[0.2, 0.8]);

        let no_header = "{\"id\":5,\"spans\":[[0,2]],\"probs\":[0.8,0.2]}\n";
        let m = read_subword_probs(no_header.as_bytes(), "mem", &space).unwrap();
        assert_eq!(m[&5].values.row(0), &[0.8, 0.2]);

        let missing = "{\"id\":5,\"probs\":[0.8,0.2]}\n";
        assert!(read_subword_probs(missing.as_bytes(), "mem", &space).is_err());
    }

    #[test]
    fn word_probs_file() {
        let space = LabelSpace::new(&["O", "PER"]).unwrap();
        let text = "{\"id\":1,\"probs\":[0.8,0.2,0.1,0.9]}\n";
        let m = read_word_probs(text.as_bytes(), "mem", &space).unwrap();
        assert_eq!(m[&1].rows(), 2);
    }

    #[test]
    fn score_lines_have_stable_field_order() {
        let rec = SentenceScoreRecord {
            sentence_id: 2,
            method: SentenceMethod::WorstToken,
            token_method: Some(TokenScoreMethod::SelfConfidence),
            score: 0.123456789,
            worst_token_index: Some(1),
        };
        let mut buf = Vec::new();
        write_scores(&[rec], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"sentence_id\":2,\"method\":\"worst-token\",\"token_method\":\"self-confidence\",\"score\":0.123457,\"worst_token_index\":1}\n"
        );
        let back = read_scores(&buf[..], "mem").unwrap();
        assert_eq!(back[0].score, 0.123457);
    }

    #[test]
    fn report_lines_keep_selected_metrics() {
        let r = MetricReport {
            method: MethodCombo {
                method: SentenceMethod::WorstToken,
                token_method: Some(TokenScoreMethod::Cwe),
            },
            unit: Unit::Sentence,
            auroc: 0.912345678,
            auprc: 0.5,
            lift_at_errors: 8.25,
            top_t: 184,
            precision_at_k: vec![(10, 0.9)],
            n_positives: 184,
            n_items: 3453,
        };
        let mut buf = Vec::new();
        write_reports(std::slice::from_ref(&r), &[Metric::Lift], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "{\"method\":\"worst-token\",\"token_method\":\"cwe\",\"unit\":\"sentence\",\"n_items\":3453,\"n_positives\":184,\"lift_at_errors\":8.25,\"top_t\":184}\n"
        );
        let (back, present) = read_reports(&buf[..], "mem").unwrap();
        assert_eq!(present, vec![Metric::Lift]);
        assert_eq!(back[0].top_t, 184);

        let mut all = Vec::new();
        write_reports(std::slice::from_ref(&r), &Metric::ALL, &mut all).unwrap();
        let (back, present) = read_reports(&all[..], "mem").unwrap();
        assert_eq!(present, Metric::ALL.to_vec());
        assert_eq!(back[0].auroc, 0.912346);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.43571234, 6), 0.435712);
        assert_eq!(round_sig(-1382.29249, 6), -1382.29);
        assert_eq!(round_sig(0.0, 6), 0.0);
        assert_eq!(round_sig(1e-4 * 0.7 - 0.9, 6), -0.89993);
    }
}

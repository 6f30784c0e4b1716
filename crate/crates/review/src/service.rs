use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use seqlint_core::formats::{dataset_to_bytes, read_dataset, read_scores_file};
use seqlint_core::{
    CharSpan, Dataset, MethodCombo, SentenceMethod, SentenceScoreRecord, TokenEvidence,
    TokenScoreMethod,
};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ReviewError};
use crate::state::{fingerprint, now, ReviewRecord, ReviewState, Verdict};
use crate::SCHEMA;

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 1000;
const TOP_CLASSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortKey {
    #[default]
    Score,
    Id,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    #[default]
    All,
    Unreviewed,
    Reviewed,
}

fn parse_choice<T: for<'de> Deserialize<'de>>(
    kind: &str,
    value: &str,
    valid: &[&str],
) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(value.to_string())).map_err(|_| {
        ReviewError::Validation(format!(
            "unknown {kind} {value:?}; valid: {}",
            valid.join(", ")
        ))
    })
}

impl std::str::FromStr for SortKey {
    type Err = ReviewError;
    fn from_str(s: &str) -> Result<Self> {
        parse_choice("sort", s, &["score", "id"])
    }
}

impl std::str::FromStr for Filter {
    type Err = ReviewError;
    fn from_str(s: &str) -> Result<Self> {
        parse_choice("filter", s, &["all", "unreviewed", "reviewed"])
    }
}

/// Parameters of [`ReviewService::list_sentences`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ListParams {
    pub sort: SortKey,
    /// `method` or `method/token-method`; defaults to the first scored combination.
    pub method: Option<String>,
    pub token_method: Option<String>,
    pub offset: usize,
    pub limit: Option<usize>,
    pub filter: Filter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEntry {
    pub id: String,
    pub method: SentenceMethod,
    pub token_method: Option<TokenScoreMethod>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodsResponse {
    pub schema: String,
    pub methods: Vec<MethodEntry>,
    pub default: Option<String>,
    pub token_methods: Vec<TokenScoreMethod>,
    pub classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceSummary {
    pub sentence_id: u64,
    pub score: Option<f64>,
    pub worst_token_index: Option<usize>,
    pub text: String,
    pub n_tokens: usize,
    pub n_flagged: usize,
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentencePage {
    pub schema: String,
    pub method: Option<String>,
    pub sort: SortKey,
    pub filter: Filter,
    pub offset: usize,
    pub limit: usize,
    /// Number of sentences matching the filter, over all pages.
    pub total: usize,
    pub items: Vec<SentenceSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopClass {
    pub class: usize,
    pub label: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenDetail {
    pub index: usize,
    pub text: String,
    pub char_span: CharSpan,
    pub given_label: usize,
    pub given_label_name: String,
    pub q: f64,
    pub b: bool,
    pub top: Vec<TopClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceDetail {
    pub schema: String,
    pub sentence_id: u64,
    pub text: String,
    pub method: Option<String>,
    pub score: Option<f64>,
    pub worst_token_index: Option<usize>,
    pub token_method: TokenScoreMethod,
    pub tokens: Vec<TokenDetail>,
    pub review: Option<ReviewRecord>,
}

/// Body of a review submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewSubmission {
    pub verdict: Verdict,
    #[serde(default)]
    pub corrected_labels: Option<Vec<usize>>,
    #[serde(default)]
    pub reviewer_note: Option<String>,
    /// When given, must match the dataset the service has loaded.
    #[serde(default)]
    pub fingerprint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub schema: String,
    pub total_sentences: usize,
    pub reviewed: usize,
    pub correct: usize,
    pub mislabeled: usize,
    pub skipped: usize,
    pub fraction_reviewed: f64,
    /// Mislabeled verdicts over judged (correct or mislabeled) sentences.
    pub precision_so_far: f64,
}

impl Stats {
    pub fn from_counts(
        total_sentences: usize,
        correct: usize,
        mislabeled: usize,
        skipped: usize,
    ) -> Self {
        let reviewed = correct + mislabeled + skipped;
        let judged = correct + mislabeled;
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Stats {
            schema: SCHEMA.into(),
            total_sentences,
            reviewed,
            correct,
            mislabeled,
            skipped,
            fraction_reviewed: ratio(reviewed, total_sentences),
            precision_so_far: ratio(mislabeled, judged),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub schema: String,
    pub record: ReviewRecord,
    pub stats: Stats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportResponse {
    pub schema: String,
    pub path: PathBuf,
    pub sentences: usize,
    pub corrected_sentences: usize,
}

/// Given labels replaced by the corrections of mislabeled verdicts.
pub fn corrected_dataset(ds: &Dataset, state: &ReviewState) -> Dataset {
    let mut out = ds.clone();
    for s in &mut out.sentences {
        if let Some(ReviewRecord {
            verdict: Verdict::Mislabeled,
            corrected_labels: Some(labels),
            ..
        }) = state.records.get(&s.id)
        {
            s.given_labels = labels.clone();
        }
    }
    out
}

/// A sentence's score and worst token under one combination.
type ScoreCell = (f64, Option<usize>);

/// Per-sentence scores for one combination, in dataset order.
type ScoreColumn = Vec<ScoreCell>;

pub struct ReviewService {
    dataset: Dataset,
    fingerprint: String,
    combos: Vec<MethodCombo>,
    scores: HashMap<MethodCombo, ScoreColumn>,
    quality: HashMap<TokenScoreMethod, Vec<Vec<f64>>>,
    flags: Vec<Vec<bool>>,
    state_path: PathBuf,
    export_dir: PathBuf,
    state: RwLock<ReviewState>,
}

impl ReviewService {
    /// Loads the canonical dataset, its score file and any existing state.
    pub fn open(
        dataset_path: &Path,
        scores_path: &Path,
        state_path: &Path,
        export_dir: &Path,
    ) -> Result<Self> {
        let bytes = std::fs::read(dataset_path).map_err(|source| ReviewError::Io {
            path: dataset_path.into(),
            source,
        })?;
        let dataset = read_dataset(&bytes[..], &dataset_path.display().to_string())?;
        let scores = read_scores_file(scores_path)?;
        Self::new(dataset, fingerprint(&bytes), scores, state_path, export_dir)
    }

    pub fn new(
        dataset: Dataset,
        fingerprint: String,
        records: Vec<SentenceScoreRecord>,
        state_path: &Path,
        export_dir: &Path,
    ) -> Result<Self> {
        let evidence = TokenEvidence::new(&dataset)?;
        let quality = TokenScoreMethod::ALL
            .into_iter()
            .filter_map(|m| evidence.quality(m).ok().map(|q| (m, q)))
            .collect();
        let flags = (0..dataset.len())
            .map(|i| evidence.flags(i).to_vec())
            .collect();

        let mut combos = Vec::new();
        let mut scores: HashMap<MethodCombo, Vec<Option<ScoreCell>>> = HashMap::new();
        for r in records {
            let combo = r.combo();
            let pos = dataset.position(r.sentence_id).ok_or_else(|| {
                ReviewError::Validation(format!(
                    "score file names unknown sentence {}",
                    r.sentence_id
                ))
            })?;
            let column = scores.entry(combo).or_insert_with(|| {
                combos.push(combo);
                vec![None; dataset.len()]
            });
            if column[pos]
                .replace((r.score, r.worst_token_index))
                .is_some()
            {
                return Err(ReviewError::Validation(format!(
                    "score file has two {combo} scores for sentence {}",
                    r.sentence_id
                )));
            }
        }
        let scores = scores
            .into_iter()
            .map(|(combo, column)| {
                let missing = column.iter().position(Option::is_none);
                if let Some(pos) = missing {
                    return Err(ReviewError::Validation(format!(
                        "score file lacks a {combo} score for sentence {}",
                        dataset.sentences[pos].id
                    )));
                }
                Ok((combo, column.into_iter().flatten().collect()))
            })
            .collect::<Result<_>>()?;

        let state = ReviewState::load(state_path, &fingerprint)?;
        if let Some(id) = state
            .records
            .keys()
            .find(|&&id| dataset.position(id).is_none())
        {
            return Err(ReviewError::CorruptState {
                path: state_path.to_path_buf(),
                message: format!("record for unknown sentence {id}"),
            });
        }
        Ok(ReviewService {
            dataset,
            fingerprint,
            combos,
            scores,
            quality,
            flags,
            state_path: state_path.to_path_buf(),
            export_dir: export_dir.to_path_buf(),
            state: RwLock::new(state),
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn state(&self) -> ReviewState {
        self.state.read().expect("state lock").clone()
    }

    fn available(&self) -> Vec<String> {
        self.combos.iter().map(ToString::to_string).collect()
    }

    /// Resolves `method` (optionally `method/token`) and `token_method` to a
    /// scored combination; `None` selects the first one.
    /// worst-token with self-confidence when scored, else any worst-token
    /// combination, else the first one in the score file.
    fn default_combo(&self) -> Option<MethodCombo> {
        let preferred = MethodCombo::new(
            SentenceMethod::WorstToken,
            Some(TokenScoreMethod::SelfConfidence),
        );
        self.combos
            .iter()
            .find(|c| **c == preferred)
            .or_else(|| {
                self.combos
                    .iter()
                    .find(|c| c.method == SentenceMethod::WorstToken)
            })
            .or_else(|| self.combos.first())
            .copied()
    }

    fn resolve(
        &self,
        method: Option<&str>,
        token_method: Option<&str>,
    ) -> Result<Option<MethodCombo>> {
        let Some(method) = method.filter(|m| !m.is_empty()) else {
            return Ok(self.default_combo());
        };
        let unknown = || ReviewError::UnknownMethod {
            name: method.to_string(),
            available: self.available(),
        };
        let (m, t) = match method.split_once('/') {
            Some((m, t)) => (m, Some(t)),
            None => (method, token_method.filter(|t| !t.is_empty())),
        };
        let m: SentenceMethod = m.parse().map_err(|_| unknown())?;
        let t = t
            .map(str::parse::<TokenScoreMethod>)
            .transpose()
            .map_err(|_| unknown())?;
        let combo = MethodCombo::new(m, t);
        if let Some(&c) = self.combos.iter().find(|c| **c == combo) {
            return Ok(Some(c));
        }
        // a bare token-based method name picks its first scored token method
        if t.is_none() {
            if let Some(&c) = self.combos.iter().find(|c| c.method == m) {
                return Ok(Some(c));
            }
        }
        Err(unknown())
    }

    pub fn methods(&self) -> MethodsResponse {
        MethodsResponse {
            schema: SCHEMA.into(),
            methods: self
                .combos
                .iter()
                .map(|c| MethodEntry {
                    id: c.to_string(),
                    method: c.method,
                    token_method: c.token_method,
                })
                .collect(),
            default: self.default_combo().map(|c| c.to_string()),
            token_methods: TokenScoreMethod::ALL
                .into_iter()
                .filter(|m| self.quality.contains_key(m))
                .collect(),
            classes: self.dataset.label_space.classes().to_vec(),
        }
    }

    pub fn list_sentences(&self, p: &ListParams) -> Result<SentencePage> {
        let combo = self.resolve(p.method.as_deref(), p.token_method.as_deref())?;
        let column = combo.map(|c| &self.scores[&c]);
        let limit = p.limit.unwrap_or(DEFAULT_LIMIT).min(MAX_LIMIT);
        let state = self.state.read().expect("state lock");

        let mut order: Vec<usize> = (0..self.dataset.len())
            .filter(|&i| {
                let reviewed = state.records.contains_key(&self.dataset.sentences[i].id);
                match p.filter {
                    Filter::All => true,
                    Filter::Reviewed => reviewed,
                    Filter::Unreviewed => !reviewed,
                }
            })
            .collect();
        let id = |i: usize| self.dataset.sentences[i].id;
        match (p.sort, column) {
            (SortKey::Score, Some(col)) => {
                order.sort_by(|&a, &b| col[a].0.total_cmp(&col[b].0).then(id(a).cmp(&id(b))))
            }
            _ => order.sort_by_key(|&i| id(i)),
        }
        let total = order.len();
        let items = order
            .into_iter()
            .skip(p.offset)
            .take(limit)
            .map(|i| {
                let s = &self.dataset.sentences[i];
                let (score, worst) = column.map_or((None, None), |c| (Some(c[i].0), c[i].1));
                SentenceSummary {
                    sentence_id: s.id,
                    score,
                    worst_token_index: worst,
                    text: s.text(),
                    n_tokens: s.len(),
                    n_flagged: self.flags[i].iter().filter(|&&b| b).count(),
                    verdict: state.records.get(&s.id).map(|r| r.verdict),
                }
            })
            .collect();
        Ok(SentencePage {
            schema: SCHEMA.into(),
            method: combo.map(|c| c.to_string()),
            sort: p.sort,
            filter: p.filter,
            offset: p.offset,
            limit,
            total,
            items,
        })
    }

    fn position(&self, id: u64) -> Result<usize> {
        self.dataset.position(id).ok_or(ReviewError::NotFound(id))
    }

    pub fn get_sentence(
        &self,
        id: u64,
        method: Option<&str>,
        token_method: Option<&str>,
    ) -> Result<SentenceDetail> {
        let i = self.position(id)?;
        let combo = self.resolve(
            method,
            if method.is_some_and(|m| m.contains('/')) {
                None
            } else {
                token_method
            },
        )?;
        let tm = match token_method.filter(|t| !t.is_empty()) {
            Some(t) => t
                .parse()
                .map_err(|e: seqlint_core::Error| ReviewError::Validation(e.to_string()))?,
            None => combo
                .and_then(|c| c.token_method)
                .unwrap_or(TokenScoreMethod::SelfConfidence),
        };
        let q = &self.quality.get(&tm).ok_or_else(|| {
            ReviewError::Validation(format!(
                "token score {tm} is undefined for this label space"
            ))
        })?[i];
        let s = &self.dataset.sentences[i];
        let probs = &self.dataset.require_probs()?[i];
        let ls = &self.dataset.label_space;
        let tokens = (0..s.len())
            .map(|j| {
                let row = probs.row(j);
                let mut classes: Vec<usize> = (0..row.len()).collect();
                classes.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
                TokenDetail {
                    index: j,
                    text: s.tokens[j].clone(),
                    char_span: s.char_spans[j],
                    given_label: s.given_labels[j],
                    given_label_name: ls.name(s.given_labels[j]).to_string(),
                    q: q[j],
                    b: self.flags[i][j],
                    top: classes
                        .into_iter()
                        .take(TOP_CLASSES)
                        .map(|c| TopClass {
                            class: c,
                            label: ls.name(c).to_string(),
                            prob: row[c],
                        })
                        .collect(),
                }
            })
            .collect();
        let scored = combo.map(|c| self.scores[&c][i]);
        Ok(SentenceDetail {
            schema: SCHEMA.into(),
            sentence_id: id,
            text: s.text(),
            method: combo.map(|c| c.to_string()),
            score: scored.map(|s| s.0),
            worst_token_index: scored.and_then(|s| s.1),
            token_method: tm,
            tokens,
            review: self
                .state
                .read()
                .expect("state lock")
                .records
                .get(&id)
                .cloned(),
        })
    }

    /// Validates and durably stores a verdict; the latest submission per
    /// sentence wins. Returns only after the state file has been replaced.
    pub fn submit_review(&self, id: u64, sub: ReviewSubmission) -> Result<SubmitResponse> {
        let i = self.position(id)?;
        if let Some(fp) = sub
            .fingerprint
            .as_deref()
            .filter(|fp| *fp != self.fingerprint)
        {
            return Err(ReviewError::Conflict {
                expected: self.fingerprint.clone(),
                got: fp.to_string(),
            });
        }
        let record = ReviewRecord {
            sentence_id: id,
            verdict: sub.verdict,
            corrected_labels: sub.corrected_labels,
            reviewer_note: sub.reviewer_note,
            timestamp: now(),
        };
        record.validate(
            self.dataset.sentences[i].len(),
            self.dataset.label_space.len(),
        )?;

        let mut state = self.state.write().expect("state lock");
        let mut next = state.clone();
        next.records.insert(id, record.clone());
        next.save(&self.state_path)?;
        *state = next;
        let stats = self.stats_of(&state);
        Ok(SubmitResponse {
            schema: SCHEMA.into(),
            record,
            stats,
        })
    }

    fn stats_of(&self, state: &ReviewState) -> Stats {
        let count = |v: Verdict| state.records.values().filter(|r| r.verdict == v).count();
        Stats::from_counts(
            self.dataset.len(),
            count(Verdict::Correct),
            count(Verdict::Mislabeled),
            count(Verdict::Skipped),
        )
    }

    pub fn stats(&self) -> Stats {
        self.stats_of(&self.state.read().expect("state lock"))
    }

    pub fn export_bytes(&self) -> Vec<u8> {
        let state = self.state.read().expect("state lock");
        dataset_to_bytes(&corrected_dataset(&self.dataset, &state))
    }

    /// Writes the corrected dataset into the export directory. `name` must be
    /// a plain file name; it defaults to `corrected.jsonl`.
    pub fn export(&self, name: Option<&str>) -> Result<ExportResponse> {
        let name = name.filter(|n| !n.is_empty()).unwrap_or("corrected.jsonl");
        let plain = Path::new(name).file_name().is_some_and(|f| f == name) && name != "..";
        if !plain {
            return Err(ReviewError::Validation(format!(
                "export name {name:?} must be a plain file name"
            )));
        }
        let path = self.export_dir.join(name);
        let (bytes, corrected) = {
            let state = self.state.read().expect("state lock");
            let corrected = state
                .records
                .values()
                .filter(|r| r.verdict == Verdict::Mislabeled && r.corrected_labels.is_some())
                .count();
            (
                dataset_to_bytes(&corrected_dataset(&self.dataset, &state)),
                corrected,
            )
        };
        std::fs::write(&path, bytes).map_err(|source| ReviewError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(ExportResponse {
            schema: SCHEMA.into(),
            path,
            sentences: self.dataset.len(),
            corrected_sentences: corrected,
        })
    }
}

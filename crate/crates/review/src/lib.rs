//! Review service for ranked label error candidates.
//!
//! Reviewers page through sentences in ascending score order, inspect token
//! evidence, and record verdicts. Verdicts live in a single JSON state file
//! that is atomically replaced on every submission. All response bodies carry
//! `"schema": "seqlint.review/v1"`; the request and response shapes are listed
//! in `API.md` next to this crate.

pub mod error;
pub mod http;
pub mod service;
pub mod state;

pub use error::{Result, ReviewError};
pub use http::{router, serve};
pub use service::{
    corrected_dataset, ExportResponse, Filter, ListParams, MethodsResponse, ReviewService,
    ReviewSubmission, SentenceDetail, SentencePage, SentenceSummary, SortKey, Stats,
    SubmitResponse,
};
pub use state::{fingerprint, ReviewRecord, ReviewState, Verdict};

pub const SCHEMA: &str = "seqlint.review/v1";

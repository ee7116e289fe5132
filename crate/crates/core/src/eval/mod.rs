//! Corpus-level morph evaluation.
//!
//! [`expand_prompts`] turns concept pairs into directional infusion prompts,
//! [`evaluate_corpus`] scores a set of generated clips against their prompts,
//! and [`render_report`] lays the resulting rows out as CSV or Markdown.

mod corpus;
mod prompts;
mod report;

pub use corpus::{
    evaluate_corpus, read_clip_manifest, score_clip, ClipFailure, ClipRecord, ClipScores, CorpusEvaluation,
    EvalOptions, EvalRow,
};
pub use prompts::{
    expand_prompts, fill_template, read_concept_pairs, ConceptPair, Direction, InfusionPrompt, DEFAULT_TEMPLATE,
};
pub use report::{parse_csv_report, render_report, ReportFormat, ReportRow, COLUMNS};

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::metrics::{MetricError, StoreError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("bad prompt template: {0}")]
    BadTemplate(String),
    #[error("invalid concept pair: {0}")]
    InvalidPair(String),
    #[error("empty input")]
    EmptyInput,
    #[error("clip '{clip_id}': missing {what} ({reason})")]
    MissingEmbedding { clip_id: String, what: String, reason: String },
    #[error("duplicate clip id '{0}'")]
    DuplicateClip(String),
    #[error("no clip could be scored ({failed} failed)")]
    NoValidClips { failed: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("report: {0}")]
    Report(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

pub(crate) fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, EvalError> {
    let io_err = |source| EvalError::Io { path: path.to_path_buf(), source };
    let file = File::open(path).map_err(io_err)?;
    let mut items = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| EvalError::Parse { path: path.to_path_buf(), line: n + 1, message: e.to_string() })?;
        items.push(item);
    }
    Ok(items)
}

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{read_jsonl, EvalError};
use crate::metrics::mxeb::MxebMatrix;
use crate::metrics::{
    correspondence, cosine_sim, directionality, frechet_distance, intermediateness, lcs_with, DirectionalityParams,
    Embedding, EmbeddingStore, GaussianStats, LatentMatrix, LcsOptions, MetricError,
};

/// One generated clip and the text prompts it is scored against.
///
/// `embedding` and `latents` point at MXEB files; when absent, the clip id is
/// looked up in the embedding store instead. `audio_path` is carried for
/// reference only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipRecord {
    pub clip_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latents: Option<PathBuf>,
    pub x_prompt: String,
    pub y_prompt: String,
    pub intended_prompt: String,
    pub reversed_prompt: String,
}

/// Read a clip manifest; relative file paths resolve against its directory.
pub fn read_clip_manifest(path: &Path) -> Result<Vec<ClipRecord>, EvalError> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut clips: Vec<ClipRecord> = read_jsonl(path)?;
    for c in &mut clips {
        for p in [&mut c.audio_path, &mut c.embedding, &mut c.latents].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
    Ok(clips)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalOptions {
    pub directionality: DirectionalityParams,
    pub lcs: LcsOptions,
}

/// Metric values for one clip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipScores {
    pub clip_id: String,
    pub sim_x: f64,
    pub sim_y: f64,
    pub correspondence: f64,
    pub intermediateness: f64,
    pub directionality: f64,
    pub lcs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipFailure {
    pub clip_id: String,
    pub reason: String,
}

/// Corpus means. `lcs` is `None` when no clip has latents; `fad` is `None`
/// without a reference or with fewer than two pooled embedding rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub model_name: String,
    pub lcs: Option<f64>,
    pub correspondence: f64,
    pub intermediateness: f64,
    pub directionality: f64,
    pub fad: Option<f64>,
    pub count: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEvaluation {
    pub row: EvalRow,
    pub clips: Vec<ClipScores>,
    pub failures: Vec<ClipFailure>,
}

struct LoadedClip {
    rows: MxebMatrix,
    embedding: Embedding,
    latents: Option<LatentMatrix>,
    prompts: [Embedding; 4],
}

fn load_clip(clip: &ClipRecord, store: &EmbeddingStore) -> Result<LoadedClip, EvalError> {
    let missing = |what: String, err: String| EvalError::MissingEmbedding { clip_id: clip.clip_id.clone(), what, reason: err };
    let rows = match &clip.embedding {
        Some(p) => MxebMatrix::read(p).map_err(|e| missing(format!("audio embedding {}", p.display()), e.to_string()))?,
        None => store.clip_embedding_rows(&clip.clip_id).map_err(|e| missing("audio embedding".into(), e.to_string()))?,
    };
    let embedding = rows
        .mean_embedding(&clip.clip_id)
        .map_err(|e| missing("audio embedding".into(), e.to_string()))?;
    let latents = match &clip.latents {
        Some(p) => Some(
            MxebMatrix::read(p)
                .and_then(|m| m.to_latents(&clip.clip_id))
                .map_err(|e| missing(format!("latents {}", p.display()), e.to_string()))?,
        ),
        None if store.index().clips.get(&clip.clip_id).is_some_and(|c| c.latents.is_some()) => Some(
            store.clip_latents(&clip.clip_id).map_err(|e| missing("latents".into(), e.to_string()))?,
        ),
        None => None,
    };
    let prompt = |id: &str| {
        store.prompt_embedding(id).map_err(|e| missing(format!("text embedding for prompt '{id}'"), e.to_string()))
    };
    let prompts = [
        prompt(&clip.x_prompt)?,
        prompt(&clip.y_prompt)?,
        prompt(&clip.intended_prompt)?,
        prompt(&clip.reversed_prompt)?,
    ];
    Ok(LoadedClip { rows, embedding, latents, prompts })
}

/// Score one clip given its embeddings.
pub fn score_clip(
    clip_id: &str,
    audio: &Embedding,
    latents: Option<&LatentMatrix>,
    prompts: [&Embedding; 4],
    opts: &EvalOptions,
) -> Result<ClipScores, MetricError> {
    let [x, y, intended, reversed] = prompts;
    let sim_x = cosine_sim(audio, x)?;
    let sim_y = cosine_sim(audio, y)?;
    let s_int = cosine_sim(audio, intended)?;
    let s_rev = cosine_sim(audio, reversed)?;
    Ok(ClipScores {
        clip_id: clip_id.to_string(),
        sim_x,
        sim_y,
        correspondence: correspondence(sim_x, sim_y),
        intermediateness: intermediateness(sim_x, sim_y)?,
        directionality: directionality(s_int, s_rev, &opts.directionality)?,
        lcs: latents.map(|l| lcs_with(l, opts.lcs)).transpose()?,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Score every clip and average. Clips are processed in parallel; all sums
/// run in clip-id order, so the result does not depend on manifest order or
/// thread count.
pub fn evaluate_corpus(
    model_name: &str,
    clips: &[ClipRecord],
    store: &EmbeddingStore,
    reference: Option<&GaussianStats>,
    opts: &EvalOptions,
) -> Result<CorpusEvaluation, EvalError> {
    if clips.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    opts.directionality.validate()?;
    let mut seen = HashSet::new();
    for c in clips {
        if !seen.insert(c.clip_id.as_str()) {
            return Err(EvalError::DuplicateClip(c.clip_id.clone()));
        }
    }
    let mut sorted: Vec<&ClipRecord> = clips.iter().collect();
    sorted.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));

    let loaded: Vec<LoadedClip> = sorted.par_iter().map(|c| load_clip(c, store)).collect::<Result<_, _>>()?;
    let outcomes: Vec<Result<ClipScores, MetricError>> = sorted
        .par_iter()
        .zip(&loaded)
        .map(|(c, l)| {
            let [a, b, i, r] = &l.prompts;
            score_clip(&c.clip_id, &l.embedding, l.latents.as_ref(), [a, b, i, r], opts)
        })
        .collect();

    let mut scores = Vec::new();
    let mut failures = Vec::new();
    let mut pooled: Vec<Vec<f64>> = Vec::new();
    for ((c, l), outcome) in sorted.iter().zip(&loaded).zip(outcomes) {
        match outcome {
            Ok(s) => {
                pooled.extend((0..l.rows.rows).map(|i| l.rows.row_f64(i)));
                scores.push(s);
            }
            Err(e) => failures.push(ClipFailure { clip_id: c.clip_id.clone(), reason: e.to_string() }),
        }
    }
    if scores.is_empty() {
        return Err(EvalError::NoValidClips { failed: failures.len() });
    }

    let fad = match reference {
        Some(r) if pooled.len() >= 2 => {
            let stats = GaussianStats::from_rows(pooled.iter().map(Vec::as_slice))?;
            Some(frechet_distance(&stats, r)?)
        }
        _ => None,
    };
    let row = EvalRow {
        model_name: model_name.to_string(),
        lcs: mean(scores.iter().filter_map(|s| s.lcs)),
        correspondence: mean(scores.iter().map(|s| s.correspondence)).expect("non-empty"),
        intermediateness: mean(scores.iter().map(|s| s.intermediateness)).expect("non-empty"),
        directionality: mean(scores.iter().map(|s| s.directionality)).expect("non-empty"),
        fad,
        count: scores.len(),
        excluded: failures.len(),
    };
    Ok(CorpusEvaluation { row, clips: scores, failures })
}

//! On-disk embedding store.
//!
//! A store is a directory holding `<clip_id>.mxeb` clip embeddings,
//! `<clip_id>.latents.mxeb` latent sequences, `text/<prompt_id>.mxeb` text
//! prompt embeddings, and an `index.json` mapping ids to those files:
//!
//! ```json
//! {
//!   "clips": { "clip-1": { "embedding": "clip-1.mxeb", "latents": "clip-1.latents.mxeb" } },
//!   "prompts": { "dog": "text/dog.mxeb" }
//! }
//! ```
//!
//! Reads take `&self` and may run concurrently; writes take `&mut self`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::lcs::LatentMatrix;
use super::mxeb::{MxebError, MxebMatrix};
use super::similarity::Embedding;

pub const INDEX_FILE: &str = "index.json";
const TEXT_DIR: &str = "text";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipFiles {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latents: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreIndex {
    #[serde(default)]
    pub clips: BTreeMap<String, ClipFiles>,
    #[serde(default)]
    pub prompts: BTreeMap<String, String>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("no {kind} for '{id}' in store {root}")]
    Missing { kind: &'static str, id: String, root: PathBuf },
    #[error("id '{0}' cannot be used as a file name")]
    InvalidId(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Index {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: MxebError,
    },
}

fn check_id(id: &str) -> Result<(), StoreError> {
    if id.is_empty() || id == "." || id == ".." || id.contains(['/', '\\', '\0']) {
        return Err(StoreError::InvalidId(id.to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    root: PathBuf,
    index: StoreIndex,
}

impl EmbeddingStore {
    /// Open an existing store, or start an empty one if `root` has no index.
    pub fn open_or_create(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        if root.join(INDEX_FILE).exists() {
            Self::open(root)
        } else {
            fs::create_dir_all(&root).map_err(|source| StoreError::Io { path: root.clone(), source })?;
            Ok(Self { root, index: StoreIndex::default() })
        }
    }

    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        let path = root.join(INDEX_FILE);
        let text = fs::read_to_string(&path).map_err(|source| StoreError::Io { path: path.clone(), source })?;
        let index = serde_json::from_str(&text).map_err(|source| StoreError::Index { path, source })?;
        Ok(Self { root, index })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn index(&self) -> &StoreIndex {
        &self.index
    }

    pub fn clip_ids(&self) -> impl Iterator<Item = &str> {
        self.index.clips.keys().map(String::as_str)
    }

    fn read_file(&self, rel: &str) -> Result<MxebMatrix, StoreError> {
        let path = self.root.join(rel);
        MxebMatrix::read(&path).map_err(|source| StoreError::File { path, source })
    }

    fn write_file(&self, rel: &str, m: &MxebMatrix) -> Result<(), StoreError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| StoreError::Io { path: parent.to_path_buf(), source })?;
        }
        m.write(&path).map_err(|source| StoreError::File { path, source })
    }

    fn missing(&self, kind: &'static str, id: &str) -> StoreError {
        StoreError::Missing { kind, id: id.to_string(), root: self.root.clone() }
    }

    /// Raw rows of a clip's embedding file (one or more frame embeddings).
    pub fn clip_embedding_rows(&self, clip_id: &str) -> Result<MxebMatrix, StoreError> {
        let rel = self.index.clips.get(clip_id).and_then(|c| c.embedding.as_deref());
        let rel = rel.ok_or_else(|| self.missing("embedding", clip_id))?;
        self.read_file(rel)
    }

    /// Clip-level embedding: the mean of the file's rows.
    pub fn clip_embedding(&self, clip_id: &str) -> Result<Embedding, StoreError> {
        let m = self.clip_embedding_rows(clip_id)?;
        m.mean_embedding(clip_id).map_err(|source| StoreError::File { path: self.root.join(clip_id), source })
    }

    pub fn clip_latents(&self, clip_id: &str) -> Result<LatentMatrix, StoreError> {
        let rel = self.index.clips.get(clip_id).and_then(|c| c.latents.as_deref());
        let rel = rel.ok_or_else(|| self.missing("latents", clip_id))?;
        let m = self.read_file(rel)?;
        m.to_latents(clip_id).map_err(|source| StoreError::File { path: self.root.join(rel), source })
    }

    pub fn prompt_embedding(&self, prompt_id: &str) -> Result<Embedding, StoreError> {
        let rel = self.index.prompts.get(prompt_id).ok_or_else(|| self.missing("prompt embedding", prompt_id))?;
        let m = self.read_file(rel)?;
        m.mean_embedding(prompt_id).map_err(|source| StoreError::File { path: self.root.join(rel), source })
    }

    pub fn put_clip_embedding_rows(&mut self, clip_id: &str, m: &MxebMatrix) -> Result<(), StoreError> {
        check_id(clip_id)?;
        let rel = format!("{clip_id}.mxeb");
        self.write_file(&rel, m)?;
        self.index.clips.entry(clip_id.to_string()).or_default().embedding = Some(rel);
        Ok(())
    }

    pub fn put_clip_embedding(&mut self, e: &Embedding) -> Result<(), StoreError> {
        let m = MxebMatrix::from_embedding(e).map_err(|source| StoreError::File { path: self.root.clone(), source })?;
        self.put_clip_embedding_rows(&e.clip_id, &m)
    }

    pub fn put_clip_latents(&mut self, l: &LatentMatrix) -> Result<(), StoreError> {
        check_id(&l.clip_id)?;
        let rel = format!("{}.latents.mxeb", l.clip_id);
        let m = MxebMatrix::from_latents(l).map_err(|source| StoreError::File { path: self.root.join(&rel), source })?;
        self.write_file(&rel, &m)?;
        self.index.clips.entry(l.clip_id.clone()).or_default().latents = Some(rel);
        Ok(())
    }

    pub fn put_prompt_embedding(&mut self, prompt_id: &str, e: &Embedding) -> Result<(), StoreError> {
        check_id(prompt_id)?;
        let rel = format!("{TEXT_DIR}/{prompt_id}.mxeb");
        let m = MxebMatrix::from_embedding(e).map_err(|source| StoreError::File { path: self.root.join(&rel), source })?;
        self.write_file(&rel, &m)?;
        self.index.prompts.insert(prompt_id.to_string(), rel);
        Ok(())
    }

    /// Persist `index.json`. Keys are sorted, so output is deterministic.
    pub fn save_index(&self) -> Result<(), StoreError> {
        let path = self.root.join(INDEX_FILE);
        let mut text = serde_json::to_string_pretty(&self.index)
            .map_err(|source| StoreError::Index { path: path.clone(), source })?;
        text.push('\n');
        fs::write(&path, text).map_err(|source| StoreError::Io { path, source })
    }
}

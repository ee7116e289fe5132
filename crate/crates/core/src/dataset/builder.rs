use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modes::{caption_for, sample_mode, sample_training_timestep, ModeDistribution, TimestepWindow};
use super::rng::{derive_seed, SeededRng};
use super::DatasetError;
use crate::audio_io::{load_wav, save_wav, to_mono, BitDepth, Waveform};
use crate::dsp::{augment_pair, AugmentParams, AugmentationMode};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const AUDIO_DIR: &str = "audio";

/// One labelled (primary, secondary) input pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub id: String,
    pub primary_path: PathBuf,
    pub primary_label: String,
    pub secondary_path: PathBuf,
    pub secondary_label: String,
}

/// A rendered training example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Relative to the dataset directory.
    pub audio_path: PathBuf,
    pub mode: AugmentationMode,
    pub caption: String,
    pub window: TimestepWindow,
    pub primary_label: String,
    pub secondary_label: String,
    pub params: AugmentParams,
    pub seed: u64,
}

impl ManifestEntry {
    /// Timestep at which this example may serve as a training target.
    pub fn sample_timestep(&self, rng: &mut SeededRng) -> f64 {
        sample_training_timestep(rng, &self.window)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedEntry {
    pub id: String,
    pub reason: String,
}

/// One manifest line: a built example or a recorded failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ManifestRecord {
    Built(ManifestEntry),
    Failed(FailedEntry),
}

impl ManifestRecord {
    pub fn id(&self) -> &str {
        match self {
            Self::Built(e) => &e.id,
            Self::Failed(f) => &f.id,
        }
    }

    pub fn is_built(&self) -> bool {
        matches!(self, Self::Built(_))
    }
}

/// Everything besides the pair list that determines a build.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildOptions {
    pub distribution: ModeDistribution,
    pub window: TimestepWindow,
    pub params: AugmentParams,
    pub seed: u64,
    pub bit_depth: BitDepth,
    /// Downmix inputs to mono before augmentation (otherwise channels are
    /// augmented independently).
    pub downmix: bool,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            distribution: ModeDistribution::default(),
            window: TimestepWindow::default(),
            params: AugmentParams::default(),
            seed: 0,
            bit_depth: BitDepth::Float32,
            downmix: true,
            jobs: 0,
        }
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && !id.contains(['/', '\\', '\0'])
}

fn load_input(path: &Path, downmix: bool) -> Result<Waveform, DatasetError> {
    let w = load_wav(path)?;
    Ok(if downmix { to_mono(&w)? } else { w })
}

fn build_one(pair: &PairSpec, opts: &BuildOptions, out_dir: &Path) -> Result<ManifestEntry, DatasetError> {
    let seed = derive_seed(opts.seed, &pair.id);
    let mut rng = SeededRng::new(seed);
    let mode = sample_mode(&mut rng, &opts.distribution)?;
    let caption = caption_for(mode, &pair.primary_label, &pair.secondary_label)?;

    let primary = load_input(&pair.primary_path, opts.downmix)?;
    let secondary = load_input(&pair.secondary_path, opts.downmix)?;
    let rendered = augment_pair(&primary, &secondary, mode, &opts.params)?;

    let audio_path = PathBuf::from(AUDIO_DIR).join(format!("{}.wav", pair.id));
    save_wav(&rendered, out_dir.join(&audio_path), opts.bit_depth)?;

    Ok(ManifestEntry {
        id: pair.id.clone(),
        audio_path,
        mode,
        caption,
        window: opts.window,
        primary_label: pair.primary_label.clone(),
        secondary_label: pair.secondary_label.clone(),
        params: opts.params,
        seed,
    })
}

/// Render every pair into `out_dir/audio/<id>.wav` and write
/// `out_dir/manifest.jsonl` in input order.
///
/// Configuration problems and duplicate or unsafe ids abort the build.
/// Failures of individual pairs become [`ManifestRecord::Failed`] lines.
/// The result depends only on the inputs and `opts.seed`, not on `opts.jobs`.
pub fn build_dataset(pairs: &[PairSpec], opts: &BuildOptions, out_dir: &Path) -> Result<Vec<ManifestRecord>, DatasetError> {
    opts.distribution.validate()?;
    opts.window.validate()?;
    opts.params.validate()?;
    let mut seen = HashSet::new();
    for p in pairs {
        if !valid_id(&p.id) {
            return Err(DatasetError::InvalidId(p.id.clone()));
        }
        if !seen.insert(p.id.as_str()) {
            return Err(DatasetError::DuplicateId(p.id.clone()));
        }
    }

    fs::create_dir_all(out_dir.join(AUDIO_DIR)).map_err(|e| DatasetError::io(out_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| DatasetError::Config(e.to_string()))?;
    let records: Vec<ManifestRecord> = pool.install(|| {
        pairs
            .par_iter()
            .map(|pair| match build_one(pair, opts, out_dir) {
                Ok(entry) => ManifestRecord::Built(entry),
                Err(e) => ManifestRecord::Failed(FailedEntry { id: pair.id.clone(), reason: e.to_string() }),
            })
            .collect()
    });

    write_manifest(&out_dir.join(MANIFEST_FILE), &records)?;
    Ok(records)
}

pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(|e| DatasetError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| DatasetError::io(path, e))?;
    }
    out.flush().map_err(|e| DatasetError::io(path, e))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let file = File::open(path).map_err(|e| DatasetError::io(path, e))?;
    let mut items = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| DatasetError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| DatasetError::Parse { path: path.to_path_buf(), line: n + 1, message: e.to_string() })?;
        items.push(item);
    }
    Ok(items)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>, DatasetError> {
    read_jsonl(path)
}

/// Read a pair list; relative audio paths are resolved against the list's
/// own directory.
pub fn read_pairs(path: &Path) -> Result<Vec<PairSpec>, DatasetError> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut pairs: Vec<PairSpec> = read_jsonl(path)?;
    for p in &mut pairs {
        if p.primary_path.is_relative() {
            p.primary_path = base.join(&p.primary_path);
        }
        if p.secondary_path.is_relative() {
            p.secondary_path = base.join(&p.secondary_path);
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(path: &Path, freq: f32, n: usize) {
        let s: Vec<f32> = (0..n).map(|i| 0.4 * (i as f32 * freq * 0.001).sin()).collect();
        save_wav(&Waveform::mono(s, 16000).unwrap(), path, BitDepth::Pcm16).unwrap();
    }

    fn pair(dir: &Path, id: &str) -> PairSpec {
        PairSpec {
            id: id.into(),
            primary_path: dir.join("p.wav"),
            primary_label: "a dog barking".into(),
            secondary_path: dir.join("s.wav"),
            secondary_label: "a car horn".into(),
        }
    }

    #[test]
    fn empty_pair_list() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let recs = build_dataset(&[], &BuildOptions::default(), &out).unwrap();
        assert!(recs.is_empty());
        assert_eq!(fs::read_to_string(out.join(MANIFEST_FILE)).unwrap(), "");
    }

    #[test]
    fn single_pair_degenerate_distribution() {
        let dir = tempfile::tempdir().unwrap();
        tone(&dir.path().join("p.wav"), 3.0, 8000);
        tone(&dir.path().join("s.wav"), 7.0, 3000);
        let opts = BuildOptions {
            distribution: ModeDistribution::only(AugmentationMode::RmsOnly),
            ..BuildOptions::default()
        };
        let out = dir.path().join("out");
        let recs = build_dataset(&[pair(dir.path(), "p0")], &opts, &out).unwrap();
        let ManifestRecord::Built(e) = &recs[0] else { panic!("{recs:?}") };
        assert_eq!(e.mode, AugmentationMode::RmsOnly);
        assert_eq!(e.window, TimestepWindow { t_start: 0.5, t_end: 1.0 });
        assert_eq!(e.caption, "The behavior of a dog barking with textures from a dog barking and a car horn");
        let audio = load_wav(out.join(&e.audio_path)).unwrap();
        assert_eq!(audio.len(), 8000);
        assert_eq!(read_manifest(&out.join(MANIFEST_FILE)).unwrap(), recs);
    }

    #[test]
    fn failures_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        tone(&dir.path().join("p.wav"), 3.0, 4000);
        tone(&dir.path().join("s.wav"), 5.0, 4000);
        let mut bad = pair(dir.path(), "broken");
        bad.secondary_path = dir.path().join("missing.wav");
        let mut unlabeled = pair(dir.path(), "unlabeled");
        unlabeled.secondary_label = " ".into();
        let pairs = vec![pair(dir.path(), "ok"), bad, unlabeled];
        let recs = build_dataset(&pairs, &BuildOptions::default(), &dir.path().join("o")).unwrap();
        assert!(recs[0].is_built());
        match &recs[1] {
            ManifestRecord::Failed(f) => assert!(f.reason.contains("missing.wav")),
            other => panic!("{other:?}"),
        }
        assert!(!recs[2].is_built());
    }

    #[test]
    fn duplicate_and_unsafe_ids_abort() {
        let dir = tempfile::tempdir().unwrap();
        let p = pair(dir.path(), "x");
        assert!(matches!(
            build_dataset(&[p.clone(), p], &BuildOptions::default(), dir.path()),
            Err(DatasetError::DuplicateId(_))
        ));
        assert!(matches!(
            build_dataset(&[pair(dir.path(), "../x")], &BuildOptions::default(), dir.path()),
            Err(DatasetError::InvalidId(_))
        ));
    }

    #[test]
    fn invalid_distribution_aborts() {
        let dir = tempfile::tempdir().unwrap();
        let opts = BuildOptions {
            distribution: ModeDistribution::from_array([0.3, 0.3, 0.3, 0.0]),
            ..BuildOptions::default()
        };
        assert!(matches!(build_dataset(&[], &opts, dir.path()), Err(DatasetError::InvalidDistribution(_))));
    }

    #[test]
    fn relative_pair_paths_resolve_against_list() {
        let dir = tempfile::tempdir().unwrap();
        let list = dir.path().join("pairs.jsonl");
        fs::write(
            &list,
            "{\"id\":\"a\",\"primary_path\":\"p.wav\",\"primary_label\":\"x\",\"secondary_path\":\"/abs/s.wav\",\"secondary_label\":\"y\"}\n\n",
        )
        .unwrap();
        let pairs = read_pairs(&list).unwrap();
        assert_eq!(pairs[0].primary_path, dir.path().join("p.wav"));
        assert_eq!(pairs[0].secondary_path, PathBuf::from("/abs/s.wav"));
    }
}

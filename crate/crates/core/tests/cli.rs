use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use surrogate_morph::audio_io::{load_wav, save_wav, BitDepth, Waveform};
use surrogate_morph::metrics::mxeb::write_stats;
use surrogate_morph::metrics::{Embedding, EmbeddingStore, GaussianStats};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_surromorph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_tone(path: &Path, freq: f32, amp: f32, n: usize) {
    let s: Vec<f32> = (0..n)
        .map(|i| amp * (2.0 * std::f32::consts::PI * freq * i as f32 / 16_000.0).sin() * (1.0 + (i as f32 / 900.0).sin()) / 2.0)
        .collect();
    save_wav(&Waveform::mono(s, 16_000).unwrap(), path, BitDepth::Float32).unwrap();
}

/// Every file under `dir` with its bytes, keyed by relative path.
fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn augment_rms_writes_file_and_prints_caption() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, out) = (dir.path().join("a.wav"), dir.path().join("b.wav"), dir.path().join("out.wav"));
    write_tone(&a, 220.0, 0.5, 16_000);
    write_tone(&b, 1330.0, 0.3, 12_000);
    let o = run(&["augment", p(&a), p(&b), "--mode", "rms", "--out", p(&out), "--primary-label", "dog bark",
        "--secondary-label", "car horn"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "The behavior of dog bark with textures from dog bark and car horn\n");
    assert_eq!(load_wav(&out).unwrap().len(), 16_000);
}

#[test]
fn augment_none_on_identical_inputs_is_scaled_double() {
    let dir = tempfile::tempdir().unwrap();
    let (a, out) = (dir.path().join("a.wav"), dir.path().join("out.wav"));
    write_tone(&a, 300.0, 0.8, 8000);
    let o = run(&["augment", p(&a), p(&a), "--mode", "none", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "A mix of a and a\n");
    let w = load_wav(&a).unwrap();
    let got = load_wav(&out).unwrap();
    let peak = 2.0 * w.peak();
    let scale = if peak > 0.95 { 0.95 / peak } else { 1.0 };
    for (x, y) in w.channel(0).iter().zip(got.channel(0)) {
        assert!((2.0 * x * scale - y).abs() < 1e-6);
    }
}

#[test]
fn augment_missing_file_exits_2_naming_path() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.wav");
    write_tone(&a, 300.0, 0.5, 4000);
    let missing = dir.path().join("nope.wav");
    let o = run(&["augment", p(&a), p(&missing), "--mode", "both", "--out", p(&dir.path().join("o.wav"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.wav"), "{}", stderr(&o));
    assert!(!dir.path().join("o.wav").exists());
}

#[test]
fn augment_silent_secondary_is_a_processing_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (a, s) = (dir.path().join("a.wav"), dir.path().join("s.wav"));
    write_tone(&a, 300.0, 0.5, 4000);
    save_wav(&Waveform::mono(vec![0.0; 4000], 16_000).unwrap(), &s, BitDepth::Pcm16).unwrap();
    let o = run(&["augment", p(&a), p(&s), "--mode", "none", "--out", p(&dir.path().join("o.wav"))]);
    assert_eq!(o.status.code(), Some(1));
}

fn write_pairs(dir: &Path, n: usize) -> PathBuf {
    let mut lines = String::new();
    for i in 0..n {
        let (pa, sa) = (format!("p{i}.wav"), format!("s{i}.wav"));
        write_tone(&dir.join(&pa), 150.0 + 40.0 * i as f32, 0.5, 6000 + 500 * i);
        write_tone(&dir.join(&sa), 900.0 + 70.0 * i as f32, 0.4, 5000);
        lines.push_str(&serde_json::json!({
            "id": format!("pair{i}"), "primary_path": pa, "primary_label": format!("primary {i}"),
            "secondary_path": sa, "secondary_label": format!("secondary {i}")
        }).to_string());
        lines.push('\n');
    }
    let path = dir.join("pairs.jsonl");
    fs::write(&path, lines).unwrap();
    path
}

#[test]
fn build_is_reproducible_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = write_pairs(dir.path(), 6);
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, r#"{"seed": 17, "output_bit_depth": "16"}"#).unwrap();
    let mut trees = Vec::new();
    for (name, jobs) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = dir.path().join(name);
        let o = run(&["build", p(&pairs), "--config", p(&cfg), "--out-dir", p(&out), "--jobs", jobs]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o), "6 built, 0 failed\n");
        trees.push(tree(&out));
    }
    assert_eq!(trees[0].len(), 7);
    assert_eq!(trees[0], trees[1]);
    assert_eq!(trees[0], trees[2]);
}

#[test]
fn build_seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = write_pairs(dir.path(), 2);
    let manifest = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        assert!(run(&["build", p(&pairs), "--out-dir", p(&out), "--seed", seed]).status.success());
        fs::read_to_string(out.join("manifest.jsonl")).unwrap()
    };
    let a = manifest("1", "a");
    assert!(a.contains("\"seed\":"));
    assert_ne!(a, manifest("2", "b"));
}

#[test]
fn build_empty_pairs_and_bad_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let o = run(&["build", p(&empty), "--out-dir", p(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 built"));

    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"mode_distribution": {"rms_only": 0.3, "spectral_only": 0.3, "both": 0.3, "none": 0.0}}"#).unwrap();
    let o = run(&["build", p(&empty), "--config", p(&cfg), "--out-dir", p(&dir.path().join("out2"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mode distribution"), "{}", stderr(&o));
}

#[test]
fn build_reports_failed_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = write_pairs(dir.path(), 2);
    fs::write(dir.path().join("s1.wav"), b"RIFF junk").unwrap();
    let out = dir.path().join("out");
    let o = run(&["build", p(&pairs), "--out-dir", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "1 built, 1 failed\n");
    assert!(stderr(&o).contains("pair1"));
    assert_eq!(fs::read_to_string(out.join("manifest.jsonl")).unwrap().lines().count(), 2);
}

#[test]
fn embed_mock_is_deterministic_and_handles_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let audio = dir.path().join("audio");
    fs::create_dir(&audio).unwrap();
    write_tone(&audio.join("one.wav"), 440.0, 0.5, 16_000);
    write_tone(&audio.join("two.wav"), 880.0, 0.5, 16_000);
    let (s1, s2) = (dir.path().join("s1"), dir.path().join("s2"));
    for s in [&s1, &s2] {
        let o = run(&["embed-mock", p(&audio), "--dim", "16", "--out-store", p(s)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(tree(&s1), tree(&s2));
    let store = EmbeddingStore::open(&s1).unwrap();
    assert_eq!(store.clip_ids().collect::<Vec<_>>(), vec!["one", "two"]);
    assert_eq!(store.clip_embedding("one").unwrap().dim(), 16);
    assert_eq!(store.clip_latents("two").unwrap().cols(), 32);

    fs::write(audio.join("broken.wav"), b"not a wav at all").unwrap();
    let s3 = dir.path().join("s3");
    let o = run(&["embed-mock", p(&audio), "--dim", "16", "--out-store", p(&s3)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.wav"));
    assert_eq!(EmbeddingStore::open(&s3).unwrap().clip_ids().count(), 2);
}

#[test]
fn embed_mock_empty_dir() {
    let dir = tempfile::tempdir().unwrap();
    let audio = dir.path().join("audio");
    fs::create_dir(&audio).unwrap();
    let store = dir.path().join("store");
    let o = run(&["embed-mock", p(&audio), "--dim", "8", "--out-store", p(&store)]);
    assert_eq!(o.status.code(), Some(0));
    let s = EmbeddingStore::open(&store).unwrap();
    assert_eq!(s.clip_ids().count(), 0);
    assert!(s.index().prompts.is_empty());
}

/// A store with ten clips, prompt embeddings and a clip manifest.
fn eval_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let store_dir = dir.join("store");
    let mut store = EmbeddingStore::open_or_create(&store_dir).unwrap();
    let prompts = [("x", [1.0, 0.2, 0.0, 0.1]), ("y", [0.1, 1.0, 0.3, 0.0]), ("fwd", [0.7, 0.6, 0.1, 0.0]), ("rev", [0.2, 0.5, 0.9, 0.3])];
    for (id, v) in prompts {
        store.put_prompt_embedding(id, &Embedding::new(id, v.to_vec()).unwrap()).unwrap();
    }
    let mut lines = String::new();
    for i in 0..10 {
        let t = i as f64;
        let v = vec![0.8 + 0.05 * t.sin(), 0.7 + 0.04 * t.cos(), 0.1 * (t * 0.3).sin(), 0.05 * t];
        let id = format!("clip{i}");
        store.put_clip_embedding(&Embedding::new(&id, v).unwrap()).unwrap();
        lines.push_str(&format!(
            "{{\"clip_id\":\"{id}\",\"x_prompt\":\"x\",\"y_prompt\":\"y\",\"intended_prompt\":\"fwd\",\"reversed_prompt\":\"rev\"}}\n"
        ));
    }
    store.save_index().unwrap();
    let clips = dir.join("clips.jsonl");
    fs::write(&clips, lines).unwrap();
    (store_dir, clips)
}

#[test]
fn eval_against_own_reference_reports_zero_fad() {
    let dir = tempfile::tempdir().unwrap();
    let (store, clips) = eval_fixture(dir.path());
    let stats_path = dir.path().join("ref.mxeb");
    let o = run(&["stats", "--store", p(&store), "--out", p(&stats_path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["eval", p(&clips), "--store", p(&store), "--reference", p(&stats_path), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.ends_with(",0.000"), "{row}");
    assert!(row.starts_with("model,-,"), "{row}");
}

#[test]
fn eval_csv_and_markdown_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (store, clips) = eval_fixture(dir.path());
    let reference = GaussianStats::from_rows([[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0], [0.5, 0.0, 1.0, 0.2]].iter().map(|r| r.as_slice())).unwrap();
    let ref_path = dir.path().join("ref.mxeb");
    write_stats(&ref_path, &reference).unwrap();
    let csv = run(&["eval", p(&clips), "--store", p(&store), "--reference", p(&ref_path), "--model", "m1"]);
    let md = run(&["eval", p(&clips), "--store", p(&store), "--reference", p(&ref_path), "--model", "m1", "--format", "markdown"]);
    assert!(csv.status.success() && md.status.success(), "{}{}", stderr(&csv), stderr(&md));
    let csv_vals: Vec<String> = stdout(&csv).lines().nth(1).unwrap().split(',').map(str::to_string).collect();
    let md_line = stdout(&md).lines().nth(2).unwrap().to_string();
    let md_vals: Vec<String> = md_line.trim_matches('|').split('|').map(|s| s.trim().to_string()).collect();
    assert_eq!(csv_vals, md_vals);
}

#[test]
fn eval_json_rows_feed_report() {
    let dir = tempfile::tempdir().unwrap();
    let (store, clips) = eval_fixture(dir.path());
    let mut files = Vec::new();
    for (model, temp) in [("a", "0.05"), ("b", "0.5")] {
        let out = dir.path().join(format!("{model}.json"));
        let o = run(&["eval", p(&clips), "--store", p(&store), "--model", model, "--temperature", temp,
            "--format", "json", "--out", p(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        files.push(out);
    }
    let o = run(&["report", p(&files[0]), p(&files[1])]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(2).unwrap().starts_with("| a |"));
    assert!(text.contains("**"));
}

#[test]
fn eval_missing_embedding_exits_1_naming_clip() {
    let dir = tempfile::tempdir().unwrap();
    let (store, clips) = eval_fixture(dir.path());
    let mut text = fs::read_to_string(&clips).unwrap();
    text.push_str(r#"{"clip_id":"lost_clip","x_prompt":"x","y_prompt":"y","intended_prompt":"fwd","reversed_prompt":"rev"}"#);
    fs::write(&clips, text).unwrap();
    let o = run(&["eval", p(&clips), "--store", p(&store)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lost_clip"));
}

#[test]
fn import_then_eval_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let (store, clips) = eval_fixture(dir.path());
    let m = surrogate_morph::metrics::mxeb::MxebMatrix::new(1, 4, vec![0.3, 0.9, 0.1, 0.0]).unwrap();
    let f = dir.path().join("extra.mxeb");
    m.write(&f).unwrap();
    let o = run(&["import", "--store", p(&store), "--clip", &format!("extra={}", p(&f))]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(EmbeddingStore::open(&store).unwrap().clip_embedding("extra").is_ok());
    let o = run(&["import", "--store", p(&store), "--prompt", "bad"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(run(&["eval", p(&clips), "--store", p(&store)]).status.success());
}

#[test]
fn prompts_expand_fixture() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/sample_concept_pairs.jsonl");
    let o = run(&["prompts", p(&fixture)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 100);
    assert_eq!(lines[0]["direction"], "forward");
    assert_eq!(lines[1]["direction"], "reverse");
    let o = run(&["prompts", p(&fixture), "--template", "no slots"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["augment"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = run(&["augment", "a.wav", "b.wav", "--mode", "sideways", "--out", "o.wav"]);
    assert_eq!(o.status.code(), Some(2));
}

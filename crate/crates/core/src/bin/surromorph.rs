use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use surrogate_morph::audio_io::{load_wav, save_wav, to_mono, BitDepth, Waveform};
use surrogate_morph::config::CliConfig;
use surrogate_morph::dataset::{build_dataset, caption_for, read_pairs, DatasetError, ManifestRecord};
use surrogate_morph::dsp::{augment_pair, AugmentationMode};
use surrogate_morph::eval::{
    evaluate_corpus, expand_prompts, read_clip_manifest, read_concept_pairs, render_report, EvalError, EvalRow,
    ReportFormat,
};
use surrogate_morph::metrics::mxeb::{read_stats, write_stats, MxebMatrix};
use surrogate_morph::metrics::{mock_embed_with, mock_latents, EmbeddingStore, GaussianStats, MockFeatureParams};

/// Exit 1: processing failed. Exit 2: bad usage or invalid input.
enum Failure {
    Processing(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Processing(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn processing(e: impl ToString) -> Failure {
    Failure::Processing(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "surromorph", version, about = "Surrogate morph data construction and morph evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Augment one primary/secondary pair into a WAV and print its caption
    Augment(AugmentArgs),
    /// Build a surrogate dataset from a JSON-lines pair list
    Build(BuildArgs),
    /// Compute deterministic mock embeddings and latents for a directory of WAVs
    EmbedMock(EmbedMockArgs),
    /// Add existing MXEB files to an embedding store
    Import(ImportArgs),
    /// Fit reference Gaussian statistics to the clip embeddings in a store
    Stats(StatsArgs),
    /// Expand concept pairs into forward and reverse infusion prompts
    Prompts(PromptsArgs),
    /// Score a clip corpus and print a report row
    Eval(EvalArgs),
    /// Render saved evaluation rows (JSON) as one table
    Report(ReportArgs),
}

/// DSP overrides shared by augment and build. Unset flags keep config values.
#[derive(Args, Debug)]
struct DspFlags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rms_frame: Option<usize>,
    #[arg(long)]
    rms_hop: Option<usize>,
    #[arg(long)]
    smooth_window: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output encoding: 16, 24 or 32f
    #[arg(long, value_parser = parse_bit_depth)]
    bit_depth: Option<BitDepth>,
    /// Process channels independently instead of downmixing to mono
    #[arg(long)]
    keep_channels: bool,
}

fn parse_bit_depth(s: &str) -> Result<BitDepth, String> {
    BitDepth::parse(s).ok_or_else(|| format!("unknown bit depth '{s}' (use 16, 24 or 32f)"))
}

impl DspFlags {
    fn resolve(&self) -> Result<CliConfig, Failure> {
        let mut cfg = CliConfig::load_or_default(self.config.as_deref()).map_err(usage)?;
        let a = &mut cfg.augment;
        if let Some(v) = self.rms_frame {
            a.rms_frame_size = v;
        }
        if let Some(v) = self.rms_hop {
            a.rms_hop = v;
        }
        if let Some(v) = self.smooth_window {
            a.eq_smooth_window = v;
        }
        if let Some(v) = self.epsilon {
            a.epsilon = v;
        }
        if let Some(v) = self.bit_depth {
            cfg.output_bit_depth = v;
        }
        if self.keep_channels {
            cfg.downmix = false;
        }
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct AugmentArgs {
    primary: PathBuf,
    secondary: PathBuf,
    /// rms, spectral, both or none
    #[arg(long)]
    mode: AugmentationMode,
    #[arg(long)]
    out: PathBuf,
    /// Caption label for the primary (default: file stem)
    #[arg(long)]
    primary_label: Option<String>,
    /// Caption label for the secondary (default: file stem)
    #[arg(long)]
    secondary_label: Option<String>,
    #[command(flatten)]
    dsp: DspFlags,
}

#[derive(Args, Debug)]
struct BuildArgs {
    pairs: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core)
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    dsp: DspFlags,
}

#[derive(Args, Debug)]
struct EmbedMockArgs {
    audio_dir: PathBuf,
    #[arg(long)]
    out_store: PathBuf,
    /// Clip embedding width
    #[arg(long, default_value_t = 128)]
    dim: usize,
    /// Latent width (mel bands per frame)
    #[arg(long, default_value_t = 32)]
    latent_dim: usize,
    #[arg(long, default_value_t = 1024)]
    frame: usize,
    #[arg(long, default_value_t = 512)]
    hop: usize,
}

#[derive(Args, Debug)]
struct ImportArgs {
    #[arg(long)]
    store: PathBuf,
    /// Clip embedding, as ID=FILE
    #[arg(long = "clip", value_parser = parse_assignment)]
    clips: Vec<(String, PathBuf)>,
    /// Clip latent matrix, as ID=FILE
    #[arg(long = "latents", value_parser = parse_assignment)]
    latents: Vec<(String, PathBuf)>,
    /// Text prompt embedding, as ID=FILE
    #[arg(long = "prompt", value_parser = parse_assignment)]
    prompts: Vec<(String, PathBuf)>,
}

fn parse_assignment(s: &str) -> Result<(String, PathBuf), String> {
    let (id, path) = s.split_once('=').ok_or_else(|| format!("expected ID=FILE, got '{s}'"))?;
    Ok((id.to_string(), PathBuf::from(path)))
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PromptsArgs {
    /// JSON-lines file of {"x_label", "y_label"} objects
    pairs: PathBuf,
    #[arg(long)]
    template: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Markdown,
    Json,
}

#[derive(Args, Debug)]
struct EvalArgs {
    clips: PathBuf,
    #[arg(long)]
    store: PathBuf,
    /// Reference statistics (MXEB, D+1 rows) for FAD
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long, default_value = "model")]
    model: String,
    #[arg(long)]
    temperature: Option<f64>,
    /// Standardize latent columns before PCA
    #[arg(long)]
    standardize_latents: bool,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// JSON files written by `eval --format json`
    #[arg(required = true)]
    rows: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Markdown)]
    format: OutputFormat,
}

fn stem_label(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sound".into())
}

fn load_input(path: &Path, downmix: bool) -> Result<Waveform, Failure> {
    let w = load_wav(path).map_err(usage)?;
    if downmix {
        to_mono(&w).map_err(usage)
    } else {
        Ok(w)
    }
}

fn cmd_augment(a: AugmentArgs) -> CmdResult {
    let cfg = a.dsp.resolve()?;
    let primary = load_input(&a.primary, cfg.downmix)?;
    let secondary = load_input(&a.secondary, cfg.downmix)?;
    let x = a.primary_label.unwrap_or_else(|| stem_label(&a.primary));
    let y = a.secondary_label.unwrap_or_else(|| stem_label(&a.secondary));
    let caption = caption_for(a.mode, &x, &y).map_err(usage)?;
    let out = augment_pair(&primary, &secondary, a.mode, &cfg.augment).map_err(processing)?;
    save_wav(&out, &a.out, cfg.output_bit_depth).map_err(processing)?;
    println!("{caption}");
    Ok(())
}

fn dataset_failure(e: DatasetError) -> Failure {
    match e {
        DatasetError::Io { .. } | DatasetError::Audio(_) | DatasetError::Dsp(_) => processing(e),
        _ => usage(e),
    }
}

fn cmd_build(a: BuildArgs) -> CmdResult {
    let mut cfg = a.dsp.resolve()?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(j) = a.jobs {
        cfg.jobs = j;
    }
    let pairs = read_pairs(&a.pairs).map_err(usage)?;
    let records = build_dataset(&pairs, &cfg.build_options(), &a.out_dir).map_err(dataset_failure)?;
    let mut failed = 0;
    for r in &records {
        if let ManifestRecord::Failed(f) = r {
            eprintln!("failed: {}: {}", f.id, f.reason);
            failed += 1;
        }
    }
    println!("{} built, {} failed", records.len() - failed, failed);
    if failed > 0 {
        return Err(processing(format!("{failed} pair(s) failed")));
    }
    Ok(())
}

fn wav_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| usage(format!("{}: {e}", dir.display())))?.path();
        let is_wav = path.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav"));
        if path.is_file() && is_wav {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn cmd_embed_mock(a: EmbedMockArgs) -> CmdResult {
    if a.dim == 0 || a.latent_dim == 0 || a.frame == 0 || a.hop == 0 {
        return Err(usage("--dim, --latent-dim, --frame and --hop must be positive"));
    }
    let files = wav_files(&a.audio_dir)?;
    let mut store = EmbeddingStore::open_or_create(&a.out_store).map_err(usage)?;
    let params = MockFeatureParams { frame_size: a.frame, hop: a.hop, ..MockFeatureParams::default() };
    let mut failed = 0;
    for path in &files {
        let id = stem_label(path);
        let result = (|| -> Result<(), String> {
            let w = load_wav(path).map_err(|e| e.to_string())?;
            let mut e = mock_embed_with(&w, a.dim, &params).map_err(|e| e.to_string())?;
            e.clip_id = id.clone();
            store.put_clip_embedding(&e).map_err(|e| e.to_string())?;
            match mock_latents(&w, a.latent_dim, a.frame, a.hop) {
                Ok(mut l) => {
                    l.clip_id = id.clone();
                    store.put_clip_latents(&l).map_err(|e| e.to_string())?;
                }
                Err(err) => eprintln!("{}: no latents: {err}", path.display()),
            }
            Ok(())
        })();
        if let Err(msg) = result {
            eprintln!("{}: {msg}", path.display());
            failed += 1;
        }
    }
    store.save_index().map_err(processing)?;
    eprintln!("{} embedded, {} failed", files.len() - failed, failed);
    if failed > 0 {
        return Err(processing(format!("{failed} file(s) failed")));
    }
    Ok(())
}

fn cmd_import(a: ImportArgs) -> CmdResult {
    let mut store = EmbeddingStore::open_or_create(&a.store).map_err(usage)?;
    let read = |p: &Path| MxebMatrix::read(p).map_err(|e| usage(format!("{}: {e}", p.display())));
    for (id, path) in &a.clips {
        store.put_clip_embedding_rows(id, &read(path)?).map_err(usage)?;
    }
    for (id, path) in &a.latents {
        let l = read(path)?.to_latents(id).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        store.put_clip_latents(&l).map_err(usage)?;
    }
    for (id, path) in &a.prompts {
        let e = read(path)?.mean_embedding(id).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        store.put_prompt_embedding(id, &e).map_err(usage)?;
    }
    store.save_index().map_err(processing)
}

fn cmd_stats(a: StatsArgs) -> CmdResult {
    let store = EmbeddingStore::open(&a.store).map_err(usage)?;
    let mut rows = Vec::new();
    for id in store.clip_ids() {
        if store.index().clips[id].embedding.is_none() {
            continue;
        }
        let m = store.clip_embedding_rows(id).map_err(processing)?;
        rows.extend((0..m.rows).map(|i| m.row_f64(i)));
    }
    let stats = GaussianStats::from_rows(rows.iter().map(Vec::as_slice)).map_err(processing)?;
    write_stats(&a.out, &stats).map_err(processing)?;
    eprintln!("{} embeddings, dim {}", stats.count, stats.dim());
    Ok(())
}

fn cmd_prompts(a: PromptsArgs) -> CmdResult {
    let cfg = CliConfig::load_or_default(a.config.as_deref()).map_err(usage)?;
    let template = a.template.unwrap_or(cfg.prompt_template);
    let pairs = read_concept_pairs(&a.pairs).map_err(usage)?;
    let prompts = expand_prompts(&pairs, &template).map_err(usage)?;
    let mut out = std::io::stdout().lock();
    for p in &prompts {
        let line = serde_json::to_string(p).map_err(processing)?;
        writeln!(out, "{line}").map_err(processing)?;
    }
    Ok(())
}

fn render(rows: &[EvalRow], format: OutputFormat) -> Result<String, Failure> {
    match format {
        OutputFormat::Csv => render_report(rows, ReportFormat::Csv).map_err(processing),
        OutputFormat::Markdown => render_report(rows, ReportFormat::Markdown).map_err(processing),
        OutputFormat::Json => {
            let v = if rows.len() == 1 { serde_json::to_value(&rows[0]) } else { serde_json::to_value(rows) };
            let mut s = serde_json::to_string_pretty(&v.map_err(processing)?).map_err(processing)?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| processing(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_eval(a: EvalArgs) -> CmdResult {
    let mut cfg = CliConfig::load_or_default(a.config.as_deref()).map_err(usage)?;
    if let Some(t) = a.temperature {
        cfg.directionality.temperature = t;
    }
    if a.standardize_latents {
        cfg.lcs.standardize = true;
    }
    if let Some(j) = a.jobs {
        cfg.jobs = j;
    }
    cfg.validate().map_err(usage)?;
    let clips = read_clip_manifest(&a.clips).map_err(usage)?;
    let store = EmbeddingStore::open(&a.store).map_err(usage)?;
    let reference = match &a.reference {
        Some(p) => Some(read_stats(p).map_err(|e| usage(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(processing)?;
    let result = pool.install(|| evaluate_corpus(&a.model, &clips, &store, reference.as_ref(), &cfg.eval_options()));
    let eval = result.map_err(|e| match e {
        EvalError::EmptyInput | EvalError::DuplicateClip(_) => usage(e),
        _ => processing(e),
    })?;
    for f in &eval.failures {
        eprintln!("excluded: {}: {}", f.clip_id, f.reason);
    }
    if eval.row.fad.is_none() {
        eprintln!("FAD not computed (no reference or fewer than 2 embeddings)");
    }
    emit(&render(&[eval.row], a.format)?, a.out.as_deref())
}

fn cmd_report(a: ReportArgs) -> CmdResult {
    let mut rows = Vec::new();
    for p in &a.rows {
        let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        let parsed = if value.is_array() {
            serde_json::from_value::<Vec<EvalRow>>(value)
        } else {
            serde_json::from_value::<EvalRow>(value).map(|r| vec![r])
        };
        rows.extend(parsed.map_err(|e| usage(format!("{}: {e}", p.display())))?);
    }
    emit(&render(&rows, a.format)?, None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Augment(a) => cmd_augment(a),
        Command::Build(a) => cmd_build(a),
        Command::EmbedMock(a) => cmd_embed_mock(a),
        Command::Import(a) => cmd_import(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Prompts(a) => cmd_prompts(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Processing(msg) | Failure::Usage(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}

#[test]
fn verify_cli() {
    use clap::CommandFactory;
    Cli::command().debug_assert();
}

//! Command layer behind the `morbench` binary.
//!
//! Exit codes: 0 success, 1 internal failure, 2 user or configuration error.
//! Relative input paths are resolved against `--data-dir` (or
//! `MORBENCH_DATA_DIR`) when one is set.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    build_binary_dataset, generate_synthetic_corpus, load_corpus, merge_partitions, summarize, write_corpus,
    CorpusSummary, SyntheticSpec,
};
use crate::embeddings::train_skipgram;
use crate::error::{Error, Result};
use crate::eval::experiment::FoldTiming;
use crate::eval::{render_report, run_experiment, ExperimentConfig, ExperimentReport, ReportFormat};
use crate::preprocess::{analyze, build_vocabulary};
use crate::seed::fnv1a64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "morbench", version, about = "Per-morbidity clinical note classification benchmark")]
pub struct Cli {
    /// Print the default experiment configuration as JSON and exit.
    #[arg(long)]
    pub print_default_config: bool,

    /// Root for relative input paths.
    #[arg(long, env = "MORBENCH_DATA_DIR", global = true)]
    pub data_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one binary dataset per morbidity and a summary table.
    Prepare {
        /// One or more corpus partitions (JSON-Lines); merged before selection.
        #[arg(required = true)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Experiment config; only its morbidity list is used.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train skip-gram vectors on every note of a corpus.
    TrainEmbeddings {
        corpus: PathBuf,
        /// Experiment config; its `skipgram` section is used.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `skipgram.seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the cross-validated comparison and write the report files.
    Run {
        corpus: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the master seed of the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the worker thread count of the config.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus from a JSON spec.
    Synth {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render a report from raw.jsonl.
    Report {
        raw: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Markdown => ReportFormat::Markdown,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { source, .. } => match source.kind() {
            std::io::ErrorKind::NotFound
            | std::io::ErrorKind::PermissionDenied
            | std::io::ErrorKind::InvalidData => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        },
        Error::Parse { .. }
        | Error::Validation(_)
        | Error::DuplicateId { .. }
        | Error::InvalidInput(_)
        | Error::Config(_)
        | Error::Format(_) => EXIT_USAGE,
        Error::Shape(_) | Error::NonFinite(_) => EXIT_INTERNAL,
    }
}

fn resolve(data_dir: Option<&Path>, path: &Path) -> PathBuf {
    match data_dir {
        Some(root) if path.is_relative() => root.join(path),
        _ => path.to_path_buf(),
    }
}

pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg = ExperimentConfig::from_json(&text)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_prefix(&e))))?;
    Ok(cfg)
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}

/// Tracks files written by a command so a failure can remove them.
struct OutputSet {
    written: Vec<PathBuf>,
}

impl OutputSet {
    fn new() -> Self {
        OutputSet { written: Vec::new() }
    }

    /// Writes through a temporary sibling and renames into place.
    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        let tmp = tmp_path(path);
        let res = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
        if let Err(e) = res {
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(path, e));
        }
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn rollback(self) {
        for p in self.written {
            let _ = fs::remove_file(p);
        }
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp"))
}

fn with_rollback<T>(f: impl FnOnce(&mut OutputSet) -> Result<T>) -> Result<T> {
    let mut outputs = OutputSet::new();
    match f(&mut outputs) {
        Ok(v) => Ok(v),
        Err(e) => {
            outputs.rollback();
            Err(e)
        }
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// File name used for a morbidity's dataset.
pub fn dataset_file_name(morbidity: &str) -> String {
    format!("{}.jsonl", morbidity.replace(' ', "_"))
}

pub fn cmd_prepare(corpora: &[PathBuf], out: &Path, morbidities: &[String]) -> Result<CorpusSummary> {
    let partitions = corpora.iter().map(load_corpus).collect::<Result<Vec<_>>>()?;
    let notes = merge_partitions(partitions)?;
    create_dir(out)?;
    with_rollback(|outputs| {
        for m in morbidities {
            let ds = build_binary_dataset(&notes, m);
            let mut buf = Vec::new();
            for r in &ds.records {
                serde_json::to_writer(&mut buf, r).map_err(|e| Error::InvalidInput(e.to_string()))?;
                buf.push(b'\n');
            }
            outputs.write(&out.join(dataset_file_name(m)), &buf)?;
        }
        let summary = summarize(&notes, morbidities);
        outputs.write(&out.join("summary.tsv"), summary.to_tsv().as_bytes())?;
        Ok(summary)
    })
}

/// Trains on every note text; returns the vocabulary size.
pub fn cmd_train_embeddings(corpus: &Path, config: &ExperimentConfig, seed: Option<u64>, out: &Path) -> Result<usize> {
    let mut sg = config.skipgram.clone();
    if let Some(s) = seed {
        sg.seed = s;
    }
    sg.validate()?;
    let notes = load_corpus(corpus)?;
    let docs: Vec<Vec<String>> = notes.iter().map(|n| analyze(&n.text)).collect();
    let vocab = build_vocabulary(&docs);
    let table = train_skipgram(&docs, &vocab, &sg)?;
    let mut buf = Vec::new();
    table
        .write_text(&vocab, &mut buf)
        .map_err(|e| Error::io(out, e))?;
    with_rollback(|outputs| outputs.write(out, &buf))?;
    Ok(vocab.len())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTimings {
    pub load_seconds: f64,
    pub experiment_seconds: f64,
    pub folds: Vec<FoldTiming>,
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub corpus: PathBuf,
    /// FNV-1a 64 of the corpus file bytes, hex.
    pub corpus_fingerprint: String,
    pub outputs: Vec<PathBuf>,
    pub timings: StageTimings,
}

pub const RUN_OUTPUTS: [&str; 4] = ["report.md", "report.csv", "raw.jsonl", "manifest.json"];

pub fn cmd_run(corpus: &Path, config: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    config.validate()?;
    let t0 = Instant::now();
    let bytes = fs::read(corpus).map_err(|e| Error::io(corpus, e))?;
    let notes = load_corpus(corpus)?;
    let load_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let report = run_experiment(&notes, &config.morbidity_list(), config, config.seed)?;
    let experiment_seconds = t1.elapsed().as_secs_f64();
    create_dir(out)?;
    with_rollback(|outputs| {
        outputs.write(&out.join("report.md"), render_report(&report, ReportFormat::Markdown).as_bytes())?;
        outputs.write(&out.join("report.csv"), render_report(&report, ReportFormat::Csv).as_bytes())?;
        outputs.write(&out.join("raw.jsonl"), report.to_jsonl().as_bytes())?;
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: config.seed,
            config: config.clone(),
            corpus: corpus.to_path_buf(),
            corpus_fingerprint: format!("{:016x}", fnv1a64(&bytes)),
            outputs: RUN_OUTPUTS.iter().map(|n| out.join(n)).collect(),
            timings: StageTimings {
                load_seconds,
                experiment_seconds,
                folds: report.timings.clone(),
            },
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::InvalidInput(e.to_string()))?;
        outputs.write(&out.join("manifest.json"), json.as_bytes())
    })?;
    Ok(report)
}

/// Returns the number of notes written.
pub fn cmd_synth(spec_path: &Path, seed: u64, out: &Path) -> Result<usize> {
    let text = fs::read_to_string(spec_path).map_err(|e| Error::io(spec_path, e))?;
    let spec: SyntheticSpec = if text.trim().is_empty() {
        SyntheticSpec::default()
    } else {
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", spec_path.display())))?
    };
    let notes = generate_synthetic_corpus(&spec, seed)?;
    let mut buf = BufWriter::new(Vec::new());
    write_corpus(&notes, &mut buf).map_err(|e| Error::io(out, e))?;
    let bytes = buf.into_inner().map_err(|e| Error::io(out, e.into_error()))?;
    with_rollback(|outputs| outputs.write(out, &bytes))?;
    Ok(notes.len())
}

pub fn cmd_report(raw: &Path, format: ReportFormat) -> Result<String> {
    let text = fs::read_to_string(raw).map_err(|e| Error::io(raw, e))?;
    let report = ExperimentReport::parse_jsonl(&text)?;
    Ok(render_report(&report, format))
}

fn dispatch(cli: Cli) -> Result<()> {
    let data_dir = cli.data_dir.as_deref();
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    let print = |out: &mut dyn Write, s: &str| -> Result<()> {
        out.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e))
    };
    if cli.print_default_config {
        return print(&mut stdout, &(ExperimentConfig::default().to_json_pretty() + "\n"));
    }
    let Some(command) = cli.command else {
        return Err(Error::Config("no command given; see --help".into()));
    };
    match command {
        Command::Prepare { corpus, out, config } => {
            let cfg = load_config(config.map(|p| resolve(data_dir, &p)).as_deref())?;
            let corpora: Vec<PathBuf> = corpus.iter().map(|p| resolve(data_dir, p)).collect();
            let summary = cmd_prepare(&corpora, &out, &cfg.morbidity_list())?;
            print(&mut stdout, &summary.to_tsv())
        }
        Command::TrainEmbeddings { corpus, config, seed, out } => {
            let cfg = load_config(config.map(|p| resolve(data_dir, &p)).as_deref())?;
            let n = cmd_train_embeddings(&resolve(data_dir, &corpus), &cfg, seed, &out)?;
            eprintln!("wrote {n} vectors to {}", out.display());
            Ok(())
        }
        Command::Run { corpus, config, seed, jobs, out } => {
            let mut cfg = load_config(config.map(|p| resolve(data_dir, &p)).as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            let report = cmd_run(&resolve(data_dir, &corpus), &cfg, &out)?;
            print(&mut stdout, &render_report(&report, ReportFormat::Markdown))
        }
        Command::Synth { spec, seed, out } => {
            let n = cmd_synth(&resolve(data_dir, &spec), seed, &out)?;
            eprintln!("wrote {n} notes to {}", out.display());
            Ok(())
        }
        Command::Report { raw, format, out } => {
            let text = cmd_report(&resolve(data_dir, &raw), format.into())?;
            match out {
                Some(path) => with_rollback(|outputs| outputs.write(&path, text.as_bytes())),
                None => print(&mut stdout, &text),
            }
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

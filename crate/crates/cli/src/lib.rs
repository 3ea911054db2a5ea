//! The `docsim` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, missing inputs),
//! 2 on data errors (unreadable or malformed files, invalid configuration).

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use docsim::cbr::{retrieve_nearest, Case, CaseBase};
use docsim::corpus::{load_corpus, split_corpus, Corpus, CorpusFormat};
use docsim::eval::run_sweep;
use docsim::features::{vectorize, FeatureRanking, FeatureSpace, Vocabulary};
use docsim::store::{CaseStore, SpaceFile};
use docsim::theory::{median_nn_distance, required_points};
use docsim::{MetricKind, NormMode};
use thiserror::Error;

use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "docsim", version, about = "Document similarity experiments over tf-idf vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a feature space from a training corpus and store its case base.
    Featurize(FeaturizeArgs),
    /// Retrieve the nearest stored case for a piece of text.
    Query(QueryArgs),
    /// Classify a test corpus across metrics and dimensions, writing a CSV report.
    Sweep(SweepArgs),
    /// Nearest-neighbour distance calculators for the unit-ball model.
    #[command(subcommand)]
    Theory(TheoryCommand),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Training corpus: a .jsonl file or a directory of label subdirectories.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Run configuration file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    norm: Option<String>,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of features to keep; defaults to the whole vocabulary.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Directory written by `featurize`.
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    metric: MetricKind,
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    text: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Test corpus; without it a seeded split of the training corpus is used.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Comma-separated dimensions.
    #[arg(long)]
    dims: Option<String>,
    /// Comma-separated metrics (ed, cs, tsss).
    #[arg(long)]
    metrics: Option<String>,
    /// CSV report path; the provenance sidecar is written next to it as .json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_fraction: Option<String>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum TheoryCommand {
    /// Median distance from a point to its nearest neighbour.
    NnDistance {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Sample count for which the median nearest-neighbour distance is `d`.
    RequiredN {
        #[arg(long)]
        d: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
    },
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn execute<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Featurize(args) => featurize(args, out),
        Command::Query(args) => query(args, out),
        Command::Sweep(args) => sweep(args, out),
        Command::Theory(t) => theory(t, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(data)
}

/// Config file values first, then flag overrides, then validation.
fn resolve_config(common: &CommonArgs, overrides: &[(&str, Option<String>)]) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path).map_err(data)?,
        None => RunConfig::default(),
    };
    let train = common.train.as_ref().map(|p| p.display().to_string());
    let norm = common.norm.clone();
    for (key, value) in [("train", train), ("norm", norm)].iter().chain(overrides) {
        if let Some(v) = value {
            cfg.set(key, v).map_err(|e| CliError::Usage(e.to_string()))?;
        }
    }
    cfg.validate().map_err(data)?;
    Ok(cfg)
}

fn load(path: &Path) -> Result<Corpus, CliError> {
    load_corpus(path, CorpusFormat::infer(path)).map_err(data)
}

fn featurize(args: FeaturizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dir_flag = args.out.as_ref().map(|p| p.display().to_string());
    let cfg = resolve_config(&args.common, &[("out", dir_flag)])?;
    let train_path = cfg.train.clone().ok_or_else(|| CliError::Usage("--train is required".into()))?;
    let dir = cfg.out.clone().ok_or_else(|| CliError::Usage("--out is required".into()))?;
    if args.dim == Some(0) {
        return Err(CliError::Usage("--dim must be positive".into()));
    }
    let train = load(&train_path)?;
    let pipeline = cfg.preprocess.pipeline();
    let tokens: Vec<_> = train.documents().iter().map(|d| pipeline.run(&d.text)).collect();
    let vocab = Vocabulary::build(&tokens, cfg.min_df, cfg.max_df).map_err(data)?;
    let full = FeatureSpace::full(vocab);
    let full_vectors: Vec<_> = tokens.iter().map(|t| vectorize(t, &full, NormMode::None)).collect();
    let ranking = FeatureRanking::from_vectors(&full_vectors, full.dim()).map_err(data)?;
    let m = args.dim.unwrap_or(full.dim()).min(full.dim());
    let space = full.with_selection(ranking.top(m)).map_err(data)?;

    let cases = train
        .documents()
        .iter()
        .zip(&full_vectors)
        .map(|(d, v)| {
            Ok(Case {
                id: d.id.clone(),
                vector: space.project(v, cfg.norm).map_err(data)?,
                label: d.label.clone(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let n_zero = cases.iter().filter(|c| c.vector.is_zero()).count();
    let base = CaseBase::from_cases(space.dim(), cases).map_err(data)?;
    let store = CaseStore {
        space: SpaceFile {
            space,
            norm: cfg.norm,
            preprocess: cfg.preprocess.clone(),
        },
        base,
    };
    store.save(&dir).map_err(data)?;
    write_out(
        out,
        &format!(
            "{} cases, {} of {} features, norm {}, {} zero vectors -> {}\n",
            store.base.len(),
            store.space.space.dim(),
            store.space.space.vocabulary().len(),
            cfg.norm,
            n_zero,
            dir.display()
        ),
    )
}

fn query(args: QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match (&args.text, &args.file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?,
        (None, None) => return Err(CliError::Usage("--text or --file is required".into())),
    };
    let store = CaseStore::load(&args.space).map_err(data)?;
    let sf = &store.space;
    let tokens = sf.preprocess.pipeline().run(&text);
    let v = vectorize(&tokens, &sf.space, sf.norm);
    let hit = retrieve_nearest(&v, &store.base, args.metric).map_err(data)?;
    let json = serde_json::json!({
        "case_id": hit.case_id,
        "label": hit.label,
        "score": hit.score,
    });
    write_out(out, &format!("{json}\n"))
}

fn sweep(args: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    let cfg = resolve_config(
        &args.common,
        &[
            ("test", path_str(&args.test)),
            ("dims", args.dims.clone()),
            ("metrics", args.metrics.clone()),
            ("out", path_str(&args.out)),
            ("seed", args.seed.map(|s| s.to_string())),
            ("test_fraction", args.test_fraction.clone()),
        ],
    )?;
    let train_path = cfg.train.clone().ok_or_else(|| CliError::Usage("--train is required".into()))?;
    let corpus = load(&train_path)?;
    let (train, test) = match &cfg.test {
        Some(p) => (corpus, load(p)?),
        None => split_corpus(&corpus, cfg.test_fraction, cfg.seed).map_err(data)?,
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        pool = pool.num_threads(jobs as usize);
    }
    let pool = pool.build().map_err(data)?;
    let spec = cfg.sweep_spec();
    let mut report = pool.install(|| run_sweep(&train, &test, &spec)).map_err(data)?;
    report.provenance.config = cfg.to_text();
    report.provenance.train.source = Some(train_path.display().to_string());
    report.provenance.test.source = cfg.test.as_ref().map(|p| p.display().to_string());

    let csv = report.to_csv();
    match &cfg.out {
        Some(path) => {
            let write = |p: &Path, s: &str| {
                std::fs::write(p, s).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display())))
            };
            write(path, &csv)?;
            write(&path.with_extension("json"), &report.provenance_json())?;
        }
        None => write_out(out, &csv)?,
    }
    Ok(())
}

fn theory(cmd: TheoryCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        TheoryCommand::NnDistance { m, n } => {
            let d = median_nn_distance(m, n).map_err(data)?;
            write_out(out, &format!("{d}\n"))
        }
        TheoryCommand::RequiredN { d, m } => {
            let n = required_points(d, m).map_err(|e| CliError::Usage(e.to_string()))?;
            write_out(out, &format!("{n} (ceil {})\n", n.ceil()))
        }
    }
}

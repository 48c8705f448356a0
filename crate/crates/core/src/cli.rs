//! Command-line front end for the `lmotif` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{normalize_text, prepare_dataset, Manifest, Quota};
use crate::error::{Error, Result};
use crate::experiment::{self, ExperimentConfig, WordRange};
use crate::features::{select_top_words, FeatureExtractor, FeatureVersion};
use crate::graph::{build_network, WordNetwork};
use crate::learn::ClassifierSpec;
use crate::motifs::{labelled_census, MotifId, Vocabulary};

#[derive(Debug, Parser)]
#[command(
    name = "lmotif",
    version,
    about = "Labelled motif features for text classification"
)]
pub struct Cli {
    /// Seed for shuffling, fold assignment and solvers.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Directory for experiment outputs.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Co-occurrence network operations.
    #[command(subcommand)]
    Network(NetworkCommand),
    /// Triad census of an edge list.
    Census(CensusArgs),
    /// Write a feature matrix for a manifest.
    Extract(ExtractArgs),
    /// Cross-validated accuracy for fixed |W|.
    Evaluate(EvaluateArgs),
    /// Cross-validated accuracy over a range of |W|.
    Sweep(SweepArgs),
    /// Per-document values of two features.
    Scatter(ScatterArgs),
}

#[derive(Debug, Subcommand)]
pub enum NetworkCommand {
    /// Build the network of a plain-text file and write it as a TSV edge list.
    Build {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// TSV edge list.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated words to report labelled counts for.
    #[arg(long, value_delimiter = ',')]
    pub words: Vec<String>,
    /// Break labelled counts down by orbit.
    #[arg(long)]
    pub orbits: bool,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Manifest CSV with columns path,label[,group].
    #[arg(long = "in")]
    pub manifest: PathBuf,
    #[arg(long)]
    pub chunk_size: Option<usize>,
    #[arg(long)]
    pub truncate_shortest: bool,
    /// CLASS=N or CLASS/GROUP=N; repeatable.
    #[arg(long = "quota")]
    pub quotas: Vec<Quota>,
}

impl PrepareArgs {
    fn manifest(&self) -> Result<Manifest> {
        let mut m = Manifest::from_csv_path(&self.manifest)?;
        m.chunk_size = self.chunk_size;
        m.truncate_to_shortest = self.truncate_shortest;
        m.quotas = self.quotas.clone();
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub prepare: PrepareArgs,
    #[arg(long, default_value = "v2")]
    pub version: FeatureVersion,
    #[arg(long, default_value_t = 20)]
    pub words: usize,
    #[arg(long = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalOptions {
    #[command(flatten)]
    pub prepare: PrepareArgs,
    /// Feature versions, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "v2")]
    pub version: Vec<FeatureVersion>,
    /// Classifiers, comma-separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "decision_tree,knn,linear_svm,naive_bayes"
    )]
    pub classifier: Vec<ClassifierSpec>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Choose W from all documents rather than per training split.
    #[arg(long)]
    pub global_words: bool,
    /// Keep documents of one manifest group in the same fold.
    #[arg(long)]
    pub group_folds: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub options: EvalOptions,
    #[arg(long, default_value_t = 20)]
    pub words: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub options: EvalOptions,
    #[arg(long, default_value_t = 1)]
    pub min_words: usize,
    #[arg(long, default_value_t = 40)]
    pub max_words: usize,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub prepare: PrepareArgs,
    /// Feature on the x axis, e.g. `a` or `a|m2`.
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Output file; standard output when absent.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn print(text: &str) -> Result<()> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

/// Census table for the `census` subcommand.
pub fn census_table(network: &WordNetwork, words: &[String], orbits: bool) -> String {
    let vocab = Vocabulary::Words(words.to_vec());
    let census = labelled_census(network, &vocab);
    let mut out = String::from("motif_id,count\n");
    for m in MotifId::all() {
        let _ = writeln!(out, "{m},{}", census.motif_count(m));
    }
    if words.is_empty() {
        return out;
    }
    out.push('\n');
    if orbits {
        out.push_str("word,motif_id,orbit,count\n");
        for w in words {
            for m in MotifId::all() {
                for o in m.entry().orbits() {
                    let _ = writeln!(out, "{w},{m},{o},{}", census.word_orbit_count(w, m, o));
                }
            }
        }
    } else {
        out.push_str("word,motif_id,count\n");
        for w in words {
            for m in MotifId::all() {
                let _ = writeln!(out, "{w},{m},{}", census.word_count(w, m));
            }
        }
    }
    out
}

fn experiment_config(
    cli: &Cli,
    options: &EvalOptions,
    words: WordRange,
) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        manifest: options.prepare.manifest()?,
        versions: options.version.clone(),
        words,
        classifiers: options.classifier.clone(),
        folds: options.folds,
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
        global_words: options.global_words,
        group_folds: options.group_folds,
    })
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Network(NetworkCommand::Build { input, output }) => {
            let network = build_network(&normalize_text(&read(input)?));
            write(output, &network.to_edge_list())
        }
        Command::Census(args) => {
            let network = WordNetwork::from_edge_list(&read(&args.input)?)?;
            print(&census_table(&network, &args.words, args.orbits))
        }
        Command::Extract(args) => {
            let docs = prepare_dataset(&args.prepare.manifest()?, cli.seed)?;
            let words = select_top_words(docs.iter().map(|d| d.tokens.as_slice()), args.words)?;
            let extractor =
                FeatureExtractor::new(&docs, &words.words, args.version.needs_network());
            let rows: Vec<usize> = (0..docs.len()).collect();
            let matrix = extractor.matrix(&rows, &words, args.version)?;
            let mut buf = Vec::new();
            matrix.write_csv(&mut buf)?;
            write(&args.output, &String::from_utf8_lossy(&buf))
        }
        Command::Evaluate(args) => {
            let config = experiment_config(cli, &args.options, WordRange::single(args.words))?;
            let cells = experiment::run_experiment(&config)?;
            let mut text = String::new();
            for cell in &cells {
                let _ = writeln!(text, "{}", cell.report);
            }
            text.push_str(&experiment::accuracy_table(&cells, &config));
            print(&text)
        }
        Command::Sweep(args) => {
            let range = WordRange {
                lo: args.min_words,
                hi: args.max_words,
            };
            let config = experiment_config(cli, &args.options, range)?;
            let cells = experiment::sweep_words(&config)?;
            print(&experiment::sweep_table(&cells))
        }
        Command::Scatter(args) => {
            let csv =
                experiment::emit_scatter(&args.prepare.manifest()?, &args.x, &args.y, cli.seed)?;
            match &args.output {
                Some(path) => write(path, &csv),
                None => print(&csv),
            }
        }
    }
}

/// Runs a parsed command line on a thread pool sized by `--jobs`.
pub fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

/// JSON object written to standard error on failure.
pub fn error_json(err: &Error) -> String {
    serde_json::json!({ "error": { "kind": err.kind(), "message": err.to_string() } }).to_string()
}

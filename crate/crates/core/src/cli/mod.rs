//! Command-line front end.
//!
//! Every subcommand returns an exit code: 0 on success, 2 for input or
//! configuration errors, 3 for numeric failures. Diagnostics are written to
//! the error stream as `error_code<TAB>message`; standard output carries
//! reports only.

mod commands;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigError;
use crate::corpus::CorpusError;
use crate::dstmetrics::MetricsError;
use crate::maskgen::MaskgenError;
use crate::records::RecordError;
use crate::toymlm::ToyError;

pub use commands::{generation_settings, GenerateSettings, GENERATE_KEYS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "xlift", version, about = "Cross-lingual dialogue pre-training data tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Take an order-preserving prefix of a parallel corpus.
    Extract(ExtractArgs),
    /// Print corpus statistics.
    Stats(StatsArgs),
    /// Generate masked examples for one task.
    Generate(GenerateArgs),
    /// Score dialogue-state predictions against gold.
    Eval(EvalArgs),
    /// Write a synthetic bilingual corpus and its probe pairs.
    MakeSynthetic(MakeSyntheticArgs),
    /// Train the toy masked-word model on an example file.
    TrainToy(TrainToyArgs),
    /// Score a toy checkpoint on translation pairs.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    /// Document start indices, one per line.
    #[arg(long)]
    pub boundaries: Option<PathBuf>,
    #[arg(long, default_value = "src")]
    pub src_lang: String,
    #[arg(long, default_value = "tgt")]
    pub tgt_lang: String,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Number of aligned lines to keep.
    #[arg(long, default_value_t = crate::corpus::DEFAULT_EXTRACT_LINES)]
    pub budget: usize,
    /// Shuffle whole documents with this seed before taking the prefix.
    #[arg(long)]
    pub shuffle_documents: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Also write the statistics as a single JSON line.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// tapt, monodm, tlm, xdm, rm, monodm-sent or tlm-sent.
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub mask_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// alternate, fixed-src-context or fixed-tgt-context.
    #[arg(long)]
    pub direction_policy: Option<String>,
    /// both, src or tgt (monolingual tasks).
    #[arg(long)]
    pub side: Option<String>,
    #[arg(long)]
    pub budget_multiplier: Option<f64>,
    /// Use 80/10/10 corruption instead of the plain sentinel.
    #[arg(long)]
    pub bert_mix: bool,
    /// Directory holding src.txt, tgt.txt and boundaries.txt.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub src: Option<PathBuf>,
    #[arg(long)]
    pub tgt: Option<PathBuf>,
    #[arg(long)]
    pub boundaries: Option<PathBuf>,
    #[arg(long)]
    pub src_lang: Option<String>,
    #[arg(long)]
    pub tgt_lang: Option<String>,
    /// Task utterances, one per line (tapt).
    #[arg(long)]
    pub utterances: Option<PathBuf>,
    /// Language of --utterances.
    #[arg(long)]
    pub lang: Option<String>,
    /// key=value settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Reuse the settings recorded in an existing example file's header.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Worker threads; output does not depend on this.
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub ontology: PathBuf,
    /// informable or full.
    #[arg(long, default_value = "informable")]
    pub scope: String,
    /// Reject slots and values outside the ontology.
    #[arg(long)]
    pub strict: bool,
    /// Write the full report (JSON) here and print the breakdown.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MakeSyntheticArgs {
    #[arg(long, default_value_t = 20)]
    pub n_docs: usize,
    #[arg(long, default_value_t = 60)]
    pub doc_len: usize,
    #[arg(long, default_value_t = 50)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainToyArgs {
    #[arg(long)]
    pub examples: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.01)]
    pub init_scale: f64,
    /// Words seen fewer times map to [UNK].
    #[arg(long, default_value_t = 1)]
    pub min_count: usize,
    /// Directory for model.ckpt, vocab.txt and loss.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Directory written by train-toy.
    #[arg(long)]
    pub model: PathBuf,
    /// Translation pairs, two whitespace-separated words per line.
    #[arg(long)]
    pub pairs: PathBuf,
}

/// A failed command: diagnostic code, message and exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    pub fn input(code: &str, message: impl Into<String>) -> Self {
        CliError {
            code: code.to_string(),
            message: message.into(),
            exit: EXIT_INPUT,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::input("IoError", format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // one line, tab separated
        write!(f, "{}\t{}", self.code, self.message.replace(['\n', '\t'], " "))
    }
}

impl std::error::Error for CliError {}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::input(e.code(), e.to_string())
    }
}

impl From<MaskgenError> for CliError {
    fn from(e: MaskgenError) -> Self {
        CliError::input(e.code(), e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::input(e.code(), e.to_string())
    }
}

impl From<RecordError> for CliError {
    fn from(e: RecordError) -> Self {
        CliError::input(e.code(), e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::input("ConfigError", e.to_string())
    }
}

impl From<ToyError> for CliError {
    fn from(e: ToyError) -> Self {
        let exit = if matches!(e, ToyError::NonFiniteLoss { .. }) {
            EXIT_NUMERIC
        } else {
            EXIT_INPUT
        };
        CliError {
            code: e.code().to_string(),
            message: e.to_string(),
            exit,
        }
    }
}

/// Runs a parsed command.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Extract(a) => commands::extract(&a, err),
        Command::Stats(a) => commands::stats(&a, out),
        Command::Generate(a) => commands::generate(&a),
        Command::Eval(a) => commands::eval(&a, out),
        Command::MakeSynthetic(a) => commands::make_synthetic(&a),
        Command::TrainToy(a) => commands::train_toy(&a, out),
        Command::Probe(a) => commands::probe(&a, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(err, "{}", CliError::input("UsageError", first));
            return EXIT_INPUT;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit
        }
    }
}

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Capability test suites for adverse-drug-effect classifiers.
#[derive(Parser)]
#[command(name = "capa-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a template corpus for structural violations and counts.
    Validate(ValidateArgs),
    /// Expand a corpus and lexicon into a test suite.
    Generate(GenerateArgs),
    /// Classify every suite case through an adapter.
    Run(RunArgs),
    /// Score predictions against a suite.
    Evaluate(EvaluateArgs),
    /// Filter POS-tagged spans down to short noun phrases.
    Extract(ExtractArgs),
}

#[derive(Args)]
pub struct ValidateArgs {
    /// Corpus JSONL; the bundled corpus when omitted.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Expected counts: `table5` or a JSON manifest file.
    #[arg(long)]
    pub manifest: Option<String>,
    /// Accept templates without a {drug} placeholder.
    #[arg(long)]
    pub allow_drugless: bool,
    /// Print the full report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Lexicon JSON; the bundled lexicon when omitted.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Overrides the config file's seed.
    #[arg(long, env = "CAPA_BENCH_SEED")]
    pub seed: Option<u64>,
    /// Sampling config JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Keep only cases of this capability (e.g. `negation`).
    #[arg(long)]
    pub capability: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RunArgs {
    /// Suite JSONL written by `generate`.
    #[arg(long)]
    pub suite: PathBuf,
    /// `heuristic`, `file:<dir>` or `http:<url>`.
    #[arg(long, default_value = "heuristic")]
    pub adapter: String,
    /// Lexicon for the heuristic adapter.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 4)]
    pub max_in_flight: usize,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    /// Attempts per case, including the first.
    #[arg(long, default_value_t = 3)]
    pub attempts: u32,
    /// First retry delay in milliseconds; doubles per attempt.
    #[arg(long, default_value_t = 1000)]
    pub backoff_ms: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub suite: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Baseline metrics JSON.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// `json`, `csv` or `md`.
    #[arg(long, default_value = "md")]
    pub format: String,
    /// Score answered cases only when some are missing.
    #[arg(long)]
    pub allow_partial: bool,
    /// Histogram bins for per-template pass ratios.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Output directory; the report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExtractArgs {
    /// Tagged-span file, one span of `surface_TAG` tokens per line.
    #[arg(long)]
    pub spans: PathBuf,
    /// Tagset file, one rule per line; the default rules when omitted.
    #[arg(long)]
    pub tagsets: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub max_len: usize,
    /// Accepted phrases, one per line; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rejected spans with reasons, as JSONL.
    #[arg(long)]
    pub rejections: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Generate(a) => commands::generate(a),
        Command::Run(a) => commands::run(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Extract(a) => commands::extract(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}

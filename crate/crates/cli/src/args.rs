use std::path::PathBuf;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use seqlint_core::evaluation::Metric;
use seqlint_core::{PoolStrategy, SentenceMethod, TokenScoreMethod};

#[derive(Debug, Parser)]
#[command(
    name = "seqlint",
    version,
    about = "Find label errors in token classification datasets"
)]
pub struct Cli {
    /// TOML file with sentence score hyperparameters.
    #[arg(long, global = true, env = "SEQLINT_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a CoNLL file into the canonical dataset format.
    Ingest(IngestArgs),
    /// Attach word-level probabilities pooled from subword predictions.
    Pool(PoolArgs),
    /// Compute sentence label quality scores.
    Score(ScoreArgs),
    /// Evaluate scores against ground-truth labels.
    Eval(EvalArgs),
    /// Render a report file or a dataset's noise matrix as text.
    Report(ReportArgs),
    /// Serve the review API for a scored dataset.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Average,
    Weighted,
    First,
}

impl From<Strategy> for PoolStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Average => PoolStrategy::Average,
            Strategy::Weighted => PoolStrategy::Weighted,
            Strategy::First => PoolStrategy::First,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// CoNLL column file; the last column holds the label.
    #[arg(long)]
    pub conll: PathBuf,
    /// Corrected copy of the same file whose labels become the ground truth.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Subword probabilities to pool onto the words.
    #[arg(long, conflicts_with = "word_probs")]
    pub subword_probs: Option<PathBuf>,
    /// Word-level probabilities, one row per token.
    #[arg(long)]
    pub word_probs: Option<PathBuf>,
    #[arg(
        long,
        value_enum,
        default_value = "average",
        requires = "subword_probs"
    )]
    pub pool: Strategy,
    /// Sum B-/I- columns into entity classes.
    #[arg(long)]
    pub merge_prefixes: bool,
    /// Keep sentences and tokens exactly as read.
    #[arg(long)]
    pub no_preprocess: bool,
    /// Comma-separated class names; defaults to the nine CoNLL-2003 classes.
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<String>>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub subword_probs: PathBuf,
    #[arg(long, value_enum, default_value = "average")]
    pub pool: Strategy,
    #[arg(long)]
    pub merge_prefixes: bool,
    #[arg(long, short)]
    pub out: PathBuf,
}

fn method_choices() -> Vec<&'static str> {
    let mut v = vec!["all", "main"];
    v.extend(SentenceMethod::ALL.iter().map(|m| m.name()));
    v
}

fn token_choices() -> Vec<&'static str> {
    let mut v = vec!["all"];
    v.extend(TokenScoreMethod::NAMES);
    v
}

/// Method selection shared by `score` and `eval`.
#[derive(Debug, Args)]
pub struct MethodArgs {
    /// Sentence score methods; `all` selects every method, `main` the main comparison table.
    #[arg(long, value_delimiter = ',', default_value = "worst-token", value_parser = PossibleValuesParser::new(method_choices()))]
    pub method: Vec<String>,
    /// Token score methods for the token-based sentence methods [default: all with
    /// `--method all` or `main`, self-confidence otherwise].
    #[arg(long, value_delimiter = ',', value_parser = PossibleValuesParser::new(token_choices()))]
    pub token_score: Vec<String>,
}

/// Overrides for individual hyperparameters.
#[derive(Debug, Args)]
pub struct ScoreOverrides {
    /// Weight of the tertiary term in bad-token-counts-avg/min.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Offset inside the logarithm of the product score.
    #[arg(long)]
    pub c: Option<f64>,
    /// Number of worst tokens in expected-bad and expected-alt.
    #[arg(long)]
    pub j: Option<usize>,
    /// Penalty for flagged tokens in worst-token-min-alt.
    #[arg(long)]
    pub d: Option<f64>,
    /// Softmin temperature.
    #[arg(long)]
    pub temperature: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub methods: MethodArgs,
    #[command(flatten)]
    pub overrides: ScoreOverrides,
    /// Score file; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    Sentence,
    Token,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub methods: MethodArgs,
    #[command(flatten)]
    pub overrides: ScoreOverrides,
    /// `token` ranks individual tokens by each token score.
    #[arg(long, value_enum, default_value = "sentence")]
    pub unit: UnitArg,
    #[arg(long, value_delimiter = ',', default_value = "auprc,auroc,lift,precision-at-k", value_parser = PossibleValuesParser::new(Metric::NAMES))]
    pub metrics: Vec<String>,
    /// Lift cutoff; defaults to the number of errors.
    #[arg(long)]
    pub top_t: Option<usize>,
    /// Precision@K cutoffs; defaults to multiples of 10 up to 1000.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Line-delimited report records.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Precision-recall curve points per combination.
    #[arg(long)]
    pub pr_curves: Option<PathBuf>,
    /// Do not print the text table.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true))]
pub struct ReportArgs {
    /// Report file written by `eval --out`.
    #[arg(long, group = "source")]
    pub reports: Option<PathBuf>,
    /// Dataset with ground truth whose noise matrix is printed.
    #[arg(long, group = "source")]
    pub noise_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub scores: PathBuf,
    /// Review state file; created on the first verdict.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Port to listen on; 0 picks a free one.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory holding the review UI bundle.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
    /// Directory that exports are written to; defaults to the state file's directory.
    #[arg(long)]
    pub export_dir: Option<PathBuf>,
}

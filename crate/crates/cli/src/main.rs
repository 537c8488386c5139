//! `archrec` command-line tool.
//!
//! Exit status is 0 on success, 1 when a command fails on its input (with an
//! `error[kind]: message` line on stderr) and 2 on usage errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "archrec", version, about = "Architecture recovery and comparison workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan a source tree into a dependency graph and a token corpus.
    Extract(ExtractArgs),
    /// Recover an architecture with one of the recovery methods.
    Recover {
        #[command(subcommand)]
        method: RecoverCommand,
    },
    /// Compare two architectures.
    Compare(CompareArgs),
    /// Detect concern-based smells in a recovered architecture.
    Smells(SmellsArgs),
    /// Run one trial described by a JSON file.
    Evaluate(EvaluateArgs),
    /// Recover several versions of a system and compare consecutive ones.
    Study(StudyArgs),
    /// Run every trial on one system and summarise the verdicts.
    Scorecard(ScorecardArgs),
}

/// Options that control how source files become facts.
#[derive(Debug, Clone, Args)]
struct ExtractFlags {
    /// File extensions to scan, without the dot.
    #[arg(long = "ext", value_delimiter = ',', default_value = "java")]
    extensions: Vec<String>,
    /// Leave comment text out of the corpus.
    #[arg(long)]
    strip_comments: bool,
    /// Drop a leading comment block that reads like a license.
    #[arg(long)]
    strip_license: bool,
    /// System name whose words become stop words.
    #[arg(long)]
    system_name: Option<String>,
    /// Extra stop words, whitespace separated, `#` comments.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Keep tokens unstemmed.
    #[arg(long)]
    no_stem: bool,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    src: PathBuf,
    /// Dependency facts (RSF).
    #[arg(long)]
    out: PathBuf,
    /// Token corpus (JSON).
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    flags: ExtractFlags,
    #[arg(long)]
    json: bool,
}

/// ARC parameters. The entity cap is per command because ACDC has its own.
#[derive(Debug, Clone, Args)]
struct ArcOpts {
    #[arg(long, default_value_t = 100)]
    topics: usize,
    /// Defaults to max(2, round(entities / 10)).
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, env = "ARCHREC_SEED", default_value_t = 1)]
    seed: u64,
    /// Document-topic prior; defaults to 50 / topics.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    /// Gibbs sweeps.
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Weight of the dependency features against the topic features.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Words listed per topic in the concerns file.
    #[arg(long, default_value_t = 10)]
    top_words: usize,
}

#[derive(Debug, Subcommand)]
enum RecoverCommand {
    /// One cluster per package.
    Pkg(PkgArgs),
    /// Clusters around subgraph dominators.
    Acdc(AcdcArgs),
    /// Clusters by topic and dependency features.
    Arc(ArcArgs),
}

#[derive(Debug, Args)]
struct PkgArgs {
    #[arg(long)]
    deps: PathBuf,
    /// Adds the corpus documents as entities (entities without edges are
    /// not in the RSF).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Architecture RSF; printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct AcdcArgs {
    #[arg(long)]
    deps: PathBuf,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refuse systems with more entities than this.
    #[arg(long)]
    max_entities: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ArcArgs {
    #[arg(long)]
    deps: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Topic words and cluster topic weights (JSON).
    #[arg(long)]
    concerns: Option<PathBuf>,
    #[command(flatten)]
    arc: ArcOpts,
    #[arg(long, default_value_t = 5000)]
    max_entities: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Metric {
    A2a,
    Mojofm,
    Cvg,
}

#[derive(Debug, Args)]
struct CompareArgs {
    metric: Metric,
    /// First architecture (RSF, or JSON when the name ends in `.json`).
    a: PathBuf,
    b: PathBuf,
    /// Cluster match threshold for cvg.
    #[arg(long)]
    th: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SmellsArgs {
    #[arg(long)]
    arch: PathBuf,
    #[arg(long)]
    concerns: PathBuf,
    #[arg(long, default_value_t = 5)]
    overload_th: usize,
    #[arg(long, default_value_t = 3)]
    scatter_th: usize,
    #[arg(long, default_value_t = 0.1)]
    relevance_th: f64,
    #[arg(long, default_value_t = 0.5)]
    orthogonality_th: f64,
    /// Topics at most this divergent count as one concern.
    #[arg(long, default_value_t = 0.1)]
    duplicate_th: f64,
    /// Also report license, system-name, duplicate and junk topics.
    #[arg(long)]
    audit: bool,
    #[arg(long, requires = "audit")]
    system_name: Option<String>,
    #[arg(long, requires = "audit")]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TrialArg {
    Determinism,
    Proportionality,
    Continuity,
    Isolation,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Pkg,
    Acdc,
    Arc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScopeArg {
    PerVersion,
    Shared,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    kind: TrialArg,
    #[arg(long)]
    method: MethodArg,
    /// Trial description (JSON). Relative paths inside it are taken from
    /// the file's directory.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StudyArgs {
    /// Version directories, oldest first. A directory holding `deps.rsf`
    /// (and optionally `corpus.json`) is read as facts, otherwise as source.
    #[arg(long, value_delimiter = ',', required = true)]
    versions: Vec<PathBuf>,
    #[arg(long)]
    method: MethodArg,
    #[arg(long, default_value = "per-version")]
    topic_scope: ScopeArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: ExtractFlags,
    #[command(flatten)]
    arc: ArcOpts,
    /// Entity cap of the chosen method (ARC defaults to 5000).
    #[arg(long)]
    max_entities: Option<usize>,
}

#[derive(Debug, Args)]
struct ScorecardArgs {
    #[arg(long)]
    method: MethodArg,
    #[arg(long, conflicts_with_all = ["deps", "corpus"], required_unless_present = "deps")]
    src: Option<PathBuf>,
    #[arg(long)]
    deps: Option<PathBuf>,
    #[arg(long, requires = "deps")]
    corpus: Option<PathBuf>,
    /// Scorecard settings (JSON); replaces `--runs` and the method flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[command(flatten)]
    flags: ExtractFlags,
    #[command(flatten)]
    arc: ArcOpts,
    #[arg(long)]
    max_entities: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind, e.message);
            ExitCode::from(1)
        }
    }
}

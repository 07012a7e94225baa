//! Experiment driver over the `anchored` library: reproducible enumeration,
//! percolation, branching-process, and random-walk runs emitting stable
//! JSON/CSV artifacts.
//!
//! Every invocation writes exactly one artifact (to `--out`, or stdout) that
//! embeds the resolved configuration, so the artifact alone reproduces the
//! run. Trial ensembles derive per-trial seeds from the master `--seed` by
//! index and aggregate in index order, so payload bytes are independent of
//! `--workers`.

mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Errors split by exit code: `Usage` (2) for invalid flag values or flag
/// combinations, `Run` (1) for failures while executing a valid request.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(String),
}

#[derive(Parser)]
#[command(
    name = "anchored",
    version,
    about = "Enumeration, percolation, branching, and random-walk experiments \
             on trees, lattices, stretched trees, and lamplighter graphs"
)]
struct Cli {
    /// Master seed; each trial derives an independent stream from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the artifact to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Artifact format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for trial ensembles (default: one per core).
    /// Results never depend on this value.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact expansion profile f(k) and its anchored tail around the basepoint
    Expansion(commands::ExpansionArgs),
    /// Counts of rooted connected sets indexed by boundary size
    Animals(commands::AnimalsArgs),
    /// Percolation survival curves and finite-cluster boundary histograms
    Percolate(commands::PercolateArgs),
    /// Simple and delayed random walks on (percolated) lamplighter graphs
    Walk(commands::WalkArgs),
    /// Supercritical branching decomposition and conditioned size tails
    Gw(commands::GwArgs),
    /// Expansion profiles of trees with randomly stretched edges
    Stretch(commands::StretchArgs),
    /// Lamplighter word-metric table over a ball around the identity
    Dist(commands::DistArgs),
    /// Closed-form retention thresholds implied by an expansion constant
    Thresholds(commands::ThresholdsArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: usage: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Run(format!("worker pool: {e}")))?;
    }

    let mut artifact = match &cli.command {
        Command::Expansion(args) => commands::expansion(args, cli.seed)?,
        Command::Animals(args) => commands::animals(args, cli.seed)?,
        Command::Percolate(args) => commands::percolate(args, cli.seed)?,
        Command::Walk(args) => commands::walk(args, cli.seed)?,
        Command::Gw(args) => commands::gw(args, cli.seed)?,
        Command::Stretch(args) => commands::stretch(args, cli.seed)?,
        Command::Dist(args) => commands::dist(args, cli.seed)?,
        Command::Thresholds(args) => commands::thresholds(args, cli.seed)?,
    };

    // The format belongs to the reproducible configuration; the output path
    // and worker count do not (payload bytes are independent of both).
    if let serde_json::Value::Object(map) = &mut artifact.config {
        map.insert("format".into(), serde_json::Value::String(cli.format.name().into()));
    }

    let text = output::render(&artifact, cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Run(format!("writing {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Run(format!("writing stdout: {e}")))?,
    }
    Ok(())
}

mod commands;
mod config;
mod format;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use enaqt::optimize::Solver;

#[derive(Debug, Parser)]
#[command(name = "enaqt", version, about = "Transport efficiency and optimal rates on the fully connected network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the solver named in the configuration.
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverArg>,
    /// Overrides the random seed of `validate`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and multistart searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate η, τ and R on a one- or two-axis grid (CSV).
    Sweep,
    /// Maximize the objective over the trapping/dephasing rate plane (JSON).
    Optimize,
    /// Run the randomized cross-solver equivalence suites (JSON).
    Validate,
    /// Reduced-state time series with accumulated trap and decay yields (CSV).
    Trajectory,
    /// Closed-form limiting values for one parameter point (JSON).
    Limits,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SolverArg {
    ClosedForm,
    Reduced,
    Full,
    Brute,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::ClosedForm => Solver::ClosedForm,
            SolverArg::Reduced => Solver::Reduced,
            SolverArg::Full => Solver::Full,
            SolverArg::Brute => Solver::BruteForce,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Exit 1.
    Validation(String),
    /// Exit 2.
    Config(String),
    /// Exit 3.
    Solver(enaqt::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Config(m) => write!(f, "bad config: {m}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
        }
    }
}

impl From<enaqt::Error> for CliError {
    fn from(e: enaqt::Error) -> Self {
        use enaqt::Error as E;
        match e {
            E::Invalid(_) | E::InvalidSweep(_) | E::InvalidTimes(_) => CliError::Config(e.to_string()),
            other => CliError::Solver(other),
        }
    }
}

pub struct Options {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub solver: Option<Solver>,
    pub seed: Option<u64>,
}

impl Options {
    pub fn config_path(&self) -> Result<&PathBuf, CliError> {
        self.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let opts = Options { config: cli.config, out: cli.out, solver: cli.solver.map(Into::into), seed: cli.seed };
    match cli.command {
        Command::Sweep => commands::sweep(&opts),
        Command::Optimize => commands::optimize(&opts),
        Command::Validate => validate::run(&opts),
        Command::Trajectory => commands::trajectory(&opts),
        Command::Limits => commands::limits(&opts),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("enaqt: {e}");
            ExitCode::from(e.code())
        }
    }
}

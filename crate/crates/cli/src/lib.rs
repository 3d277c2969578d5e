//! `liargame` command line: solve, bounds, sweep, verify, play and cache.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 domain or parse error,
//! 3 budget exceeded, 4 verification failure.

mod commands;
pub mod play;

use std::fmt;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liargame::{Error, Params};

pub use commands::{parse_range, SweepRow};

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "LIARGAME_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "liargame",
    version,
    about = "Exact solver and bounds for the liar game with bounded questions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact value and optimal first questions of a position.
    Solve(SolveArgs),
    /// Every lower bound for one (n, k, l) next to the exact value.
    Bounds(BoundsArgs),
    /// Bound table over a grid of (n, k, l).
    Sweep(SweepArgs),
    /// Run the property checks and print a JSON report.
    Verify(VerifyArgs),
    /// Play interactively against the solver.
    Play(PlayArgs),
    /// Build, inspect, export or import memo cache files.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    /// Lie budget l.
    #[arg(long, default_value_t = 1)]
    pub lies: usize,
    /// Question size cap k; `inf` for the unrestricted game.
    #[arg(long, default_value = "inf", value_parser = parse_cap)]
    pub cap: Cap,
}

impl GameArgs {
    pub fn params(&self) -> Result<Params, Error> {
        match self.cap.0 {
            Some(k) => Params::new(self.lies, k),
            None => Ok(Params::basic(self.lies)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cap(pub Option<u32>);

fn parse_cap(s: &str) -> Result<Cap, String> {
    match s {
        "inf" | "unbounded" => Ok(Cap(None)),
        _ => s
            .parse::<u32>()
            .ok()
            .filter(|&k| k >= 1)
            .map(|k| Cap(Some(k)))
            .ok_or_else(|| format!("cap must be a positive integer or `inf`, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct PositionArgs {
    /// Explicit state vector, e.g. `10,44`.
    #[arg(long, conflicts_with = "n")]
    pub state: Option<String>,
    /// Start from n candidates with no answers yet.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub position: PositionArgs,
    /// List every optimal first question.
    #[arg(long)]
    pub all: bool,
    /// Extract the principal-variation strategy tree.
    #[arg(long)]
    pub tree: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Memo cache file, loaded when present and written back afterwards.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub cap: u64,
    #[arg(long, default_value_t = 1)]
    pub lies: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Inclusive range `a..b` or list `a,b,c`.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value = "2")]
    pub cap: String,
    #[arg(long, default_value = "1")]
    pub lies: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Check names or name prefixes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Budget override `key=value`, e.g. `total=6`.
    #[arg(long)]
    pub budget: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Role {
    /// You think of a number and answer; the tool asks.
    Responder,
    /// You ask; the tool answers adversarially.
    Questioner,
}

#[derive(Debug, Clone, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Role::Responder)]
    pub role: Role,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CacheAction {
    /// Solve a position and save every computed value.
    Build {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        position: PositionArgs,
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Header and summary of a cache file.
    Inspect {
        #[arg(long)]
        path: PathBuf,
    },
    /// Validate a cache file and write it out canonically.
    Export {
        #[arg(long)]
        path: PathBuf,
        /// Destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a cache file against (l, k) and copy it into place.
    Import {
        #[arg(long)]
        from: PathBuf,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::Budget(_) | Error::DepthLimit { .. } => 3,
                Error::Io(_) | Error::Policy { .. } => 1,
                _ => 2,
            },
            CliError::Usage(_) => 2,
            CliError::VerifyFailed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
            CliError::VerifyFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Core(Error::Io(e.to_string()))
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run(
    args: Vec<String>,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdin, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(
    command: Command,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    match command {
        Command::Solve(a) => commands::solve(&a, stdout, stderr),
        Command::Bounds(a) => commands::bounds(&a, stdout),
        Command::Sweep(a) => commands::sweep(&a, stdout),
        Command::Verify(a) => commands::verify(&a, stdout),
        Command::Play(a) => {
            let config = play::PlayConfig {
                params: a.game.params()?,
                n: a.n,
                role: a.role,
            };
            play::run_play(stdin, stdout, &config)?;
            Ok(())
        }
        Command::Cache { action } => commands::cache(action, stdout, stderr),
    }
}

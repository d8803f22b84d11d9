use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;

/// Exit 1 for domain failures, 2 for usage, parse and I/O problems.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Read(String, String),
    #[error("cannot write {0}: {1}")]
    Write(String, String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] osk_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(osk_core::Error::Parse(_)) => 2,
            CliError::Domain(_) | CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "osk", version, about = "Lipschitz geometry of Outer Space: distances, train tracks and axes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check graph, self-map and automorphism files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Lipschitz distance d(A, B) with its witness and candidate table.
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Also maximize over all cyclic words up to this length.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=12))]
        oracle: Option<u64>,
        /// Write the result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Candidate loops of a point.
    Candidates {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whitehead's algorithm on words.
    Whitehead {
        #[command(subcommand)]
        command: WhiteheadCommand,
    },
    /// Train-track maps.
    Tt {
        #[command(subcommand)]
        command: TtCommand,
    },
    /// Axes of fully irreducible automorphisms and experiments around them.
    Axis {
        #[command(subcommand)]
        command: AxisCommand,
    },
}

#[derive(Subcommand, Debug)]
enum WhiteheadCommand {
    /// Reduce the total length of a tuple of cyclic words.
    Minimize {
        #[arg(required = true)]
        words: Vec<String>,
        /// Rank of the free group; defaults to the largest generator used (at least 2).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=26))]
        rank: Option<u64>,
    },
    /// Decide whether a word is primitive.
    Primitive {
        word: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=26))]
        rank: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum TtCommand {
    /// Check the train-track property and irreducibility.
    Verify { map: PathBuf },
    /// Perron-Frobenius eigenvalue, lengths and frequencies.
    Pf {
        map: PathBuf,
        /// Write the map with its PF metric.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leaf segment f^k(e).
    Leaf {
        map: PathBuf,
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..=40))]
        iterations: u64,
    },
    /// Search for a rose whose lamination Whitehead graph has no cut vertex.
    Whsearch {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        inverse: PathBuf,
        /// Starting rose; defaults to the standard rose.
        #[arg(long)]
        start: Option<PathBuf>,
        /// Write the final point.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct AxisArgs {
    /// Train-track map for φ.
    #[arg(long)]
    map: PathBuf,
    /// Train-track map for φ⁻¹.
    #[arg(long)]
    inverse: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Balls,
    Morse,
}

#[derive(Subcommand, Debug)]
enum AxisCommand {
    /// Project a point to the axis.
    Project {
        #[command(flatten)]
        axis: AxisArgs,
        point: PathBuf,
    },
    /// Length of a conjugacy class along the axis.
    Profile {
        #[command(flatten)]
        axis: AxisArgs,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = -6, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, default_value_t = 6, allow_negative_numbers = true)]
        to: i64,
    },
    /// Contraction experiment.
    Contract {
        #[command(flatten)]
        axis: AxisArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Mode::Balls)]
        mode: Mode,
        /// Largest accepted ball radius d(Y, π(Y)).
        #[arg(long, default_value_t = 1.5, value_parser = positive_f64)]
        radius_budget: f64,
    },
    /// Projection inequality probe on separated pairs.
    Probe {
        #[command(flatten)]
        axis: AxisArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Quadratic divergence check on detour paths.
    Diverge {
        #[command(flatten)]
        axis: AxisArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Ball radii; repeat the flag for several.
        #[arg(long = "radius", value_parser = positive_f64, default_values_t = [2.0, 3.0, 4.0])]
        radii: Vec<f64>,
        /// Contraction constant b′; measured from contraction and probe runs when absent.
        #[arg(long, value_parser = positive_f64)]
        b_prime: Option<f64>,
    },
    /// Projections between the axis and its translates.
    Pair {
        #[command(flatten)]
        axis: AxisArgs,
        /// Automorphism file g; the second axis is A·g.
        #[arg(long)]
        translate: PathBuf,
        /// Optional third translate for the three-axis table.
        #[arg(long)]
        third: Option<PathBuf>,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(1..=64))]
        window: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("OSK_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("OSK_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|_| commands::run(cli.command));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("osk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

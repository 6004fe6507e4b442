//! `opcrit`: exact reproduction, oracles and Monte Carlo for the
//! oriented-percolation critical point expansion.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opcrit_core::diagrams::DiagramError;
use opcrit_core::laceexp::LaceError;
use opcrit_core::mc::McError;
use opcrit_core::oracle::OracleError;
use opcrit_core::walks::WalkError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Args(String),
    #[error("resource guard: {0}")]
    Guard(String),
    #[error("identity mismatch: {0}")]
    Mismatch(String),
    #[error("output error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) | CliError::Io(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Args(_) => 4,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Guard(_) | OracleError::Walk(WalkError::Guard(_)) => {
                CliError::Guard(e.to_string())
            }
            _ => CliError::Args(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Guard(_) => CliError::Guard(e.to_string()),
            _ => CliError::Args(e.to_string()),
        }
    }
}

impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::Resource(_) | DiagramError::Walk(WalkError::Guard(_)) => {
                CliError::Guard(e.to_string())
            }
            DiagramError::Malformed { .. } => CliError::Mismatch(e.to_string()),
            _ => CliError::Args(e.to_string()),
        }
    }
}

impl From<LaceError> for CliError {
    fn from(e: LaceError) -> Self {
        match e {
            LaceError::Order { .. } | LaceError::Uncovered { .. } => CliError::Args(e.to_string()),
            LaceError::Diagram(d) => d.into(),
            LaceError::Walk(WalkError::Guard(_)) => CliError::Guard(e.to_string()),
            _ => CliError::Mismatch(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "opcrit",
    version,
    about = "Critical point of oriented percolation in high dimensions"
)]
struct Cli {
    /// Cap on worker threads (0 uses every core; 1 runs sequentially).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Perturb the walk table before checking (negative test).
    #[arg(long, global = true, hide = true)]
    fault_inject: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SeriesOpts {
    /// Highest power of s to keep.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// `paper` uses the printed multiplicities, `recomputed` the orbit counts.
    #[arg(long, default_value = "paper")]
    pub mode: String,
}

#[derive(Args, Debug, Clone)]
pub struct SimOpts {
    #[arg(long)]
    pub d: usize,
    /// Occupation parameter as `num/den`.
    #[arg(long)]
    pub p: String,
    #[arg(long = "T")]
    pub horizon: u32,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive the p_c series and run the identity suite.
    Reproduce(SeriesOpts),
    /// Run the verification suites.
    Verify {
        #[arg(long, default_value = "fast", value_parser = ["fast", "full"])]
        level: String,
    },
    /// Print the p_c series only.
    Pc(SeriesOpts),
    /// Evaluate a catalogued diagram for a target type.
    Diagram {
        #[arg(long)]
        name: String,
        /// Comma-separated exponents, e.g. `1,2,1,1`.
        #[arg(long, default_value = "")]
        params: String,
        /// Target type such as `[1,1]`; `[]` is the origin.
        #[arg(long = "type", default_value = "[]")]
        target: String,
    },
    /// Print the per-type coefficient table for one coefficient and time.
    Table {
        #[arg(long)]
        n: u8,
        #[arg(long)]
        time: u32,
        #[arg(long, default_value = "paper")]
        mode: String,
    },
    /// Exact probability of an event by enumeration.
    Oracle {
        #[arg(long)]
        d: usize,
        #[arg(long = "T")]
        horizon: u32,
        /// Event in the text syntax, e.g. `double((o,2))`.
        #[arg(long)]
        event: String,
        #[arg(long, default_value = "1")]
        p: String,
        /// Also print the probability as a polynomial in the bond probability q.
        #[arg(long)]
        poly: bool,
    },
    /// Monte Carlo estimates as CSV.
    Simulate {
        #[command(flatten)]
        sim: SimOpts,
        #[arg(long, value_parser = ["pi0", "marked", "tail", "survival"])]
        stat: String,
        /// First slice of the tail sum.
        #[arg(long, default_value_t = 5)]
        t_min: u32,
    },
    /// Finite-horizon bisection for p_c.
    Bisect {
        #[arg(long)]
        d: usize,
        #[arg(long = "T")]
        horizon: u32,
        #[arg(long, default_value_t = 200_000)]
        replicas: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// `halving` or a survival probability in (0,1).
        #[arg(long, default_value = "halving")]
        criterion: String,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value = "1")]
        low: String,
        #[arg(long, default_value = "2")]
        high: String,
    },
    /// Write the consistency report.
    Report,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli, &argv[1..]) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("opcrit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli, args: &[String]) -> Result<u8, CliError> {
    let ctx = commands::Ctx {
        args: args.to_vec(),
        sink: output::Sink::new(cli.out),
        threads: cli.threads,
        fault: cli.fault_inject,
    };
    match cli.command {
        Command::Reproduce(o) => commands::reproduce(&ctx, &o),
        Command::Verify { level } => commands::verify(&ctx, level == "full"),
        Command::Pc(o) => commands::pc(&ctx, &o),
        Command::Diagram {
            name,
            params,
            target,
        } => commands::diagram(&ctx, &name, &params, &target),
        Command::Table { n, time, mode } => commands::table(&ctx, n, time, &mode),
        Command::Oracle {
            d,
            horizon,
            event,
            p,
            poly,
        } => commands::oracle(&ctx, d, horizon, &event, &p, poly),
        Command::Simulate { sim, stat, t_min } => commands::simulate(&ctx, &sim, &stat, t_min),
        Command::Bisect {
            d,
            horizon,
            replicas,
            seed,
            criterion,
            tol,
            low,
            high,
        } => commands::bisect(
            &ctx, d, horizon, replicas, seed, &criterion, tol, &low, &high,
        ),
        Command::Report => commands::report(&ctx),
    }
}

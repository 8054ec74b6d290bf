//! Exact zero-sum game solving from the command line.
//!
//! Four subcommands: `solve` runs the oracle-driven equilibrium solver,
//! `verify` re-checks a report's certificate with fresh oracle calls,
//! `bruteforce` solves by full enumeration for cross-validation, and
//! `oracle` probes one player's best-response oracle directly.
//!
//! Exit codes: 0 success, 2 input error, 3 solver error, 4 verification
//! failure, 5 resource limit.

mod brute;
mod error;
mod oracle;
mod rational;
mod report;
mod solve;
mod spec;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use zerosum::ratlp::Sense;

#[derive(Parser)]
#[command(name = "zerosum", about = "Exact equilibria of zero-sum games", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game spec and write an equilibrium report.
    Solve {
        /// Path to the game spec file.
        spec: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check the certificate in a report against its spec.
    Verify {
        /// Path to the game spec file.
        spec: PathBuf,
        /// Path to the report to check.
        report: PathBuf,
    },
    /// Solve by enumerating every pure strategy; small games only.
    Bruteforce {
        /// Path to the game spec file.
        spec: PathBuf,
        /// Largest pure-strategy matrix (rows times columns) to accept.
        #[arg(long, default_value_t = 5000)]
        cap: u64,
    },
    /// Send a cost vector to one player's oracle and print the optimum.
    Oracle {
        /// Path to the game spec file.
        spec: PathBuf,
        /// File of whitespace-separated rationals; # starts a comment.
        #[arg(long)]
        costs: PathBuf,
        /// Whether the oracle minimizes or maximizes the costs.
        #[arg(long, value_enum, default_value_t = SenseArg::Min)]
        sense: SenseArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SenseArg {
    Min,
    Max,
}

impl From<SenseArg> for Sense {
    fn from(arg: SenseArg) -> Self {
        match arg {
            SenseArg::Min => Sense::Minimize,
            SenseArg::Max => Sense::Maximize,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { spec, out } => solve::cmd_solve(&spec, out.as_deref()),
        Command::Verify { spec, report } => verify::cmd_verify(&spec, &report),
        Command::Bruteforce { spec, cap } => brute::cmd_bruteforce(&spec, cap),
        Command::Oracle { spec, costs, sense } => {
            oracle::cmd_oracle(&spec, &costs, sense.into())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

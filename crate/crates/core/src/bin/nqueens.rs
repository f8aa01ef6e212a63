//! Command-line front end. See `nqueens --help`.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nqueens_absorb::cli::{self, CampaignOptions, CliError, RunRecord};
use nqueens_absorb::greedy::StopRule;

#[derive(Parser)]
#[command(name = "nqueens", version, about = "Random greedy + absorber n-queens construction")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one n-queens configuration and print its RunRecord as JSON.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Greedy stop: an absolute count, `holes:E` for n - ceil(n^E), or `alpha:A`.
        #[arg(long, default_value = "holes:0.7")]
        stop: StopRule,
        #[arg(long, default_value_t = cli::DEFAULT_RETRIES)]
        retries: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the greedy availability trajectory as CSV.
    Trajectory {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "holes:0.7")]
        stop: StopRule,
        #[arg(long, default_value_t = cli::DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count configurations exhaustively.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        toroidal: bool,
        /// Lift the n <= 14 guard (up to 32).
        #[arg(long)]
        allow_large: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run many independent pipelines and summarize them.
    Campaign {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "holes:0.7")]
        stop: StopRule,
        #[arg(long, default_value_t = 0)]
        retries: u32,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Also run the rank-coupling experiment at this density.
        #[arg(long)]
        coupling_p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank-coupling experiment: does the unthreatened threshold set survive?
    Coupling {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "holes:0.7")]
        stop: StopRule,
        /// Threshold density (default 1/(4n)).
        #[arg(long)]
        coupling_p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the counting witness of a stored RunRecord.
    Bound {
        record: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(args: Args) -> Result<bool, CliError> {
    match args.command {
        Command::Solve { n, seed, stop, retries, out } => {
            let record = cli::solve(n, seed, stop, retries)?;
            emit(out, &cli::to_json(&record)?)?;
            if !record.completed() {
                eprintln!("pipeline aborted after {} attempt(s)", record.attempts.len());
            }
            Ok(record.completed())
        }
        Command::Trajectory { n, seed, stop, rel_tol, out } => {
            let mut buf = Vec::new();
            cli::trajectory_csv(n, seed, stop, rel_tol, &mut buf)?;
            emit(out, &String::from_utf8(buf).expect("ascii csv"))?;
            Ok(true)
        }
        Command::Enumerate { n, toroidal, allow_large, out } => {
            emit(out, &cli::to_json(&cli::enumerate(n, toroidal, allow_large)?)?)?;
            Ok(true)
        }
        Command::Campaign { n, trials, seed, stop, retries, jobs, coupling_p, out } => {
            let opts = CampaignOptions { n, trials, seed, stop, retries, jobs, coupling_p };
            emit(out, &cli::to_json(&cli::campaign(&opts)?)?)?;
            Ok(true)
        }
        Command::Coupling { n, trials, seed, stop, coupling_p, jobs, out } => {
            emit(out, &cli::to_json(&cli::coupling(n, coupling_p, seed, stop, trials, jobs)?)?)?;
            Ok(true)
        }
        Command::Bound { record, out } => {
            let record: RunRecord = serde_json::from_str(&fs::read_to_string(record)?)?;
            emit(out, &cli::to_json(&cli::bound(&record)?)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

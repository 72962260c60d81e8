use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use seqlepski::lab::with_workers;
use seqlepski_cli::{
    run_risk, run_suite, trace_path, CliError, ExperimentConfig, Outcome, Overrides, Suite,
    EXIT_CHECK_FAILED,
};

/// Monte Carlo experiments for the sequential Lepski estimator.
#[derive(Debug, Parser)]
#[command(name = "seqlepski", version)]
struct Args {
    /// TOML scenario file.
    #[arg(long)]
    config: PathBuf,

    /// Run a diagnostic suite instead of the risk table.
    #[arg(long, value_enum)]
    suite: Option<Suite>,

    /// Write a full estimator trace for one path of length N.
    #[arg(long, value_name = "N", conflicts_with = "suite")]
    trace: Option<usize>,

    /// Override the replication count of every scenario.
    #[arg(long)]
    replications: Option<usize>,

    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,

    /// Override the master seed of every scenario.
    #[arg(long)]
    seed: Option<u64>,

    /// Exit with status 4 when a suite check fails.
    #[arg(long)]
    strict: bool,
}

fn run(args: &Args) -> Result<Outcome, CliError> {
    let overrides = Overrides {
        replications: args.replications,
        seed: args.seed,
    };
    let config = ExperimentConfig::load(&args.config, overrides)?;
    let job = || match (args.suite, args.trace) {
        (Some(suite), _) => run_suite(&config, suite),
        (None, Some(n)) => trace_path(&config, n),
        (None, None) => run_risk(&config),
    };
    with_workers(args.workers, job).map_err(|source| CliError::Numeric {
        context: "--workers".into(),
        source,
    })?
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if args.strict && outcome.failed_checks > 0 {
                eprintln!("{} check(s) failed", outcome.failed_checks);
                return ExitCode::from(EXIT_CHECK_FAILED as u8);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

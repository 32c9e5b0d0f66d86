use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kpq_cli::experiments::Status;
use kpq_cli::{exit_code, replay, run, ReplayResult, RunOptions, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "kpq", version, about = "Seeded experiments on differential subalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write report.json + tables.csv.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "KPQ_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Recompute a report and compare digests.
    Replay {
        report: PathBuf,
        #[arg(long, env = "KPQ_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Print the instance name patterns.
    ListInstances,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out, seed, jobs } => match run(&config, &RunOptions { out, seed, jobs }) {
            Ok((report, dir)) => {
                for v in &report.verdicts {
                    let status = if v.status == Status::Pass { "PASS" } else { "FAIL" };
                    println!("{status} {}: value {} limit {} ({})", v.check, v.value, v.limit, v.detail);
                }
                println!(
                    "{:?} {} -> {} in {:.2}s",
                    report.status,
                    report.config.experiment.name(),
                    dir.display(),
                    report.elapsed_seconds
                );
                exit_code(report.status)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Replay { report, jobs } => match replay(&report, jobs) {
            Ok(ReplayResult::Identical) => {
                println!("identical: {}", report.display());
                EXIT_PASS
            }
            Ok(ReplayResult::Mismatch(why)) => {
                eprintln!("mismatch: {why}");
                EXIT_FAIL
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::ListInstances => {
            for (name, about) in kpq_core::algebra::registry() {
                println!("{name:<20} {about}");
            }
            EXIT_PASS
        }
    };
    ExitCode::from(code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use comic_lab::config::ExperimentId;
use comic_lab::experiments::description;
use comic_lab::record::RunStatus;
use comic_lab::runner::with_jobs;
use comic_lab::{run_experiment, verify_record, ExperimentConfig, LabError, RunOptions, VerifyOptions};

#[derive(Parser)]
#[command(name = "comic-lab", version, about = "Particle-number sweeps and parameter estimation for the 1-D ADE")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config.
    Run {
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output root directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed; overrides COMIC_LAB_SEED, which overrides the config.
        #[arg(long, env = "COMIC_LAB_SEED")]
        seed: Option<u64>,
    },
    /// Check a run record against its files and recompute a sample of points.
    Verify {
        record: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the canonical experiments.
    ListExperiments,
}

fn run(cli: Cli) -> Result<bool, LabError> {
    match cli.command {
        Command::Run { config, jobs, out, seed } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run_experiment(&cfg, &RunOptions { out, jobs, seed })?;
            let r = &outcome.record;
            for s in &r.series {
                match (&s.sweep.as_ref().and_then(|w| w.argmin.as_ref()), &s.error) {
                    (_, Some(e)) => println!("{:<24} FAILED: {e}", s.name),
                    (Some(a), _) => println!("{:<24} argmin n = {} (bracket {}..{})", s.name, a.n, a.bracket.0, a.bracket.1),
                    (None, _) => println!("{:<24} {} files", s.name, s.files.len()),
                }
            }
            println!("record: {}", outcome.record_path.display());
            if r.status == RunStatus::Partial {
                eprintln!("run finished with failures; see {}", outcome.dir.join("summary.txt").display());
            }
            Ok(r.status == RunStatus::Complete)
        }
        Command::Verify { record, jobs } => {
            let report = with_jobs(jobs, || verify_record(&record, VerifyOptions::default()))??;
            println!("{report}");
            Ok(report.passed())
        }
        Command::ListExperiments => {
            for id in ExperimentId::CANONICAL {
                println!("{id:<4} {}", description(id));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

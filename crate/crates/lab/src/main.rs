use std::path::PathBuf;
use std::process::ExitCode;

use apair_lab::{run_cli, Overrides};
use clap::Parser;

/// Run one verification experiment and write its report.
#[derive(Parser)]
#[command(name = "lab", version)]
struct Cli {
    /// commbound, expfactor, techlemma, compose, bott, perturb or appendixB
    experiment: Option<String>,
    /// Same as the positional argument.
    #[arg(long = "experiment", conflicts_with = "experiment")]
    experiment_flag: Option<String>,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: lab-out).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        experiment: cli.experiment.or(cli.experiment_flag),
        seed: cli.seed,
        out: cli.out,
    };
    match run_cli(cli.config.as_deref(), overrides) {
        Ok((cfg, outcome)) => {
            for c in &outcome.checks {
                let status = match (c.pass, c.informational) {
                    (true, _) => "PASS",
                    (false, true) => "INFO",
                    (false, false) => "FAIL",
                };
                println!("{status} {} ({}/{})", c.id, c.passed, c.total);
            }
            if !outcome.certificates.is_empty() {
                let passed = outcome.certificates.iter().filter(|c| c.pass).count();
                println!("certificates {passed}/{}", outcome.certificates.len());
            }
            println!("report: {}", cfg.out.join("report.json").display());
            if outcome.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

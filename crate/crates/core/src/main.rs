use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use basta_core::cli::{
    cmd_analytic, cmd_simulate, cmd_sweep, cmd_verify, parse_config, CliError, ExperimentConfig,
    EXIT_CHECK_FAILED, EXIT_OK,
};
use basta_core::numfmt::sig9;
use basta_core::verify::CheckResult;

/// Discrete-time queue simulator and arrivals-see-time-averages checker.
#[derive(Parser)]
#[command(name = "basta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write distributions.csv and summary.json
    Simulate(Common),
    /// Evaluate the birth-death closed form and write analytic.csv
    Analytic(Common),
    /// Simulate, run the checks and write checks.csv
    Verify(Common),
    /// Run the checks over the config's grid and write sweep.csv
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = parse_config(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn report_checks(checks: &[CheckResult]) -> i32 {
    for c in checks {
        println!(
            "{} {} statistic={} threshold={}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            sig9(c.statistic),
            sig9(c.threshold)
        );
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Simulate(c) => {
            let report = cmd_simulate(&c.load()?, &c.out)?;
            println!(
                "slots={} arrivals={} lambda_hat={}",
                report.total_slots_observed(),
                report.arrival_events(),
                sig9(report.lambda_hat())
            );
            Ok(EXIT_OK)
        }
        Command::Analytic(c) => {
            let pmf = cmd_analytic(&c.load()?, &c.out)?;
            println!(
                "source={} states={} tail_mass={}",
                pmf.source,
                pmf.probs.len(),
                sig9(pmf.tail_mass)
            );
            Ok(EXIT_OK)
        }
        Command::Verify(c) => Ok(report_checks(&cmd_verify(&c.load()?, &c.out)?)),
        Command::Sweep(c) => Ok(report_checks(&cmd_sweep(&c.load()?, &c.out)?)),
    }
}

fn main() -> ExitCode {
    let threads = std::env::var("BASTA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

//! `simulate`, `analytic`, `verify` and `sweep`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use super::config::{ConfigError, ExperimentConfig};
use super::output::{self, round9, AnalyticSummary, Summary};
use crate::analytic::{pa_distribution_rule, AnalyticPmf, BirthDeathSpec, HazardFn};
use crate::engine::run_simulation;
use crate::model::{ArrivalSpec, HazardIndex, ServiceSpec, ValidatedSpec};
use crate::numfmt::sig9;
use crate::report::EmpiricalReport;
use crate::verify::{
    check_basta, check_epoch_equivalence, check_theorem31, compare_sim_analytic, CheckResult,
    VerifyError,
};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Write { .. } | CliError::Config(ConfigError::Io { .. }) => EXIT_IO,
            CliError::Config(_) | CliError::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Write { path, source })
}

fn validated(cfg: &ExperimentConfig) -> Result<ValidatedSpec, CliError> {
    Ok(cfg.validated().map_err(ConfigError::from)?)
}

/// Simulate and write `distributions.csv` and `summary.json`.
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<EmpiricalReport, CliError> {
    let spec = validated(cfg)?;
    let report = run_simulation(&spec);
    let summary = Summary {
        rule: cfg.rule.to_string(),
        lambda_hat: round9(report.lambda_hat()),
        arrival_events: report.arrival_events(),
        total_slots: report.total_slots_observed(),
        stable: spec.is_stable(),
        seed: cfg.seed,
        replication_seeds: (0..u64::from(cfg.replications))
            .map(|r| cfg.seed.wrapping_add(r))
            .collect(),
        utilization: round9(spec.utilization()),
    };
    write_file(out, "distributions.csv", &output::distribution_csv(&report))?;
    write_file(out, "summary.json", &output::to_json(&summary))?;
    Ok(report)
}

/// Birth-death product form for the config's rule. Needs Bernoulli
/// arrivals, geometric or hazard service and a stable queue.
pub fn analytic_for(cfg: &ExperimentConfig) -> Result<AnalyticPmf, CliError> {
    let alpha = match cfg.arrival {
        ArrivalSpec::Bernoulli { alpha } => alpha,
        _ => {
            return Err(CliError::Infeasible(
                "analytic form needs bernoulli arrivals".into(),
            ))
        }
    };
    let hazard = HazardFn::from_service(&cfg.service).ok_or_else(|| {
        CliError::Infeasible(crate::analytic::AnalyticError::GeneralService.to_string())
    })?;
    pa_distribution_rule(&BirthDeathSpec {
        alpha,
        hazard,
        rule: cfg.rule,
    })
    .map_err(|e| CliError::Infeasible(e.to_string()))
}

/// Write `analytic.csv` and `analytic.json`.
pub fn cmd_analytic(cfg: &ExperimentConfig, out: &Path) -> Result<AnalyticPmf, CliError> {
    let spec = validated(cfg)?;
    if !spec.is_stable() {
        return Err(CliError::Infeasible(format!(
            "unstable: utilization {} >= 1",
            sig9(spec.utilization())
        )));
    }
    let pmf = analytic_for(cfg)?;
    let summary = AnalyticSummary {
        rule: cfg.rule.to_string(),
        source: pmf.source.to_string(),
        tail_mass: round9(pmf.tail_mass),
        states: pmf.probs.len(),
    };
    write_file(out, "analytic.csv", &output::analytic_csv(&pmf))?;
    write_file(out, "analytic.json", &output::to_json(&summary))?;
    Ok(pmf)
}

fn no_arrivals(name: &str, threshold: f64) -> CheckResult {
    CheckResult::new(name, f64::NAN, threshold, Vec::new())
}

/// Every applicable check for one simulated config. Unstable specs get the
/// sample-path identity only.
pub fn run_checks(cfg: &ExperimentConfig, spec: &ValidatedSpec, report: &EmpiricalReport) -> Vec<CheckResult> {
    let th = &cfg.thresholds;
    let identity = match check_theorem31(report) {
        Ok(mut c) => {
            c.threshold = th.identity;
            c.passed = c.statistic <= th.identity;
            c
        }
        Err(_) => no_arrivals("theorem31_identity", th.identity),
    };
    let mut checks = vec![identity];
    if !spec.is_stable() {
        return checks;
    }
    match check_basta(report, th.basta) {
        Ok(c) => checks.push(c),
        Err(VerifyError::NoArrivals) => {
            checks.push(no_arrivals("basta_prearrival_vs_pa", th.basta));
            return checks;
        }
        Err(e) => unreachable!("{e}"),
    }
    if cfg.arrival.is_state_independent() {
        let thr = if cfg.rule == crate::model::SchedulingRule::LaDf {
            th.ladf
        } else {
            th.epoch
        };
        checks.extend(check_epoch_equivalence(report, &cfg.service, thr).unwrap_or_default());
    }
    let analytic_applies = matches!(cfg.arrival, ArrivalSpec::Bernoulli { .. })
        && match &cfg.service {
            ServiceSpec::Geometric { .. } => true,
            ServiceSpec::Hazard { index, .. } => *index == HazardIndex::PreArrival,
            ServiceSpec::IidPmf { .. } => false,
        };
    if analytic_applies {
        if let Ok(pmf) = analytic_for(cfg) {
            if let Ok(c) = compare_sim_analytic(report, &pmf, th.analytic) {
                checks.push(c);
            }
        }
    }
    checks
}

/// Simulate, run the checks, write `checks.csv`. Returns the checks; the
/// caller exits 1 unless all passed.
pub fn cmd_verify(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<CheckResult>, CliError> {
    let spec = validated(cfg)?;
    let report = run_simulation(&spec);
    let checks = run_checks(cfg, &spec, &report);
    write_file(out, "checks.csv", &output::check_csv(&checks))?;
    Ok(checks)
}

pub const SWEEP_HEADER: &str = "cell,rule,alpha,beta,seed,stable,check,statistic,threshold,passed";

/// Run every grid cell (in parallel) and write `sweep.csv` in cell order.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<CheckResult>, CliError> {
    let cells = cfg.cells().map_err(|e| CliError::Infeasible(e.to_string()))?;
    let specs = cells
        .iter()
        .map(validated)
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Vec<CheckResult>> = cells
        .par_iter()
        .zip(specs.par_iter())
        .map(|(cell, spec)| run_checks(cell, spec, &run_simulation(spec)))
        .collect();

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for (i, ((cell, spec), checks)) in cells.iter().zip(&specs).zip(&results).enumerate() {
        let alpha = match cell.arrival {
            ArrivalSpec::Bernoulli { alpha } => sig9(alpha),
            _ => String::new(),
        };
        let beta = match cell.service {
            ServiceSpec::Geometric { beta } => sig9(beta),
            _ => String::new(),
        };
        for c in checks {
            let _ = writeln!(
                csv,
                "{i},{},{alpha},{beta},{},{},{},{},{},{}",
                cell.rule,
                cell.seed,
                spec.is_stable(),
                c.name,
                sig9(c.statistic),
                sig9(c.threshold),
                c.passed
            );
        }
    }
    write_file(out, "sweep.csv", &csv)?;
    Ok(results.into_iter().flatten().collect())
}

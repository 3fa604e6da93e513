//! Emitted file formats. Floats carry 9 significant digits.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analytic::AnalyticPmf;
use crate::numfmt::sig9;
use crate::report::EmpiricalReport;
use crate::verify::CheckResult;

pub const DISTRIBUTION_HEADER: &str = "n,pi_edge,pi_center,pi_pa,pi_prearrival,lambda_n";

/// Round to 9 significant digits so JSON output matches the CSV precision.
pub fn round9(x: f64) -> f64 {
    if x.is_finite() {
        sig9(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

/// Distribution table: tracked states up to the last one observed, plus an
/// `overflow` row when the overflow bucket is nonempty. Empty cells mark
/// undefined estimates (no arrivals, or no potential-arrival epochs at n).
pub fn distribution_csv(report: &EmpiricalReport) -> String {
    let edge = report.pi_edge();
    let center = report.pi_center();
    let pa = report.pi_pa();
    let pre = report.pi_prearrival();
    let lambda_n = report.lambda_n_hat();
    let overflow = report.overflow_index();
    let last = report.last_nonzero_bin().min(report.max_tracked_state());

    let mut out = String::from(DISTRIBUTION_HEADER);
    out.push('\n');
    let mut row = |label: String, i: usize| {
        let pre_cell = pre.as_ref().map(|p| sig9(p[i])).unwrap_or_default();
        let lam_cell = lambda_n[i].map(sig9).unwrap_or_default();
        let _ = writeln!(
            out,
            "{label},{},{},{},{pre_cell},{lam_cell}",
            sig9(edge[i]),
            sig9(center[i]),
            sig9(pa[i]),
        );
    };
    for n in 0..=last {
        row(n.to_string(), n);
    }
    if report.last_nonzero_bin() == overflow {
        row("overflow".to_string(), overflow);
    }
    out
}

pub fn analytic_csv(pmf: &AnalyticPmf) -> String {
    let mut out = String::from("n,pi_pa\n");
    for (n, p) in pmf.probs.iter().enumerate() {
        let _ = writeln!(out, "{n},{}", sig9(*p));
    }
    out
}

pub const CHECK_HEADER: &str = "name,statistic,threshold,passed";

pub fn check_csv(checks: &[CheckResult]) -> String {
    let mut out = String::from(CHECK_HEADER);
    out.push('\n');
    for c in checks {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            c.name,
            sig9(c.statistic),
            sig9(c.threshold),
            c.passed
        );
    }
    out
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub rule: String,
    pub lambda_hat: f64,
    pub arrival_events: u64,
    pub total_slots: u64,
    pub stable: bool,
    pub seed: u64,
    pub replication_seeds: Vec<u64>,
    pub utilization: f64,
}

#[derive(Debug, Serialize)]
pub struct AnalyticSummary {
    pub rule: String,
    pub source: String,
    pub tail_mass: f64,
    pub states: usize,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}

//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p basta-core --test acceptance -- --nocapture`.

mod common;

use std::fs;
use std::time::Instant;

use basta_core::analytic::{
    geo_closed_form, ladf_prearrival_from_edge, pa_distribution_rule, ArrivalRates,
    BirthDeathSpec, HazardFn,
};
use basta_core::cli::{cmd_verify, parse_config_str};
use basta_core::verify::{check_basta, check_epoch_equivalence, check_theorem31, compare_sim_analytic};
use basta_core::{
    run_simulation, ArrivalSpec, EmpiricalReport, HazardIndex, SchedulingRule, ServiceSpec,
};
use common::{arrival_laws, model, service_laws, tv, two_server_hazard};

const T: u64 = 1_000_000;
const WARMUP: u64 = 10_000;
const SEED: u64 = 20_240_601;
const BERN: ArrivalSpec = ArrivalSpec::Bernoulli { alpha: 0.3 };
const GEO: ServiceSpec = ServiceSpec::Geometric { beta: 0.5 };

struct Ledger {
    failures: Vec<u32>,
}

impl Ledger {
    fn record(&mut self, id: u32, passed: bool, detail: String) {
        println!("criterion {id:>2}: {} {detail}", if passed { "PASS" } else { "FAIL" });
        if !passed {
            self.failures.push(id);
        }
    }
}

fn info(detail: String) {
    println!("     info    : {detail}");
}

fn run(rule: SchedulingRule, arrival: ArrivalSpec, service: ServiceSpec) -> EmpiricalReport {
    run_simulation(&model(rule, arrival, service, T, WARMUP, SEED))
}

fn hazard() -> HazardFn {
    HazardFn::new(vec![0.5], 0.75)
}

fn analytic(rule: SchedulingRule) -> basta_core::analytic::AnalyticPmf {
    pa_distribution_rule(&BirthDeathSpec {
        alpha: 0.3,
        hazard: hazard(),
        rule,
    })
    .unwrap()
}

fn criterion_1(ledger: &mut Ledger) {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for rule in SchedulingRule::ALL {
        for arrival in arrival_laws() {
            for service in service_laws() {
                let r = run_simulation(&model(rule, arrival.clone(), service, 100_000, 0, SEED));
                worst = worst.max(check_theorem31(&r).unwrap().statistic);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ledger.record(
        1,
        worst <= 1e-12 && secs < 5.0,
        format!("identity max residual {worst:.3e} (<= 1e-12) over 45 configs in {secs:.2}s (< 5s)"),
    );
}

fn criteria_2_3_4(ledger: &mut Ledger) {
    let reports: Vec<_> = SchedulingRule::ALL
        .iter()
        .map(|&rule| (rule, run(rule, BERN, GEO)))
        .collect();

    let mut ok = true;
    let mut parts = Vec::new();
    for (rule, r) in &reports {
        let c = check_basta(r, 0.01).unwrap();
        ok &= c.passed;
        parts.push(format!("{rule}={:.4}", c.statistic));
    }
    ledger.record(2, ok, format!("TV(A,PA) <= 0.01: {}", parts.join(" ")));

    let mut ok = true;
    let mut parts = Vec::new();
    for (rule, r) in reports.iter().filter(|(rule, _)| *rule != SchedulingRule::LaDf) {
        for c in check_epoch_equivalence(r, &GEO, 0.01).unwrap() {
            ok &= c.passed;
            if c.threshold.is_finite() {
                parts.push(format!("{rule}:{}={:.4}", c.name.trim_start_matches("epoch_prearrival_vs_"), c.statistic));
            }
        }
    }
    ledger.record(3, ok, format!("epoch TV <= 0.01: {}", parts.join(" ")));

    let ladf = &reports.iter().find(|(r, _)| *r == SchedulingRule::LaDf).unwrap().1;
    let pi_a = ladf.pi_prearrival().unwrap();
    let cf = geo_closed_form(0.3, 0.5, SchedulingRule::LaDf).unwrap();
    let d = tv(&pi_a, &cf.fold_to(ladf.max_tracked_state()));
    let gap = (pi_a[0] - 0.571429).abs();
    ledger.record(
        4,
        gap <= 0.01 && d <= 0.01,
        format!("LA-DF pi_A(0)={:.4} (|.-0.571429| <= 0.01), TV to (1-g)g^n = {d:.4} (<= 0.01)", pi_a[0]),
    );
}

fn criterion_5(ledger: &mut Ledger) {
    let mut ok = true;
    let mut parts = Vec::new();
    for rule in SchedulingRule::ALL {
        let r = run(rule, BERN, two_server_hazard(HazardIndex::PreArrival));
        let c = compare_sim_analytic(&r, &analytic(rule), 0.015).unwrap();
        ok &= c.passed;
        parts.push(format!("{rule}={:.4}", c.statistic));
    }
    let geo = |rule| {
        pa_distribution_rule(&BirthDeathSpec {
            alpha: 0.3,
            hazard: HazardFn::constant(0.5),
            rule,
        })
        .unwrap()
        .probs[0]
    };
    let mut anchors = true;
    for rule in SchedulingRule::ALL {
        let want = match rule {
            SchedulingRule::LasDa | SchedulingRule::LaAf => 0.4,
            _ => 0.571429,
        };
        anchors &= (geo(rule) - want).abs() < 1e-6;
    }
    ledger.record(
        5,
        ok && anchors,
        format!(
            "hazard sim vs product form TV <= 0.015: {}; anchors 0.4/0.571429 {}",
            parts.join(" "),
            if anchors { "ok" } else { "off" }
        ),
    );

    // the same comparison for the trial-indexed hazard model
    let mut parts = Vec::new();
    for rule in SchedulingRule::ALL {
        let r = run(rule, BERN, two_server_hazard(HazardIndex::AtTrial));
        let c = compare_sim_analytic(&r, &analytic(rule), 0.015).unwrap();
        parts.push(format!("{rule}={:.4}", c.statistic));
    }
    info(format!("trial-indexed hazard vs product form TV: {}", parts.join(" ")));
}

fn criterion_6(ledger: &mut Ledger) {
    let mut ok = true;
    let mut parts = Vec::new();
    for rule in SchedulingRule::ALL {
        let r = run(rule, BERN, ServiceSpec::IidPmf { pmf: vec![0.0, 0.0, 1.0] });
        let c = check_basta(&r, 0.01).unwrap();
        ok &= c.passed;
        parts.push(format!("{rule}={:.4}", c.statistic));
    }
    ledger.record(6, ok, format!("deterministic 2-slot service TV(A,PA) <= 0.01: {}", parts.join(" ")));
}

fn criterion_7(ledger: &mut Ledger) {
    let r = run(
        SchedulingRule::LaDf,
        ArrivalSpec::Batch {
            pmf: vec![0.7, 0.2, 0.1],
        },
        ServiceSpec::Geometric { beta: 0.7 },
    );
    let c = check_basta(&r, 0.01).unwrap();
    ledger.record(
        7,
        c.passed,
        format!("batch LA-DF TV(A,PA) = {:.4} (<= 0.01), {} arrival events", c.statistic, r.arrival_events()),
    );
}

fn criterion_8(ledger: &mut Ledger) {
    let r = run(
        SchedulingRule::LaAf,
        ArrivalSpec::StateDependent {
            alphas: vec![0.5],
            tail_alpha: 0.1,
        },
        GEO,
    );
    let d = check_basta(&r, 0.01).unwrap().statistic;
    let id = check_theorem31(&r).unwrap();
    ledger.record(
        8,
        d >= 0.05 && id.passed,
        format!("state-dependent LA-AF TV(A,PA) = {d:.4} (>= 0.05), identity residual {:.3e}", id.statistic),
    );
}

fn criterion_9(ledger: &mut Ledger) {
    let relation = |service: ServiceSpec, hazard: HazardFn| {
        let r = run(SchedulingRule::LaDf, BERN, service);
        let predicted =
            ladf_prearrival_from_edge(&ArrivalRates::constant(0.3), &hazard, &r.pi_edge()).unwrap();
        tv(&r.pi_prearrival().unwrap(), &predicted.probs)
    };
    let geo = relation(GEO, HazardFn::constant(0.5));
    let haz = relation(two_server_hazard(HazardIndex::AtTrial), hazard());
    ledger.record(
        9,
        geo <= 0.01 && haz <= 0.015,
        format!("LA-DF edge relation TV: geometric {geo:.4} (<= 0.01), hazard {haz:.4} (<= 0.015)"),
    );
    let pre = relation(two_server_hazard(HazardIndex::PreArrival), hazard());
    info(format!("pre-arrival-indexed hazard edge relation TV: {pre:.4}"));
}

fn criterion_10(ledger: &mut Ledger) {
    let cfg = parse_config_str(
        r#"{"rule":"LA-DF","arrival":{"type":"bernoulli","alpha":0.3},
            "service":{"type":"geometric","beta":0.5},"slots":1000000,"seed":42,
            "replications":2}"#,
    )
    .unwrap();
    let dir = tempfile::TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    cmd_verify(&cfg, &a).unwrap();
    cmd_verify(&cfg, &b).unwrap();
    let same = fs::read(a.join("checks.csv")).unwrap() == fs::read(b.join("checks.csv")).unwrap();
    ledger.record(10, same, "repeated verify runs byte-identical".to_string());
}

#[test]
fn acceptance() {
    let mut ledger = Ledger {
        failures: Vec::new(),
    };
    criterion_1(&mut ledger);
    criteria_2_3_4(&mut ledger);
    criterion_5(&mut ledger);
    criterion_6(&mut ledger);
    criterion_7(&mut ledger);
    criterion_8(&mut ledger);
    criterion_9(&mut ledger);
    criterion_10(&mut ledger);
    assert!(ledger.failures.is_empty(), "failed criteria: {:?}", ledger.failures);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use basta_core::cli::{parse_config_str, ExperimentConfig};
use proptest::prelude::*;
use tempfile::TempDir;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn config(rule: &str, arrival: &str, service: &str, slots: u64, extra: &str) -> String {
    format!(
        r#"{{"rule":"{rule}","arrival":{arrival},"service":{service},"slots":{slots},"seed":42{extra}}}"#
    )
}

const BERN: &str = r#"{"type":"bernoulli","alpha":0.3}"#;
const GEO: &str = r#"{"type":"geometric","beta":0.5}"#;

fn basta(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_basta"))
        .args(args)
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("BASTA_THREADS", "2")
        .output()
        .unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn simulate_canonical_ladf() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &config("LA-DF", BERN, GEO, 300_000, ""));
    let out = dir.path().join("out");
    let o = basta(&["simulate"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&out.join("distributions.csv"));
    assert_eq!(table[0].join(","), "n,pi_edge,pi_center,pi_pa,pi_prearrival,lambda_n");
    assert_eq!(table[1][0], "0");
    let p0: f64 = table[1][4].parse().unwrap();
    assert!((p0 - 4.0 / 7.0).abs() < 0.01, "{p0}");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    for key in ["lambda_hat", "arrival_events", "total_slots", "stable", "seed"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    assert_eq!(summary["total_slots"], 290_000);
    assert_eq!(summary["stable"], true);
}

#[test]
fn simulate_without_arrivals() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &config("EAS", r#"{"type":"bernoulli","alpha":0.0}"#, GEO, 20_000, ""),
    );
    let out = dir.path().join("out");
    assert_eq!(basta(&["simulate"], &cfg, &out).status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["arrival_events"], 0);
    let table = rows(&out.join("distributions.csv"));
    assert_eq!(table.len(), 2);
    assert_eq!(table[1][4], "");
}

#[test]
fn replication_seeds_are_recorded() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &config("EAS", BERN, GEO, 20_000, r#","replications":4"#),
    );
    let out = dir.path().join("out");
    assert_eq!(basta(&["simulate", "--seed", "7"], &cfg, &out).status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["replication_seeds"], serde_json::json!([7, 8, 9, 10]));
    assert_eq!(summary["total_slots"], 4 * 10_000);
}

#[test]
fn analytic_rows_by_group() {
    for (rule, head) in [("EAS", ["0.571428571", "0.244897959"]), ("LAS-DA", ["0.4", "0.342857143"])] {
        let dir = TempDir::new().unwrap();
        let cfg = write_config(dir.path(), &config(rule, BERN, GEO, 1000, r#","warmup":0"#));
        let out = dir.path().join("out");
        assert_eq!(basta(&["analytic"], &cfg, &out).status.code(), Some(0));
        let table = rows(&out.join("analytic.csv"));
        assert_eq!(table[0].join(","), "n,pi_pa");
        assert_eq!(table[1], ["0", head[0]]);
        assert_eq!(table[2], ["1", head[1]]);
        let meta = fs::read_to_string(out.join("analytic.json")).unwrap();
        assert!(meta.contains("tail_mass"));
    }
}

#[test]
fn analytic_infeasible_cases_exit_3() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &config("EAS", r#"{"type":"bernoulli","alpha":0.6}"#, GEO, 1000, r#","warmup":0"#),
    );
    let o = basta(&["analytic"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unstable"));
    let cfg = write_config(
        dir.path(),
        &config("EAS", BERN, r#"{"type":"iid_pmf","pmf":[0,0,1]}"#, 1000, r#","warmup":0"#),
    );
    let o = basta(&["analytic"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no analytic form for general service"));
}

#[test]
fn config_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &config("LIFO", BERN, GEO, 1000, ""));
    let o = basta(&["verify"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown rule: LIFO"));
    let o = basta(&["verify"], &dir.path().join("missing.json"), &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &config("EAS", BERN, GEO, 1000, r#","warmup":0"#));
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    assert_eq!(basta(&["simulate"], &cfg, &blocker).status.code(), Some(2));
}

#[test]
fn verify_negative_control_exits_1() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &config(
            "LA-AF",
            r#"{"type":"state_dependent","alphas":[0.5],"tail_alpha":0.1}"#,
            GEO,
            200_000,
            "",
        ),
    );
    let out = dir.path().join("out");
    assert_eq!(basta(&["verify"], &cfg, &out).status.code(), Some(1));
    let table = rows(&out.join("checks.csv"));
    assert_eq!(table[0].join(","), "name,statistic,threshold,passed");
    assert_eq!(table[1][0], "theorem31_identity");
    assert_eq!(table[1][3], "true");
    assert_eq!(table[2][0], "basta_prearrival_vs_pa");
    assert_eq!(table[2][3], "false");
}

#[test]
fn verify_short_run_is_well_formed() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &config("LAS-IA", BERN, GEO, 100, r#","warmup":0"#));
    let out = dir.path().join("out");
    let code = basta(&["verify"], &cfg, &out).status.code();
    assert!(matches!(code, Some(0) | Some(1)));
    let table = rows(&out.join("checks.csv"));
    assert!(table.len() >= 3);
    assert!(table.iter().all(|r| r.len() == 4));
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &config("LA-DF", BERN, GEO, 50_000, r#","replications":3"#),
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    basta(&["verify"], &cfg, &a);
    basta(&["verify"], &cfg, &b);
    assert_eq!(fs::read(a.join("checks.csv")).unwrap(), fs::read(b.join("checks.csv")).unwrap());
    basta(&["simulate"], &cfg, &a);
    basta(&["simulate"], &cfg, &b);
    for f in ["distributions.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn sweep_grid_and_unstable_cell() {
    let dir = TempDir::new().unwrap();
    let grid = r#","grid":{"alpha":[0.1,0.5],"beta":[0.5],"rule":["EAS","LA-DF"]}"#;
    let cfg = write_config(dir.path(), &config("EAS", BERN, GEO, 20_000, grid));
    let out = dir.path().join("out");
    basta(&["sweep"], &cfg, &out);
    let table = rows(&out.join("sweep.csv"));
    assert_eq!(
        table[0].join(","),
        "cell,rule,alpha,beta,seed,stable,check,statistic,threshold,passed"
    );
    let unstable: Vec<_> = table[1..].iter().filter(|r| r[5] == "false").collect();
    assert_eq!(unstable.len(), 2);
    for r in unstable {
        assert_eq!(r[2], "0.5");
        assert_eq!(r[6], "theorem31_identity");
        assert_eq!(r[9], "true");
    }
    let seeds: Vec<&str> = table[1..].iter().map(|r| r[4].as_str()).collect();
    assert!(seeds.contains(&"45"));
    assert!(!seeds.contains(&"46"));
}

#[test]
fn single_cell_sweep_matches_verify() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &config("LAS-DA", BERN, GEO, 50_000, r#","grid":{"rule":["LAS-DA"]}"#),
    );
    let out = dir.path().join("out");
    let sweep_code = basta(&["sweep"], &cfg, &out).status.code();
    let verify_code = basta(&["verify"], &cfg, &out).status.code();
    assert_eq!(sweep_code, verify_code);
    let sweep = rows(&out.join("sweep.csv"));
    let checks = rows(&out.join("checks.csv"));
    assert_eq!(sweep.len(), checks.len());
    for (s, c) in sweep[1..].iter().zip(&checks[1..]) {
        assert_eq!(&s[6..], &c[..]);
    }
}

#[test]
fn empty_grid_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &config("EAS", BERN, GEO, 1000, r#","grid":{"alpha":[]}"#),
    );
    assert_eq!(basta(&["sweep"], &cfg, &dir.path().join("out")).status.code(), Some(3));
}

fn prob() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn arrival() -> impl Strategy<Value = String> {
    prop_oneof![
        prob().prop_map(|a| format!(r#"{{"type":"bernoulli","alpha":{a}}}"#)),
        (prob(), prob()).prop_map(|(a, t)| format!(
            r#"{{"type":"state_dependent","alphas":[{a}],"tail_alpha":{t}}}"#
        )),
        (0.0..0.5f64).prop_map(|p| format!(r#"{{"type":"batch","pmf":[{},{p}]}}"#, 1.0 - p)),
    ]
}

fn service() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.01..=1.0f64).prop_map(|b| format!(r#"{{"type":"geometric","beta":{b}}}"#)),
        (0.01..=1.0f64, 0.01..=1.0f64, any::<bool>()).prop_map(|(b, t, pre)| format!(
            r#"{{"type":"hazard","betas":[{b}],"tail_beta":{t},"index":"{}"}}"#,
            if pre { "pre_arrival" } else { "at_trial" }
        )),
        Just(r#"{"type":"iid_pmf","pmf":[0,0.25,0.75]}"#.to_string()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_round_trips(
        rule in prop::sample::select(vec!["EAS", "LAS-IA", "LAS-DA", "LA-AF", "LA-DF"]),
        arrival in arrival(),
        service in service(),
        slots in 1u64..1_000_000,
        seed in any::<u64>(),
        warmup_frac in 0.0..1.0f64,
    ) {
        let warmup = (slots as f64 * warmup_frac) as u64;
        let text = config(rule, &arrival, &service, slots, &format!(r#","warmup":{warmup}"#))
            .replace(r#""seed":42"#, &format!(r#""seed":{seed}"#));
        let cfg: ExperimentConfig = parse_config_str(&text).unwrap();
        let again = parse_config_str(&cfg.to_json()).unwrap();
        prop_assert_eq!(cfg, again);
    }
}

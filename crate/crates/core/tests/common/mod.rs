//! Test-only oracles and fixtures, independent of the library's closed forms.

#![allow(dead_code)]

use basta_core::{
    validate_spec, ArrivalSpec, HazardIndex, ModelSpec, SchedulingRule, ServiceSpec,
    ValidatedSpec,
};

pub const CHAIN_STATES: usize = 200;

/// Stationary law of the pre-arrival-state chain of a Bernoulli(`alpha`)
/// queue, by power iteration on a truncated state space.
///
/// Between consecutive potential-arrival epochs: the arrival joins (w.p.
/// `alpha`), then one completion trial runs unless the system is empty or
/// (when `delayed`) the single customer just arrived to an empty system.
/// The trial uses `beta(count at trial)` when `at_trial`, otherwise
/// `beta(max(pre-arrival state, 1))`.
pub fn prearrival_chain(
    alpha: f64,
    beta: impl Fn(usize) -> f64,
    delayed: bool,
    at_trial: bool,
) -> Vec<f64> {
    let n = CHAIN_STATES;
    let mut p = vec![0.0; n];
    p[0] = 1.0;
    for _ in 0..200_000 {
        let mut q = vec![0.0; n];
        for (s, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (arr, pr) in [(0usize, 1.0 - alpha), (1, alpha)] {
                let m = (s + arr).min(n - 1);
                let w = mass * pr;
                let eligible = m >= 1 && !(delayed && s == 0 && arr == 1);
                if !eligible {
                    q[m] += w;
                    continue;
                }
                let b = if at_trial { beta(m) } else { beta(s.max(1)) };
                q[m - 1] += w * b;
                q[m] += w * (1.0 - b);
            }
        }
        let diff: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum();
        p = q;
        if diff < 1e-15 {
            break;
        }
    }
    p
}

/// `beta(j) = 1 - 0.5^min(j, 2)`: 0.5 alone, 0.75 with company.
pub fn two_server_beta(j: usize) -> f64 {
    1.0 - 0.5f64.powi(j.min(2) as i32)
}

pub fn two_server_hazard(index: HazardIndex) -> ServiceSpec {
    ServiceSpec::Hazard {
        betas: vec![0.5],
        tail_beta: 0.75,
        index,
    }
}

pub fn model(
    rule: SchedulingRule,
    arrival: ArrivalSpec,
    service: ServiceSpec,
    slots: u64,
    warmup: u64,
    seed: u64,
) -> ValidatedSpec {
    validate_spec(ModelSpec {
        rule,
        arrival,
        service,
        slots,
        warmup,
        seed,
        replications: 1,
        max_tracked_state: 1000,
    })
    .expect("valid test spec")
}

pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    basta_core::tv_distance(p, q).unwrap()
}

/// The identity-check matrix: arrivals × services.
pub fn arrival_laws() -> Vec<ArrivalSpec> {
    vec![
        ArrivalSpec::Bernoulli { alpha: 0.3 },
        ArrivalSpec::Batch {
            pmf: vec![0.7, 0.2, 0.1],
        },
        ArrivalSpec::StateDependent {
            alphas: vec![0.5],
            tail_alpha: 0.1,
        },
    ]
}

pub fn service_laws() -> Vec<ServiceSpec> {
    vec![
        ServiceSpec::Geometric { beta: 0.5 },
        two_server_hazard(HazardIndex::AtTrial),
        ServiceSpec::IidPmf {
            pmf: vec![0.0, 0.0, 1.0],
        },
    ]
}

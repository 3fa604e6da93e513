//! Domain types shared by the simulator, the closed forms and the checks.
//!
//! A [`ModelSpec`] is the full experiment definition: scheduling rule,
//! arrival law, service law, horizon and seeding. [`validate_spec`] turns it
//! into a [`ValidatedSpec`] carrying an advisory stability flag.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numfmt::sig9;

/// Absolute tolerance on probability-vector normalization.
pub const PMF_TOLERANCE: f64 = 1e-12;

/// Slot-scheduling rule: the order of potential arrivals and departures
/// around a slot boundary, plus the service-access policy for an arrival
/// that finds the server idle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchedulingRule {
    /// Early arrival system: arrival right after the edge, departure right
    /// before the next one; a same-slot arrival may depart.
    Eas,
    /// Late arrivals, immediate access.
    LasIa,
    /// Late arrivals, delayed access: an arrival to an idle server starts
    /// service at the next edge.
    LasDa,
    /// Both at the slot end, arrivals first.
    LaAf,
    /// Both at the slot end, departures first.
    LaDf,
}

/// What happens to a customer that arrives to an empty system, as seen by
/// the birth-death chain at potential-arrival epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdleStart {
    /// Cannot complete before the next potential arrival (`beta(0) = 0`).
    Delayed,
    /// Completes before the next potential arrival with the ordinary
    /// service probability (`beta(0) = beta`).
    Immediate,
}

impl SchedulingRule {
    pub const ALL: [SchedulingRule; 5] = [
        SchedulingRule::Eas,
        SchedulingRule::LasIa,
        SchedulingRule::LasDa,
        SchedulingRule::LaAf,
        SchedulingRule::LaDf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchedulingRule::Eas => "EAS",
            SchedulingRule::LasIa => "LAS-IA",
            SchedulingRule::LasDa => "LAS-DA",
            SchedulingRule::LaAf => "LA-AF",
            SchedulingRule::LaDf => "LA-DF",
        }
    }

    /// The two equivalence classes of the birth-death closed form.
    pub fn idle_start(self) -> IdleStart {
        match self {
            SchedulingRule::LasDa | SchedulingRule::LaAf => IdleStart::Delayed,
            SchedulingRule::Eas | SchedulingRule::LasIa | SchedulingRule::LaDf => {
                IdleStart::Immediate
            }
        }
    }
}

impl fmt::Display for SchedulingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule: {0}")]
pub struct UnknownRule(pub String);

impl FromStr for SchedulingRule {
    type Err = UnknownRule;

    /// Accepts the canonical names, case-insensitively, with `-` or `_`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase().replace('_', "-");
        SchedulingRule::ALL
            .into_iter()
            .find(|r| r.name() == key)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

impl Serialize for SchedulingRule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SchedulingRule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Arrival law at each potential-arrival epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalSpec {
    /// One arrival with probability `alpha`, independent of the state.
    Bernoulli { alpha: f64 },
    /// Batch size `k` with probability `pmf[k]`, independent of the state.
    Batch { pmf: Vec<f64> },
    /// Single arrival with probability `alphas[n]` when the pre-arrival
    /// state is `n` (`tail_alpha` beyond the vector). Violates lack of
    /// anticipation whenever the probabilities differ.
    StateDependent { alphas: Vec<f64>, tail_alpha: f64 },
}

impl ArrivalSpec {
    /// Arrival probability seen by pre-arrival state `n` (StateDependent),
    /// or the constant probability of a nonempty batch otherwise.
    pub fn alpha_at(&self, n: u64) -> f64 {
        match self {
            ArrivalSpec::Bernoulli { alpha } => *alpha,
            ArrivalSpec::Batch { pmf } => 1.0 - pmf.first().copied().unwrap_or(0.0),
            ArrivalSpec::StateDependent { alphas, tail_alpha } => usize::try_from(n)
                .ok()
                .and_then(|i| alphas.get(i))
                .copied()
                .unwrap_or(*tail_alpha),
        }
    }

    /// True when the draw ignores the system state.
    pub fn is_state_independent(&self) -> bool {
        !matches!(self, ArrivalSpec::StateDependent { .. })
    }
}

/// Which state count a [`ServiceSpec::Hazard`] completion probability is
/// evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HazardIndex {
    /// `beta(count)` with `count` the number in system at the trial.
    #[default]
    AtTrial,
    /// `beta(n)` with `n` the number in system at the potential-arrival
    /// instant preceding the trial (at least 1): the birth-death chain
    /// observed at pre-arrival epochs.
    PreArrival,
}

/// Service law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ServiceSpec {
    /// Constant completion probability per eligible trial.
    Geometric { beta: f64 },
    /// State-dependent completion probability `betas[j-1]` for `j` in
    /// system, `tail_beta` for `j > betas.len()`.
    Hazard {
        betas: Vec<f64>,
        tail_beta: f64,
        #[serde(default)]
        index: HazardIndex,
    },
    /// i.i.d. service durations, `pmf[s]` the probability of `s` slots.
    IidPmf { pmf: Vec<f64> },
}

impl ServiceSpec {
    /// Completion probability `beta(j)` for `j >= 1`; `None` for `IidPmf`.
    pub fn hazard(&self, j: u64) -> Option<f64> {
        match self {
            ServiceSpec::Geometric { beta } => Some(*beta),
            ServiceSpec::Hazard {
                betas, tail_beta, ..
            } => Some(
                usize::try_from(j)
                    .ok()
                    .and_then(|j| j.checked_sub(1))
                    .and_then(|i| betas.get(i))
                    .copied()
                    .unwrap_or(*tail_beta),
            ),
            ServiceSpec::IidPmf { .. } => None,
        }
    }

    pub fn hazard_index(&self) -> HazardIndex {
        match self {
            ServiceSpec::Hazard { index, .. } => *index,
            _ => HazardIndex::AtTrial,
        }
    }
}

/// Full experiment definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub rule: SchedulingRule,
    pub arrival: ArrivalSpec,
    pub service: ServiceSpec,
    /// Horizon `T` in slots.
    pub slots: u64,
    /// Leading slots whose observations are discarded.
    pub warmup: u64,
    pub seed: u64,
    pub replications: u32,
    /// States above this are pooled into one overflow bucket.
    pub max_tracked_state: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("{field} = {value} is not a probability in [0, 1]")]
    ProbabilityOutOfRange { field: String, value: f64 },
    #[error("{field} sums to {}, expected 1", sig9(*.sum))]
    PmfNotNormalized { field: String, sum: f64 },
    #[error("{field} is empty")]
    EmptyPmf { field: String },
    #[error("service.pmf[0] = {0} but services take at least one slot")]
    ZeroDurationMass(f64),
    #[error("slots must be positive")]
    ZeroSlots,
    #[error("warmup ({warmup}) must be smaller than slots ({slots})")]
    WarmupNotBelowSlots { warmup: u64, slots: u64 },
    #[error("replications must be at least 1")]
    ZeroReplications,
    #[error("max_tracked_state must be at least 1")]
    ZeroTrackedState,
}

/// Every problem found in one spec.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct SpecErrors(pub Vec<SpecError>);

impl fmt::Display for SpecErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&msgs.join("; "))
    }
}

/// A spec that passed validation, with its stability verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSpec {
    spec: ModelSpec,
    utilization: f64,
}

impl ValidatedSpec {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn into_spec(self) -> ModelSpec {
        self.spec
    }

    /// Effective arrival rate over effective service rate.
    pub fn utilization(&self) -> f64 {
        self.utilization
    }

    /// Advisory only; sample-path identities hold either way.
    pub fn is_stable(&self) -> bool {
        self.utilization < 1.0
    }
}

fn check_probability(errors: &mut Vec<SpecError>, field: String, value: f64) {
    if !(0.0..=1.0).contains(&value) {
        errors.push(SpecError::ProbabilityOutOfRange { field, value });
    }
}

fn check_pmf(errors: &mut Vec<SpecError>, field: &str, pmf: &[f64]) {
    if pmf.is_empty() {
        errors.push(SpecError::EmptyPmf {
            field: field.to_string(),
        });
        return;
    }
    let before = errors.len();
    for (i, &p) in pmf.iter().enumerate() {
        check_probability(errors, format!("{field}[{i}]"), p);
    }
    if errors.len() == before {
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > PMF_TOLERANCE {
            errors.push(SpecError::PmfNotNormalized {
                field: field.to_string(),
                sum,
            });
        }
    }
}

fn check_vector(errors: &mut Vec<SpecError>, field: &str, values: &[f64]) {
    for (i, &p) in values.iter().enumerate() {
        check_probability(errors, format!("{field}[{i}]"), p);
    }
}

/// Mean of a finite pmf over `0, 1, 2, ...`.
pub(crate) fn pmf_mean(pmf: &[f64]) -> f64 {
    pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
}

fn utilization(spec: &ModelSpec) -> f64 {
    let arrival_rate = match &spec.arrival {
        ArrivalSpec::Bernoulli { alpha } => *alpha,
        ArrivalSpec::Batch { pmf } => pmf_mean(pmf),
        ArrivalSpec::StateDependent { tail_alpha, .. } => *tail_alpha,
    };
    match &spec.service {
        ServiceSpec::Geometric { beta } => arrival_rate / beta,
        ServiceSpec::Hazard { tail_beta, .. } => arrival_rate / tail_beta,
        ServiceSpec::IidPmf { pmf } => arrival_rate * pmf_mean(pmf),
    }
}

/// Check every constraint on `spec`, reporting all violations at once.
///
/// Stability is computed but never blocks: `lambda' < beta(tail)` for
/// Geometric/Hazard service, `lambda' E[S] < 1` for i.i.d. durations.
pub fn validate_spec(spec: ModelSpec) -> Result<ValidatedSpec, SpecErrors> {
    let mut errors = Vec::new();

    match &spec.arrival {
        ArrivalSpec::Bernoulli { alpha } => {
            check_probability(&mut errors, "arrival.alpha".into(), *alpha)
        }
        ArrivalSpec::Batch { pmf } => check_pmf(&mut errors, "arrival.pmf", pmf),
        ArrivalSpec::StateDependent { alphas, tail_alpha } => {
            check_vector(&mut errors, "arrival.alphas", alphas);
            check_probability(&mut errors, "arrival.tail_alpha".into(), *tail_alpha);
        }
    }
    match &spec.service {
        ServiceSpec::Geometric { beta } => {
            check_probability(&mut errors, "service.beta".into(), *beta)
        }
        ServiceSpec::Hazard {
            betas, tail_beta, ..
        } => {
            check_vector(&mut errors, "service.betas", betas);
            check_probability(&mut errors, "service.tail_beta".into(), *tail_beta);
        }
        ServiceSpec::IidPmf { pmf } => {
            check_pmf(&mut errors, "service.pmf", pmf);
            if let Some(&p0) = pmf.first() {
                if p0 != 0.0 {
                    errors.push(SpecError::ZeroDurationMass(p0));
                }
            }
        }
    }

    if spec.slots == 0 {
        errors.push(SpecError::ZeroSlots);
    } else if spec.warmup >= spec.slots {
        errors.push(SpecError::WarmupNotBelowSlots {
            warmup: spec.warmup,
            slots: spec.slots,
        });
    }
    if spec.replications == 0 {
        errors.push(SpecError::ZeroReplications);
    }
    if spec.max_tracked_state == 0 {
        errors.push(SpecError::ZeroTrackedState);
    }

    if !errors.is_empty() {
        return Err(SpecErrors(errors));
    }
    let utilization = utilization(&spec);
    Ok(ValidatedSpec { spec, utilization })
}

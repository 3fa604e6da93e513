//! Closed-form stationary distributions for the birth-death queue observed
//! at potential-arrival epochs.
//!
//! With Bernoulli(`alpha`) arrivals and completion probabilities `beta(j)`,
//! the pre-arrival distribution is the product form
//!
//! ```text
//! gamma(j)  = alpha (1 - beta(j)) / (beta(j+1) (1 - alpha))
//! pi(n)     = gamma(0) prod_{j=1}^{n-1} gamma(j) pi(0),   n >= 1
//! pi(0)     = [1 + gamma(0) (1 + sum_{k>=2} prod_{j=1}^{k-1} gamma(j))]^-1
//! ```
//!
//! where `beta(0)` is never supplied by the caller: it is 0 for LAS-DA and
//! LA-AF (an arrival to an idle server cannot leave before the next
//! potential arrival) and `beta(1)` for EAS, LAS-IA and LA-DF.
//!
//! Infinite series are truncated explicitly; the neglected mass is returned
//! as `tail_mass`, never dropped.

use std::fmt;

use thiserror::Error;

use crate::model::{IdleStart, SchedulingRule, ServiceSpec};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_N_MAX: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("{name} = {value} is not a valid probability")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("gamma({j}) has a zero denominator (beta({}) = 0 or alpha = 1)", j + 1)]
    DegenerateRatio { j: u64 },
    #[error("unstable: gamma >= 1 (tail ratio {gamma})")]
    Unstable { gamma: f64 },
    #[error("tail mass {tail_mass:e} still above tolerance after {n_max} states")]
    TailAboveTolerance { tail_mass: f64, n_max: usize },
    #[error("tail tolerance must be positive")]
    InvalidTolerance,
    #[error("arrival normalizer sum alpha(k) pi(k) is zero")]
    ZeroNormalizer,
    #[error("no analytic form for general service")]
    GeneralService,
}

/// Completion probabilities `beta(j)` for `j >= 1`: an explicit prefix
/// followed by a constant tail.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardFn {
    betas: Vec<f64>,
    tail: f64,
}

impl HazardFn {
    /// `betas[j-1]` is `beta(j)`; `tail` applies beyond the vector.
    pub fn new(betas: Vec<f64>, tail: f64) -> Self {
        HazardFn { betas, tail }
    }

    pub fn constant(beta: f64) -> Self {
        HazardFn {
            betas: Vec::new(),
            tail: beta,
        }
    }

    /// Geometric or Hazard service; `None` for i.i.d. durations.
    pub fn from_service(service: &ServiceSpec) -> Option<Self> {
        match service {
            ServiceSpec::Geometric { beta } => Some(Self::constant(*beta)),
            ServiceSpec::Hazard {
                betas, tail_beta, ..
            } => Some(Self::new(betas.clone(), *tail_beta)),
            ServiceSpec::IidPmf { .. } => None,
        }
    }

    /// `beta(j)` for `j >= 1`. `beta(0)` is rule-dependent, see
    /// [`idle_completion`].
    pub fn beta(&self, j: u64) -> f64 {
        debug_assert!(j >= 1);
        usize::try_from(j)
            .ok()
            .and_then(|j| self.betas.get(j.wrapping_sub(1)))
            .copied()
            .unwrap_or(self.tail)
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Index from which `beta(j)` equals the tail value.
    fn tail_start(&self) -> u64 {
        self.betas.len() as u64 + 1
    }

    fn validate(&self) -> Result<(), AnalyticError> {
        for &b in self.betas.iter().chain(std::iter::once(&self.tail)) {
            if !(0.0..=1.0).contains(&b) {
                return Err(AnalyticError::InvalidProbability {
                    name: "beta",
                    value: b,
                });
            }
        }
        Ok(())
    }
}

/// Per-state arrival probabilities `alpha(n)`, `n >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalRates {
    by_state: Vec<f64>,
    tail: f64,
}

impl ArrivalRates {
    pub fn new(by_state: Vec<f64>, tail: f64) -> Self {
        ArrivalRates { by_state, tail }
    }

    pub fn constant(alpha: f64) -> Self {
        ArrivalRates {
            by_state: Vec::new(),
            tail: alpha,
        }
    }

    pub fn alpha(&self, n: usize) -> f64 {
        self.by_state.get(n).copied().unwrap_or(self.tail)
    }
}

/// Birth-death queue with constant arrival probability.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathSpec {
    pub alpha: f64,
    pub hazard: HazardFn,
    pub rule: SchedulingRule,
}

/// Which closed form produced a pmf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalyticSource {
    Eq8,
    Thm36i,
    Thm36ii,
    Eq6,
    Eq7,
    GeoClosedForm,
}

impl AnalyticSource {
    pub fn label(self) -> &'static str {
        match self {
            AnalyticSource::Eq8 => "Eq8",
            AnalyticSource::Thm36i => "Thm36i",
            AnalyticSource::Thm36ii => "Thm36ii",
            AnalyticSource::Eq6 => "Eq6",
            AnalyticSource::Eq7 => "Eq7",
            AnalyticSource::GeoClosedForm => "GeoClosedForm",
        }
    }
}

impl fmt::Display for AnalyticSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Truncated pmf over `0..probs.len()` plus the mass beyond it.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPmf {
    pub probs: Vec<f64>,
    pub tail_mass: f64,
    pub source: AnalyticSource,
}

impl AnalyticPmf {
    fn point_mass(source: AnalyticSource) -> Self {
        AnalyticPmf {
            probs: vec![1.0],
            tail_mass: 0.0,
            source,
        }
    }

    /// Align with a report's bins: states `0..=max_tracked_state`, then one
    /// overflow atom holding everything beyond, tail mass included.
    pub fn fold_to(&self, max_tracked_state: usize) -> Vec<f64> {
        let mut out = vec![0.0; max_tracked_state + 2];
        for (n, &p) in self.probs.iter().enumerate() {
            out[n.min(max_tracked_state + 1)] += p;
        }
        out[max_tracked_state + 1] += self.tail_mass;
        out
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.tail_mass
    }
}

/// `beta(0)`: completion probability before the next potential arrival for
/// a customer that arrived to an empty system.
pub fn idle_completion(rule: SchedulingRule, hazard: &HazardFn) -> f64 {
    match rule.idle_start() {
        IdleStart::Delayed => 0.0,
        IdleStart::Immediate => hazard.beta(1),
    }
}

fn check_alpha(alpha: f64) -> Result<(), AnalyticError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(AnalyticError::InvalidProbability {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(())
}

/// `gamma(j) = alpha (1 - beta(j)) / (beta(j+1) (1 - alpha))` with `beta(0)`
/// resolved from `rule`.
pub fn gamma_ratio(
    alpha: f64,
    hazard: &HazardFn,
    rule: SchedulingRule,
    j: u64,
) -> Result<f64, AnalyticError> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let beta_j = if j == 0 {
        idle_completion(rule, hazard)
    } else {
        hazard.beta(j)
    };
    let denom = hazard.beta(j + 1) * (1.0 - alpha);
    if denom == 0.0 {
        return Err(AnalyticError::DegenerateRatio { j });
    }
    Ok(alpha * (1.0 - beta_j) / denom)
}

/// Product-form pre-arrival distribution.
///
/// Terms are accumulated until every remaining ratio equals the tail ratio
/// and the exact geometric remainder drops below `tail_tol` relative to the
/// accumulated mass, or until `n_max + 1` states are stored. Fails when the
/// tail ratio is not contracting or when the cap leaves more than
/// `tail_tol` of mass in the tail.
pub fn pa_distribution_eq8(
    spec: &BirthDeathSpec,
    tail_tol: f64,
    n_max: usize,
) -> Result<AnalyticPmf, AnalyticError> {
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(AnalyticError::InvalidTolerance);
    }
    check_alpha(spec.alpha)?;
    spec.hazard.validate()?;
    if spec.alpha == 0.0 {
        return Ok(AnalyticPmf::point_mass(AnalyticSource::Eq8));
    }

    let gamma = |j: u64| gamma_ratio(spec.alpha, &spec.hazard, spec.rule, j);
    let tail_start = spec.hazard.tail_start();
    let gamma_tail = gamma(tail_start)?;
    if gamma_tail >= 1.0 {
        return Err(AnalyticError::Unstable { gamma: gamma_tail });
    }
    let geometric_rest = |term: f64| term * gamma_tail / (1.0 - gamma_tail);

    let mut terms = vec![1.0_f64];
    let mut mass = 1.0_f64;
    let remainder = loop {
        let n = (terms.len() - 1) as u64;
        let last = terms[terms.len() - 1];
        if n >= tail_start {
            let rest = geometric_rest(last);
            if rest <= tail_tol * mass {
                break rest;
            }
        }
        if terms.len() > n_max {
            // exact remainder: finish the non-constant stretch, then the
            // geometric tail
            let mut rest = 0.0;
            let mut term = last;
            for j in n..tail_start {
                term *= gamma(j)?;
                rest += term;
            }
            break rest + geometric_rest(term);
        }
        let next = last * gamma(n)?;
        terms.push(next);
        mass += next;
    };

    let total = mass + remainder;
    let tail_mass = remainder / total;
    if tail_mass > tail_tol {
        return Err(AnalyticError::TailAboveTolerance { tail_mass, n_max });
    }
    Ok(AnalyticPmf {
        probs: terms.into_iter().map(|t| t / total).collect(),
        tail_mass,
        source: AnalyticSource::Eq8,
    })
}

/// Product form with `beta(0)` fixed by the rule's group, default
/// truncation. Labelled `Thm36i` (LAS-DA, LA-AF) or `Thm36ii` (others).
pub fn pa_distribution_rule(spec: &BirthDeathSpec) -> Result<AnalyticPmf, AnalyticError> {
    let mut pmf = pa_distribution_eq8(spec, DEFAULT_TAIL_TOL, DEFAULT_N_MAX)?;
    pmf.source = match spec.rule.idle_start() {
        IdleStart::Delayed => AnalyticSource::Thm36i,
        IdleStart::Immediate => AnalyticSource::Thm36ii,
    };
    Ok(pmf)
}

fn check_pmf_input(pi: &[f64]) -> Result<(), AnalyticError> {
    match pi.iter().find(|p| p.is_nan() || **p < 0.0) {
        Some(&value) => Err(AnalyticError::InvalidProbability { name: "pi", value }),
        None => Ok(()),
    }
}

/// LA-DF pre-arrival distribution from the slot-edge distribution:
///
/// ```text
/// pi^A(n) = [alpha(n) (1 - beta(n)) pi(n) + alpha(n+1) beta(n+1) pi(n+1)] / alpha,
/// alpha   = sum_k alpha(k) pi(k)
/// ```
///
/// An empty edge state has no departure trial under LA-DF, so `beta(0)` is
/// 0 here. `pi_edge` may be empirical; its last entry is treated as one
/// more state (the overflow atom of a report).
pub fn ladf_prearrival_from_edge(
    alphas: &ArrivalRates,
    hazard: &HazardFn,
    pi_edge: &[f64],
) -> Result<AnalyticPmf, AnalyticError> {
    check_pmf_input(pi_edge)?;
    let beta = |n: usize| if n == 0 { 0.0 } else { hazard.beta(n as u64) };
    let pi = |n: usize| pi_edge.get(n).copied().unwrap_or(0.0);
    let normalizer: f64 = pi_edge
        .iter()
        .enumerate()
        .map(|(k, p)| alphas.alpha(k) * p)
        .sum();
    if normalizer == 0.0 {
        return Err(AnalyticError::ZeroNormalizer);
    }
    let probs = (0..pi_edge.len())
        .map(|n| {
            (alphas.alpha(n) * (1.0 - beta(n)) * pi(n)
                + alphas.alpha(n + 1) * beta(n + 1) * pi(n + 1))
                / normalizer
        })
        .collect();
    Ok(AnalyticPmf {
        probs,
        tail_mass: 0.0,
        source: AnalyticSource::Eq6,
    })
}

/// State-independent reduction: `pi^A(n) = (1 - beta(n)) pi(n) + beta(n+1) pi(n+1)`.
pub fn ladf_prearrival_eq7(hazard: &HazardFn, pi_edge: &[f64]) -> Result<AnalyticPmf, AnalyticError> {
    check_pmf_input(pi_edge)?;
    let total: f64 = pi_edge.iter().sum();
    if total == 0.0 {
        return Err(AnalyticError::ZeroNormalizer);
    }
    let beta = |n: usize| if n == 0 { 0.0 } else { hazard.beta(n as u64) };
    let pi = |n: usize| pi_edge.get(n).copied().unwrap_or(0.0);
    let probs = (0..pi_edge.len())
        .map(|n| ((1.0 - beta(n)) * pi(n) + beta(n + 1) * pi(n + 1)) / total)
        .collect();
    Ok(AnalyticPmf {
        probs,
        tail_mass: 0.0,
        source: AnalyticSource::Eq7,
    })
}

/// Geometric service in closed form, `gamma = alpha (1 - beta) / (beta (1 - alpha))`:
/// `(1 - gamma) gamma^n` for EAS, LAS-IA and LA-DF; for LAS-DA and LA-AF
/// `pi(n) = c gamma^(n-1) pi(0)` with `c = alpha / (beta (1 - alpha))` and
/// `pi(0) = [1 + c / (1 - gamma)]^-1`.
pub fn geo_closed_form(
    alpha: f64,
    beta: f64,
    rule: SchedulingRule,
) -> Result<AnalyticPmf, AnalyticError> {
    check_alpha(alpha)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(AnalyticError::InvalidProbability {
            name: "beta",
            value: beta,
        });
    }
    if alpha == 0.0 {
        return Ok(AnalyticPmf::point_mass(AnalyticSource::GeoClosedForm));
    }
    if alpha == 1.0 {
        return Err(AnalyticError::DegenerateRatio { j: 0 });
    }
    let gamma = alpha * (1.0 - beta) / (beta * (1.0 - alpha));
    if gamma >= 1.0 {
        return Err(AnalyticError::Unstable { gamma });
    }
    // probs[0] = pi0, probs[n] = lead * gamma^(n-1) for n >= 1
    let (pi0, lead) = match rule.idle_start() {
        IdleStart::Immediate => (1.0 - gamma, (1.0 - gamma) * gamma),
        IdleStart::Delayed => {
            let c = alpha / (beta * (1.0 - alpha));
            let pi0 = 1.0 / (1.0 + c / (1.0 - gamma));
            (pi0, c * pi0)
        }
    };
    let mut probs = vec![pi0];
    let mut term = lead;
    while term / (1.0 - gamma) > DEFAULT_TAIL_TOL && probs.len() <= DEFAULT_N_MAX {
        probs.push(term);
        term *= gamma;
    }
    Ok(AnalyticPmf {
        probs,
        tail_mass: term / (1.0 - gamma),
        source: AnalyticSource::GeoClosedForm,
    })
}

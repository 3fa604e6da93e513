//! Arrival and service sampling with a fixed RNG consumption contract.
//!
//! Every sampler consumes exactly one uniform draw. Thresholds follow one
//! convention throughout: an event with probability `p` occurs iff the draw
//! is `< p`; inverse-CDF sampling scans cumulative sums in index order and
//! returns the first index whose cumulative sum exceeds the draw.

use std::collections::VecDeque;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::model::{pmf_mean, ArrivalSpec, ServiceSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcessError {
    #[error("state-dependent arrivals have no single mean batch size")]
    StateDependentRate,
    #[error("completion trials apply to geometric or hazard service only")]
    NotHazardService,
    #[error("service durations apply to iid_pmf service only")]
    NotDurationService,
    #[error("completion trial requires at least one customer")]
    EmptySystem,
}

/// A source of uniform reals in `[0, 1)`.
pub trait UniformSource {
    fn uniform(&mut self) -> f64;
}

/// Deterministic per-replication stream.
///
/// Xoshiro256++ seeded through SplitMix64 from `seed + replication`
/// (wrapping); each uniform is the top 53 bits of one 64-bit output scaled
/// by `2^-53`. The sequence is identical on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: Xoshiro256PlusPlus,
    draws: u64,
}

impl RngStream {
    pub fn new(seed: u64, replication: u64) -> Self {
        RngStream {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed.wrapping_add(replication)),
            draws: 0,
        }
    }

    /// Number of uniforms drawn so far.
    pub fn position(&self) -> u64 {
        self.draws
    }
}

impl UniformSource for RngStream {
    #[inline]
    fn uniform(&mut self) -> f64 {
        self.draws += 1;
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Replays a scripted sequence of draws. Panics when exhausted.
#[derive(Debug, Clone, Default)]
pub struct FixedDraws {
    values: VecDeque<f64>,
    consumed: usize,
}

impl FixedDraws {
    pub fn new(values: impl IntoIterator<Item = f64>) -> Self {
        FixedDraws {
            values: values.into_iter().collect(),
            consumed: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn remaining(&self) -> usize {
        self.values.len()
    }
}

impl UniformSource for FixedDraws {
    fn uniform(&mut self) -> f64 {
        self.consumed += 1;
        self.values
            .pop_front()
            .expect("scripted draws exhausted")
    }
}

/// Index sampled by inverse CDF. Falls back to the last positive entry when
/// rounding leaves the cumulative sum just below the draw.
fn inverse_cdf(pmf: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (k, &p) in pmf.iter().enumerate() {
        cum += p;
        if u < cum {
            return k;
        }
    }
    pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Batch size at one potential-arrival epoch whose pre-arrival state is
/// `pre_state`. Only the StateDependent law looks at `pre_state`.
#[inline]
pub fn sample_arrival<R: UniformSource>(arrival: &ArrivalSpec, pre_state: u64, rng: &mut R) -> u32 {
    let u = rng.uniform();
    match arrival {
        ArrivalSpec::Bernoulli { alpha } => u32::from(u < *alpha),
        ArrivalSpec::Batch { pmf } => inverse_cdf(pmf, u) as u32,
        ArrivalSpec::StateDependent { .. } => u32::from(u < arrival.alpha_at(pre_state)),
    }
}

/// One completion trial with `count` customers indexing the hazard.
#[inline]
pub fn sample_completion<R: UniformSource>(
    service: &ServiceSpec,
    count: u64,
    rng: &mut R,
) -> Result<bool, ProcessError> {
    if count == 0 {
        return Err(ProcessError::EmptySystem);
    }
    let beta = service.hazard(count).ok_or(ProcessError::NotHazardService)?;
    Ok(rng.uniform() < beta)
}

/// Service duration in slots, drawn once when service commences.
pub fn sample_service_duration<R: UniformSource>(
    service: &ServiceSpec,
    rng: &mut R,
) -> Result<u32, ProcessError> {
    match service {
        ServiceSpec::IidPmf { pmf } => Ok(inverse_cdf(pmf, rng.uniform()).max(1) as u32),
        _ => Err(ProcessError::NotDurationService),
    }
}

/// `lambda' = sum k p(k)`.
pub fn mean_batch_size(arrival: &ArrivalSpec) -> Result<f64, ProcessError> {
    match arrival {
        ArrivalSpec::Bernoulli { alpha } => Ok(*alpha),
        ArrivalSpec::Batch { pmf } => Ok(pmf_mean(pmf)),
        ArrivalSpec::StateDependent { .. } => Err(ProcessError::StateDependentRate),
    }
}

//! Finite-horizon counters for the four epoch families and the derived
//! estimates of `pi`, `pi^O`, `pi^PA`, `pi^A`, `lambda` and `lambda(n)`.

use thiserror::Error;

use crate::dist::normalize_counts;
use crate::model::SchedulingRule;

/// Customer flow over a whole run, warmup included.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlowTotals {
    /// Customers admitted, batch members counted individually.
    pub admitted: u64,
    pub departed: u64,
    /// Number in system after the last slot.
    pub final_count: u64,
}

/// Counts by state for one run (or a merge of runs).
///
/// Every vector has `max_tracked_state + 2` entries: states
/// `0..=max_tracked_state` and one overflow bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalReport {
    pub(crate) rule: SchedulingRule,
    pub(crate) max_tracked_state: usize,
    pub(crate) total_slots_observed: u64,
    pub(crate) arrival_events: u64,
    pub(crate) edge_counts: Vec<u64>,
    pub(crate) center_counts: Vec<u64>,
    pub(crate) pa_counts: Vec<u64>,
    pub(crate) prearrival_counts: Vec<u64>,
    pub(crate) flow: FlowTotals,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("nothing to merge")]
    Empty,
    #[error("max_tracked_state mismatch: {0} vs {1}")]
    TrackedStateMismatch(usize, usize),
    #[error("rule mismatch: {0} vs {1}")]
    RuleMismatch(SchedulingRule, SchedulingRule),
}

impl EmpiricalReport {
    pub(crate) fn empty(rule: SchedulingRule, max_tracked_state: usize) -> Self {
        let bins = max_tracked_state + 2;
        EmpiricalReport {
            rule,
            max_tracked_state,
            total_slots_observed: 0,
            arrival_events: 0,
            edge_counts: vec![0; bins],
            center_counts: vec![0; bins],
            pa_counts: vec![0; bins],
            prearrival_counts: vec![0; bins],
            flow: FlowTotals::default(),
        }
    }

    #[inline]
    pub(crate) fn bin(&self, state: u64) -> usize {
        usize::try_from(state)
            .unwrap_or(usize::MAX)
            .min(self.max_tracked_state + 1)
    }

    pub fn rule(&self) -> SchedulingRule {
        self.rule
    }

    pub fn max_tracked_state(&self) -> usize {
        self.max_tracked_state
    }

    /// Length of every count vector (tracked states plus overflow).
    pub fn bins(&self) -> usize {
        self.max_tracked_state + 2
    }

    pub fn overflow_index(&self) -> usize {
        self.max_tracked_state + 1
    }

    pub fn total_slots_observed(&self) -> u64 {
        self.total_slots_observed
    }

    /// `A(T)`: arrival events (nonempty batches) in the observed window.
    pub fn arrival_events(&self) -> u64 {
        self.arrival_events
    }

    pub fn edge_counts(&self) -> &[u64] {
        &self.edge_counts
    }

    pub fn center_counts(&self) -> &[u64] {
        &self.center_counts
    }

    /// Potential-arrival epochs by the state just before them.
    pub fn pa_counts(&self) -> &[u64] {
        &self.pa_counts
    }

    /// Arrival events by the state they found.
    pub fn prearrival_counts(&self) -> &[u64] {
        &self.prearrival_counts
    }

    pub fn flow(&self) -> FlowTotals {
        self.flow
    }

    fn normalized(counts: &[u64]) -> Vec<f64> {
        normalize_counts(counts).unwrap_or_else(|_| vec![0.0; counts.len()])
    }

    /// Slot-edge (random observer) distribution.
    pub fn pi_edge(&self) -> Vec<f64> {
        Self::normalized(&self.edge_counts)
    }

    /// Slot-center (outside observer) distribution.
    pub fn pi_center(&self) -> Vec<f64> {
        Self::normalized(&self.center_counts)
    }

    /// Distribution just before potential-arrival epochs.
    pub fn pi_pa(&self) -> Vec<f64> {
        Self::normalized(&self.pa_counts)
    }

    /// Distribution seen by arrival events; `None` without arrivals.
    pub fn pi_prearrival(&self) -> Option<Vec<f64>> {
        normalize_counts(&self.prearrival_counts).ok()
    }

    /// `A(T) / T`.
    pub fn lambda_hat(&self) -> f64 {
        if self.total_slots_observed == 0 {
            return 0.0;
        }
        self.arrival_events as f64 / self.total_slots_observed as f64
    }

    /// Arrival-event frequency given pre-arrival state `n`; `None` where no
    /// potential-arrival epoch saw `n`.
    pub fn lambda_n_hat(&self) -> Vec<Option<f64>> {
        self.pa_counts
            .iter()
            .zip(&self.prearrival_counts)
            .map(|(&pa, &pre)| (pa > 0).then(|| pre as f64 / pa as f64))
            .collect()
    }

    /// Largest state bin with any observation, for trimming output tables.
    pub fn last_nonzero_bin(&self) -> usize {
        (0..self.bins())
            .rev()
            .find(|&i| {
                self.edge_counts[i] > 0
                    || self.center_counts[i] > 0
                    || self.pa_counts[i] > 0
                    || self.prearrival_counts[i] > 0
            })
            .unwrap_or(0)
    }
}

/// Sum the counts of reports produced under one spec. Associative and
/// order-independent.
pub fn merge_reports(reports: &[EmpiricalReport]) -> Result<EmpiricalReport, MergeError> {
    let first = reports.first().ok_or(MergeError::Empty)?;
    let mut out = EmpiricalReport::empty(first.rule, first.max_tracked_state);
    for r in reports {
        if r.max_tracked_state != out.max_tracked_state {
            return Err(MergeError::TrackedStateMismatch(
                out.max_tracked_state,
                r.max_tracked_state,
            ));
        }
        if r.rule != out.rule {
            return Err(MergeError::RuleMismatch(out.rule, r.rule));
        }
        out.total_slots_observed += r.total_slots_observed;
        out.arrival_events += r.arrival_events;
        for (dst, src) in [
            (&mut out.edge_counts, &r.edge_counts),
            (&mut out.center_counts, &r.center_counts),
            (&mut out.pa_counts, &r.pa_counts),
            (&mut out.prearrival_counts, &r.prearrival_counts),
        ] {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
        }
        out.flow.admitted += r.flow.admitted;
        out.flow.departed += r.flow.departed;
        out.flow.final_count += r.flow.final_count;
    }
    Ok(out)
}

//! Slot-stepping simulator.
//!
//! Slot `t` is the interval `(t-1, t]`. Each rule runs a fixed sequence of
//! micro-events in that interval and observes the number in system at three
//! instants: the opening edge `t-1`, the slot center, and just before the
//! potential arrival.
//!
//! | rule   | micro-event order                                         |
//! |--------|-----------------------------------------------------------|
//! | EAS    | edge, pa, arrival, center, departure trial                |
//! | LAS-IA | edge, departure trial, center, pa, arrival                |
//! | LAS-DA | as LAS-IA; an arrival to an idle server starts at edge `t`|
//! | LA-AF  | edge = center = pa, arrival, departure trial              |
//! | LA-DF  | edge = center, departure trial, pa, arrival               |
//!
//! Eligibility of the head-of-line customer for a departure trial:
//! EAS, LAS-IA and LA-DF always; LAS-DA and LA-AF only if its service
//! commenced in a strictly earlier slot. For LA-AF this same-slot exclusion
//! is inferred from the `beta(0) = 0` grouping of the birth-death closed
//! form rather than read off the rule's verbal definition. A customer
//! promoted after a departure commences at the departure instant.
//!
//! RNG use per slot, in micro-event order: one arrival draw always; one
//! completion draw per eligible Geometric/Hazard trial; one duration draw
//! whenever an i.i.d. service commences.

use rayon::prelude::*;

use crate::model::{
    ArrivalSpec, HazardIndex, IdleStart, SchedulingRule, ServiceSpec, ValidatedSpec,
};
use crate::processes::{
    sample_arrival, sample_completion, sample_service_duration, RngStream, UniformSource,
};
use crate::report::{merge_reports, EmpiricalReport};

/// Number in system plus head-of-line service bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueueState {
    pub count: u64,
    /// Slot in which the head-of-line customer's service commenced. Under
    /// LAS-DA an arrival to an idle server records the following slot.
    pub hol_commencement_slot: Option<u64>,
    /// Remaining eligible trials (i.i.d. service only).
    pub hol_remaining: Option<u32>,
    /// Batch size at the most recent potential-arrival epoch.
    pub last_batch: u64,
}

/// What one slot looked like.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochRecord {
    pub slot: u64,
    pub z_edge: u64,
    pub z_center: u64,
    pub z_pa: u64,
    pub arrival_event: bool,
    pub batch_size: u32,
}

struct Slot<'a, R> {
    state: QueueState,
    rule: SchedulingRule,
    arrival: &'a ArrivalSpec,
    service: &'a ServiceSpec,
    slot: u64,
    rng: &'a mut R,
}

impl<R: UniformSource> Slot<'_, R> {
    fn commence(&mut self, at_slot: u64) {
        self.state.hol_commencement_slot = Some(at_slot);
        if matches!(self.service, ServiceSpec::IidPmf { .. }) {
            let s = sample_service_duration(self.service, self.rng)
                .expect("i.i.d. service checked above");
            self.state.hol_remaining = Some(s);
        }
    }

    fn arrive(&mut self) -> u32 {
        let before = self.state.count;
        let k = sample_arrival(self.arrival, before, self.rng);
        self.state.last_batch = u64::from(k);
        if k > 0 {
            self.state.count += u64::from(k);
            if before == 0 {
                let start = match self.rule {
                    SchedulingRule::LasDa => self.slot + 1,
                    _ => self.slot,
                };
                self.commence(start);
            }
        }
        k
    }

    fn departure_trial(&mut self) {
        let st = &mut self.state;
        if st.count == 0 {
            return;
        }
        let eligible = match self.rule.idle_start() {
            IdleStart::Immediate => true,
            IdleStart::Delayed => st.hol_commencement_slot.is_some_and(|c| c < self.slot),
        };
        if !eligible {
            return;
        }
        let completes = match self.service {
            ServiceSpec::IidPmf { .. } => {
                let left = st
                    .hol_remaining
                    .as_mut()
                    .expect("head of line has a residual duration");
                *left -= 1;
                *left == 0
            }
            _ => {
                let index = match self.service.hazard_index() {
                    HazardIndex::AtTrial => st.count,
                    HazardIndex::PreArrival => st.count.saturating_sub(st.last_batch).max(1),
                };
                sample_completion(self.service, index, self.rng).expect("hazard service")
            }
        };
        if completes {
            st.count -= 1;
            st.hol_commencement_slot = None;
            st.hol_remaining = None;
            if st.count > 0 {
                self.commence(self.slot);
            }
        }
    }
}

/// Run slot `slot` under `rule` from `state`.
pub fn advance_slot<R: UniformSource>(
    state: QueueState,
    rule: SchedulingRule,
    arrival: &ArrivalSpec,
    service: &ServiceSpec,
    slot: u64,
    rng: &mut R,
) -> (QueueState, EpochRecord) {
    let mut s = Slot {
        state,
        rule,
        arrival,
        service,
        slot,
        rng,
    };
    let z_edge = s.state.count;
    let (z_center, z_pa, k) = match rule {
        SchedulingRule::Eas => {
            let k = s.arrive();
            let z_center = s.state.count;
            s.departure_trial();
            (z_center, z_edge, k)
        }
        SchedulingRule::LasIa | SchedulingRule::LasDa => {
            s.departure_trial();
            let z = s.state.count;
            (z, z, s.arrive())
        }
        SchedulingRule::LaAf => {
            let k = s.arrive();
            s.departure_trial();
            (z_edge, z_edge, k)
        }
        SchedulingRule::LaDf => {
            s.departure_trial();
            let z_pa = s.state.count;
            (z_edge, z_pa, s.arrive())
        }
    };
    let record = EpochRecord {
        slot,
        z_edge,
        z_center,
        z_pa,
        arrival_event: k > 0,
        batch_size: k,
    };
    (s.state, record)
}

/// Slot-by-slot trajectory of one replication, starting empty at slot 1.
pub struct Trajectory<'a> {
    spec: &'a ValidatedSpec,
    state: QueueState,
    slot: u64,
    rng: RngStream,
}

impl<'a> Trajectory<'a> {
    pub fn new(spec: &'a ValidatedSpec, replication: u64) -> Self {
        Trajectory {
            spec,
            state: QueueState::default(),
            slot: 0,
            rng: RngStream::new(spec.spec().seed, replication),
        }
    }

    pub fn state(&self) -> QueueState {
        self.state
    }

    pub fn rng_position(&self) -> u64 {
        self.rng.position()
    }
}

impl Iterator for Trajectory<'_> {
    type Item = (EpochRecord, QueueState);

    fn next(&mut self) -> Option<Self::Item> {
        let spec = self.spec.spec();
        if self.slot >= spec.slots {
            return None;
        }
        self.slot += 1;
        let (next, record) = advance_slot(
            self.state,
            spec.rule,
            &spec.arrival,
            &spec.service,
            self.slot,
            &mut self.rng,
        );
        self.state = next;
        Some((record, next))
    }
}

/// One replication: slots `1..=T` from an empty system, observations for
/// slots after the warmup.
pub fn run_replication(spec: &ValidatedSpec, replication: u64) -> EmpiricalReport {
    let m = spec.spec();
    let mut report = EmpiricalReport::empty(m.rule, m.max_tracked_state);
    let mut last = QueueState::default();
    for (rec, state) in Trajectory::new(spec, replication) {
        let k = u64::from(rec.batch_size);
        report.flow.admitted += k;
        report.flow.departed += rec.z_edge + k - state.count;
        last = state;
        if rec.slot <= m.warmup {
            continue;
        }
        report.total_slots_observed += 1;
        let (e, c, p) = (report.bin(rec.z_edge), report.bin(rec.z_center), report.bin(rec.z_pa));
        report.edge_counts[e] += 1;
        report.center_counts[c] += 1;
        report.pa_counts[p] += 1;
        if rec.arrival_event {
            report.arrival_events += 1;
            report.prearrival_counts[p] += 1;
        }
    }
    report.flow.final_count = last.count;
    report
}

/// All replications (in parallel on the current rayon pool), merged.
pub fn run_simulation(spec: &ValidatedSpec) -> EmpiricalReport {
    let reports: Vec<EmpiricalReport> = (0..u64::from(spec.spec().replications))
        .into_par_iter()
        .map(|r| run_replication(spec, r))
        .collect();
    merge_reports(&reports).expect("replications share one spec")
}

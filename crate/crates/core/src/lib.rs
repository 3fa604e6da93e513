//! Discrete-time single-queue laboratory.
//!
//! Simulates a queue under the five slot-scheduling rules (EAS, LAS-IA,
//! LAS-DA, LA-AF, LA-DF), estimates the state distributions seen at slot
//! edges, slot centers, potential-arrival epochs and actual arrivals,
//! evaluates the birth-death closed forms, and checks the
//! arrivals-see-time-averages relations between them.

pub mod analytic;
pub mod cli;
pub mod dist;
pub mod engine;
pub mod model;
pub mod numfmt;
pub mod processes;
pub mod report;
pub mod verify;

pub use dist::{normalize_counts, tv_distance};
pub use engine::{advance_slot, run_replication, run_simulation, EpochRecord, QueueState};
pub use model::{
    validate_spec, ArrivalSpec, HazardIndex, ModelSpec, SchedulingRule, ServiceSpec,
    ValidatedSpec,
};
pub use report::{merge_reports, EmpiricalReport};

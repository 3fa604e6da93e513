//! C ABI over `basta-core`.
//!
//! Models and reports are opaque handles created and freed through this
//! API. Every fallible function returns a [`BastaStatus`]; on failure a
//! message is available from [`basta_last_error_message`] on the same
//! thread. Output pointers are written only on success.
//!
//! The header is generated into `include/basta.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use basta_core::analytic::{pa_distribution_rule, BirthDeathSpec, HazardFn};
use basta_core::cli::parse_config_str;
use basta_core::verify::{check_basta, check_theorem31};
use basta_core::{run_simulation, tv_distance, ArrivalSpec, EmpiricalReport, ValidatedSpec};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BastaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidArgument = 4,
    BufferTooSmall = 5,
    NoArrivals = 6,
    Unstable = 7,
    Panic = 8,
}

/// Which empirical distribution to copy out of a report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BastaDistribution {
    /// Slot edges.
    Edge = 0,
    /// Slot centers.
    Center = 1,
    /// Just before every potential-arrival epoch.
    PotentialArrival = 2,
    /// Just before every arrival event.
    PreArrival = 3,
}

/// A validated model. Opaque.
pub struct BastaModel {
    spec: ValidatedSpec,
}

/// Merged simulation output. Opaque.
pub struct BastaReport {
    report: EmpiricalReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: BastaStatus, msg: impl Into<String>) -> BastaStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> BastaStatus) -> BastaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(BastaStatus::Panic, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(BastaStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Copy `values` into `buf`. `written` receives the length needed; the
/// buffer is untouched when it is too small.
unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize, written: *mut usize) -> BastaStatus {
    *written = values.len();
    if len < values.len() {
        return fail(
            BastaStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        );
    }
    if !values.is_empty() {
        non_null!(buf);
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    BastaStatus::Ok
}

/// Message for the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn basta_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a JSON experiment config (the CLI format) into a model.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn basta_model_from_json(
    json: *const c_char,
    out: *mut *mut BastaModel,
) -> BastaStatus {
    guard(|| {
        non_null!(json, out);
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(BastaStatus::InvalidUtf8, e.to_string()),
        };
        let spec = match parse_config_str(text).map(|c| c.validated()) {
            Ok(Ok(spec)) => spec,
            Ok(Err(e)) => return fail(BastaStatus::InvalidConfig, e.to_string()),
            Err(e) => return fail(BastaStatus::InvalidConfig, e.to_string()),
        };
        *out = Box::into_raw(Box::new(BastaModel { spec }));
        BastaStatus::Ok
    })
}

/// # Safety
/// `model` must come from `basta_model_from_json` and not be freed twice.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn basta_model_free(model: *mut BastaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Whether the model's utilization is below one.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_model_is_stable(
    model: *const BastaModel,
    out: *mut bool,
) -> BastaStatus {
    guard(|| {
        non_null!(model, out);
        *out = (*model).spec.is_stable();
        BastaStatus::Ok
    })
}

/// Run every replication of the model and merge them.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_simulate(
    model: *const BastaModel,
    out: *mut *mut BastaReport,
) -> BastaStatus {
    guard(|| {
        non_null!(model, out);
        let report = run_simulation(&(*model).spec);
        *out = Box::into_raw(Box::new(BastaReport { report }));
        BastaStatus::Ok
    })
}

/// # Safety
/// `report` must come from `basta_simulate` and not be freed twice. Null
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn basta_report_free(report: *mut BastaReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Observed slots, summed over replications.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_report_total_slots(
    report: *const BastaReport,
    out: *mut u64,
) -> BastaStatus {
    guard(|| {
        non_null!(report, out);
        *out = (*report).report.total_slots_observed();
        BastaStatus::Ok
    })
}

/// Observed slots with at least one arrival.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_report_arrival_events(
    report: *const BastaReport,
    out: *mut u64,
) -> BastaStatus {
    guard(|| {
        non_null!(report, out);
        *out = (*report).report.arrival_events();
        BastaStatus::Ok
    })
}

/// Length of every distribution: tracked states plus the overflow bin.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_report_num_states(
    report: *const BastaReport,
    out: *mut usize,
) -> BastaStatus {
    guard(|| {
        non_null!(report, out);
        *out = (*report).report.bins();
        BastaStatus::Ok
    })
}

/// Arrival-event frequency per observed slot.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_report_lambda_hat(
    report: *const BastaReport,
    out: *mut f64,
) -> BastaStatus {
    guard(|| {
        non_null!(report, out);
        *out = (*report).report.lambda_hat();
        BastaStatus::Ok
    })
}

/// Copy one distribution into `buf[0..len]`. `written` receives the
/// number of states, also when the buffer is too small.
///
/// # Safety
/// `buf` must hold `len` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_report_distribution(
    report: *const BastaReport,
    kind: BastaDistribution,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> BastaStatus {
    guard(|| {
        non_null!(report, written);
        let r = &(*report).report;
        let values = match kind {
            BastaDistribution::Edge => r.pi_edge(),
            BastaDistribution::Center => r.pi_center(),
            BastaDistribution::PotentialArrival => r.pi_pa(),
            BastaDistribution::PreArrival => match r.pi_prearrival() {
                Some(v) => v,
                None => return fail(BastaStatus::NoArrivals, "report has no arrival events"),
            },
        };
        copy_out(&values, buf, len, written)
    })
}

/// Largest per-state residual of the sample-path identity.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_check_theorem31(
    report: *const BastaReport,
    residual: *mut f64,
    passed: *mut bool,
) -> BastaStatus {
    guard(|| {
        non_null!(report, residual, passed);
        match check_theorem31(&(*report).report) {
            Ok(c) => {
                *residual = c.statistic;
                *passed = c.passed;
                BastaStatus::Ok
            }
            Err(e) => fail(BastaStatus::NoArrivals, e.to_string()),
        }
    })
}

/// TV distance between the pre-arrival and potential-arrival
/// distributions, and whether it is within `threshold`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_check_basta(
    report: *const BastaReport,
    threshold: f64,
    tv: *mut f64,
    passed: *mut bool,
) -> BastaStatus {
    guard(|| {
        non_null!(report, tv, passed);
        if threshold.is_nan() || threshold < 0.0 {
            return fail(BastaStatus::InvalidArgument, "threshold must be >= 0");
        }
        match check_basta(&(*report).report, threshold) {
            Ok(c) => {
                *tv = c.statistic;
                *passed = c.passed;
                BastaStatus::Ok
            }
            Err(e) => fail(BastaStatus::NoArrivals, e.to_string()),
        }
    })
}

/// Birth-death product form for the model's rule, states `0..written`,
/// plus the truncated tail mass. Needs Bernoulli arrivals and geometric or
/// hazard service.
///
/// # Safety
/// `buf` must hold `len` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn basta_analytic(
    model: *const BastaModel,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
    tail_mass: *mut f64,
) -> BastaStatus {
    guard(|| {
        non_null!(model, written, tail_mass);
        let spec = (*model).spec.spec();
        let alpha = match spec.arrival {
            ArrivalSpec::Bernoulli { alpha } => alpha,
            _ => return fail(BastaStatus::InvalidArgument, "analytic form needs bernoulli arrivals"),
        };
        let Some(hazard) = HazardFn::from_service(&spec.service) else {
            return fail(BastaStatus::InvalidArgument, "no analytic form for general service");
        };
        if !(*model).spec.is_stable() {
            return fail(BastaStatus::Unstable, "unstable: utilization >= 1");
        }
        let pmf = match pa_distribution_rule(&BirthDeathSpec {
            alpha,
            hazard,
            rule: spec.rule,
        }) {
            Ok(p) => p,
            Err(e) => return fail(BastaStatus::Unstable, e.to_string()),
        };
        let status = copy_out(&pmf.probs, buf, len, written);
        if status == BastaStatus::Ok {
            *tail_mass = pmf.tail_mass;
        }
        status
    })
}

/// Total-variation distance; the shorter vector is padded with zeros.
///
/// # Safety
/// `p` and `q` must hold `p_len` and `q_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn basta_tv_distance(
    p: *const f64,
    p_len: usize,
    q: *const f64,
    q_len: usize,
    out: *mut f64,
) -> BastaStatus {
    guard(|| {
        non_null!(out);
        if (p.is_null() && p_len > 0) || (q.is_null() && q_len > 0) {
            return fail(BastaStatus::NullPointer, "vector is null");
        }
        let view = |ptr: *const f64, len| if len == 0 { &[][..] } else { slice::from_raw_parts(ptr, len) };
        match tv_distance(view(p, p_len), view(q, q_len)) {
            Ok(d) => {
                *out = d;
                BastaStatus::Ok
            }
            Err(e) => fail(BastaStatus::InvalidArgument, e.to_string()),
        }
    })
}

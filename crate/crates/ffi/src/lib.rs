//! C ABI over `sia-core`.
//!
//! - Every fallible function returns a [`SiaStatus`]; results come back
//!   through out-pointers that are written only on success.
//! - The message for the last failure on the calling thread is available
//!   from [`sia_last_error_message`].
//! - Instances and solutions are opaque heap handles released with their
//!   `_free` function. Strings handed out are released with
//!   [`sia_string_free`].
//! - Panics never cross the boundary; they surface as `SIA_STATUS_PANIC`.
//!
//! # Safety
//!
//! Pointer arguments must be valid and non-null unless documented otherwise.
//! Handles must come from this library and must not be used after being
//! freed.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use sia_core::bnb::{solve, BnbConfig, BranchRule, SearchOrder, SolveError};
use sia_core::instance::{split_count, Solution, SolveStatus};
use sia_core::instance_file::parse_instance;
use sia_core::lp::PivotRule;
use sia_core::lpformat::write_lp;
use sia_core::milp::build_named_milp;
use sia_core::oracle::{brute_force_solve, OracleError};
use sia_core::reduction::{decide_partition, PartitionInstance, ReductionError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Infeasible = 5,
    LimitReached = 6,
    SearchSpaceTooLarge = 7,
    Export = 8,
    Internal = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiaSolveStatus {
    Optimal = 0,
    NodeLimit = 1,
    TimeLimit = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiaBranchRule {
    ActFirstMostFractional = 0,
    XMostFractional = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiaSearchOrder {
    BestBound = 0,
    DepthFirst = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiaPivotRule {
    Bland = 0,
    Dantzig = 1,
}

/// Branch-and-bound settings. Start from [`sia_solve_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SiaSolveOptions {
    pub node_limit: u64,
    pub time_limit_seconds: f64,
    pub branch_rule: SiaBranchRule,
    pub search_order: SiaSearchOrder,
    pub pivot_rule: SiaPivotRule,
}

/// A validated instance.
pub struct SiaInstance(sia_core::instance::SiaInstance);

/// A solved instance: allocation, cost and solver statistics.
pub struct SiaSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SiaStatus, message: impl Into<String>) -> SiaStatus {
    set_error(message);
    status
}

/// Runs `body`, turning a panic into `SIA_STATUS_PANIC`.
fn guard(body: impl FnOnce() -> SiaStatus) -> SiaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(SiaStatus::Panic, format!("internal panic: {what}"))
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, SiaStatus> {
    if ptr.is_null() {
        return Err(fail(SiaStatus::NullArgument, "string argument is null"));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| fail(SiaStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn hand_out(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " ")).expect("interior nuls removed").into_raw()
}

impl From<SiaBranchRule> for BranchRule {
    fn from(r: SiaBranchRule) -> Self {
        match r {
            SiaBranchRule::ActFirstMostFractional => BranchRule::ActFirstMostFractional,
            SiaBranchRule::XMostFractional => BranchRule::XMostFractional,
        }
    }
}

impl From<SiaSearchOrder> for SearchOrder {
    fn from(o: SiaSearchOrder) -> Self {
        match o {
            SiaSearchOrder::BestBound => SearchOrder::BestBound,
            SiaSearchOrder::DepthFirst => SearchOrder::DepthFirst,
        }
    }
}

impl From<SiaPivotRule> for PivotRule {
    fn from(p: SiaPivotRule) -> Self {
        match p {
            SiaPivotRule::Bland => PivotRule::Bland,
            SiaPivotRule::Dantzig => PivotRule::Dantzig,
        }
    }
}

impl SiaSolveOptions {
    fn to_config(self) -> Result<BnbConfig, SiaStatus> {
        if !(self.time_limit_seconds.is_finite() && self.time_limit_seconds > 0.0) {
            return Err(fail(SiaStatus::InvalidArgument, "time limit must be a positive number of seconds"));
        }
        let config = BnbConfig {
            node_limit: self.node_limit,
            time_limit: Duration::from_secs_f64(self.time_limit_seconds),
            branch_rule: self.branch_rule.into(),
            search_order: self.search_order.into(),
            pivot_rule: self.pivot_rule.into(),
            prune: true,
        };
        config.validate().map_err(|e| fail(SiaStatus::InvalidArgument, e.to_string()))?;
        Ok(config)
    }
}

/// Library defaults: 10^6 nodes, 60 s, act-first branching, best-bound
/// search, Bland pivoting.
#[no_mangle]
pub extern "C" fn sia_solve_options_default() -> SiaSolveOptions {
    let d = BnbConfig::default();
    SiaSolveOptions {
        node_limit: d.node_limit,
        time_limit_seconds: d.time_limit.as_secs_f64(),
        branch_rule: match d.branch_rule {
            BranchRule::ActFirstMostFractional => SiaBranchRule::ActFirstMostFractional,
            BranchRule::XMostFractional => SiaBranchRule::XMostFractional,
        },
        search_order: match d.search_order {
            SearchOrder::BestBound => SiaSearchOrder::BestBound,
            SearchOrder::DepthFirst => SiaSearchOrder::DepthFirst,
        },
        pivot_rule: match d.pivot_rule {
            PivotRule::Bland => SiaPivotRule::Bland,
            PivotRule::Dantzig => SiaPivotRule::Dantzig,
        },
    }
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sia_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sia_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an instance document (TOML text).
#[no_mangle]
pub unsafe extern "C" fn sia_instance_from_toml(text: *const c_char, out: *mut *mut SiaInstance) -> SiaStatus {
    guard(|| {
        if out.is_null() {
            return fail(SiaStatus::NullArgument, "output pointer is null");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_instance(text) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(SiaInstance(inst)));
                SiaStatus::Ok
            }
            Err(e) => fail(SiaStatus::Parse, e.to_string()),
        }
    })
}

/// Releases an instance. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sia_instance_free(instance: *mut SiaInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Writes the interface, service and resource counts.
#[no_mangle]
pub unsafe extern "C" fn sia_instance_dims(
    instance: *const SiaInstance,
    interfaces: *mut usize,
    services: *mut usize,
    resources: *mut usize,
) -> SiaStatus {
    guard(|| {
        if instance.is_null() || interfaces.is_null() || services.is_null() || resources.is_null() {
            return fail(SiaStatus::NullArgument, "null argument");
        }
        let d = (*instance).0.dims();
        *interfaces = d.interfaces;
        *services = d.services;
        *resources = d.resources;
        SiaStatus::Ok
    })
}

/// Solves by branch and bound. `options` may be null for the defaults.
///
/// Returns `SIA_STATUS_INFEASIBLE` when no allocation exists and
/// `SIA_STATUS_LIMIT_REACHED` when a limit stops the search before any
/// feasible allocation is found. A limit hit after an allocation is known
/// still returns a solution; check [`sia_solution_status`].
#[no_mangle]
pub unsafe extern "C" fn sia_solve(
    instance: *const SiaInstance,
    options: *const SiaSolveOptions,
    out: *mut *mut SiaSolution,
) -> SiaStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(SiaStatus::NullArgument, "null argument");
        }
        let opts = if options.is_null() { sia_solve_options_default() } else { *options };
        let config = match opts.to_config() {
            Ok(c) => c,
            Err(s) => return s,
        };
        match solve(&(*instance).0, &config) {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(SiaSolution(sol)));
                SiaStatus::Ok
            }
            Err(e @ SolveError::InfeasibleInstance) => fail(SiaStatus::Infeasible, e.to_string()),
            Err(e @ SolveError::NoIncumbent { .. }) => fail(SiaStatus::LimitReached, e.to_string()),
            Err(e) => fail(SiaStatus::Internal, e.to_string()),
        }
    })
}

/// Releases a solution. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sia_solution_free(solution: *mut SiaSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

unsafe fn with_solution(solution: *const SiaSolution, body: impl FnOnce(&Solution) -> SiaStatus) -> SiaStatus {
    guard(|| {
        if solution.is_null() {
            return fail(SiaStatus::NullArgument, "solution is null");
        }
        body(&(*solution).0)
    })
}

#[no_mangle]
pub unsafe extern "C" fn sia_solution_status(solution: *const SiaSolution, out: *mut SiaSolveStatus) -> SiaStatus {
    with_solution(solution, |s| {
        if out.is_null() {
            return fail(SiaStatus::NullArgument, "output pointer is null");
        }
        *out = match s.status() {
            SolveStatus::Optimal => SiaSolveStatus::Optimal,
            SolveStatus::NodeLimit => SiaSolveStatus::NodeLimit,
            SolveStatus::TimeLimit => SiaSolveStatus::TimeLimit,
            SolveStatus::Infeasible => unreachable!("solutions are never infeasible"),
        };
        SiaStatus::Ok
    })
}

/// Exact cost as a `"p/q"` string; release with [`sia_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sia_solution_objective(solution: *const SiaSolution, out: *mut *mut c_char) -> SiaStatus {
    with_solution(solution, |s| {
        if out.is_null() {
            return fail(SiaStatus::NullArgument, "output pointer is null");
        }
        *out = hand_out(s.objective().to_fraction_string());
        SiaStatus::Ok
    })
}

/// Cost rounded to the nearest double.
#[no_mangle]
pub unsafe extern "C" fn sia_solution_objective_f64(solution: *const SiaSolution, out: *mut f64) -> SiaStatus {
    with_solution(solution, |s| {
        if out.is_null() {
            return fail(SiaStatus::NullArgument, "output pointer is null");
        }
        *out = s.objective().to_f64();
        SiaStatus::Ok
    })
}

/// Number of extra interfaces used across services.
#[no_mangle]
pub unsafe extern "C" fn sia_solution_splits(solution: *const SiaSolution, out: *mut u64) -> SiaStatus {
    with_solution(solution, |s| {
        if out.is_null() {
            return fail(SiaStatus::NullArgument, "output pointer is null");
        }
        *out = split_count(s);
        SiaStatus::Ok
    })
}

/// Branch-and-bound nodes explored.
#[no_mangle]
pub unsafe extern "C" fn sia_solution_nodes(solution: *const SiaSolution, out: *mut u64) -> SiaStatus {
    with_solution(solution, |s| {
        if out.is_null() {
            return fail(SiaStatus::NullArgument, "output pointer is null");
        }
        *out = s.stats().nodes;
        SiaStatus::Ok
    })
}

/// Amount of resource `k` of service `j` placed on interface `i`
/// (0-based).
#[no_mangle]
pub unsafe extern "C" fn sia_solution_amount(
    solution: *const SiaSolution,
    interface: usize,
    service: usize,
    resource: usize,
    out: *mut u64,
) -> SiaStatus {
    with_solution(solution, |s| {
        if out.is_null() {
            return fail(SiaStatus::NullArgument, "output pointer is null");
        }
        let d = s.allocation().dims();
        if interface >= d.interfaces || service >= d.services || resource >= d.resources {
            return fail(SiaStatus::InvalidArgument, "index out of range");
        }
        *out = s.allocation().get(interface, service, resource);
        SiaStatus::Ok
    })
}

/// Exhaustive optimum as a `"p/q"` string, enumerating at most
/// `max_allocations` allocations.
#[no_mangle]
pub unsafe extern "C" fn sia_oracle_objective(
    instance: *const SiaInstance,
    max_allocations: u64,
    out: *mut *mut c_char,
) -> SiaStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(SiaStatus::NullArgument, "null argument");
        }
        match brute_force_solve(&(*instance).0, max_allocations as u128) {
            Ok(r) => {
                *out = hand_out(r.objective.to_fraction_string());
                SiaStatus::Ok
            }
            Err(e @ OracleError::InfeasibleInstance) => fail(SiaStatus::Infeasible, e.to_string()),
            Err(e) => fail(SiaStatus::SearchSpaceTooLarge, e.to_string()),
        }
    })
}

/// Whether the `len` positive integers at `elements` split into two halves
/// of equal sum, decided through the assignment solver.
#[no_mangle]
pub unsafe extern "C" fn sia_decide_partition(elements: *const u64, len: usize, out: *mut bool) -> SiaStatus {
    guard(|| {
        if elements.is_null() || out.is_null() {
            return fail(SiaStatus::NullArgument, "null argument");
        }
        let values = std::slice::from_raw_parts(elements, len).to_vec();
        let pp = match PartitionInstance::new(values) {
            Ok(pp) => pp,
            Err(e) => return fail(SiaStatus::InvalidArgument, e.to_string()),
        };
        match decide_partition(&pp, &BnbConfig::default()) {
            Ok(answer) => {
                *out = answer;
                SiaStatus::Ok
            }
            Err(e @ ReductionError::SolverLimitHit(_)) => fail(SiaStatus::LimitReached, e.to_string()),
            Err(e) => fail(SiaStatus::Internal, e.to_string()),
        }
    })
}

/// The instance's model in LP format; release with [`sia_string_free`].
/// `name` may be null.
#[no_mangle]
pub unsafe extern "C" fn sia_export_lp(
    instance: *const SiaInstance,
    name: *const c_char,
    out: *mut *mut c_char,
) -> SiaStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return fail(SiaStatus::NullArgument, "null argument");
        }
        let name = if name.is_null() {
            "sia"
        } else {
            match read_str(name) {
                Ok(n) => n,
                Err(s) => return s,
            }
        };
        match write_lp(&build_named_milp(&(*instance).0, name)) {
            Ok(text) => {
                *out = hand_out(text);
                SiaStatus::Ok
            }
            Err(e) => fail(SiaStatus::Export, e.to_string()),
        }
    })
}

//! C ABI for the swap-test library.
//!
//! Every fallible call returns a [`SwaptestStatus`]; on failure the message is
//! kept per thread and read with [`swaptest_last_error`]. Handles are opaque
//! and owned by the caller, who releases them with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use swaptest::analytics::{cfi, qfi, witness_with_flips, Branch, FlipProbs, GateKind, ProbePlan};
use swaptest::gatesim::ProtocolRunner;
use swaptest::runner::{self, ExperimentConfig, SweepResult};
use swaptest::sweep::fit_fringe;
use swaptest::{Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwaptestStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Truncation = 4,
    NullOutcome = 5,
    Undefined = 6,
    Integrator = 7,
    Io = 8,
    OutOfRange = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwaptestGate {
    ControlledSwap = 0,
    ControlledBeamSplitter = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwaptestBranch {
    Antisymmetric = 0,
    Symmetric = 1,
}

/// Result of a least-squares fringe fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SwaptestFringe {
    pub visibility: f64,
    pub offset: f64,
    pub phase: f64,
    pub period: f64,
    pub residual: f64,
}

/// Input states, gate and postselected branch.
pub struct SwaptestPlan(ProbePlan);

/// Gate-level simulator bound to one plan.
pub struct SwaptestRunner(ProtocolRunner);

/// Tables produced by a config run.
pub struct SwaptestResult {
    result: SweepResult,
    names: Vec<Vec<CString>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SwaptestStatus {
    match e {
        Error::Config(_) => SwaptestStatus::Config,
        Error::Truncation { .. } | Error::EnlargeDimension(_) => SwaptestStatus::Truncation,
        Error::NullOutcome { .. } | Error::InfeasibleBranch { .. } => SwaptestStatus::NullOutcome,
        Error::UndefinedBranch(_) | Error::DegenerateInput(_) | Error::NotDerived(_) => SwaptestStatus::Undefined,
        Error::StepUnderflow { .. } => SwaptestStatus::Integrator,
        Error::Io(_) => SwaptestStatus::Io,
        Error::OutOfRange { .. } | Error::Layout(_) => SwaptestStatus::OutOfRange,
        Error::InvalidParameter(_) => SwaptestStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F>(f: F) -> SwaptestStatus
where
    F: FnOnce() -> Result<(), (SwaptestStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SwaptestStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            SwaptestStatus::Panic
        }
    }
}

fn lib(e: Error) -> (SwaptestStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SwaptestStatus, String) {
    (SwaptestStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SwaptestStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (SwaptestStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (SwaptestStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], (SwaptestStatus, String)> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn swaptest_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn swaptest_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// NOON-type plan `|n⟩|m⟩` with a controlled swap and the antisymmetric branch.
///
/// # Safety
/// `out_plan` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_plan_noon(n: usize, m: usize, out_plan: *mut *mut SwaptestPlan) -> SwaptestStatus {
    guard(|| {
        let o = out(out_plan, "out_plan")?;
        let p = ProbePlan::noon(n, m).map_err(lib)?;
        *o = Box::into_raw(Box::new(SwaptestPlan(p)));
        Ok(())
    })
}

/// Coherent plan `|α₁⟩|α₂⟩`.
///
/// # Safety
/// `out_plan` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_plan_coherent(
    alpha1_re: f64,
    alpha1_im: f64,
    alpha2_re: f64,
    alpha2_im: f64,
    out_plan: *mut *mut SwaptestPlan,
) -> SwaptestStatus {
    guard(|| {
        let o = out(out_plan, "out_plan")?;
        let p = ProbePlan::coherent(C64::new(alpha1_re, alpha1_im), C64::new(alpha2_re, alpha2_im)).map_err(lib)?;
        *o = Box::into_raw(Box::new(SwaptestPlan(p)));
        Ok(())
    })
}

/// # Safety
/// `plan` must come from a `swaptest_plan_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn swaptest_plan_set_gate(plan: *mut SwaptestPlan, gate: SwaptestGate) -> SwaptestStatus {
    guard(|| {
        let p = out(plan, "plan")?;
        p.0.gate = match gate {
            SwaptestGate::ControlledSwap => GateKind::ControlledSwap,
            SwaptestGate::ControlledBeamSplitter => GateKind::ControlledBeamSplitter,
        };
        Ok(())
    })
}

/// # Safety
/// `plan` must come from a `swaptest_plan_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn swaptest_plan_set_branch(plan: *mut SwaptestPlan, branch: SwaptestBranch) -> SwaptestStatus {
    guard(|| {
        let p = out(plan, "plan")?;
        p.0.branch = match branch {
            SwaptestBranch::Antisymmetric => Branch::Antisymmetric,
            SwaptestBranch::Symmetric => Branch::Symmetric,
        };
        Ok(())
    })
}

/// # Safety
/// `plan` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn swaptest_plan_free(plan: *mut SwaptestPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

fn flips(p1: f64, p2: f64) -> Result<FlipProbs, (SwaptestStatus, String)> {
    FlipProbs::new(p1, p2).map_err(lib)
}

/// Closed-form overlap witness `Δ(φ)` with phase-flip probabilities `p1`, `p2`.
///
/// # Safety
/// `plan` must be a live handle and `out_delta` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_witness(
    plan: *const SwaptestPlan,
    p1: f64,
    p2: f64,
    phi: f64,
    out_delta: *mut f64,
) -> SwaptestStatus {
    guard(|| {
        let p = deref(plan, "plan")?;
        let o = out(out_delta, "out_delta")?;
        *o = witness_with_flips(&p.0, flips(p1, p2)?, phi).map_err(lib)?;
        Ok(())
    })
}

/// Classical Fisher information of the second swap test.
///
/// # Safety
/// `plan` must be a live handle and `out_cfi` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_cfi(
    plan: *const SwaptestPlan,
    p1: f64,
    p2: f64,
    phi: f64,
    out_cfi: *mut f64,
) -> SwaptestStatus {
    guard(|| {
        let p = deref(plan, "plan")?;
        let o = out(out_cfi, "out_cfi")?;
        *o = cfi(&p.0, flips(p1, p2)?, phi).map_err(lib)?;
        Ok(())
    })
}

/// Quantum Fisher information of the state prepared by the first swap test.
///
/// # Safety
/// `plan` must be a live handle and `out_qfi` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_qfi(plan: *const SwaptestPlan, out_qfi: *mut f64) -> SwaptestStatus {
    guard(|| {
        let p = deref(plan, "plan")?;
        let o = out(out_qfi, "out_qfi")?;
        *o = qfi(&p.0).map_err(lib)?;
        Ok(())
    })
}

/// Gate-level simulator for `plan` with the default truncation.
///
/// # Safety
/// `plan` must be a live handle and `out_runner` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_runner_new(
    plan: *const SwaptestPlan,
    out_runner: *mut *mut SwaptestRunner,
) -> SwaptestStatus {
    guard(|| {
        let p = deref(plan, "plan")?;
        let o = out(out_runner, "out_runner")?;
        let r = ProtocolRunner::for_plan(p.0).map_err(lib)?;
        *o = Box::into_raw(Box::new(SwaptestRunner(r)));
        Ok(())
    })
}

/// Probability mass of the input lost to truncation.
///
/// # Safety
/// `runner` must be a live handle and `out_leakage` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_runner_leakage(
    runner: *const SwaptestRunner,
    out_leakage: *mut f64,
) -> SwaptestStatus {
    guard(|| {
        let r = deref(runner, "runner")?;
        *out(out_leakage, "out_leakage")? = r.0.leakage();
        Ok(())
    })
}

/// Second-test outcome probabilities for `len` phases. `p_plus` and `p_minus`
/// must each hold `len` values.
///
/// # Safety
/// All arrays must be valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn swaptest_runner_sweep(
    runner: *const SwaptestRunner,
    phis: *const f64,
    len: usize,
    p1: f64,
    p2: f64,
    p_plus: *mut f64,
    p_minus: *mut f64,
) -> SwaptestStatus {
    guard(|| {
        let r = deref(runner, "runner")?;
        let phis = slice(phis, len, "phis")?;
        let pp = slice_mut(p_plus, len, "p_plus")?;
        let pm = slice_mut(p_minus, len, "p_minus")?;
        let traces = r.0.sweep(phis, r.0.plan().branch, flips(p1, p2)?).map_err(lib)?;
        for (i, t) in traces.iter().enumerate() {
            pp[i] = t.p_plus;
            pm[i] = t.p_minus;
        }
        Ok(())
    })
}

/// # Safety
/// `runner` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn swaptest_runner_free(runner: *mut SwaptestRunner) {
    if !runner.is_null() {
        drop(Box::from_raw(runner));
    }
}

/// Fits `c₀ − V cos(n(φ − ϑ/n))` to `len` samples.
///
/// # Safety
/// `phis` and `deltas` must be valid for `len` elements, `out_fit` for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_fit_fringe(
    phis: *const f64,
    deltas: *const f64,
    len: usize,
    harmonic: u32,
    out_fit: *mut SwaptestFringe,
) -> SwaptestStatus {
    guard(|| {
        let x = slice(phis, len, "phis")?;
        let y = slice(deltas, len, "deltas")?;
        let o = out(out_fit, "out_fit")?;
        let f = fit_fringe(x, y, harmonic).map_err(lib)?;
        *o = SwaptestFringe {
            visibility: f.visibility,
            offset: f.offset,
            phase: f.phase,
            period: f.period,
            residual: f.residual,
        };
        Ok(())
    })
}

/// Runs an experiment from TOML config text (rates in Hz). Nothing is
/// written to disk.
///
/// # Safety
/// `config_toml` must be a NUL-terminated UTF-8 string, `out_result` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_run_config(
    config_toml: *const c_char,
    out_result: *mut *mut SwaptestResult,
) -> SwaptestStatus {
    guard(|| {
        if config_toml.is_null() {
            return Err(null("config_toml"));
        }
        let o = out(out_result, "out_result")?;
        let text = CStr::from_ptr(config_toml)
            .to_str()
            .map_err(|_| (SwaptestStatus::InvalidArgument, "config is not UTF-8".to_string()))?;
        let cfg = ExperimentConfig::from_toml(text).map_err(lib)?;
        let result = runner::run(&cfg).map_err(lib)?;
        let names = result
            .tables
            .iter()
            .map(|t| {
                t.columns
                    .iter()
                    .map(|c| CString::new(c.as_str()).unwrap_or_default())
                    .collect()
            })
            .collect();
        *o = Box::into_raw(Box::new(SwaptestResult { result, names }));
        Ok(())
    })
}

fn table(r: &SwaptestResult, t: usize) -> Result<&swaptest::runner::Table, (SwaptestStatus, String)> {
    r.result
        .tables
        .get(t)
        .ok_or_else(|| (SwaptestStatus::OutOfRange, format!("table {t} out of range")))
}

/// Number of tables; the primary one has index 0.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swaptest_result_table_count(result: *const SwaptestResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.tables.len())
}

/// Row and column counts of table `t`.
///
/// # Safety
/// `result` must be a live handle; the out pointers valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_result_shape(
    result: *const SwaptestResult,
    t: usize,
    out_rows: *mut usize,
    out_cols: *mut usize,
) -> SwaptestStatus {
    guard(|| {
        let tb = table(deref(result, "result")?, t)?;
        *out(out_rows, "out_rows")? = tb.rows.len();
        *out(out_cols, "out_cols")? = tb.columns.len();
        Ok(())
    })
}

/// Column name, owned by the result handle; null if out of range.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swaptest_result_column_name(
    result: *const SwaptestResult,
    t: usize,
    col: usize,
) -> *const c_char {
    result
        .as_ref()
        .and_then(|r| r.names.get(t))
        .and_then(|n| n.get(col))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Copies column `col` of table `t` into `buf`, which must hold the table's row count.
///
/// # Safety
/// `result` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn swaptest_result_column(
    result: *const SwaptestResult,
    t: usize,
    col: usize,
    buf: *mut f64,
    len: usize,
) -> SwaptestStatus {
    guard(|| {
        let tb = table(deref(result, "result")?, t)?;
        if col >= tb.columns.len() {
            return Err((SwaptestStatus::OutOfRange, format!("column {col} out of range")));
        }
        if len < tb.rows.len() {
            return Err((
                SwaptestStatus::InvalidArgument,
                format!("buffer holds {len} values, table has {} rows", tb.rows.len()),
            ));
        }
        let b = slice_mut(buf, len, "buf")?;
        for (dst, row) in b.iter_mut().zip(&tb.rows) {
            *dst = row[col];
        }
        Ok(())
    })
}

/// Fitted fringe stored in the run metadata, if the experiment has one.
///
/// # Safety
/// `result` must be a live handle and `out_fit` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn swaptest_result_fit(
    result: *const SwaptestResult,
    out_fit: *mut SwaptestFringe,
) -> SwaptestStatus {
    guard(|| {
        let r = deref(result, "result")?;
        let o = out(out_fit, "out_fit")?;
        let f = r.result.metadata.fit.ok_or((
            SwaptestStatus::Undefined,
            "this experiment has no fringe fit".to_string(),
        ))?;
        *o = SwaptestFringe {
            visibility: f.visibility,
            offset: f.offset,
            phase: f.phase,
            period: f.period,
            residual: f.residual,
        };
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn swaptest_result_free(result: *mut SwaptestResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

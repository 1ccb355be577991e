//! C interface. Graphs and tables cross the boundary as opaque handles;
//! every fallible call returns a [`CwStatus`] and leaves a message for
//! [`cw_last_error`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use causeway::dag::{d_separated, parse_dot, serialize_dot};
use causeway::estimate::estimate_effect;
use causeway::identify::{identify_effect, Estimand, Strategy};
use causeway::phenomena::quantum::{log_negativity, DensityMatrix};
use causeway::refute::{refute_data_subset, refute_placebo, refute_random_common_cause, RefuteMethod};
use causeway::{Dag, DataTable};
use nalgebra::Matrix4;
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Graph = 4,
    Data = 5,
    NotIdentified = 6,
    Estimation = 7,
    Refutation = 8,
    InvalidArgument = 9,
    Panic = 10,
}

/// Causal graph handle.
pub struct CwDag(Dag);

/// Data table handle.
pub struct CwTable(DataTable);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CwEstimate {
    pub ate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub n: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CwRefutation {
    pub original_effect: f64,
    pub new_effect: f64,
    pub new_effect_sd: f64,
    pub p_value: f64,
    pub replicates: usize,
    /// Non-zero when there were too few replicates for a stable p-value.
    pub wide_variance: bool,
}

struct Failure {
    status: CwStatus,
    message: String,
}

fn fail(status: CwStatus, message: impl ToString) -> Failure {
    Failure {
        status,
        message: message.to_string(),
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CwStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CwStatus::Ok,
        Ok(Err(Failure { status, message })) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal error".to_string());
            CwStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(CwStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn texts<'a>(p: *const *const c_char, n: usize, what: &str) -> Result<Vec<&'a str>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(fail(CwStatus::NullPointer, format!("{what} is null")));
    }
    std::slice::from_raw_parts(p, n)
        .iter()
        .map(|&s| text(s, what))
        .collect()
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(CwStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(fail(CwStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

/// Message describing the most recent failure on this thread, or null.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn cw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a DOT digraph.
///
/// # Safety
/// `dot` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_dag_parse(dot: *const c_char, out: *mut *mut CwDag) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        *out = ptr::null_mut();
        let g = parse_dot(text(dot, "dot")?).map_err(|e| fail(CwStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(CwDag(g)));
        Ok(())
    })
}

/// # Safety
/// `dag` must come from [`cw_dag_parse`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cw_dag_free(dag: *mut CwDag) {
    if !dag.is_null() {
        drop(Box::from_raw(dag));
    }
}

/// DOT text of the graph; release with [`cw_string_free`].
///
/// # Safety
/// `dag` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_dag_to_dot(dag: *const CwDag, out: *mut *mut c_char) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        *out = ptr::null_mut();
        let g = handle(dag, "dag")?;
        *out = into_c_string(serialize_dot(&g.0));
        Ok(())
    })
}

/// Whether `x` and `y` are d-separated given the `n_given` names in `given`.
///
/// # Safety
/// Strings must be NUL-terminated; `given` must hold `n_given` of them.
#[no_mangle]
pub unsafe extern "C" fn cw_dag_d_separated(
    dag: *const CwDag,
    x: *const c_char,
    y: *const c_char,
    given: *const *const c_char,
    n_given: usize,
    out: *mut bool,
) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        let g = handle(dag, "dag")?;
        let (x, y) = (text(x, "x")?, text(y, "y")?);
        let z = texts(given, n_given, "given")?;
        *out = d_separated(&g.0, &[x], &[y], &z).map_err(|e| fail(CwStatus::Graph, e))?;
        Ok(())
    })
}

/// Reads a CSV file with a header row of column names.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_table_from_csv(path: *const c_char, out: *mut *mut CwTable) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        *out = ptr::null_mut();
        let t = DataTable::from_csv_path(text(path, "path")?).map_err(|e| fail(CwStatus::Data, e))?;
        *out = Box::into_raw(Box::new(CwTable(t)));
        Ok(())
    })
}

/// Builds a table from `n_cols` columns of `n_rows` values each.
///
/// # Safety
/// `names` and `columns` must hold `n_cols` entries; every column must hold
/// `n_rows` doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_table_from_columns(
    names: *const *const c_char,
    columns: *const *const f64,
    n_cols: usize,
    n_rows: usize,
    out: *mut *mut CwTable,
) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        *out = ptr::null_mut();
        let names = texts(names, n_cols, "names")?;
        if n_cols > 0 && columns.is_null() {
            return Err(fail(CwStatus::NullPointer, "columns is null"));
        }
        let mut cols = Vec::with_capacity(n_cols);
        for (i, name) in names.into_iter().enumerate() {
            let col = *columns.add(i);
            if col.is_null() && n_rows > 0 {
                return Err(fail(CwStatus::NullPointer, format!("column `{name}` is null")));
            }
            let values = if n_rows == 0 {
                Vec::new()
            } else {
                std::slice::from_raw_parts(col, n_rows).to_vec()
            };
            cols.push((name.to_string(), values));
        }
        let t = DataTable::new(cols).map_err(|e| fail(CwStatus::Data, e))?;
        *out = Box::into_raw(Box::new(CwTable(t)));
        Ok(())
    })
}

/// # Safety
/// `table` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cw_table_free(table: *mut CwTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_table_rows(table: *const CwTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.n_rows())
}

unsafe fn estimand(
    dag: *const CwDag,
    treatment: *const c_char,
    outcome: *const c_char,
    strategy: *const c_char,
) -> Result<Estimand, Failure> {
    let g = handle(dag, "dag")?;
    let (t, o) = (text(treatment, "treatment")?, text(outcome, "outcome")?);
    let id = identify_effect(&g.0, t, o).map_err(|e| fail(CwStatus::Graph, e))?;
    if strategy.is_null() {
        return id.estimands.first().cloned().ok_or_else(|| {
            fail(
                CwStatus::NotIdentified,
                format!("effect of {t} on {o} is not identifiable"),
            )
        });
    }
    let s: Strategy = text(strategy, "strategy")?
        .parse()
        .map_err(|e| fail(CwStatus::InvalidArgument, e))?;
    id.get(s)
        .cloned()
        .ok_or_else(|| fail(CwStatus::NotIdentified, format!("no {s} estimand for {t} -> {o}")))
}

/// Identifies and estimates the effect of `treatment` on `outcome`.
/// `strategy` is one of "backdoor", "iv", "frontdoor", "mediation", or null
/// for the first identified estimand.
///
/// # Safety
/// Handles must be live; strings NUL-terminated or, for `strategy`, null.
#[no_mangle]
pub unsafe extern "C" fn cw_estimate(
    dag: *const CwDag,
    table: *const CwTable,
    treatment: *const c_char,
    outcome: *const c_char,
    strategy: *const c_char,
    out: *mut CwEstimate,
) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        let data = &handle(table, "table")?.0;
        let e = estimand(dag, treatment, outcome, strategy)?;
        let est = estimate_effect(data, &e).map_err(|e| fail(CwStatus::Estimation, e))?;
        *out = CwEstimate {
            ate: est.ate,
            se: est.se,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            p_value: est.p_value,
            n: est.n,
        };
        Ok(())
    })
}

/// Estimates the effect as [`cw_estimate`] does, then runs one refuter:
/// "random_common_cause", "placebo_treatment" or "data_subset". `fraction`
/// is only read by "data_subset".
///
/// # Safety
/// As for [`cw_estimate`]; `method` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cw_refute(
    dag: *const CwDag,
    table: *const CwTable,
    treatment: *const c_char,
    outcome: *const c_char,
    strategy: *const c_char,
    method: *const c_char,
    k: usize,
    fraction: f64,
    seed: u64,
    out: *mut CwRefutation,
) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        let data = &handle(table, "table")?.0;
        let method: RefuteMethod = text(method, "method")?
            .parse()
            .map_err(|e| fail(CwStatus::InvalidArgument, e))?;
        let e = estimand(dag, treatment, outcome, strategy)?;
        let est = estimate_effect(data, &e).map_err(|e| fail(CwStatus::Estimation, e))?;
        let r = match method {
            RefuteMethod::RandomCommonCause => refute_random_common_cause(data, &e, &est, k, seed),
            RefuteMethod::PlaceboTreatment => refute_placebo(data, &e, &est, k, seed),
            RefuteMethod::DataSubset => refute_data_subset(data, &e, &est, fraction, k, seed),
        }
        .map_err(|e| fail(CwStatus::Refutation, e))?;
        *out = CwRefutation {
            original_effect: r.original_effect,
            new_effect: r.new_effect,
            new_effect_sd: r.new_effect_sd,
            p_value: r.p_value,
            replicates: r.replicates,
            wide_variance: r.wide_variance,
        };
        Ok(())
    })
}

/// Log-negativity of a two-qubit density matrix given as 16 real and 16
/// imaginary parts in row-major order.
///
/// # Safety
/// `re` and `im` must each point to 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_log_negativity(re: *const f64, im: *const f64, out: *mut f64) -> CwStatus {
    guard(|| {
        out_ptr(out)?;
        if re.is_null() || im.is_null() {
            return Err(fail(CwStatus::NullPointer, "matrix is null"));
        }
        let (re, im) = (std::slice::from_raw_parts(re, 16), std::slice::from_raw_parts(im, 16));
        let m = Matrix4::from_fn(|r, c| Complex64::new(re[4 * r + c], im[4 * r + c]));
        let rho = DensityMatrix::new(m).map_err(|e| fail(CwStatus::InvalidArgument, e))?;
        *out = log_negativity(&rho);
        Ok(())
    })
}

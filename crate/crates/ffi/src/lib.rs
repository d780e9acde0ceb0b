//! C interface to the stabiliq checker.
//!
//! Handles are opaque. Strings returned through `out` parameters are owned by
//! the caller and released with `stq_string_free`. After any status other than
//! `STQ_STATUS_OK` or `STQ_STATUS_CHECK_FAILED`, `stq_last_error_message`
//! describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stabiliq::cli::{self, Check, Fixture, Loaded, Selector, SimulateOptions, VerifyOptions};
use stabiliq::specs::StutterPolicy;
use stabiliq::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StqStatus {
    Ok = 0,
    /// The call succeeded and a selected check does not hold.
    CheckFailed = 1,
    InvalidArgument = 2,
    ParseError = 3,
    StateCap = 4,
    ModelError = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

/// A loaded protocol: a built-in bundle, a parsed program, or the leader
/// election fixture.
pub struct StqBundle {
    loaded: Loaded,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> StqStatus {
    match err {
        Error::Parse(_) => StqStatus::ParseError,
        Error::StateCap { .. } => StqStatus::StateCap,
        Error::Model(_) => StqStatus::ModelError,
        Error::Io(_) => StqStatus::Io,
        _ => StqStatus::InvalidArgument,
    }
}

struct Fail(StqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<StqStatus, Fail>) -> StqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            StqStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(StqStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Fail(StqStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// # Safety
/// `b` is null or a handle from this library that has not been freed.
unsafe fn bundle<'a>(b: *const StqBundle) -> Result<&'a StqBundle, Fail> {
    b.as_ref().ok_or_else(|| null("bundle"))
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| Fail(StqStatus::InvalidArgument, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn put_bundle(out: *mut *mut StqBundle, loaded: Loaded) -> Result<StqStatus, Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(StqBundle { loaded }));
    Ok(StqStatus::Ok)
}

fn n_opt(n: usize) -> Option<usize> {
    (n > 0).then_some(n)
}

/// Builds a built-in protocol (`cm`, `la`, `pif`, `abp` or `le`). `n == 0`
/// selects the default size; `ids` may be null, and applies to `cm` only.
///
/// # Safety
/// `name` is a NUL-terminated string; `ids` is null or points to `ids_len`
/// integers; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_bundle_builtin(
    name: *const c_char,
    n: usize,
    ids: *const i64,
    ids_len: usize,
    out: *mut *mut StqBundle,
) -> StqStatus {
    guard(|| {
        let name = opt_str(name, "name")?.ok_or_else(|| null("name"))?;
        let ids = (!ids.is_null()).then(|| std::slice::from_raw_parts(ids, ids_len));
        put_bundle(out, cli::builtin(name, n_opt(n), ids)?)
    })
}

/// Parses guarded-command source. `protocol` may name a built-in whose mapping
/// and specifications apply to the parsed program; `n == 0` keeps the source's
/// default.
///
/// # Safety
/// `source` is a NUL-terminated string; `protocol` is null or NUL-terminated;
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_bundle_from_source(
    source: *const c_char,
    protocol: *const c_char,
    n: usize,
    out: *mut *mut StqBundle,
) -> StqStatus {
    guard(|| {
        let text = opt_str(source, "source")?.ok_or_else(|| null("source"))?;
        let sel = Selector {
            protocol: opt_str(protocol, "protocol")?.map(str::to_string),
            n: n_opt(n),
            ids: None,
            source: Some((text.to_string(), "<source>".into())),
        };
        put_bundle(out, cli::load(&sel)?)
    })
}

/// # Safety
/// `b` is null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn stq_bundle_free(b: *mut StqBundle) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Number of states in the bundle's universe.
///
/// # Safety
/// `b` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_universe_size(b: *const StqBundle, out: *mut u64) -> StqStatus {
    guard(|| {
        let size = bundle(b)?
            .loaded
            .subject()
            .universe
            .ok_or_else(|| Fail(StqStatus::StateCap, "universe does not fit in 64 bits".into()))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = size;
        Ok(StqStatus::Ok)
    })
}

fn parse_checks(text: Option<&str>) -> Result<Vec<Check>, Fail> {
    text.unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Check>().map_err(Fail::from))
        .collect()
}

/// Runs comma-separated checks (`closed`, `convergence`, `stabilizing`,
/// `ideal`, `pif-coverage`, `merge-symmetry`) and writes the JSON report.
/// Returns `STQ_STATUS_CHECK_FAILED` when a check does not hold.
///
/// # Safety
/// `b` is a live handle; string arguments are null or NUL-terminated;
/// `out_json` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_verify(
    b: *const StqBundle,
    checks: *const c_char,
    predicate: *const c_char,
    stutter_policy: *const c_char,
    out_json: *mut *mut c_char,
) -> StqStatus {
    guard(|| {
        let b = bundle(b)?;
        let stutter_policy = opt_str(stutter_policy, "stutter policy")?
            .map(str::parse::<StutterPolicy>)
            .transpose()?;
        let opts = VerifyOptions {
            checks: parse_checks(opt_str(checks, "checks")?)?,
            spec: None,
            predicate: opt_str(predicate, "predicate")?.map(str::to_string),
            stutter_policy,
        };
        let report = cli::verify(&b.loaded, &opts)?;
        put_string(out_json, report.to_json())?;
        Ok(if report.holds {
            StqStatus::Ok
        } else {
            StqStatus::CheckFailed
        })
    })
}

/// Simulates from `from` (`random`, `all-idle` or a state literal) under
/// `policy` (`round-robin` or `uniform-random`) and writes the JSON report.
///
/// # Safety
/// `b` is a live handle; string arguments are null or NUL-terminated;
/// `out_json` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_simulate(
    b: *const StqBundle,
    from: *const c_char,
    policy: *const c_char,
    steps: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> StqStatus {
    guard(|| {
        let b = bundle(b)?;
        let mut opts = SimulateOptions {
            steps,
            seed,
            ..SimulateOptions::default()
        };
        if let Some(f) = opt_str(from, "from")? {
            opts.from = f.to_string();
        }
        if let Some(p) = opt_str(policy, "policy")? {
            opts.policy = p.parse()?;
        }
        put_string(out_json, cli::simulate(&b.loaded, &opts)?.to_json())?;
        Ok(StqStatus::Ok)
    })
}

/// Writes the transition system, or its component DAG, as Graphviz DOT.
///
/// # Safety
/// `b` is a live handle; `predicate` is null or NUL-terminated; `out` is valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_export_dot(
    b: *const StqBundle,
    condensed: bool,
    predicate: *const c_char,
    out: *mut *mut c_char,
) -> StqStatus {
    guard(|| {
        let b = bundle(b)?;
        let dot = cli::export_dot(&b.loaded, condensed, opt_str(predicate, "predicate")?)?;
        put_string(out, dot)?;
        Ok(StqStatus::Ok)
    })
}

/// Writes the program as guarded-command source.
///
/// # Safety
/// `b` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_render(b: *const StqBundle, out: *mut *mut c_char) -> StqStatus {
    guard(|| {
        let b = bundle(b)?;
        put_string(out, cli::render_source(&b.loaded)?)?;
        Ok(StqStatus::Ok)
    })
}

/// Runs the merge-closure impossibility test and writes the JSON report. The
/// status is `STQ_STATUS_OK` whenever the analysis completes; the verdict is
/// in the report.
///
/// # Safety
/// `b` is a live handle; `out_json` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stq_impossibility(b: *const StqBundle, out_json: *mut *mut c_char) -> StqStatus {
    guard(|| {
        let b = bundle(b)?;
        put_string(
            out_json,
            cli::impossibility(&Fixture::Loaded(&b.loaded), None)?.to_json(),
        )?;
        Ok(StqStatus::Ok)
    })
}

/// Message for the most recent failure on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn stq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

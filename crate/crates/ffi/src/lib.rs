//! C ABI over `qsets`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or
//! by an operation, and released with the matching `*_free`. Every fallible
//! function returns a [`QsStatus`]; on anything but `QS_STATUS_OK` the
//! message is available from [`qs_last_error_message`] on the same thread.
//! Strings handed out by the library are released with [`qs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qsets::coloring::{self, ColoringFamily, Graph, SearchBudget};
use qsets::opalg::{star_map, BlockOperator};
use qsets::qfun::check_axioms;
use qsets::{Error, Relation, Tolerance};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// JSON did not parse or did not match the schema.
    Parse = 3,
    /// Well-formed but inconsistent input (shapes, labels, tolerances).
    InvalidInput = 4,
    /// A mathematical precondition failed.
    Math = 5,
    /// A search finished without a result.
    NotFound = 6,
    /// The library panicked; this is a bug.
    Panic = 7,
}

/// Numerical tolerances; pass null to any function to use the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QsTolerance {
    pub rank_cut: f64,
    pub eq_tol: f64,
}

/// Opaque relation between quantum sets.
pub struct QsRelation(Relation);

/// Opaque block operator on a quantum set.
pub struct QsOperator(BlockOperator);

/// Opaque simple graph.
pub struct QsGraph(Graph);

/// Opaque family of projections indexed by vertex and color.
pub struct QsFamily(ColoringFamily);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(QsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_input_error() { QsStatus::InvalidInput } else { QsStatus::Math };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(QsStatus::Parse, e.to_string())
    }
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            QsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            QsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(QsStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(QsStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn tolerance(p: *const QsTolerance) -> Result<Tolerance, Failure> {
    match p.as_ref() {
        None => Ok(Tolerance::default()),
        Some(t) => Ok(Tolerance::new(t.rank_cut, t.eq_tol)?),
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let text = serde_json::to_string(value)?;
    *out = CString::new(text).map_err(|e| Failure(QsStatus::Panic, e.to_string()))?.into_raw();
    Ok(())
}

unsafe fn parse<T: serde::de::DeserializeOwned>(json: *const c_char) -> Result<T, Failure> {
    Ok(serde_json::from_str(read_str(json, "json")?)?)
}

unsafe fn clear_out<T>(out: *mut *mut T) {
    if !out.is_null() {
        *out = ptr::null_mut();
    }
}

/// Default tolerances (`rank_cut = 1e-10`, `eq_tol = 1e-8`).
#[no_mangle]
pub extern "C" fn qs_tolerance_default() -> QsTolerance {
    let t = Tolerance::default();
    QsTolerance { rank_cut: t.rank_cut, eq_tol: t.eq_tol }
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// Relations.

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_relation_from_json(json: *const c_char, out: *mut *mut QsRelation) -> QsStatus {
    clear_out(out);
    guard(|| {
        let r: Relation = parse(json)?;
        put(out, QsRelation(r))
    })
}

/// # Safety
/// `rel` must be a live handle; `out` must be writable. Free the result
/// with [`qs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qs_relation_to_json(rel: *const QsRelation, out: *mut *mut c_char) -> QsStatus {
    clear_out(out);
    guard(|| put_json(out, &deref(rel, "rel")?.0))
}

/// # Safety
/// `rel` must be null or a live handle, which is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qs_relation_free(rel: *mut QsRelation) {
    if !rel.is_null() {
        drop(Box::from_raw(rel));
    }
}

/// `second ∘ first`: apply `first`, then `second`.
///
/// # Safety
/// Handles must be live; `tol` may be null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_relation_compose(
    first: *const QsRelation,
    second: *const QsRelation,
    tol: *const QsTolerance,
    out: *mut *mut QsRelation,
) -> QsStatus {
    clear_out(out);
    guard(|| {
        let t = tolerance(tol)?;
        let r = Relation::compose(&deref(second, "second")?.0, &deref(first, "first")?.0, &t)?;
        put(out, QsRelation(r))
    })
}

/// # Safety
/// `rel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_relation_dagger(rel: *const QsRelation, out: *mut *mut QsRelation) -> QsStatus {
    clear_out(out);
    guard(|| put(out, QsRelation(deref(rel, "rel")?.0.dagger())))
}

/// Projector distance between two parallel relations.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_relation_distance(a: *const QsRelation, b: *const QsRelation, out: *mut f64) -> QsStatus {
    guard(|| {
        let d = deref(a, "a")?.0.distance(&deref(b, "b")?.0)?;
        *out.as_mut().ok_or_else(|| null("out"))? = d;
        Ok(())
    })
}

/// Function axioms of a relation as a JSON witness with residuals.
///
/// # Safety
/// `rel` must be a live handle; `tol` may be null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_relation_check(
    rel: *const QsRelation,
    tol: *const QsTolerance,
    out: *mut *mut c_char,
) -> QsStatus {
    clear_out(out);
    guard(|| {
        let t = tolerance(tol)?;
        put_json(out, &check_axioms(&deref(rel, "rel")?.0, &t))
    })
}

// Operators.

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_operator_from_json(json: *const c_char, out: *mut *mut QsOperator) -> QsStatus {
    clear_out(out);
    guard(|| {
        let b: BlockOperator = parse(json)?;
        put(out, QsOperator(b))
    })
}

/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_operator_to_json(op: *const QsOperator, out: *mut *mut c_char) -> QsStatus {
    clear_out(out);
    guard(|| put_json(out, &deref(op, "op")?.0))
}

/// # Safety
/// `op` must be null or a live handle, which is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qs_operator_free(op: *mut QsOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Pulls `op` (on the target) back along the partial function `f`.
///
/// # Safety
/// Handles must be live; `tol` may be null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_star_map(
    f: *const QsRelation,
    op: *const QsOperator,
    tol: *const QsTolerance,
    out: *mut *mut QsOperator,
) -> QsStatus {
    clear_out(out);
    guard(|| {
        let t = tolerance(tol)?;
        let b = star_map(&deref(f, "f")?.0, &deref(op, "op")?.0, &t)?;
        put(out, QsOperator(b))
    })
}

// Graphs and colorings.

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_graph_from_json(json: *const c_char, out: *mut *mut QsGraph) -> QsStatus {
    clear_out(out);
    guard(|| {
        let g: Graph = parse(json)?;
        put(out, QsGraph(g))
    })
}

/// Complete graph on vertices "0", ..., "n-1".
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_graph_complete(n: usize, out: *mut *mut QsGraph) -> QsStatus {
    clear_out(out);
    guard(|| put(out, QsGraph(Graph::complete(n))))
}

/// # Safety
/// `g` must be null or a live handle, which is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qs_graph_free(g: *mut QsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_family_from_json(json: *const c_char, out: *mut *mut QsFamily) -> QsStatus {
    clear_out(out);
    guard(|| {
        let f: ColoringFamily = parse(json)?;
        put(out, QsFamily(f))
    })
}

/// # Safety
/// `fam` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_family_to_json(fam: *const QsFamily, out: *mut *mut c_char) -> QsStatus {
    clear_out(out);
    guard(|| put_json(out, &deref(fam, "fam")?.0))
}

/// # Safety
/// `fam` must be null or a live handle, which is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qs_family_free(fam: *mut QsFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// Checks a family against a graph. `pass` is true only when both the
/// projection route and the predicate route accept; `max_violation` is the
/// largest `‖p_gt p_ht‖` over edges. Either output may be null.
///
/// # Safety
/// Handles must be live; `tol` may be null.
#[no_mangle]
pub unsafe extern "C" fn qs_coloring_verify(
    graph: *const QsGraph,
    fam: *const QsFamily,
    tol: *const QsTolerance,
    pass: *mut bool,
    max_violation: *mut f64,
) -> QsStatus {
    guard(|| {
        let t = tolerance(tol)?;
        let r = coloring::verify(&deref(graph, "graph")?.0, &deref(fam, "fam")?.0, &t)?;
        if let Some(p) = pass.as_mut() {
            *p = r.pass && r.predicate_route_pass;
        }
        if let Some(v) = max_violation.as_mut() {
            *v = r.max_violation;
        }
        Ok(())
    })
}

/// Searches for a family with `colors` colors (named "0", "1", ...) in
/// dimension `dim`. Returns `QS_STATUS_NOT_FOUND` when the budget runs
/// out, which does not prove that no family exists.
///
/// # Safety
/// `graph` must be live; `tol` may be null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_coloring_search(
    graph: *const QsGraph,
    colors: usize,
    dim: usize,
    seed: u64,
    restarts: usize,
    sweeps: usize,
    tol: *const QsTolerance,
    out: *mut *mut QsFamily,
) -> QsStatus {
    clear_out(out);
    guard(|| {
        let t = tolerance(tol)?;
        let names: Vec<String> = (0..colors).map(|c| c.to_string()).collect();
        let budget = SearchBudget { restarts, sweeps };
        let outcome = coloring::search(&deref(graph, "graph")?.0, &names, dim, seed, budget, &t)?;
        match outcome.family {
            Some(f) => put(out, QsFamily(f)),
            None => Err(Failure(
                QsStatus::NotFound,
                format!(
                    "no family after {} restarts (best violation {:.3e}); not a proof of nonexistence",
                    outcome.restarts_used, outcome.best_violation
                ),
            )),
        }
    })
}

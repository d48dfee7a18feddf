//! C ABI for the analysis library.
//!
//! Handles are opaque pointers created and released by this library; every
//! fallible call returns a [`FikaStatus`] and leaves a human-readable message
//! for [`fika_last_error_message`] on failure. Strings returned through out
//! parameters are UTF-8, NUL-terminated, and owned by the caller, who must
//! release them with [`fika_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fika_core::cli::{coverage_doc, inventory_doc};
use fika_core::coverage::{parse_lcov, CoverageMap};
use fika_core::graph::{build_cha, dump_graph, enumerate_paths, CallGraph, CallPath};
use fika_core::model::dsl::parse_fixture_dsl;
use fika_core::model::json::parse_model_json;
use fika_core::model::ProjectModel;
use fika_core::triage::{parse_rules, triage_rules};

/// Result code of every fallible API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FikaStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input could not be parsed; details via `fika_last_error_message`.
    ParseError = 3,
    /// Internal serialization failure.
    SerializeError = 4,
}

/// Parsed, validated code model.
pub struct FikaModel {
    inner: ProjectModel,
}

/// Call graph plus the enumerated entry-to-library paths for one model.
pub struct FikaAnalysis {
    model: ProjectModel,
    graph: CallGraph,
    paths: Vec<CallPath>,
}

/// Merged line coverage evidence.
pub struct FikaCoverage {
    inner: CoverageMap,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: FikaStatus, message: impl Into<String>) -> FikaStatus {
    set_last_error(message.into());
    status
}

/// Message for the most recent failure on this thread, or null after a
/// success. The pointer stays valid until the next failing call on the same
/// thread; do not free it.
#[no_mangle]
pub extern "C" fn fika_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |text| text.as_ptr())
    })
}

/// Releases a string returned through an out parameter.
///
/// # Safety
/// `text` must be a pointer previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn fika_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

unsafe fn input_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, FikaStatus> {
    if ptr.is_null() {
        return Err(fail(FikaStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(FikaStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn handle_ref<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, FikaStatus> {
    ptr.as_ref()
        .ok_or_else(|| fail(FikaStatus::NullArgument, format!("{name} is null")))
}

unsafe fn emit_string(out: *mut *mut c_char, text: String) -> FikaStatus {
    if out.is_null() {
        return fail(FikaStatus::NullArgument, "out is null");
    }
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            FikaStatus::Ok
        }
        Err(_) => fail(FikaStatus::SerializeError, "result contained a NUL byte"),
    }
}

unsafe fn emit_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> FikaStatus {
    match serde_json::to_string_pretty(value) {
        Ok(mut text) => {
            text.push('\n');
            emit_string(out, text)
        }
        Err(e) => fail(FikaStatus::SerializeError, e.to_string()),
    }
}

unsafe fn emit_model(
    out: *mut *mut FikaModel,
    parsed: Result<ProjectModel, String>,
) -> FikaStatus {
    if out.is_null() {
        return fail(FikaStatus::NullArgument, "out is null");
    }
    match parsed {
        Ok(model) => {
            *out = Box::into_raw(Box::new(FikaModel { inner: model }));
            FikaStatus::Ok
        }
        Err(message) => fail(FikaStatus::ParseError, message),
    }
}

/// Parses a JSON code model into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_model_from_json(
    text: *const c_char,
    out: *mut *mut FikaModel,
) -> FikaStatus {
    clear_last_error();
    let text = match input_str(text, "text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    emit_model(out, parse_model_json(text).map_err(|e| e.to_string()))
}

/// Parses a fixture DSL code model into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_model_from_dsl(
    text: *const c_char,
    out: *mut *mut FikaModel,
) -> FikaStatus {
    clear_last_error();
    let text = match input_str(text, "text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    emit_model(out, parse_fixture_dsl(text).map_err(|e| e.to_string()))
}

/// Releases a model handle.
///
/// # Safety
/// `model` must come from a `fika_model_from_*` call, or be null.
#[no_mangle]
pub unsafe extern "C" fn fika_model_free(model: *mut FikaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Copies the model's project identifier into `out`.
///
/// # Safety
/// `model` must be a live model handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_model_project_id(
    model: *const FikaModel,
    out: *mut *mut c_char,
) -> FikaStatus {
    clear_last_error();
    let model = match handle_ref(model, "model") {
        Ok(m) => m,
        Err(status) => return status,
    };
    emit_string(out, model.inner.project_id.clone())
}

/// Builds the call graph and shortest-path inventory for a model.
///
/// # Safety
/// `model` must be a live model handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_analysis_new(
    model: *const FikaModel,
    out: *mut *mut FikaAnalysis,
) -> FikaStatus {
    clear_last_error();
    let model = match handle_ref(model, "model") {
        Ok(m) => m,
        Err(status) => return status,
    };
    if out.is_null() {
        return fail(FikaStatus::NullArgument, "out is null");
    }
    let project = model.inner.clone();
    let graph = build_cha(&project);
    let paths = enumerate_paths(&project, &graph);
    *out = Box::into_raw(Box::new(FikaAnalysis {
        model: project,
        graph,
        paths,
    }));
    FikaStatus::Ok
}

/// Releases an analysis handle.
///
/// # Safety
/// `analysis` must come from `fika_analysis_new`, or be null.
#[no_mangle]
pub unsafe extern "C" fn fika_analysis_free(analysis: *mut FikaAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// Number of enumerated entry-to-library paths.
///
/// # Safety
/// `analysis` must be a live analysis handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_analysis_path_count(
    analysis: *const FikaAnalysis,
    out: *mut usize,
) -> FikaStatus {
    clear_last_error();
    let analysis = match handle_ref(analysis, "analysis") {
        Ok(a) => a,
        Err(status) => return status,
    };
    if out.is_null() {
        return fail(FikaStatus::NullArgument, "out is null");
    }
    *out = analysis.paths.len();
    FikaStatus::Ok
}

/// Serializes the path inventory (entries, hops, sites) as JSON.
///
/// # Safety
/// `analysis` must be a live analysis handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_analysis_inventory_json(
    analysis: *const FikaAnalysis,
    out: *mut *mut c_char,
) -> FikaStatus {
    clear_last_error();
    let analysis = match handle_ref(analysis, "analysis") {
        Ok(a) => a,
        Err(status) => return status,
    };
    let doc = inventory_doc(&analysis.model, &analysis.graph, &analysis.paths);
    emit_json(out, &doc)
}

/// Renders the call graph edge list, one `caller -> callee @line` per line.
///
/// # Safety
/// `analysis` must be a live analysis handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_analysis_graph_text(
    analysis: *const FikaAnalysis,
    out: *mut *mut c_char,
) -> FikaStatus {
    clear_last_error();
    let analysis = match handle_ref(analysis, "analysis") {
        Ok(a) => a,
        Err(status) => return status,
    };
    emit_string(out, dump_graph(&analysis.graph))
}

/// Parses one LCOV document into a new coverage handle, labeled for
/// provenance.
///
/// # Safety
/// `text` and `label` must be NUL-terminated strings and `out` a valid
/// location.
#[no_mangle]
pub unsafe extern "C" fn fika_coverage_from_lcov(
    text: *const c_char,
    label: *const c_char,
    out: *mut *mut FikaCoverage,
) -> FikaStatus {
    clear_last_error();
    let text = match input_str(text, "text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let label = match input_str(label, "label") {
        Ok(l) => l,
        Err(status) => return status,
    };
    if out.is_null() {
        return fail(FikaStatus::NullArgument, "out is null");
    }
    match parse_lcov(text) {
        Ok(map) => {
            *out = Box::into_raw(Box::new(FikaCoverage {
                inner: map.with_label(label),
            }));
            FikaStatus::Ok
        }
        Err(e) => fail(FikaStatus::ParseError, e.to_string()),
    }
}

/// Merges `src` into `dst`, summing hit counts per line.
///
/// # Safety
/// Both handles must be live coverage handles.
#[no_mangle]
pub unsafe extern "C" fn fika_coverage_merge(
    dst: *mut FikaCoverage,
    src: *const FikaCoverage,
) -> FikaStatus {
    clear_last_error();
    let src = match handle_ref(src, "src") {
        Ok(s) => s,
        Err(status) => return status,
    };
    match dst.as_mut() {
        Some(dst) => {
            dst.inner.merge(&src.inner);
            FikaStatus::Ok
        }
        None => fail(FikaStatus::NullArgument, "dst is null"),
    }
}

/// Releases a coverage handle.
///
/// # Safety
/// `coverage` must come from `fika_coverage_from_lcov`, or be null.
#[no_mangle]
pub unsafe extern "C" fn fika_coverage_free(coverage: *mut FikaCoverage) {
    if !coverage.is_null() {
        drop(Box::from_raw(coverage));
    }
}

/// Serializes the per-site coverage verdicts for a model as JSON. A null
/// `coverage` is treated as empty evidence.
///
/// # Safety
/// `model` must be a live model handle, `coverage` live or null, and `out` a
/// valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_coverage_report_json(
    model: *const FikaModel,
    coverage: *const FikaCoverage,
    out: *mut *mut c_char,
) -> FikaStatus {
    clear_last_error();
    let model = match handle_ref(model, "model") {
        Ok(m) => m,
        Err(status) => return status,
    };
    let empty = CoverageMap::default();
    let map = coverage.as_ref().map_or(&empty, |c| &c.inner);
    let doc = coverage_doc(&model.inner, map);
    emit_json(out, &doc)
}

/// Evaluates a vulnerability rules file against the model with the given
/// coverage evidence (null for none) and serializes the rows as JSON.
///
/// # Safety
/// `model` must be a live model handle, `coverage` live or null, `rules_text`
/// a NUL-terminated string, and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn fika_triage_json(
    model: *const FikaModel,
    coverage: *const FikaCoverage,
    rules_text: *const c_char,
    out: *mut *mut c_char,
) -> FikaStatus {
    clear_last_error();
    let model = match handle_ref(model, "model") {
        Ok(m) => m,
        Err(status) => return status,
    };
    let rules_text = match input_str(rules_text, "rules_text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let rules = match parse_rules(rules_text) {
        Ok(r) => r,
        Err(e) => return fail(FikaStatus::ParseError, e.to_string()),
    };
    let empty = CoverageMap::default();
    let map = coverage.as_ref().map_or(&empty, |c| &c.inner);
    match triage_rules(&rules, &model.inner, map, &[]) {
        Ok(rows) => emit_json(out, &rows),
        Err(e) => fail(FikaStatus::ParseError, e.to_string()),
    }
}

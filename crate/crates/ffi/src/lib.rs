//! C ABI over `dilemma-core`.
//!
//! Models cross the boundary as JSON document text; results come back as
//! JSON or plain text owned by the library. Conventions:
//!
//! * every fallible call returns a [`DgStatus`]; on failure
//!   [`dg_last_error`] describes the problem for the calling thread;
//! * strings written to `out` parameters must be released with
//!   [`dg_string_free`], bundles with [`dg_bundle_free`];
//! * no call unwinds into C: a panic is reported as `DG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dilemma_core::{
    export_dot, extract_goal_state, load_bundle, run_pipeline, write_result, DilemmaType, Error,
    ModelBundle, PedagogicalInstruction, ScoringConfig, Verifier,
};

/// Outcome of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgStatus {
    Ok = 0,
    /// A required pointer was null or an enum argument out of range.
    InvalidArgument = 1,
    InvalidUtf8 = 2,
    /// A document is not well-formed JSON.
    Parse = 3,
    /// A document is well-formed but not a valid model or instruction.
    Schema = 4,
    UnknownTask = 5,
    UnknownNode = 6,
    /// Too many free scenario dimensions to verify exhaustively.
    ModelTooLarge = 7,
    InvalidInstruction = 8,
    /// Any other domain error; see `dg_last_error`.
    Failed = 9,
    Panic = 10,
}

pub const DG_OBLIGATION: u32 = 0;
pub const DG_PROHIBITION: u32 = 1;

/// Opaque, immutable model bundle. Safe to share between threads for
/// reading.
pub struct DgBundle {
    inner: ModelBundle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(DgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => DgStatus::Parse,
            Error::Schema(_) | Error::DanglingTaskRef { .. } => DgStatus::Schema,
            Error::UnknownTask(_) | Error::SameTask(_) => DgStatus::UnknownTask,
            Error::UnknownNode(_) | Error::WrongKind { .. } => DgStatus::UnknownNode,
            Error::ModelTooLarge { .. } => DgStatus::ModelTooLarge,
            Error::InvalidInstruction(_) => DgStatus::InvalidInstruction,
            Error::ConflictingGoal(..) | Error::Io(_) => DgStatus::Failed,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(DgStatus::InvalidArgument, msg.to_string())
}

/// Runs `body`, recording any failure or panic for `dg_last_error`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DgStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string valid for the call.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// as [`text`]; null maps to `None`.
unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

/// # Safety
/// `b` is null or a pointer returned by `dg_bundle_from_json`.
unsafe fn bundle<'a>(b: *const DgBundle) -> Result<&'a ModelBundle, Failure> {
    b.as_ref()
        .map(|b| &b.inner)
        .ok_or_else(|| invalid("bundle is null"))
}

/// # Safety
/// `out` is null or valid for one pointer write.
unsafe fn hand_out(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("out is null"));
    }
    let c = CString::new(s).map_err(|_| Failure(DgStatus::Failed, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn instruction(json: Option<&str>) -> Result<PedagogicalInstruction, Failure> {
    let instr = match json {
        None => PedagogicalInstruction::default(),
        Some(j) => serde_json::from_str(j)
            .map_err(|e| Failure(DgStatus::InvalidInstruction, format!("instruction: {e}")))?,
    };
    instr.validate()?;
    Ok(instr)
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn dg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn dg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and cross-checks the three model documents. `world_json` may be
/// null for an empty world; `strict` also requires every condition subject
/// to name a world class or instance.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dg_bundle_from_json(
    tasks_json: *const c_char,
    causality_json: *const c_char,
    world_json: *const c_char,
    strict: bool,
    out: *mut *mut DgBundle,
) -> DgStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let tasks = text(tasks_json, "tasks_json")?;
        let causality = text(causality_json, "causality_json")?;
        let world = optional_text(world_json, "world_json")?
            .unwrap_or(r#"{"format_version":1,"classes":[],"instances":[]}"#);
        let inner = load_bundle(tasks, causality, world, strict)?;
        *out = Box::into_raw(Box::new(DgBundle { inner }));
        Ok(())
    })
}

/// # Safety
/// `b` is null or a bundle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_bundle_free(b: *mut DgBundle) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// # Safety
/// `s` is null or a string handed out by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Ranked result document (JSON) for an instruction given as JSON, or the
/// default instruction when `instruction_json` is null.
///
/// # Safety
/// `b` is a live bundle; strings are null or NUL-terminated; `out` is
/// valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dg_generate(
    b: *const DgBundle,
    instruction_json: *const c_char,
    out: *mut *mut c_char,
) -> DgStatus {
    guard(|| {
        let bundle = bundle(b)?;
        let instr = instruction(optional_text(instruction_json, "instruction_json")?)?;
        let trace = run_pipeline(bundle, &instr, &ScoringConfig::default())?;
        let goal = trace
            .ranked
            .first()
            .map(|c| extract_goal_state(c, &bundle.task_model))
            .transpose()?;
        hand_out(out, write_result(instr.dilemma_type, &trace.ranked, goal.as_ref()))
    })
}

/// Verification report (JSON) for a task pair; `kind` is `DG_OBLIGATION` or
/// `DG_PROHIBITION`.
///
/// # Safety
/// As for [`dg_generate`].
#[no_mangle]
pub unsafe extern "C" fn dg_verify(
    b: *const DgBundle,
    kind: u32,
    task1: *const c_char,
    task2: *const c_char,
    out: *mut *mut c_char,
) -> DgStatus {
    guard(|| {
        let bundle = bundle(b)?;
        let kind = match kind {
            DG_OBLIGATION => DilemmaType::Obligation,
            DG_PROHIBITION => DilemmaType::Prohibition,
            _ => return Err(invalid("kind must be DG_OBLIGATION or DG_PROHIBITION")),
        };
        let (t1, t2) = (text(task1, "task1")?, text(task2, "task2")?);
        let report = Verifier::new(bundle)?.verify(kind, t1, t2)?;
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Failure(DgStatus::Failed, e.to_string()))?;
        hand_out(out, json)
    })
}

/// One pipeline stage as text, one entry per line: `barriers` and
/// `actions` list task ids; `pairs`, `filtered` and `ranked` list
/// `KIND task_a task_b` (ranked adds the total score).
///
/// # Safety
/// As for [`dg_generate`].
#[no_mangle]
pub unsafe extern "C" fn dg_inspect(
    b: *const DgBundle,
    stage: *const c_char,
    out: *mut *mut c_char,
) -> DgStatus {
    guard(|| {
        let bundle = bundle(b)?;
        let stage = text(stage, "stage")?;
        let trace = run_pipeline(bundle, &PedagogicalInstruction::default(), &ScoringConfig::default())?;
        let line = |c: &dilemma_core::DilemmaCandidate| format!("{} {} {}\n", c.kind, c.task_a, c.task_b);
        let body: String = match stage {
            "barriers" => trace.barrier_tasks(bundle)?.iter().map(|t| format!("{t}\n")).collect(),
            "actions" => trace.action_tasks(bundle)?.iter().map(|t| format!("{t}\n")).collect(),
            "pairs" => trace
                .obligation_pairs
                .iter()
                .chain(&trace.prohibition_pairs)
                .map(line)
                .collect(),
            "filtered" => trace.filtered.iter().map(line).collect(),
            "ranked" => trace
                .ranked
                .iter()
                .map(|c| {
                    let total = c.score.as_ref().map_or(0.0, |s| s.total);
                    format!("{} {} {} {total:.6}\n", c.kind, c.task_a, c.task_b)
                })
                .collect(),
            other => return Err(invalid(&format!("unknown stage `{other}`"))),
        };
        hand_out(out, body)
    })
}

/// Graphviz rendering of the bundle's causality graph.
///
/// # Safety
/// As for [`dg_generate`].
#[no_mangle]
pub unsafe extern "C" fn dg_export_dot(b: *const DgBundle, out: *mut *mut c_char) -> DgStatus {
    guard(|| {
        let bundle = bundle(b)?;
        hand_out(out, export_dot(&bundle.causality))
    })
}

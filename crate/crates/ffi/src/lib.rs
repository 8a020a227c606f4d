//! C interface to `hk-core`.
//!
//! Models live behind an opaque `HkModel` handle. Every fallible call returns
//! an `HkStatus`; on failure `hk_last_error` holds a message for the calling
//! thread. Strings handed out by the library are freed with `hk_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use hk_core::commands::{self, Command, Criterion, Outcome};
use hk_core::liegroups::{carnot_split, free_nilpotent};
use hk_core::model_file::ModelFile;
use hk_core::pipeline::Pipeline;
use hk_core::Error;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidModel = 4,
    /// A pipeline stage failed (flag, selector, connection, holonomy, decision).
    Pipeline = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Result of a command: the CLI exit codes 0, 1 and 2.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkOutcome {
    Success = 0,
    No = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkCommand {
    Flag = 0,
    Selector = 1,
    Curvature = 2,
    Holonomy = 3,
    HolonomyWithOracle = 4,
    DecideTg = 5,
    DecidePrincipal = 6,
    DecideOneDim = 7,
}

/// Opaque model handle.
pub struct HkModel {
    pipeline: Pipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HkStatus {
    match e {
        Error::Parse(_) => HkStatus::Parse,
        Error::InvalidModel(_) | Error::MismatchedModel(_) => HkStatus::InvalidModel,
        Error::Io(_) => HkStatus::Io,
        _ => HkStatus::Pipeline,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (HkStatus, String)>) -> HkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HkStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HkStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (HkStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (HkStatus, String) {
    (HkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HkStatus, String)> {
    if p.is_null() {
        return Err(null_err(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (HkStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn model_ref<'a>(m: *const HkModel) -> Result<&'a HkModel, (HkStatus, String)> {
    m.as_ref().ok_or_else(|| null_err("model"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (HkStatus, String)> {
    if out.is_null() {
        return Err(null_err("output pointer"));
    }
    let c = CString::new(s).map_err(|_| (HkStatus::Panic, "string contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn emit_model(file: Result<ModelFile, Error>, out: *mut *mut HkModel) -> Result<(), (HkStatus, String)> {
    if out.is_null() {
        return Err(null_err("output pointer"));
    }
    let pipeline = file.and_then(Pipeline::new).map_err(core_err)?;
    *out = Box::into_raw(Box::new(HkModel { pipeline }));
    Ok(())
}

/// Parses a TOML model. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_model_from_toml(text: *const c_char, out: *mut *mut HkModel) -> HkStatus {
    guard(|| emit_model(ModelFile::from_toml(str_arg(text, "text")?), out))
}

/// Parses a JSON model. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_model_from_json(text: *const c_char, out: *mut *mut HkModel) -> HkStatus {
    guard(|| emit_model(ModelFile::from_json(str_arg(text, "text")?), out))
}

/// Loads a `.toml` or `.json` model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_model_load(path: *const c_char, out: *mut *mut HkModel) -> HkStatus {
    guard(|| emit_model(ModelFile::load(Path::new(str_arg(path, "path")?)), out))
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must come from one of the constructors and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hk_model_free(model: *mut HkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Frame dimension `n` and vertical rank `ν`.
///
/// # Safety
/// `model` must be a live handle; `dim` and `nu` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hk_model_dims(model: *const HkModel, dim: *mut usize, nu: *mut usize) -> HkStatus {
    guard(|| {
        let m = &model_ref(model)?.pipeline.model;
        if dim.is_null() || nu.is_null() {
            return Err(null_err("output pointer"));
        }
        *dim = m.dim();
        *nu = m.nu();
        Ok(())
    })
}

/// Replaces the seed used for sampling, the oracle and the PD search.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_model_set_seed(model: *mut HkModel, seed: u64) -> HkStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| null_err("model"))?;
        m.pipeline.config.seed = seed;
        Ok(())
    })
}

/// Copies the growth vector into `buf`. `*len` receives its length; if it
/// exceeds `cap` nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `model` must be a live handle, `buf` valid for `cap` writes, `len` valid.
#[no_mangle]
pub unsafe extern "C" fn hk_growth_vector(
    model: *const HkModel,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> HkStatus {
    guard(|| {
        let p = &model_ref(model)?.pipeline;
        if len.is_null() {
            return Err(null_err("len"));
        }
        let g = p.flag().map_err(core_err)?.growth_vector;
        *len = g.len();
        if g.len() > cap {
            return Err((HkStatus::BufferTooSmall, format!("growth vector has {} entries", g.len())));
        }
        if !g.is_empty() {
            if buf.is_null() {
                return Err(null_err("buf"));
            }
            std::ptr::copy_nonoverlapping(g.as_ptr(), buf, g.len());
        }
        Ok(())
    })
}

/// Dimension of the horizontal holonomy algebra at the base point.
/// `*stabilized` is 1 when the iteration stabilized, 0 otherwise.
///
/// # Safety
/// `model` must be a live handle; `dim` and `stabilized` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hk_holonomy_dim(model: *const HkModel, dim: *mut usize, stabilized: *mut i32) -> HkStatus {
    guard(|| {
        let p = &model_ref(model)?.pipeline;
        if dim.is_null() || stabilized.is_null() {
            return Err(null_err("output pointer"));
        }
        let flag = p.flag().map_err(core_err)?;
        let (h, _) = p.holonomy_for(&flag).map_err(core_err)?;
        *dim = h.dim();
        *stabilized = i32::from(h.stabilized);
        Ok(())
    })
}

fn command_of(c: HkCommand) -> Command {
    match c {
        HkCommand::Flag => Command::Flag,
        HkCommand::Selector => Command::Selector,
        HkCommand::Curvature => Command::Curvature,
        HkCommand::Holonomy => Command::Holonomy { oracle: false },
        HkCommand::HolonomyWithOracle => Command::Holonomy { oracle: true },
        HkCommand::DecideTg => Command::Decide(Criterion::Tg),
        HkCommand::DecidePrincipal => Command::Decide(Criterion::Principal),
        HkCommand::DecideOneDim => Command::Decide(Criterion::OneDim),
    }
}

fn outcome_of(o: Outcome) -> HkOutcome {
    match o {
        Outcome::Success => HkOutcome::Success,
        Outcome::No => HkOutcome::No,
        Outcome::Inconclusive => HkOutcome::Inconclusive,
    }
}

/// Runs a command. `*json` receives the report (free with
/// `hk_string_free`) and `*outcome` its outcome. Either may be null.
///
/// # Safety
/// `model` must be a live handle; non-null output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hk_run(
    model: *const HkModel,
    command: HkCommand,
    json: *mut *mut c_char,
    outcome: *mut HkOutcome,
) -> HkStatus {
    guard(|| {
        let p = &model_ref(model)?.pipeline;
        let (value, o) = commands::run(p, command_of(command), "<ffi>").map_err(core_err)?;
        if !json.is_null() {
            write_string(json, serde_json::to_string_pretty(&value).expect("reports serialize"))?;
        }
        if !outcome.is_null() {
            *outcome = outcome_of(o);
        }
        Ok(())
    })
}

/// JSON model file of the free nilpotent algebra on `generators` generators
/// of the given step, split as `p₁ ⊕ p₂ | 𝔨`.
///
/// # Safety
/// `json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_free_nilpotent_json(generators: usize, step: usize, json: *mut *mut c_char) -> HkStatus {
    guard(|| {
        let (spec, _) = free_nilpotent(generators, step).map_err(core_err)?;
        let split = carnot_split(&spec).map_err(core_err)?;
        let text = ModelFile::from_carnot(&spec, &split).to_json().map_err(core_err)?;
        write_string(json, text)
    })
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn hk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

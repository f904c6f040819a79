//! C interface to the resolution engine.
//!
//! A `TrContext` holds the field and search settings. Every operation takes JSON text and, on
//! success, stores newly allocated JSON text in `*out`; release it with `tr_string_free`. On
//! failure `*out` is set to null and `tr_last_error` describes the problem until the next call
//! on the same context.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use toricres::cli::{parse_field, Job, Kind, Lift, MatchMode, Mode, Op, Source};
use toricres::Error;

/// Status codes; the nonzero engine codes agree with the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrStatus {
    Ok = 0,
    /// Invalid input data or settings.
    Validation = 2,
    /// A computed or supplied resolution failed its exactness check.
    Certificate = 3,
    /// Malformed JSON.
    Parse = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    /// The engine panicked; the context is still usable.
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrKind {
    Monomial = 0,
    Affine = 1,
    Reflexive = 2,
    Global = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrMode {
    Canonical = 0,
    Closed = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrLift {
    /// General lift for families, reflexive lift for filtrations.
    Default = 0,
    General = 1,
    Explicit = 2,
    Reflexive = 3,
}

/// Opaque engine context.
pub struct TrContext {
    field: String,
    window: Option<i64>,
    bound: Option<i64>,
    last_error: CString,
}

impl TrContext {
    fn fail(&mut self, status: TrStatus, msg: impl Into<Vec<u8>>) -> TrStatus {
        let mut bytes = msg.into();
        bytes.retain(|&b| b != 0);
        self.last_error = CString::new(bytes).expect("nul bytes removed");
        status
    }
}

fn status_of(e: &Error) -> TrStatus {
    match e.exit_code() {
        3 => TrStatus::Certificate,
        4 => TrStatus::Parse,
        _ => TrStatus::Validation,
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, TrStatus> {
    if p.is_null() {
        return Err(TrStatus::NullArgument);
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| TrStatus::InvalidUtf8)
}

unsafe fn source(label: &str, p: *const c_char) -> Result<Source, TrStatus> {
    Ok(Source::new(label, text(p)?))
}

/// Runs `op` built by `make` and stores the result in `*out`.
unsafe fn run(
    ctx: *mut TrContext,
    out: *mut *mut c_char,
    make: impl FnOnce() -> Result<Op, TrStatus>,
) -> TrStatus {
    if ctx.is_null() || out.is_null() {
        return TrStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let ctx = &mut *ctx;
    let op = match make() {
        Ok(op) => op,
        Err(s) => return ctx.fail(s, format!("bad argument: {s:?}")),
    };
    let job = Job {
        field: ctx.field.clone(),
        window: ctx.window,
        bound: ctx.bound,
        op,
    };
    match catch_unwind(AssertUnwindSafe(|| job.execute())) {
        Ok(Ok(v)) => {
            let s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
            match CString::new(s) {
                Ok(c) => {
                    *out = c.into_raw();
                    ctx.last_error = CString::default();
                    TrStatus::Ok
                }
                Err(_) => ctx.fail(TrStatus::Internal, "output contains a nul byte"),
            }
        }
        Ok(Err(e)) => ctx.fail(status_of(&e), e.to_string()),
        Err(_) => ctx.fail(TrStatus::Internal, "internal error"),
    }
}

/// Creates a context over `field` (`"Q"` or a supported prime; null means `"Q"`).
///
/// # Safety
/// `field` must be null or a valid nul-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_context_new(
    field: *const c_char,
    out: *mut *mut TrContext,
) -> TrStatus {
    if out.is_null() {
        return TrStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let field = if field.is_null() {
        "Q".to_string()
    } else {
        match text(field) {
            Ok(f) => f.to_string(),
            Err(s) => return s,
        }
    };
    if let Err(e) = parse_field(&field) {
        return status_of(&e);
    }
    *out = Box::into_raw(Box::new(TrContext {
        field,
        window: None,
        bound: None,
        last_error: CString::default(),
    }));
    TrStatus::Ok
}

/// # Safety
/// `ctx` must be null or a pointer from `tr_context_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tr_context_free(ctx: *mut TrContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Sets the window margin; zero restores the default.
///
/// # Safety
/// `ctx` must be a live context.
#[no_mangle]
pub unsafe extern "C" fn tr_context_set_window(ctx: *mut TrContext, margin: i64) -> TrStatus {
    let Some(ctx) = ctx.as_mut() else {
        return TrStatus::NullArgument;
    };
    if margin < 0 {
        return ctx.fail(TrStatus::Validation, "window margin must be positive");
    }
    ctx.window = (margin > 0).then_some(margin);
    TrStatus::Ok
}

/// Sets the search bound; zero restores the default.
///
/// # Safety
/// `ctx` must be a live context.
#[no_mangle]
pub unsafe extern "C" fn tr_context_set_bound(ctx: *mut TrContext, bound: i64) -> TrStatus {
    let Some(ctx) = ctx.as_mut() else {
        return TrStatus::NullArgument;
    };
    if bound < 0 {
        return ctx.fail(TrStatus::Validation, "bound must be positive");
    }
    ctx.bound = (bound > 0).then_some(bound);
    TrStatus::Ok
}

/// The message of the last failure on `ctx`, empty after a success. Owned by the context.
///
/// # Safety
/// `ctx` must be null or a live context.
// A byte literal rather than `c"..."`: the header generator cannot parse C string literals.
#[allow(clippy::manual_c_str_literals)]
#[no_mangle]
pub unsafe extern "C" fn tr_last_error(ctx: *const TrContext) -> *const c_char {
    match ctx.as_ref() {
        Some(c) => c.last_error.as_ptr(),
        None => b"null context\0".as_ptr().cast(),
    }
}

/// # Safety
/// `s` must be null or a string returned through an `out` parameter of this library.
#[no_mangle]
pub unsafe extern "C" fn tr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The lcm-lattice and anchor table of a presentation over the polynomial ring.
///
/// # Safety
/// `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_lcm_lattice(
    ctx: *mut TrContext,
    input: *const c_char,
    out: *mut *mut c_char,
) -> TrStatus {
    run(ctx, out, || {
        Ok(Op::LcmLattice {
            input: source("input", input)?,
        })
    })
}

/// Resolves a module; `expect` may be null, otherwise it lists generator degrees per level and is
/// compared up to permutation within levels.
///
/// # Safety
/// `ctx` must be a live context, `input` a nul-terminated string, `expect` null or a
/// nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_resolve(
    ctx: *mut TrContext,
    kind: TrKind,
    input: *const c_char,
    mode: TrMode,
    lift: TrLift,
    expect: *const c_char,
    out: *mut *mut c_char,
) -> TrStatus {
    run(ctx, out, || {
        Ok(Op::Resolve {
            kind: match kind {
                TrKind::Monomial => Kind::Monomial,
                TrKind::Affine => Kind::Affine,
                TrKind::Reflexive => Kind::Reflexive,
                TrKind::Global => Kind::Global,
            },
            input: source("input", input)?,
            mode: match mode {
                TrMode::Canonical => Mode::Canonical,
                TrMode::Closed => Mode::Closed,
            },
            lift: match lift {
                TrLift::Default => None,
                TrLift::General => Some(Lift::General),
                TrLift::Explicit => Some(Lift::Explicit),
                TrLift::Reflexive => Some(Lift::Reflexive),
            },
            expect: if expect.is_null() {
                None
            } else {
                Some(source("expect", expect)?)
            },
            match_mode: MatchMode::Perm,
        })
    })
}

/// Re-checks a resolution document against its input.
///
/// # Safety
/// `ctx` must be a live context, `input` and `resolution` nul-terminated strings, `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_verify(
    ctx: *mut TrContext,
    input: *const c_char,
    resolution: *const c_char,
    out: *mut *mut c_char,
) -> TrStatus {
    run(ctx, out, || {
        Ok(Op::Verify {
            input: source("input", input)?,
            resolution: source("resolution", resolution)?,
        })
    })
}

/// # Safety
/// `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_tensor_diagnostic(
    ctx: *mut TrContext,
    input: *const c_char,
    out: *mut *mut c_char,
) -> TrStatus {
    run(ctx, out, || {
        Ok(Op::TensorDiagnostic {
            input: source("input", input)?,
        })
    })
}

/// # Safety
/// `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_export_model(
    ctx: *mut TrContext,
    input: *const c_char,
    out: *mut *mut c_char,
) -> TrStatus {
    run(ctx, out, || {
        Ok(Op::ExportModel {
            input: source("input", input)?,
        })
    })
}

/// # Safety
/// `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_validate_fan(
    ctx: *mut TrContext,
    input: *const c_char,
    out: *mut *mut c_char,
) -> TrStatus {
    run(ctx, out, || {
        Ok(Op::ValidateFan {
            input: source("input", input)?,
        })
    })
}

/// # Safety
/// `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_validate_family(
    ctx: *mut TrContext,
    input: *const c_char,
    out: *mut *mut c_char,
) -> TrStatus {
    run(ctx, out, || {
        Ok(Op::ValidateFamily {
            input: source("input", input)?,
        })
    })
}

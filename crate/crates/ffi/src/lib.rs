//! C ABI over `nof-lab`.
//!
//! Matrices and composed functions are opaque handles created and freed by
//! this library. Every fallible call returns an [`NofStatus`]; on failure the
//! message is kept per thread and read with [`nof_last_error`]. Indices are
//! 0-based throughout.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nof_lab::composed::{ComposedSpec, FullProtocol, pattern_matrix};
use nof_lab::eqsolve::{evaluate_sym_composed, EqSolve};
use nof_lab::matrix::{Alphabet, InputMatrix};
use nof_lab::smp::{run_protocol, PlayerMode};
use nof_lab::zoo::{direct_eval, make_named, random_mixed_spec, random_uniform_spec, NamedFunction};
use nof_lab::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NofStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    HypothesisViolated = 4,
    Ambiguous = 5,
    NoSolution = 6,
    LimitExceeded = 7,
    CorruptTranscript = 8,
    UnknownFunction = 9,
    Panic = 10,
}

/// A `k × n` matrix over `Z_d`.
pub struct NofMatrix(InputMatrix);

/// A composed function `f ∘ (g_1, …, g_n)`.
pub struct NofSpec(ComposedSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NofStatus {
    match e {
        Error::InvalidInput(_) | Error::InvalidParameter(_) | Error::OutOfRange { .. } | Error::Parse(_) => {
            NofStatus::InvalidArgument
        }
        Error::HiddenRow { .. } | Error::DimensionMismatch(_) => NofStatus::DimensionMismatch,
        Error::InsufficientPlayers(_) => NofStatus::HypothesisViolated,
        Error::Ambiguous | Error::SubrunAmbiguous { .. } => NofStatus::Ambiguous,
        Error::NoSolution => NofStatus::NoSolution,
        Error::LimitExceeded { .. } => NofStatus::LimitExceeded,
        Error::CorruptTranscript(_) | Error::MissingMessage(_) => NofStatus::CorruptTranscript,
        Error::UnknownFunction(_) => NofStatus::UnknownFunction,
    }
}

enum Fail {
    Null,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NofStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NofStatus::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            NofStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            NofStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(v);
    Ok(())
}

unsafe fn emit<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

fn mode(strict: bool) -> PlayerMode {
    if strict {
        PlayerMode::Strict
    } else {
        PlayerMode::Reduced
    }
}

/// Builds a matrix from `k·n` row-major entries.
///
/// # Safety
/// `entries` must point to `k·n` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nof_matrix_new(
    d: u32,
    k: usize,
    n: usize,
    entries: *const u32,
    out: *mut *mut NofMatrix,
) -> NofStatus {
    guard(|| {
        if entries.is_null() || out.is_null() {
            return Err(Fail::Null);
        }
        let len = k.checked_mul(n).ok_or_else(|| Error::InvalidParameter("k·n overflows".into()))?;
        let flat = std::slice::from_raw_parts(entries, len);
        let rows = flat.chunks(n.max(1)).take(k).map(<[u32]>::to_vec).collect();
        let m = InputMatrix::new(Alphabet::new(d)?, rows)?;
        emit(out, NofMatrix(m))
    })
}

/// Uniformly random matrix from a ChaCha8 stream seeded with `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nof_matrix_random(
    d: u32,
    k: usize,
    n: usize,
    seed: u64,
    out: *mut *mut NofMatrix,
) -> NofStatus {
    guard(|| {
        let alphabet = Alphabet::new(d)?;
        if k == 0 || n == 0 {
            return Err(Error::InvalidParameter("need k ≥ 1 and n ≥ 1".into()).into());
        }
        let m = InputMatrix::random(alphabet, k, n, &mut ChaCha8Rng::seed_from_u64(seed));
        emit(out, NofMatrix(m))
    })
}

/// # Safety
/// `m` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn nof_matrix_free(m: *mut NofMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn nof_matrix_dims(
    m: *const NofMatrix,
    k: *mut usize,
    n: *mut usize,
    d: *mut u32,
) -> NofStatus {
    guard(|| {
        let m = &deref(m)?.0;
        write(k, m.k())?;
        write(n, m.n())?;
        write(d, m.alphabet().size())
    })
}

/// Entry in row `i`, column `j`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nof_matrix_get(m: *const NofMatrix, i: usize, j: usize, out: *mut u32) -> NofStatus {
    guard(|| {
        let m = &deref(m)?.0;
        if i >= m.k() || j >= m.n() {
            return Err(Error::OutOfRange {
                index: if i >= m.k() { i } else { j },
                max: if i >= m.k() { m.k() } else { m.n() } - 1,
            }
            .into());
        }
        write(out, m.entry(i + 1, j + 1))
    })
}

/// A named function: `GIP`, `DISJ`, `MAJ-MAJ` or `MAJ-THR:<s>`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nof_spec_named(
    name: *const c_char,
    d: u32,
    k: usize,
    n: usize,
    out: *mut *mut NofSpec,
) -> NofStatus {
    guard(|| {
        if name.is_null() {
            return Err(Fail::Null);
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| Error::InvalidInput("function name is not UTF-8".into()))?;
        let parsed: NamedFunction = name.parse()?;
        let spec = make_named(parsed, k, n, Alphabet::new(d)?)?;
        emit(out, NofSpec(spec))
    })
}

/// Random outer function with random inner functions, pairwise distinct
/// when `mixed` is true and all equal otherwise.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nof_spec_random(
    d: u32,
    k: usize,
    n: usize,
    mixed: bool,
    seed: u64,
    out: *mut *mut NofSpec,
) -> NofStatus {
    guard(|| {
        let alphabet = Alphabet::new(d)?;
        if k == 0 || n == 0 {
            return Err(Error::InvalidParameter("need k ≥ 1 and n ≥ 1".into()).into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = if mixed {
            random_mixed_spec(&mut rng, alphabet, k, n)?
        } else {
            random_uniform_spec(&mut rng, alphabet, k, n)?
        };
        emit(out, NofSpec(spec))
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn nof_spec_free(s: *mut NofSpec) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// The function's value computed column by column.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nof_direct_eval(s: *const NofSpec, m: *const NofMatrix, out: *mut bool) -> NofStatus {
    guard(|| {
        let v = direct_eval(&deref(s)?.0, &deref(m)?.0)?;
        write(out, v)
    })
}

/// Runs the equation-solving protocol (one shared inner function) and
/// evaluates the function from the recovered counts. `bits` receives the
/// transcript length.
///
/// # Safety
/// Both handles must be live; `value` and `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nof_eqsolve_eval(
    s: *const NofSpec,
    m: *const NofMatrix,
    strict: bool,
    value: *mut bool,
    bits: *mut u64,
) -> NofStatus {
    guard(|| {
        let (spec, m) = (&deref(s)?.0, &deref(m)?.0);
        if value.is_null() || bits.is_null() {
            return Err(Fail::Null);
        }
        if !spec.is_uniform() {
            return Err(Error::InvalidParameter("equation solving needs one shared inner function".into()).into());
        }
        let proto = EqSolve::new(m.k(), m.n(), m.alphabet())?;
        let run = run_protocol(&proto, m, mode(strict))?;
        write(bits, run.cost.total_bits)?;
        let y = run.outcome?;
        write(value, evaluate_sym_composed(&y, spec.f(), spec.inner(1))?)
    })
}

/// Runs the full protocol with `l` counting rows (`0` picks the default).
///
/// # Safety
/// Both handles must be live; `value` and `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nof_full_eval(
    s: *const NofSpec,
    m: *const NofMatrix,
    l: usize,
    strict: bool,
    value: *mut bool,
    bits: *mut u64,
) -> NofStatus {
    guard(|| {
        let (spec, m) = (&deref(s)?.0, &deref(m)?.0);
        if value.is_null() || bits.is_null() {
            return Err(Fail::Null);
        }
        let proto = FullProtocol::new(spec.clone(), (l > 0).then_some(l))?;
        let run = run_protocol(&proto, &pattern_matrix(m)?, mode(strict))?;
        write(bits, run.cost.total_bits)?;
        write(value, run.outcome?.value)
    })
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn nof_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code; unknown codes give `"unknown status"`.
#[no_mangle]
pub extern "C" fn nof_status_str(status: i32) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer\0",
        2 => b"invalid argument\0",
        3 => b"dimension mismatch\0",
        4 => b"hypothesis violated\0",
        5 => b"ambiguous\0",
        6 => b"no solution\0",
        7 => b"limit exceeded\0",
        8 => b"corrupt transcript\0",
        9 => b"unknown function\0",
        10 => b"internal panic\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn nof_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

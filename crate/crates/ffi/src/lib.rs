//! C ABI over `pleatray`.
//!
//! Every fallible call returns a [`PleatrayStatus`]; on failure the message is
//! available from [`pleatray_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings returned
//! to the caller are released with [`pleatray_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use pleatray::cli::lamination_from_coords;
use pleatray::exactpoly::Polynomial;
use pleatray::holonomy::{builtin_marking, catalog_word, trace_poly, PathWord};
use pleatray::pleating::{trace_ray, Mode, RayTrace, SolverOptions};
use pleatray::surface::{thurston_pairing, validate_dt, DTCoordinates, PantsDecomposition, SurfaceSig};
use pleatray::traceform::verify_top_terms;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PleatrayStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Semantic = 4,
    Numerical = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// A pants decomposition.
pub struct PleatraySurface {
    inner: PantsDecomposition,
}

/// An exact trace polynomial.
pub struct PleatrayPolynomial {
    inner: Polynomial,
}

/// A traced pleating ray.
pub struct PleatrayRay {
    inner: RayTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

struct Fail(PleatrayStatus, String);

fn fail<T>(s: PleatrayStatus, m: impl ToString) -> Result<T, Fail> {
    Err(Fail(s, m.to_string()))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PleatrayStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PleatrayStatus::Ok
        }
        Ok(Err(Fail(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            PleatrayStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return fail(PleatrayStatus::NullPointer, "null string argument");
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(PleatrayStatus::InvalidUtf8, "argument is not UTF-8"))
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(PleatrayStatus::NullPointer, "null array argument");
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail(PleatrayStatus::NullPointer, "null handle".into()))
}

fn out_ptr<T>(p: *mut T) -> Result<*mut T, Fail> {
    if p.is_null() {
        fail(PleatrayStatus::NullPointer, "null output pointer")
    } else {
        Ok(p)
    }
}

fn coords(v: &[i64]) -> Result<DTCoordinates, Fail> {
    DTCoordinates::from_interleaved(v).or_else(|e| fail(PleatrayStatus::Parse, e))
}

fn word_for(m: &PantsDecomposition, src: &str) -> Result<PathWord, Fail> {
    if src.trim_start().starts_with('{') {
        return PathWord::from_json(src).or_else(|e| fail(PleatrayStatus::Parse, e));
    }
    let sig = m.sig();
    match PantsDecomposition::builtin(sig) {
        Ok(b) if &b == m => catalog_word(sig, src).or_else(|e| fail(PleatrayStatus::Parse, e)),
        _ => fail(PleatrayStatus::Semantic, "no catalog for this decomposition"),
    }
}

/// Message of the last failure on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn pleatray_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pleatray_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Built-in decomposition by name: `s11`, `s04` or `s12`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pleatray_surface_builtin(name: *const c_char, out: *mut *mut PleatraySurface) -> PleatrayStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let sig: SurfaceSig = str_arg(name)?.parse().or_else(|e| fail(PleatrayStatus::Parse, e))?;
        let inner = PantsDecomposition::builtin(sig).or_else(|e| fail(PleatrayStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(PleatraySurface { inner }));
        Ok(())
    })
}

/// Decomposition from its JSON description.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pleatray_surface_from_json(json: *const c_char, out: *mut *mut PleatraySurface) -> PleatrayStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let inner = PantsDecomposition::from_json(str_arg(json)?).or_else(|e| fail(PleatrayStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(PleatraySurface { inner }));
        Ok(())
    })
}

/// Number of pants curves, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live surface handle.
#[no_mangle]
pub unsafe extern "C" fn pleatray_surface_xi(s: *const PleatraySurface) -> usize {
    s.as_ref().map_or(0, |s| s.inner.xi())
}

/// # Safety
/// `s` must be null or a surface handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pleatray_surface_free(s: *mut PleatraySurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Checks interleaved `q1,p1,...` (length `2 * len_pairs`) against the Dehn conditions.
///
/// # Safety
/// `coords_ptr` must point to `2 * len_pairs` values; `valid` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pleatray_validate_dt(
    s: *const PleatraySurface,
    coords_ptr: *const i64,
    len_pairs: usize,
    valid: *mut bool,
) -> PleatrayStatus {
    guard(|| {
        let s = handle(s)?;
        let valid = out_ptr(valid)?;
        let c = coords(slice_arg(coords_ptr, 2 * len_pairs)?)?;
        *valid = validate_dt(&c, &s.inner).valid;
        Ok(())
    })
}

/// Thurston pairing of two interleaved coordinate vectors of `len_pairs` pairs each.
///
/// # Safety
/// `a` and `b` must each point to `2 * len_pairs` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pleatray_pairing(a: *const i64, b: *const i64, len_pairs: usize, out: *mut i64) -> PleatrayStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let x = coords(slice_arg(a, 2 * len_pairs)?)?;
        let y = coords(slice_arg(b, 2 * len_pairs)?)?;
        *out = thurston_pairing(&x, &y).or_else(|e| fail(PleatrayStatus::Parse, e))?;
        Ok(())
    })
}

/// Trace polynomial of a catalog word name or a PathWord JSON object.
///
/// # Safety
/// `s` must be a live surface handle, `word` a nul-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pleatray_trace_poly(
    s: *const PleatraySurface,
    word: *const c_char,
    out: *mut *mut PleatrayPolynomial,
) -> PleatrayStatus {
    guard(|| {
        let s = handle(s)?;
        let out = out_ptr(out)?;
        let w = word_for(&s.inner, str_arg(word)?)?;
        let inner = trace_poly(&w, &s.inner).or_else(|e| fail(PleatrayStatus::Semantic, e))?;
        *out = Box::into_raw(Box::new(PleatrayPolynomial { inner }));
        Ok(())
    })
}

/// JSON term list of the polynomial, or null for a null handle.
///
/// # Safety
/// `p` must be null or a live polynomial handle.
#[no_mangle]
pub unsafe extern "C" fn pleatray_polynomial_to_json(p: *const PleatrayPolynomial) -> *mut c_char {
    p.as_ref().map_or(std::ptr::null_mut(), |p| into_c_string(p.inner.to_json()))
}

/// Evaluates at `n` complex points given as separate real and imaginary arrays.
///
/// # Safety
/// `re` and `im` must point to `n` values; `out_re` and `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pleatray_polynomial_eval(
    p: *const PleatrayPolynomial,
    re: *const f64,
    im: *const f64,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PleatrayStatus {
    guard(|| {
        let p = handle(p)?;
        let (or, oi) = (out_ptr(out_re)?, out_ptr(out_im)?);
        let x: Vec<Complex64> =
            slice_arg(re, n)?.iter().zip(slice_arg(im, n)?).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let v = p.inner.eval(&x).or_else(|e| fail(PleatrayStatus::Parse, e))?;
        *or = v.re;
        *oi = v.im;
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a polynomial handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pleatray_polynomial_free(p: *mut PleatrayPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the top-terms verifier; `pass` receives the overall verdict.
///
/// # Safety
/// `s` must be a live surface handle, `word` a nul-terminated string, `pass` valid.
#[no_mangle]
pub unsafe extern "C" fn pleatray_verify_top(s: *const PleatraySurface, word: *const c_char, pass: *mut bool) -> PleatrayStatus {
    guard(|| {
        let s = handle(s)?;
        let pass = out_ptr(pass)?;
        let w = word_for(&s.inner, str_arg(word)?)?;
        *pass = verify_top_terms(&w, &s.inner).or_else(|e| fail(PleatrayStatus::Semantic, e))?.pass;
        Ok(())
    })
}

/// Traces the ray of the lamination with interleaved coordinates `lam` over a
/// strictly decreasing schedule, with the default solver options.
///
/// # Safety
/// `s` must be a live built-in surface handle, `lam` must point to
/// `2 * len_pairs` values, `schedule` to `n` values, and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pleatray_ray_trace(
    s: *const PleatraySurface,
    lam: *const i64,
    len_pairs: usize,
    schedule: *const f64,
    n: usize,
    out: *mut *mut PleatrayRay,
) -> PleatrayStatus {
    guard(|| {
        let s = handle(s)?;
        let out = out_ptr(out)?;
        let target = coords(slice_arg(lam, 2 * len_pairs)?)?;
        let sched = slice_arg(schedule, n)?;
        let sig = s.inner.sig();
        if PantsDecomposition::builtin(sig).ok().as_ref() != Some(&s.inner) {
            return fail(PleatrayStatus::Semantic, "rays need a built-in decomposition");
        }
        if target.len() != s.inner.xi() || target.q.iter().any(|&q| q <= 0) {
            return fail(PleatrayStatus::Semantic, format!("lamination {target} is not admissible"));
        }
        let marking = builtin_marking(sig).or_else(|e| fail(PleatrayStatus::Semantic, e))?;
        let l = lamination_from_coords(&target, &marking.candidates)
            .or_else(|e| fail(PleatrayStatus::Semantic, format!("{e:?}")))?;
        let mode = if l.components.len() == 1 { Mode::ExactRay } else { Mode::PinnedImaginary };
        let inner = trace_ray(&l, &marking, sched, mode, &SolverOptions::default()).or_else(|e| {
            let st = if e.is_numerical() { PleatrayStatus::Numerical } else { PleatrayStatus::Semantic };
            fail(st, e)
        })?;
        *out = Box::into_raw(Box::new(PleatrayRay { inner }));
        Ok(())
    })
}

/// Number of converged samples, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live ray handle.
#[no_mangle]
pub unsafe extern "C" fn pleatray_ray_sample_count(r: *const PleatrayRay) -> usize {
    r.as_ref().map_or(0, |r| r.inner.samples.len())
}

/// Copies sample `k`: its height, `xi` parameters and residual.
///
/// # Safety
/// `r` must be a live ray handle; `tau_re` and `tau_im` must have room for
/// `xi` values; `t` and `residual` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pleatray_ray_sample(
    r: *const PleatrayRay,
    k: usize,
    xi: usize,
    t: *mut f64,
    tau_re: *mut f64,
    tau_im: *mut f64,
    residual: *mut f64,
) -> PleatrayStatus {
    guard(|| {
        let r = handle(r)?;
        let s = r.inner.samples.get(k).ok_or(Fail(PleatrayStatus::OutOfRange, format!("no sample {k}")))?;
        if xi != s.tau.len() {
            return fail(PleatrayStatus::OutOfRange, format!("sample has {} parameters", s.tau.len()));
        }
        let (t, re, im, res) = (out_ptr(t)?, out_ptr(tau_re)?, out_ptr(tau_im)?, out_ptr(residual)?);
        *t = s.t;
        *res = s.residual;
        for (i, z) in s.tau.iter().enumerate() {
            *re.add(i) = z.re;
            *im.add(i) = z.im;
        }
        Ok(())
    })
}

/// CSV rendering of the ray, or null for a null handle.
///
/// # Safety
/// `r` must be null or a live ray handle.
#[no_mangle]
pub unsafe extern "C" fn pleatray_ray_to_csv(r: *const PleatrayRay) -> *mut c_char {
    r.as_ref().map_or(std::ptr::null_mut(), |r| into_c_string(r.inner.to_csv()))
}

/// # Safety
/// `r` must be null or a ray handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pleatray_ray_free(r: *mut PleatrayRay) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_records_and_clears_errors() {
        assert_eq!(guard(|| fail(PleatrayStatus::Semantic, "boom")), PleatrayStatus::Semantic);
        let msg = unsafe { CStr::from_ptr(pleatray_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "boom");
        assert_eq!(guard(|| Ok(())), PleatrayStatus::Ok);
        assert!(pleatray_last_error().is_null());
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("unexpected")), PleatrayStatus::Panic);
    }

    #[test]
    fn interior_nul_is_replaced() {
        set_error("a\0b");
        let msg = unsafe { CStr::from_ptr(pleatray_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}

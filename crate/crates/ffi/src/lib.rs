//! C ABI over `holderlie`.
//!
//! Objects are opaque handles created by `hl_*_new`-style constructors and
//! released with the matching `hl_*_free`. Every fallible call returns an
//! [`HlStatus`]; on failure [`hl_last_error`] yields a message for the calling
//! thread. Matrices cross the boundary as row-major `double` arrays, JSON as
//! NUL-terminated UTF-8 strings owned by the library until passed to
//! [`hl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use holderlie::corpus::PolynomialRecord;
use holderlie::domain::{Domain, SamplePlan};
use holderlie::funcmodel::{JetFunction, Polynomial};
use holderlie::holder::{holder_norm_estimate, inclusion_constant_dk, HolderIndex};
use holderlie::liegroup::matfun::{flatten, to_matrix};
use holderlie::liegroup::{bch_truncated, matrix_exp, matrix_log, BchConfig, LieAlgebra};
use holderlie::product::product_constant;
use holderlie::{emit_constants, run_suite, Error, SuiteConfig};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DiameterExceeded = 3,
    OrderExceeded = 4,
    OutsideConvergenceDomain = 5,
    LogDomain = 6,
    NotConverged = 7,
    ConfigInvalid = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for HlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DiameterExceeded(_) => HlStatus::DiameterExceeded,
            Error::OrderExceeded { .. } => HlStatus::OrderExceeded,
            Error::OutsideConvergenceDomain { .. } => HlStatus::OutsideConvergenceDomain,
            Error::LogDomain(_) => HlStatus::LogDomain,
            Error::NotConverged(_) => HlStatus::NotConverged,
            Error::ConfigInvalid(_) => HlStatus::ConfigInvalid,
            Error::Io(_) => HlStatus::Io,
            _ => HlStatus::InvalidArgument,
        }
    }
}

/// Opaque convex domain.
pub struct HlDomain(Domain);

/// Opaque polynomial `ℝⁿ → ℝ^m`.
pub struct HlPolynomial(Polynomial);

/// Sampled Hölder norm `total = sup_part + seminorm_part` (`sup_part` alone for `(0, 0)`).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HlNormEstimate {
    pub sup_part: f64,
    pub seminorm_part: f64,
    pub total: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(HlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(HlStatus::from(&e), e.to_string())
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside holderlie".into());
            HlStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> FfiResult<()> {
    if p.is_null() {
        Err(Fail(HlStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> FfiResult<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> FfiResult<&'a mut [f64]> {
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|e| Fail(HlStatus::InvalidArgument, format!("{what}: {e}")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no interior NUL").into_raw()
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> FfiResult<()> {
    non_null(out, what)?;
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null. Free with [`hl_string_free`].
#[no_mangle]
pub extern "C" fn hl_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Open ball; fails with `DiameterExceeded` when `2 radius > 1`.
///
/// # Safety
/// `center` must point to `dim` doubles and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hl_domain_ball(center: *const f64, dim: usize, radius: f64, out: *mut *mut HlDomain) -> HlStatus {
    guard(|| {
        let c = slice(center, dim, "center")?.to_vec();
        let d = Domain::ball(c, radius)?;
        write_out(out, Box::into_raw(Box::new(HlDomain(d))), "out")
    })
}

/// Open box `∏ (lower_i, upper_i)`.
///
/// # Safety
/// `lower` and `upper` must point to `dim` doubles and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hl_domain_box(lower: *const f64, upper: *const f64, dim: usize, out: *mut *mut HlDomain) -> HlStatus {
    guard(|| {
        let d = Domain::cube(slice(lower, dim, "lower")?.to_vec(), slice(upper, dim, "upper")?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(HlDomain(d))), "out")
    })
}

/// # Safety
/// `d` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hl_domain_free(d: *mut HlDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_domain_diameter(d: *const HlDomain, out: *mut f64) -> HlStatus {
    guard(|| {
        non_null(d, "domain")?;
        write_out(out, (*d).0.diameter(), "out")
    })
}

/// `t ↦ Σ coeffs[j] t^j` on ℝ.
///
/// # Safety
/// `coeffs` must point to `len >= 1` doubles and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_univariate(coeffs: *const f64, len: usize, out: *mut *mut HlPolynomial) -> HlStatus {
    guard(|| {
        if len == 0 {
            return Err(Fail(HlStatus::InvalidArgument, "empty coefficient list".into()));
        }
        let p = Polynomial::univariate(slice(coeffs, len, "coeffs")?);
        write_out(out, Box::into_raw(Box::new(HlPolynomial(p))), "out")
    })
}

/// Polynomial from a corpus function record
/// `{"id", "in_dim", "out_dim", "parts": [[…], …]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_from_json(json: *const c_char, out: *mut *mut HlPolynomial) -> HlStatus {
    guard(|| {
        let rec: PolynomialRecord = serde_json::from_str(string(json, "json")?)
            .map_err(|e| Fail(HlStatus::ConfigInvalid, e.to_string()))?;
        let p = rec.to_polynomial()?;
        write_out(out, Box::into_raw(Box::new(HlPolynomial(p))), "out")
    })
}

/// # Safety
/// `p` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_free(p: *mut HlPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes `γ(x)` into `out[0 … out_len)`; `out_len` must equal the output dimension.
///
/// # Safety
/// `x` must hold `x_len` doubles and `out` `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_eval(
    p: *const HlPolynomial,
    x: *const f64,
    x_len: usize,
    out: *mut f64,
    out_len: usize,
) -> HlStatus {
    guard(|| {
        non_null(p, "polynomial")?;
        let p = &(*p).0;
        if x_len != p.in_dim() || out_len != p.out_dim() {
            return Err(Fail(HlStatus::InvalidArgument, format!("expected {} inputs and {} outputs", p.in_dim(), p.out_dim())));
        }
        let y = p.eval(slice(x, x_len, "x")?);
        slice_mut(out, out_len, "out")?.copy_from_slice(&y);
        Ok(())
    })
}

/// Sampled `‖γ‖_{(k,s)}` on a sample plan given as JSON, or a default
/// quasirandom plan of 48 points when `plan_json` is null.
///
/// # Safety
/// Handles must be live, `plan_json` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_holder_norm(
    p: *const HlPolynomial,
    d: *const HlDomain,
    k: usize,
    s: f64,
    plan_json: *const c_char,
    out: *mut HlNormEstimate,
) -> HlStatus {
    guard(|| {
        non_null(p, "polynomial")?;
        non_null(d, "domain")?;
        let plan = if plan_json.is_null() {
            SamplePlan::quasirandom(48, 7)
        } else {
            serde_json::from_str(string(plan_json, "plan_json")?).map_err(|e| Fail(HlStatus::ConfigInvalid, e.to_string()))?
        };
        let (p, d) = (&(*p).0, &(*d).0);
        if p.in_dim() != d.dim() {
            return Err(Fail(HlStatus::InvalidArgument, "polynomial and domain dimensions differ".into()));
        }
        let e = holder_norm_estimate(p, HolderIndex::new(k, s)?, d, &plan)?;
        write_out(out, HlNormEstimate { sup_part: e.sup_part, seminorm_part: e.seminorm_part, total: e.total }, "out")
    })
}

/// Product constant `C_k` for the domain.
///
/// # Safety
/// `d` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_product_constant(d: *const HlDomain, k: usize, out: *mut f64) -> HlStatus {
    guard(|| {
        non_null(d, "domain")?;
        write_out(out, product_constant(k, &(*d).0), "out")
    })
}

/// Inclusion bound `D_k` for the domain.
///
/// # Safety
/// `d` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_inclusion_constant(d: *const HlDomain, k: usize, out: *mut f64) -> HlStatus {
    guard(|| {
        non_null(d, "domain")?;
        write_out(out, inclusion_constant_dk(k, &(*d).0).value, "out")
    })
}

/// `out = exp(x)` for a row-major `n × n` matrix.
///
/// # Safety
/// `x` and `out` must each hold `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_matrix_exp(x: *const f64, n: usize, out: *mut f64) -> HlStatus {
    guard(|| {
        let m = to_matrix(slice(x, n * n, "x")?, n);
        slice_mut(out, n * n, "out")?.copy_from_slice(&flatten(&matrix_exp(&m, 1e-13)));
        Ok(())
    })
}

/// Principal logarithm for `‖g − I‖_F < 1`, else `LogDomain`.
///
/// # Safety
/// `g` and `out` must each hold `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_matrix_log(g: *const f64, n: usize, out: *mut f64) -> HlStatus {
    guard(|| {
        let m = to_matrix(slice(g, n * n, "g")?, n);
        let l = matrix_log(&m, 1e-12)?;
        slice_mut(out, n * n, "out")?.copy_from_slice(&flatten(&l));
        Ok(())
    })
}

/// Truncated BCH product in a built-in algebra (`so3`, `sl2`, `heisenberg`,
/// `abelian<d>`). Inputs outside `‖x‖ + ‖y‖ ≤ margin · log 2` under the
/// algebra norm fail with `OutsideConvergenceDomain`.
///
/// # Safety
/// `algebra` must be NUL-terminated; `x`, `y`, `out` must hold `d * d` doubles
/// for the algebra's matrix size `d`.
#[no_mangle]
pub unsafe extern "C" fn hl_bch(
    algebra: *const c_char,
    x: *const f64,
    y: *const f64,
    order: usize,
    margin: f64,
    out: *mut f64,
) -> HlStatus {
    guard(|| {
        let alg = LieAlgebra::by_name(string(algebra, "algebra")?)?;
        let d = alg.matrix_dim();
        let cfg = BchConfig::new(order, margin)?;
        let (xm, ym) = (to_matrix(slice(x, d * d, "x")?, d), to_matrix(slice(y, d * d, "y")?, d));
        let z = bch_truncated(&alg, &xm, &ym, &cfg)?;
        slice_mut(out, d * d, "out")?.copy_from_slice(&flatten(&z));
        Ok(())
    })
}

/// Runs suites from a JSON configuration (null for defaults). Check failures
/// are not errors: `*all_passed` reports them and the report lists them.
///
/// # Safety
/// `config_json` null or NUL-terminated; `report_json` and `all_passed` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_run_suite_json(config_json: *const c_char, report_json: *mut *mut c_char, all_passed: *mut bool) -> HlStatus {
    guard(|| {
        let cfg = if config_json.is_null() { SuiteConfig::default() } else { SuiteConfig::from_json(string(config_json, "config_json")?)? };
        non_null(report_json, "report_json")?;
        non_null(all_passed, "all_passed")?;
        let report = run_suite(&cfg)?;
        write_out(all_passed, report.passed(), "all_passed")?;
        write_out(report_json, into_c_string(report.to_json()), "report_json")
    })
}

/// Constants table as JSON for a configuration (null for defaults).
///
/// # Safety
/// `config_json` null or NUL-terminated; `table_json` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_constants_json(config_json: *const c_char, table_json: *mut *mut c_char) -> HlStatus {
    guard(|| {
        let cfg = if config_json.is_null() { SuiteConfig::default() } else { SuiteConfig::from_json(string(config_json, "config_json")?)? };
        let table = emit_constants(&cfg)?;
        let text = serde_json::to_string_pretty(&serde_json::to_value(&table).expect("table serializes")).expect("table serializes");
        write_out(table_json, into_c_string(text), "table_json")
    })
}

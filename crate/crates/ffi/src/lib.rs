//! C ABI over `hpm-core`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free`. Every fallible call returns an [`HpmStatus`]; on a
//! nonzero status the message is available from
//! [`hpm_last_error_message`] on the same thread until the next call.
//! Strings handed out by the library are freed with [`hpm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hpm_core::bigc::BigComplex;
use hpm_core::curve::CurveJson;
use hpm_core::expr::Expr;
use hpm_core::germ::germ_of_expression;
use hpm_core::hp::{solve_for, GermTuple, HPSolution};
use hpm_core::lab::{critical_values, to_c64};
use hpm_core::monodromy::{monodromy_generators, monodromy_report, MonodromyOptions};
use hpm_core::recon::ratio_at;
use hpm_core::{AlgebraicCurve, Coeff, Error, GaussianRational, GermSpec};

/// Status codes; the nonzero values match the `hpm` exit codes where they
/// overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HpmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numeric = 3,
    Refused = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HpmBackend {
    Exact = 0,
    Numeric = 1,
}

/// A plane curve with its optional anchored branch at infinity.
pub struct HpmCurve {
    curve: AlgebraicCurve,
    spec: Option<GermSpec>,
}

enum AnySolution {
    Exact(HPSolution<GaussianRational>),
    Numeric(HPSolution<BigComplex>),
}

/// One solved Hermite-Pade system.
pub struct HpmSolution {
    sol: AnySolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(HpmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match hpm_core::cli::exit_code(&e) {
            3 => HpmStatus::Numeric,
            4 => HpmStatus::Refused,
            _ => HpmStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(HpmStatus::InvalidInput, e.to_string())
    }
}

fn fail<T>(status: HpmStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, records any error, and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HpmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HpmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            HpmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(HpmStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(HpmStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(HpmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(HpmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(HpmStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn give_string(s: String, out: &mut *mut c_char) -> Result<(), Failure> {
    *out = CString::new(s)
        .map_err(|_| Failure(HpmStatus::InvalidInput, "output contains NUL".into()))?
        .into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// owned by the library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn hpm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hpm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reads a curve from the JSON file format used by the `hpm` tool.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_curve_from_json(json: *const c_char, out: *mut *mut HpmCurve) -> HpmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let parsed: CurveJson = serde_json::from_str(str_arg(json, "json")?)?;
        let (curve, spec) = parsed.into_curve()?;
        *out = Box::into_raw(Box::new(HpmCurve { curve, spec }));
        Ok(())
    })
}

/// Parses `P(z, w) = 0` from an expression such as `w^2 - (z^2 - 1)`. The
/// curve has no anchored branch; set one with [`hpm_curve_set_pole_branch`].
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_curve_parse(src: *const c_char, out: *mut *mut HpmCurve) -> HpmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let curve = AlgebraicCurve::parse(str_arg(src, "src")?)?;
        *out = Box::into_raw(Box::new(HpmCurve { curve, spec: None }));
        Ok(())
    })
}

/// Anchors the branch `w ~ leading z^order` at infinity. `leading` is a
/// Gaussian rational such as `1` or `3/2-i`.
///
/// # Safety
/// `curve` must be a live handle; `leading` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hpm_curve_set_pole_branch(curve: *mut HpmCurve, order: u32, leading: *const c_char) -> HpmStatus {
    guard(|| {
        let curve = out_arg(curve, "curve")?;
        let lead: GaussianRational = str_arg(leading, "leading")?.parse()?;
        curve.spec = Some(GermSpec::pole(order, lead));
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hpm_curve_free(curve: *mut HpmCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// `m`, one less than the degree of the curve in `w`.
///
/// # Safety
/// `curve` must be a live handle; `m` writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_curve_m(curve: *const HpmCurve, m: *mut usize) -> HpmStatus {
    guard(|| {
        *out_arg(m, "m")? = ref_arg(curve, "curve")?.curve.m();
        Ok(())
    })
}

/// Finite critical values as interleaved `(re, im)` doubles. On entry
/// `*count` is the capacity of `out` in values; on return it holds the
/// number of critical values. `BufferTooSmall` leaves `out` untouched.
/// `infinity` (may be null) receives whether infinity is critical.
///
/// # Safety
/// `out` must hold `2 * *count` doubles.
#[no_mangle]
pub unsafe extern "C" fn hpm_critical_values(
    curve: *const HpmCurve,
    prec_bits: usize,
    out: *mut f64,
    count: *mut usize,
    infinity: *mut bool,
) -> HpmStatus {
    guard(|| {
        let curve = ref_arg(curve, "curve")?;
        let count = out_arg(count, "count")?;
        let cvs = critical_values(&curve.curve, prec_bits.max(64));
        if let Some(inf) = infinity.as_mut() {
            *inf = cvs.infinity;
        }
        let cap = *count;
        *count = cvs.finite.len();
        if cap < cvs.finite.len() {
            return fail(HpmStatus::BufferTooSmall, format!("need room for {} values", cvs.finite.len()));
        }
        if cvs.finite.is_empty() {
            return Ok(());
        }
        if out.is_null() {
            return fail(HpmStatus::NullPointer, "out is null");
        }
        let dst = std::slice::from_raw_parts_mut(out, 2 * cvs.finite.len());
        for (pair, z) in dst.chunks_exact_mut(2).zip(&cvs.finite) {
            let c = to_c64(z);
            pair[0] = c.re;
            pair[1] = c.im;
        }
        Ok(())
    })
}

/// Monodromy generators and the orbits on `k`-subsets, as the JSON report
/// written by `hpm monodromy`.
///
/// # Safety
/// `curve` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_monodromy(curve: *const HpmCurve, k: usize, prec_bits: usize, out: *mut *mut c_char) -> HpmStatus {
    guard(|| {
        let curve = ref_arg(curve, "curve")?;
        let out = out_arg(out, "out")?;
        if k == 0 || k > curve.curve.m() {
            return fail(HpmStatus::InvalidInput, format!("k must lie in [1, {}]", curve.curve.m()));
        }
        let gens = monodromy_generators(
            &curve.curve,
            MonodromyOptions {
                prec: prec_bits.max(64),
                ..Default::default()
            },
        )?;
        give_string(serde_json::to_string(&monodromy_report(&curve.curve, &gens, k))?, out)
    })
}

unsafe fn expressions(fs: *const *const c_char, nf: usize) -> Result<Vec<Expr>, Failure> {
    slice_arg(fs, nf, "fs")?
        .iter()
        .map(|&p| Ok(Expr::parse(str_arg(p, "f")?)?))
        .collect()
}

fn germ_tuple<C: Coeff>(
    curve: &HpmCurve,
    exprs: &[Expr],
    power_tuple: bool,
    order: i64,
    ctx: C::Ctx,
) -> Result<GermTuple<C>, Failure> {
    let spec = curve
        .spec
        .as_ref()
        .ok_or_else(|| Failure(HpmStatus::InvalidInput, "the curve has no anchored branch".into()))?;
    if exprs.is_empty() {
        return fail(HpmStatus::InvalidInput, "no functions given");
    }
    if power_tuple {
        let f = germ_of_expression::<C>(&curve.curve, spec, &exprs[0], order, ctx)?;
        Ok(GermTuple::power_tuple(&f, curve.curve.m())?)
    } else {
        Ok(GermTuple::from_expressions(&curve.curve, spec, exprs, order, ctx)?)
    }
}

/// Germs of `f_1..f_m` at infinity to `t^order` as JSON. With `power_tuple`
/// only `fs[0]` is read and `f_j = f^j`.
///
/// # Safety
/// `fs` must hold `nf` NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_expand(
    curve: *const HpmCurve,
    fs: *const *const c_char,
    nf: usize,
    power_tuple: bool,
    order: i64,
    backend: HpmBackend,
    prec_bits: usize,
    out: *mut *mut c_char,
) -> HpmStatus {
    guard(|| {
        let curve = ref_arg(curve, "curve")?;
        let out = out_arg(out, "out")?;
        let exprs = expressions(fs, nf)?;
        let json: Vec<_> = match backend {
            HpmBackend::Exact => germ_tuple::<GaussianRational>(curve, &exprs, power_tuple, order, ())?
                .germs()
                .iter()
                .map(|g| g.to_json())
                .collect(),
            HpmBackend::Numeric => germ_tuple::<BigComplex>(curve, &exprs, power_tuple, order, prec_bits.max(64))?
                .germs()
                .iter()
                .map(|g| g.to_json())
                .collect(),
        };
        give_string(serde_json::to_string(&json)?, out)
    })
}

/// Solves the system for degree parameter `n` and index `k`.
///
/// # Safety
/// `fs` must hold `nf` NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_solve(
    curve: *const HpmCurve,
    fs: *const *const c_char,
    nf: usize,
    power_tuple: bool,
    k: usize,
    n: usize,
    backend: HpmBackend,
    prec_bits: usize,
    out: *mut *mut HpmSolution,
) -> HpmStatus {
    guard(|| {
        let curve = ref_arg(curve, "curve")?;
        let out = out_arg(out, "out")?;
        let exprs = expressions(fs, nf)?;
        let order = ((curve.curve.m() + 1) * n) as i64;
        let sol = match backend {
            HpmBackend::Exact => {
                AnySolution::Exact(solve_for(&germ_tuple::<GaussianRational>(curve, &exprs, power_tuple, order, ())?, n, k)?)
            }
            HpmBackend::Numeric => {
                let g = germ_tuple::<BigComplex>(curve, &exprs, power_tuple, order, prec_bits.max(64))?;
                AnySolution::Numeric(solve_for(&g, n, k)?)
            }
        };
        *out = Box::into_raw(Box::new(HpmSolution { sol }));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hpm_solution_free(sol: *mut HpmSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Dimension of the nullspace the solution was drawn from.
///
/// # Safety
/// `sol` must be a live handle; `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_solution_nullspace_dim(sol: *const HpmSolution, dim: *mut usize) -> HpmStatus {
    guard(|| {
        *out_arg(dim, "dim")? = match &ref_arg(sol, "sol")?.sol {
            AnySolution::Exact(s) => s.nullspace_dim,
            AnySolution::Numeric(s) => s.nullspace_dim,
        };
        Ok(())
    })
}

/// The solution in the `solution` layout of `hpm solve`.
///
/// # Safety
/// `sol` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_solution_to_json(sol: *const HpmSolution, out: *mut *mut c_char) -> HpmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let json = match &ref_arg(sol, "sol")?.sol {
            AnySolution::Exact(s) => serde_json::to_string(&s.to_json())?,
            AnySolution::Numeric(s) => serde_json::to_string(&s.to_json())?,
        };
        give_string(json, out)
    })
}

/// `P_J(z) / P_I(z)` for `k`-subsets `J` and `I` of `{0..m}`, evaluated at
/// `re + i im` with `prec_bits` of working precision.
///
/// # Safety
/// `j` and `i` must hold `k` entries; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hpm_ratio_eval(
    sol: *const HpmSolution,
    j: *const usize,
    i: *const usize,
    k: usize,
    re: f64,
    im: f64,
    prec_bits: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HpmStatus {
    guard(|| {
        let sol = ref_arg(sol, "sol")?;
        let (j, i) = (slice_arg(j, k, "j")?, slice_arg(i, k, "i")?);
        let (out_re, out_im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        if !re.is_finite() || !im.is_finite() {
            return fail(HpmStatus::InvalidInput, "z is not finite");
        }
        let z = BigComplex::from_f64(re, im, prec_bits.max(64));
        let v = match &sol.sol {
            AnySolution::Exact(s) => ratio_at(s, j, i, &z)?,
            AnySolution::Numeric(s) => ratio_at(s, j, i, &z)?,
        };
        (*out_re, *out_im) = v.to_f64_pair();
        Ok(())
    })
}

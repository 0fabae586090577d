//! C ABI over `bernoulli_action`.
//!
//! Every function returns a [`BqaStatus`]; results go through out-pointers.
//! On failure a description is available from [`bqa_last_error_message`]
//! on the same thread. Operators and plans are opaque heap handles released
//! with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bernoulli_action::acceleration::accelerated_approx;
use bernoulli_action::fourier::{g_approx, reference_q};
use bernoulli_action::matfunc::{reference_solution, ActionPlan, BandedOperator};
use bernoulli_action::{ApproxParams, Complex64, Error};
use nalgebra::DMatrix;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Pole or endpoint of the parameter domain.
    Domain = 3,
    Singular = 4,
    Io = 5,
    Parse = 6,
    Panic = 7,
}

/// Opaque linear operator.
pub struct BqaOperator(BandedOperator);

/// Opaque precomputed matrix action for one operator and vector.
pub struct BqaPlan(ActionPlan);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BqaStatus {
    match e {
        Error::Pole(_) | Error::EndpointTau(_) => BqaStatus::Domain,
        Error::Singular(_) | Error::Evaluator(_) => BqaStatus::Singular,
        Error::Io(_) => BqaStatus::Io,
        Error::Parse { .. } => BqaStatus::Parse,
        _ => BqaStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, recording any failure or panic.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BqaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BqaStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            BqaStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            BqaStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_complex(z: Complex64, re: *mut f64, im: *mut f64) -> Result<(), Fail> {
    if re.is_null() || im.is_null() {
        return Err(Fail::Null("output"));
    }
    *re = z.re;
    *im = z.im;
    Ok(())
}

unsafe fn write_vector(v: &[f64], out: *mut f64, len: usize) -> Result<(), Fail> {
    if len != v.len() {
        return Err(Error::Dimension {
            expected: v.len(),
            found: len,
        }
        .into());
    }
    if len > 0 {
        if out.is_null() {
            return Err(Fail::Null("output"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, len);
    }
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn bqa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `q(tau, w) = w e^{w tau} / (e^w - 1)`.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_reference_q(
    tau: f64,
    w_re: f64,
    w_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BqaStatus {
    guard(|| {
        write_complex(
            reference_q(tau, Complex64::new(w_re, w_im))?,
            out_re,
            out_im,
        )
    })
}

/// Order-`p` expansion with `modes` Fourier modes.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_g_approx(
    order: usize,
    modes: usize,
    tau: f64,
    w_re: f64,
    w_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BqaStatus {
    guard(|| {
        let params = ApproxParams::new(order, modes, 0, tau)?;
        write_complex(
            g_approx(&params, Complex64::new(w_re, w_im))?,
            out_re,
            out_im,
        )
    })
}

/// Expansion with `depth` correction levels.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
#[allow(non_snake_case)]
pub unsafe extern "C" fn bqa_G_approx(
    order: usize,
    modes: usize,
    depth: usize,
    tau: f64,
    w_re: f64,
    w_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BqaStatus {
    guard(|| {
        let params = ApproxParams::new(order, modes, depth, tau)?;
        write_complex(
            accelerated_approx(&params, Complex64::new(w_re, w_im))?,
            out_re,
            out_im,
        )
    })
}

unsafe fn put_operator(op: BandedOperator, out: *mut *mut BqaOperator) -> Result<(), Fail> {
    *out = Box::into_raw(Box::new(BqaOperator(op)));
    Ok(())
}

/// Tridiagonal operator of size `n`; `sub` and `sup` hold `n - 1` entries.
///
/// # Safety
/// The arrays must hold the stated lengths; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_operator_new_tridiagonal(
    n: usize,
    sub: *const f64,
    diag: *const f64,
    sup: *const f64,
    out: *mut *mut BqaOperator,
) -> BqaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let off = n.saturating_sub(1);
        let op = BandedOperator::tridiagonal(
            slice(sub, off, "sub")?.to_vec(),
            slice(diag, n, "diag")?.to_vec(),
            slice(sup, off, "sup")?.to_vec(),
        )?;
        put_operator(op, out)
    })
}

/// Dense operator from `n * n` row-major entries.
///
/// # Safety
/// `entries` must hold `n * n` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_operator_new_dense(
    n: usize,
    entries: *const f64,
    out: *mut *mut BqaOperator,
) -> BqaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidParameter("size overflow".into()))?;
        let m = DMatrix::from_row_slice(n, n, slice(entries, len, "entries")?);
        put_operator(BandedOperator::from_dense(m)?, out)
    })
}

/// Reads a Matrix Market coordinate file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_operator_from_matrix_market(
    path: *const c_char,
    out: *mut *mut BqaOperator,
) -> BqaStatus {
    guard(|| {
        if path.is_null() {
            return Err(Fail::Null("path"));
        }
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Error::InvalidParameter("path is not utf-8".into()))?;
        put_operator(BandedOperator::from_matrix_market(path)?, out)
    })
}

/// # Safety
/// `op` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_operator_dim(op: *const BqaOperator, out: *mut usize) -> BqaStatus {
    guard(|| {
        let op = op.as_ref().ok_or(Fail::Null("op"))?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        *out = op.0.dim();
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bqa_operator_free(op: *mut BqaOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Factors every shifted system needed for `q(tau, A) f` at any `tau`.
///
/// # Safety
/// `op` must be a live handle, `f` must hold `len` values and `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_plan_new(
    op: *const BqaOperator,
    order: usize,
    modes: usize,
    depth: usize,
    f: *const f64,
    len: usize,
    out: *mut *mut BqaPlan,
) -> BqaStatus {
    guard(|| {
        let op = op.as_ref().ok_or(Fail::Null("op"))?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let plan = ActionPlan::new(&op.0, order, modes, depth, slice(f, len, "f")?)?;
        *out = Box::into_raw(Box::new(BqaPlan(plan)));
        Ok(())
    })
}

/// Writes the action at `tau` into `out[0..len]`.
///
/// # Safety
/// `plan` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_plan_eval(
    plan: *const BqaPlan,
    tau: f64,
    out: *mut f64,
    len: usize,
) -> BqaStatus {
    guard(|| {
        let plan = plan.as_ref().ok_or(Fail::Null("plan"))?;
        write_vector(&plan.0.eval(tau)?, out, len)
    })
}

/// Number of shifted solves performed while building the plan.
///
/// # Safety
/// `plan` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bqa_plan_solve_count(plan: *const BqaPlan, out: *mut usize) -> BqaStatus {
    guard(|| {
        let plan = plan.as_ref().ok_or(Fail::Null("plan"))?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        *out = plan.0.solve_count();
        Ok(())
    })
}

/// # Safety
/// `plan` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bqa_plan_free(plan: *mut BqaPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Dense reference `(e^A - I)^{-1} e^{tau A} A f`.
///
/// # Safety
/// `op` must be a live handle; `f` and `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn bqa_reference_solution(
    op: *const BqaOperator,
    tau: f64,
    f: *const f64,
    len: usize,
    out: *mut f64,
) -> BqaStatus {
    guard(|| {
        let op = op.as_ref().ok_or(Fail::Null("op"))?;
        let z = reference_solution(&op.0, tau, slice(f, len, "f")?)?;
        write_vector(&z, out, len)
    })
}

//! C interface to the `skorokhod` library.
//!
//! Measures and plans are opaque heap handles released with their `_free`
//! functions. Every fallible call returns an [`SkStatus`]; on failure a
//! description is available from [`sk_last_error`] on the same thread.
//! Results are written through out-pointers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use skorokhod::construct::{
    ay_plan, barycentre_phi, cw_run, expected_local_time_zero, jacka_plan, reversed_ay_plan,
    vallois_eps_plan, PlanParseError, Tangent,
};
use skorokhod::minimality::{ay_max_law, gap_c, max_law_bound, region_a};
use skorokhod::simulate::{empirical_law, tail_probability, tv_distance};
use skorokhod::{AtomicMeasure, EmbeddingPlan, Error, Side};

/// Opaque atomic measure.
pub struct SkMeasure(AtomicMeasure);

/// Opaque embedding plan.
pub struct SkPlan(EmbeddingPlan);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidMeasure = 2,
    InvalidArgument = 3,
    InvalidTangent = 4,
    InadmissibleC = 5,
    IncompletePlan = 6,
    UndefinedPhi = 7,
    ParseError = 8,
    PlanMismatch = 9,
    IndexOutOfRange = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkConstruction {
    AzemaYor = 0,
    ReversedAzemaYor = 1,
    Jacka = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkSide {
    Below = 0,
    Above = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SkStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidMeasure(_) | Error::MalformedPotential(_) => SkStatus::InvalidMeasure,
            Error::InvalidSplit { .. }
            | Error::InvalidInterval { .. }
            | Error::InvalidParameter(_) => SkStatus::InvalidArgument,
            Error::InvalidTangent { .. } => SkStatus::InvalidTangent,
            Error::InadmissibleC { .. } => SkStatus::InadmissibleC,
            Error::IncompletePlan { .. } => SkStatus::IncompletePlan,
            Error::UndefinedPhi { .. } => SkStatus::UndefinedPhi,
            Error::PlanMismatch(_) => SkStatus::PlanMismatch,
        };
        Failure(status, e.to_string())
    }
}

fn null() -> Failure {
    Failure(SkStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SkStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SkStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a measure from `len` positions and positive weights with total
/// mass at most 1. Coincident positions are merged.
///
/// # Safety
/// `positions` and `weights` must point to `len` readable values.
#[no_mangle]
pub unsafe extern "C" fn sk_measure_new(
    positions: *const f64,
    weights: *const f64,
    len: usize,
    out: *mut *mut SkMeasure,
) -> SkStatus {
    guard(|| {
        let xs = slice(positions, len)?;
        let ws = slice(weights, len)?;
        let m = AtomicMeasure::new(xs.iter().copied().zip(ws.iter().copied()))?;
        put(out, boxed(SkMeasure(m)))
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_measure_free(m: *mut SkMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_measure_len(m: *const SkMeasure, out: *mut usize) -> SkStatus {
    guard(|| put(out, get(m)?.0.len()))
}

/// Atom `index` in increasing position order.
///
/// # Safety
/// `m` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_measure_atom(
    m: *const SkMeasure,
    index: usize,
    position: *mut f64,
    weight: *mut f64,
) -> SkStatus {
    guard(|| {
        let a = get(m)?
            .0
            .atoms()
            .get(index)
            .ok_or_else(|| Failure(SkStatus::IndexOutOfRange, format!("no atom {index}")))?;
        put(position, a.position)?;
        put(weight, a.weight)
    })
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_measure_mean(m: *const SkMeasure, out: *mut f64) -> SkStatus {
    guard(|| put(out, get(m)?.0.mean()))
}

/// `u(x) = -Σ wᵢ|x - xᵢ|`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_potential(m: *const SkMeasure, x: f64, out: *mut f64) -> SkStatus {
    guard(|| put(out, get(m)?.0.potential().eval(x)))
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_gap_c(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    out: *mut f64,
) -> SkStatus {
    guard(|| put(out, gap_c(&get(mu0)?.0, &get(mu)?.0)?))
}

/// Number of components of the contact set and its extreme points
/// (`±INFINITY` when unbounded).
///
/// # Safety
/// Handles must be live; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_region_a(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    components: *mut usize,
    a_minus: *mut f64,
    a_plus: *mut f64,
) -> SkStatus {
    guard(|| {
        let r = region_a(&get(mu0)?.0, &get(mu)?.0)?;
        put(components, r.components.len())?;
        put(a_minus, r.a_minus)?;
        put(a_plus, r.a_plus)
    })
}

/// Closed component `index` of the contact set; a point has `lo == hi`.
///
/// # Safety
/// Handles must be live; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_region_a_component(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    index: usize,
    lo: *mut f64,
    hi: *mut f64,
) -> SkStatus {
    guard(|| {
        let r = region_a(&get(mu0)?.0, &get(mu)?.0)?;
        let &(p, q) = r
            .components
            .get(index)
            .ok_or_else(|| Failure(SkStatus::IndexOutOfRange, format!("no component {index}")))?;
        put(lo, p)?;
        put(hi, q)
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_max_law_bound(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    x: f64,
    out: *mut f64,
) -> SkStatus {
    guard(|| put(out, max_law_bound(&get(mu0)?.0, &get(mu)?.0, x)?))
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_ay_max_law(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    x: f64,
    out: *mut f64,
) -> SkStatus {
    guard(|| put(out, ay_max_law(&get(mu0)?.0, &get(mu)?.0, x)?))
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_barycentre(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    x: f64,
    out: *mut f64,
) -> SkStatus {
    guard(|| put(out, barycentre_phi(&get(mu0)?.0, &get(mu)?.0, x)?))
}

/// Builds one of the sweep constructions at the gap constant.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_build(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    kind: SkConstruction,
    out: *mut *mut SkPlan,
) -> SkStatus {
    guard(|| {
        let (m0, m) = (&get(mu0)?.0, &get(mu)?.0);
        let plan = match kind {
            SkConstruction::AzemaYor => ay_plan(m0, m)?,
            SkConstruction::ReversedAzemaYor => reversed_ay_plan(m0, m)?,
            SkConstruction::Jacka => jacka_plan(m0, m)?,
        };
        put(out, boxed(SkPlan(plan)))
    })
}

/// ε-approximate Vallois construction; may be truncated, see
/// [`sk_plan_is_complete`].
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_vallois(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    eps: f64,
    max_steps: usize,
    out: *mut *mut SkPlan,
) -> SkStatus {
    guard(|| {
        let plan = vallois_eps_plan(&get(mu0)?.0, &get(mu)?.0, eps, max_steps)?;
        put(out, boxed(SkPlan(plan)))
    })
}

/// Applies `n` tangents `slopes[i] * x + intercepts[i]` in order, aiming at
/// `u_mu - c`.
///
/// # Safety
/// Handles must be live; the arrays must hold `n` values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_custom(
    mu0: *const SkMeasure,
    mu: *const SkMeasure,
    slopes: *const f64,
    intercepts: *const f64,
    n: usize,
    c: f64,
    out: *mut *mut SkPlan,
) -> SkStatus {
    guard(|| {
        let tangents = slice(slopes, n)?
            .iter()
            .zip(slice(intercepts, n)?)
            .map(|(&s, &i)| Tangent::new(s, i))
            .collect::<Result<Vec<_>, _>>()?;
        let plan = cw_run(&get(mu0)?.0, &tangents, &get(mu)?.0, c)?;
        put(out, boxed(SkPlan(plan)))
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_free(p: *mut SkPlan) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_step_count(p: *const SkPlan, out: *mut usize) -> SkStatus {
    guard(|| put(out, get(p)?.0.steps.len()))
}

/// Tangent and interval of step `index`; open ends are `±INFINITY`.
///
/// # Safety
/// `p` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_step(
    p: *const SkPlan,
    index: usize,
    slope: *mut f64,
    intercept: *mut f64,
    lower: *mut f64,
    upper: *mut f64,
) -> SkStatus {
    guard(|| {
        let s = get(p)?
            .0
            .steps
            .get(index)
            .ok_or_else(|| Failure(SkStatus::IndexOutOfRange, format!("no step {index}")))?;
        put(slope, s.tangent.slope)?;
        put(intercept, s.tangent.intercept)?;
        put(lower, s.interval.lo())?;
        put(upper, s.interval.hi())
    })
}

/// # Safety
/// `p` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_summary(
    p: *const SkPlan,
    c: *mut f64,
    residual: *mut f64,
) -> SkStatus {
    guard(|| {
        let p = &get(p)?.0;
        put(c, p.c)?;
        put(residual, p.residual)
    })
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_is_complete(p: *const SkPlan, out: *mut bool) -> SkStatus {
    guard(|| put(out, get(p)?.0.is_complete()))
}

/// Law reached by the plan, as a new handle.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_final_measure(
    p: *const SkPlan,
    out: *mut *mut SkMeasure,
) -> SkStatus {
    guard(|| put(out, boxed(SkMeasure(get(p)?.0.final_measure().clone()))))
}

/// Serialises a plan; release the string with [`sk_string_free`].
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_to_json(p: *const SkPlan, out: *mut *mut c_char) -> SkStatus {
    guard(|| {
        let s = CString::new(get(p)?.0.to_json())
            .map_err(|e| Failure(SkStatus::Panic, e.to_string()))?;
        put(out, s.into_raw())
    })
}

/// Reads and replays a plan file.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_plan_from_json(json: *const c_char, out: *mut *mut SkPlan) -> SkStatus {
    guard(|| {
        if json.is_null() {
            return Err(null());
        }
        let s = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(SkStatus::ParseError, e.to_string()))?;
        let plan = EmbeddingPlan::from_json(s).map_err(|e| match e {
            PlanParseError::Json(j) => Failure(SkStatus::ParseError, j.to_string()),
            PlanParseError::Plan(e) => e.into(),
        })?;
        put(out, boxed(SkPlan(plan)))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Expected local time at zero accumulated by a complete plan.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_expected_local_time_zero(p: *const SkPlan, out: *mut f64) -> SkStatus {
    guard(|| put(out, expected_local_time_zero(&get(p)?.0)?))
}

/// Total variation distance between the law of `n` simulated endpoints and
/// the target.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_simulate_tv(
    p: *const SkPlan,
    n: usize,
    seed: u64,
    out: *mut f64,
) -> SkStatus {
    guard(|| {
        let plan = &get(p)?.0;
        let law = empirical_law(plan, n, seed, &[])?;
        put(out, tv_distance(&law, &plan.target))
    })
}

/// Estimate and standard error of `P(T > H_{-γ}, B₀ ≥ a₋)` (below) or
/// `P(T > H_γ, B₀ ≤ a₊)` (above), with 𝒜 taken from the plan's measures.
///
/// # Safety
/// `p` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_tail_probability(
    p: *const SkPlan,
    gamma: f64,
    side: SkSide,
    n: usize,
    seed: u64,
    estimate: *mut f64,
    std_error: *mut f64,
) -> SkStatus {
    guard(|| {
        let plan = &get(p)?.0;
        let region = region_a(&plan.mu0, &plan.target)?;
        let side = match side {
            SkSide::Below => Side::Below,
            SkSide::Above => Side::Above,
        };
        let (e, se) = tail_probability(plan, gamma, side, &region, n, seed)?;
        put(estimate, e)?;
        put(std_error, se)
    })
}

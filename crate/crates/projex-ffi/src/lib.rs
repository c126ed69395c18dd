//! C ABI over the `projex` core.
//!
//! Objects cross the boundary as opaque handles created by a `*_new` or
//! constructor function and released by the matching `*_free`. Every fallible
//! function returns a [`ProjexStatus`]; on failure the message is available
//! from [`projex_last_error`] on the same thread. Output pointers are written
//! only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use projex::bounds::{evaluate, BoundQuery};
use projex::constructions::{block_B, construct_bigex, BigexReport};
use projex::covering::{estimate_box_dimension, sat, surd_intervals_of_balls, ScaleEntry, ScaleProfile, SurdRadius};
use projex::exact::{to_f64, Rat};
use projex::geometry::{BallUnion, RatPoint};
use projex::incidence::{exceptional_direction_count, grid_check, grid_points, normalize_dir, projection_cardinality_int};
use projex::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjexStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    CapExceeded = 4,
    ConditionFailed = 5,
    NeedExact = 6,
    Overflow = 7,
    Io = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ProjexStatus {
    match e {
        Error::VerticalDirection | Error::Invalid(_) | Error::Config(_) => ProjexStatus::InvalidArgument,
        Error::Domain(_) => ProjexStatus::Domain,
        Error::Cap(_) => ProjexStatus::CapExceeded,
        Error::Condition(_) => ProjexStatus::ConditionFailed,
        Error::NeedExact => ProjexStatus::NeedExact,
        Error::Overflow(_) => ProjexStatus::Overflow,
        Error::Io(_) | Error::Csv(_) => ProjexStatus::Io,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (ProjexStatus, String)>) -> ProjexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ProjexStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_else(|| "panic".into());
            set_error(msg);
            ProjexStatus::Panic
        }
    }
}

fn core<T>(r: projex::Result<T>) -> Result<T, (ProjexStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ProjexStatus, String) {
    (ProjexStatus::NullPointer, format!("{what} is null"))
}

fn bad(msg: &str) -> (ProjexStatus, String) {
    (ProjexStatus::InvalidArgument, msg.to_string())
}

fn rat(num: i64, den: i64) -> Result<Rat, (ProjexStatus, String)> {
    if den == 0 {
        return Err(bad("zero denominator"));
    }
    Ok(Rat::new(BigInt::from(num), BigInt::from(den)))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn projex_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn projex_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Finite set of exact rational points.
pub struct ProjexPointSet {
    points: Vec<RatPoint>,
}

/// Union of closed balls of a common rational radius.
pub struct ProjexBallUnion {
    inner: BallUnion,
}

/// Result of a bigex construction.
pub struct ProjexBigex {
    report: BigexReport,
}

/// Point set from `len` coordinates `x_num[i]/x_den[i]`, `y_num[i]/y_den[i]`.
///
/// # Safety
/// The four arrays must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projex_point_set_new(x_num: *const i64, x_den: *const i64, y_num: *const i64, y_den: *const i64, len: usize, out: *mut *mut ProjexPointSet) -> ProjexStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if len > 0 && (x_num.is_null() || x_den.is_null() || y_num.is_null() || y_den.is_null()) {
            return Err(null("coordinate array"));
        }
        let mut points = Vec::with_capacity(len);
        for i in 0..len {
            let x = rat(*x_num.add(i), *x_den.add(i))?;
            let y = rat(*y_num.add(i), *y_den.add(i))?;
            points.push(RatPoint::new(x, y));
        }
        points.sort();
        points.dedup();
        *out = Box::into_raw(Box::new(ProjexPointSet { points }));
        Ok(())
    })
}

/// The grid `{1..n}²`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projex_point_set_grid(n: i64, out: *mut *mut ProjexPointSet) -> ProjexStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(1..=1 << 20).contains(&n) {
            return Err(bad("grid side must lie in 1..=2^20"));
        }
        *out = Box::into_raw(Box::new(ProjexPointSet { points: grid_points(n) }));
        Ok(())
    })
}

/// # Safety
/// `set` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn projex_point_set_free(set: *mut ProjexPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of distinct points, or 0 for null.
///
/// # Safety
/// `set` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn projex_point_set_len(set: *const ProjexPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.points.len())
}

/// Exact `card ρ_e(P)` for `e ∝ (a, b)`.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projex_projection_cardinality(set: *const ProjexPointSet, a: i64, b: i64, out: *mut u64) -> ProjexStatus {
    guard(|| {
        let s = set.as_ref().ok_or_else(|| null("set"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = core(normalize_dir(a as i128, b as i128))?;
        *out = projection_cardinality_int(&s.points, d) as u64;
        Ok(())
    })
}

/// Number of directions `e` with `card ρ_e(P) ≤ n^s`, `s ∈ [1/2, 1)`.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projex_exceptional_direction_count(set: *const ProjexPointSet, s: f64, out: *mut u64) -> ProjexStatus {
    guard(|| {
        let p = set.as_ref().ok_or_else(|| null("set"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = core(exceptional_direction_count(&p.points, s))?.count as u64;
        Ok(())
    })
}

/// Grid projection check for `{1..n}²` along `c(1, p/q)`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct ProjexGridCheck {
    pub cardinality: u64,
    /// `(1 + p)(1 + q)n`
    pub bound: u64,
    pub min_preimages: u64,
    /// 1 when the cardinality bound and the preimage count hold.
    pub holds: i32,
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projex_grid_check(n: u64, p: u64, q: u64, out: *mut ProjexGridCheck) -> ProjexStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = core(grid_check(n, p, q))?;
        *out = ProjexGridCheck { cardinality: g.cardinality, bound: g.bound, min_preimages: g.min_preimages, holds: g.holds() as i32 };
        Ok(())
    })
}

/// The block `B_n` for `d ≥ 3`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projex_block_b(n: u32, d: u32, out: *mut *mut ProjexBallUnion) -> ProjexStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = core(block_B(n, d))?;
        *out = Box::into_raw(Box::new(ProjexBallUnion { inner }));
        Ok(())
    })
}

/// Balls of radius `r_num/r_den` around the points of `points`.
///
/// # Safety
/// `points` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projex_ball_union_new(points: *const ProjexPointSet, r_num: i64, r_den: i64, out: *mut *mut ProjexBallUnion) -> ProjexStatus {
    guard(|| {
        let p = points.as_ref().ok_or_else(|| null("points"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = core(BallUnion::new(p.points.clone(), rat(r_num, r_den)?))?;
        *out = Box::into_raw(Box::new(ProjexBallUnion { inner }));
        Ok(())
    })
}

/// # Safety
/// `k` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn projex_ball_union_free(k: *mut ProjexBallUnion) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Number of balls, or 0 for null.
///
/// # Safety
/// `k` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn projex_ball_union_len(k: *const ProjexBallUnion) -> usize {
    k.as_ref().map_or(0, |k| k.inner.len())
}

/// Exact `N(ρ_e(K), δ)` for `e ∝ (a, b)` and `δ = num/den`; saturates at
/// `UINT64_MAX`.
///
/// # Safety
/// `k` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projex_projection_cover(k: *const ProjexBallUnion, a: i64, b: i64, delta_num: i64, delta_den: i64, out: *mut u64) -> ProjexStatus {
    guard(|| {
        let k = k.as_ref().ok_or_else(|| null("k"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if a == 0 && b == 0 {
            return Err(bad("zero direction"));
        }
        let delta = rat(delta_num, delta_den)?;
        if delta <= Rat::from_integer(0.into()) {
            return Err(bad("delta must be positive"));
        }
        let si = core(surd_intervals_of_balls(&k.inner, a as i128, b as i128))?;
        *out = sat(si.covering(&SurdRadius { r_rat: Rat::from_integer(0.into()), r_surd: delta }));
        Ok(())
    })
}

/// Parameters of [`projex_bounds_evaluate`]; a NaN field is absent.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ProjexBoundQuery {
    pub gamma: f64,
    pub sigma: f64,
    pub s: f64,
    pub tau: f64,
    pub m: f64,
}

/// Evaluates a named bound formula.
///
/// # Safety
/// `formula` must be a NUL-terminated string; `query` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projex_bounds_evaluate(formula: *const c_char, query: *const ProjexBoundQuery, out: *mut f64) -> ProjexStatus {
    guard(|| {
        if formula.is_null() {
            return Err(null("formula"));
        }
        let q = query.as_ref().ok_or_else(|| null("query"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let name = CStr::from_ptr(formula).to_str().map_err(|_| bad("formula is not UTF-8"))?;
        let opt = |v: f64| if v.is_nan() { None } else { Some(v) };
        let bq = BoundQuery { gamma: opt(q.gamma), sigma: opt(q.sigma), s: opt(q.s), tau: opt(q.tau), m: opt(q.m) };
        *out = core(evaluate(name, &bq))?.0;
        Ok(())
    })
}

/// Fitted slope of `log N` against `−log δ` for `len ≥ 3` strictly decreasing scales.
///
/// # Safety
/// `deltas` and `counts` must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projex_box_dimension(deltas: *const f64, counts: *const u64, len: usize, ambient_dim: u32, out: *mut f64) -> ProjexStatus {
    guard(|| {
        if deltas.is_null() || counts.is_null() {
            return Err(null("input array"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let entries = (0..len).map(|i| ScaleEntry { delta: *deltas.add(i), n: *counts.add(i), p: None }).collect();
        let profile = core(ScaleProfile::new(entries, ambient_dim))?;
        *out = core(estimate_box_dimension(&profile))?.slope;
        Ok(())
    })
}

/// Builds the bigex construction to `depth` at `sigma`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projex_bigex_new(sigma: f64, depth: usize, out: *mut *mut ProjexBigex) -> ProjexStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let report = core(construct_bigex(sigma, depth))?;
        *out = Box::into_raw(Box::new(ProjexBigex { report }));
        Ok(())
    })
}

/// Summary of a bigex run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct ProjexBigexSummary {
    /// 1 when every certificate passes.
    pub passed: i32,
    pub d: u32,
    pub root_checks: u64,
    pub root_violations: u64,
    /// 1 when an expansion was built.
    pub expanded: i32,
    pub expansion_n: u32,
    pub children: u64,
    /// Constant `c_w` of the children.
    pub c_child: f64,
    pub arcs_disjoint: i32,
    pub child_checks: u64,
    pub child_violations: u64,
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projex_bigex_summary(h: *const ProjexBigex, out: *mut ProjexBigexSummary) -> ProjexStatus {
    guard(|| {
        let r = &h.as_ref().ok_or_else(|| null("handle"))?.report;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut s = ProjexBigexSummary {
            passed: r.passed() as i32,
            d: r.params.d,
            root_checks: r.root_ind.checked,
            root_violations: r.root_ind.violations,
            child_checks: r.child_ind.checked,
            child_violations: r.child_ind.violations,
            ..Default::default()
        };
        if let Some(e) = &r.expansion {
            s.expanded = 1;
            s.expansion_n = e.n;
            s.children = e.children;
            s.c_child = to_f64(&e.c_child);
            s.arcs_disjoint = e.arcs_disjoint as i32;
        }
        *out = s;
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn projex_bigex_free(h: *mut ProjexBigex) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

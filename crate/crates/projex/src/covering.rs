//! Covering and packing numbers.
//!
//! `N(U, δ)` counts closed balls of radius `δ` (intervals of length `2δ`).
//! `P(U, δ)` counts centers in `U` at pairwise distance at least `2δ`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{Read, Write};

use ethnum::I256;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact::{ceil_int, floor_int, from_f64, i256_to_bigint, rbig, to_f64, Rat};
use crate::geometry::{project_union, BallUnion, Direction, IntervalUnion, Point, PointSet, RatPoint};

/// Absolute tolerance for float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-12;

/// Ordered field operations needed by the 1-D greedy sweeps.
pub trait Coord: Clone + PartialOrd {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn times(&self, k: u64) -> Self;
    fn positive(&self) -> bool;
    /// `a ≥ b`, with the float tolerance in float mode.
    fn at_least(&self, o: &Self) -> bool;
    /// `ceil(num / den)` for `num ≥ 0`, `den > 0`.
    fn ceil_div(num: &Self, den: &Self) -> u64;
    /// `floor(num / den)` for `num ≥ 0`, `den > 0`.
    fn floor_div(num: &Self, den: &Self) -> u64;
}

fn snap(r: f64) -> Option<f64> {
    let n = r.round();
    ((r - n).abs() <= FLOAT_TOL * n.abs().max(1.0)).then_some(n)
}

impl Coord for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, k: u64) -> Self {
        self * k as f64
    }
    fn positive(&self) -> bool {
        *self > 0.0
    }
    fn at_least(&self, o: &Self) -> bool {
        *self >= *o - FLOAT_TOL
    }
    fn ceil_div(num: &Self, den: &Self) -> u64 {
        let r = (num / den).max(0.0);
        snap(r).unwrap_or_else(|| r.ceil()) as u64
    }
    fn floor_div(num: &Self, den: &Self) -> u64 {
        let r = (num / den).max(0.0);
        snap(r).unwrap_or_else(|| r.floor()) as u64
    }
}

impl Coord for Rat {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, k: u64) -> Self {
        self * rbig(k)
    }
    fn positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn at_least(&self, o: &Self) -> bool {
        self >= o
    }
    fn ceil_div(num: &Self, den: &Self) -> u64 {
        ceil_int(&(num / den)).to_u64().unwrap_or(u64::MAX)
    }
    fn floor_div(num: &Self, den: &Self) -> u64 {
        floor_int(&(num / den)).to_u64().unwrap_or(u64::MAX)
    }
}

fn greedy_cover<T: Coord>(ivs: &[(T, T)], delta: &T) -> u64 {
    let w = delta.times(2);
    let mut covered: Option<T> = None;
    let mut count = 0u64;
    for (a, b) in ivs {
        match &covered {
            Some(c) if c.at_least(b) => {}
            Some(c) if c.at_least(a) => {
                let k = T::ceil_div(&b.sub(c), &w).max(1);
                count += k;
                covered = Some(c.add(&w.times(k)));
            }
            _ => {
                let k = T::ceil_div(&b.sub(a), &w).max(1);
                count += k;
                covered = Some(a.add(&w.times(k)));
            }
        }
    }
    count
}

fn greedy_pack<T: Coord>(ivs: &[(T, T)], delta: &T) -> u64 {
    let w = delta.times(2);
    let mut last: Option<T> = None;
    let mut count = 0u64;
    for (a, b) in ivs {
        let x = match &last {
            Some(l) => {
                let next = l.add(&w);
                if next > *a {
                    next
                } else {
                    a.clone()
                }
            }
            None => a.clone(),
        };
        if !b.at_least(&x) {
            continue;
        }
        let room = if b > &x { b.sub(&x) } else { x.sub(&x) };
        let k = T::floor_div(&room, &w) + 1;
        count += k;
        last = Some(x.add(&w.times(k - 1)));
    }
    count
}

/// Minimum number of radius-`δ` balls covering `U` (left-to-right greedy).
pub fn covering_number_1d<T: Coord>(u: &IntervalUnion<T>, delta: &T) -> Result<u64> {
    if !delta.positive() {
        return invalid("delta must be positive");
    }
    Ok(greedy_cover(u.intervals(), delta))
}

/// Maximum number of points of `U` at pairwise distance at least `2δ`.
pub fn packing_number_1d<T: Coord>(u: &IntervalUnion<T>, delta: &T) -> Result<u64> {
    if !delta.positive() {
        return invalid("delta must be positive");
    }
    Ok(greedy_pack(u.intervals(), delta))
}

/// Intervals `[c_i − h, c_i + h]` scaled by `|v|` for an integer direction
/// `v = (a, b)`: centers `a·x + b·y` are exact numerators over `denom`, and
/// `h = h_rat + h_surd·√S` with `S = a² + b²`. Cover radii are given in the
/// same form. Comparisons run in f64 and fall back to exact arithmetic near
/// ties.
#[derive(Clone, Debug)]
pub struct SurdIntervals {
    centers: Vec<I256>,
    denom: BigInt,
    denom_f: f64,
    h_rat: Rat,
    h_surd: Rat,
    s: BigInt,
    sqrt_s: f64,
    /// `⌊√S·2^SQRT_BITS⌋`.
    sqrt_fp: BigInt,
}

const SQRT_BITS: usize = 192;

/// Radius `r_rat + r_surd·√S` of the covering balls.
#[derive(Clone, Debug)]
pub struct SurdRadius {
    pub r_rat: Rat,
    pub r_surd: Rat,
}

impl SurdIntervals {
    pub fn new(mut centers: Vec<I256>, denom: BigInt, h_rat: Rat, h_surd: Rat, s: BigInt) -> Self {
        assert!(denom.is_positive(), "denominator must be positive");
        centers.sort_unstable();
        centers.dedup();
        let denom_f = denom.to_f64().unwrap_or(f64::INFINITY);
        let sqrt_s = s.to_f64().unwrap_or(f64::INFINITY).sqrt();
        let sqrt_fp = (&s << (2 * SQRT_BITS)).sqrt();
        SurdIntervals { centers, denom, denom_f, h_rat, h_surd, s, sqrt_s, sqrt_fp }
    }

    /// Same centers with the half-width `h_rat + h_surd·√S`.
    pub fn with_half_width(&self, h_rat: Rat, h_surd: Rat) -> SurdIntervals {
        SurdIntervals { h_rat, h_surd, ..self.clone() }
    }

    pub fn distinct_centers(&self) -> usize {
        self.centers.len()
    }

    /// `(c_i − c_j, float estimate, float magnitude)`.
    fn diff(&self, i: usize, j: usize) -> (I256, f64, f64) {
        let x = self.centers[i] - self.centers[j];
        let t = x.as_f64() / self.denom_f;
        // an infinite magnitude disables the float filter
        let mag = if t.is_finite() && (t == 0.0) == (x == I256::ZERO) && (t == 0.0 || t.abs() > 1e-280) { t.abs() } else { f64::INFINITY };
        (x, t, mag)
    }

    /// Sign of `x/D + u + v·√S` with `u = ur + k·u1`, `v = vr + k·v1`.
    fn sign(&self, x: (I256, f64, f64), lin: &Lin, k: u128) -> Ordering {
        let (x, t1, xmag) = x;
        let kf = k as f64;
        let t2 = lin.ur_f + kf * lin.u1_f;
        let t3 = (lin.vr_f + kf * lin.v1_f) * self.sqrt_s;
        let mag = xmag + t1.abs() + lin.ur_f.abs() + (kf * lin.u1_f).abs() + (lin.vr_f.abs() + (kf * lin.v1_f).abs()) * self.sqrt_s;
        let v = t1 + t2 + t3;
        if v.is_finite() && mag.is_finite() && v.abs() > 1e-9 * mag {
            return if v > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        let kb = BigInt::from(k);
        let u = i256_to_bigint(x) * &lin.m + &lin.ur + &kb * &lin.u1;
        let w = &lin.vr + &kb * &lin.v1;
        sign_surd_int(&u, &w, &self.s)
    }

    /// `⌈−(x/D + ur + vr√S)/(u1 + v1√S)⌉` up to the fixed-point error of `√S`.
    fn estimate_k(&self, x: I256, lin: &Lin) -> Option<u128> {
        let a = ((i256_to_bigint(x) * &lin.m + &lin.ur) << SQRT_BITS) + &lin.vr * &self.sqrt_fp;
        let b = (&lin.u1 << SQRT_BITS) + &lin.v1 * &self.sqrt_fp;
        if !b.is_positive() {
            return None;
        }
        let q = num_integer::Integer::div_ceil(&-a, &b);
        if q.is_negative() {
            Some(0)
        } else {
            q.to_u128()
        }
    }

    /// Least `K ≥ k_min` with `x/D + u + v√S ≥ 0`, where the expression is
    /// increasing in `K`. The float estimate is corrected by galloping and
    /// bisection on exact signs.
    fn least_k(&self, x: (I256, f64, f64), lin: &Lin, k_min: u128) -> u128 {
        let ok = |k: u128| self.sign(x, lin, k) != Ordering::Less;
        if ok(k_min) {
            return k_min;
        }
        let base = x.1 + lin.ur_f + lin.vr_f * self.sqrt_s;
        let step = lin.u1_f + lin.v1_f * self.sqrt_s;
        let est = (-base / step).ceil();
        // f64 resolves K only below 2^40; larger K uses the fixed-point estimate.
        let guess = if est.is_finite() && est < 1e12 { est.max(0.0) as u128 } else { self.estimate_k(x.0, lin).unwrap_or(u128::MAX / 2) };
        self.settle(lin, x, k_min, guess.max(k_min + 1))
    }

    /// Least `K` in `(k_min, ∞)` with a nonnegative sign, given `k_min` fails
    /// and the guess `hi > k_min`.
    fn settle(&self, lin: &Lin, x: (I256, f64, f64), k_min: u128, mut hi: u128) -> u128 {
        let ok = |k: u128| self.sign(x, lin, k) != Ordering::Less;
        let mut lo = k_min;
        if ok(hi) {
            let mut d = 1u128;
            loop {
                let cand = hi.saturating_sub(d).max(lo);
                if cand == lo {
                    break;
                }
                if ok(cand) {
                    hi = cand;
                    d = d.saturating_mul(2);
                } else {
                    lo = cand;
                    break;
                }
            }
        } else {
            let mut d = 1u128;
            loop {
                lo = hi;
                hi = hi.saturating_add(d);
                if ok(hi) {
                    break;
                }
                d = d.saturating_mul(2);
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Exact `N` of the scaled interval union at the scaled radius.
    pub fn covering(&self, r: &SurdRadius) -> u128 {
        if self.centers.is_empty() {
            return 0;
        }
        // covered_to ≥ b_i  ⇔  (c_j − c_i)/D − 2h + 2K·R ≥ 0
        let cover_b = Lin::new(-&self.h_rat * rbig(2), &r.r_rat * rbig(2), -&self.h_surd * rbig(2), &r.r_surd * rbig(2), &self.denom);
        // covered_to ≥ a_i  ⇔  (c_j − c_i)/D + 2K·R ≥ 0
        let cover_a = Lin::new(Rat::zero(), &r.r_rat * rbig(2), Rat::zero(), &r.r_surd * rbig(2), &self.denom);
        let zero = (I256::ZERO, 0.0, 0.0);
        let mut j = 0;
        let mut k = self.least_k(zero, &cover_b, 1);
        let mut count = k;
        for c in 1..self.centers.len() {
            let x = self.diff(j, c);
            if self.sign(x, &cover_b, k) != Ordering::Less {
                continue;
            }
            if self.sign(x, &cover_a, k) != Ordering::Less {
                let kk = self.least_k(x, &cover_b, k);
                count += kk - k;
                k = kk;
            } else {
                j = c;
                k = self.least_k(zero, &cover_b, 1);
                count += k;
            }
        }
        count
    }

    /// Exact leftmost-greedy `P` of the scaled interval union.
    pub fn packing(&self, r: &SurdRadius) -> u128 {
        if self.centers.is_empty() {
            return 0;
        }
        // A chain anchored at a_j holds the points a_j + 2mR, m < K.
        // a_j + 2K·R ≤ b_i  ⇔  (c_i − c_j)/D + 2h − 2K·R ≥ 0
        let fits = Lin::new(&self.h_rat * rbig(2), -&r.r_rat * rbig(2), &self.h_surd * rbig(2), -&r.r_surd * rbig(2), &self.denom);
        // next > a_i  ⇔  (c_j − c_i)/D + 2K·R > 0
        let past_a = Lin::new(Rat::zero(), &r.r_rat * rbig(2), Rat::zero(), &r.r_surd * rbig(2), &self.denom);
        let unfit = fits.negated();
        let zero = (I256::ZERO, 0.0, 0.0);
        let mut j = 0;
        let mut k = self.least_k_strict(zero, &unfit, 1);
        let mut count = k;
        for c in 1..self.centers.len() {
            let x = self.diff(j, c);
            if self.sign(x, &past_a, k) == Ordering::Greater {
                let y = self.diff(c, j);
                if self.sign(y, &fits, k) == Ordering::Less {
                    continue;
                }
                let kk = self.least_k_strict(x, &unfit, k);
                count += kk - k;
                k = kk;
            } else {
                j = c;
                k = self.least_k_strict(zero, &unfit, 1);
                count += k;
            }
        }
        count
    }

    /// Least `K ≥ k_min` with the expression strictly positive.
    fn least_k_strict(&self, x: (I256, f64, f64), lin: &Lin, k_min: u128) -> u128 {
        let mut k = self.least_k(x, lin, k_min);
        if self.sign(x, lin, k) == Ordering::Equal {
            k += 1;
        }
        k
    }
}

/// `x/D + ur + k·u1 + (vr + k·v1)·√S`, scaled by a common denominator `L`
/// so that `x` enters as `x·m` with `m = L/D`.
#[derive(Clone, Debug)]
struct Lin {
    m: BigInt,
    ur: BigInt,
    u1: BigInt,
    vr: BigInt,
    v1: BigInt,
    ur_f: f64,
    u1_f: f64,
    vr_f: f64,
    v1_f: f64,
}

impl Lin {
    fn new(ur: Rat, u1: Rat, vr: Rat, v1: Rat, denom: &BigInt) -> Lin {
        use num_integer::Integer;
        let l = [&ur, &u1, &vr, &v1].iter().fold(denom.clone(), |acc, q| acc.lcm(q.denom()));
        let scale = |q: &Rat| q.numer() * (&l / q.denom());
        Lin { m: &l / denom, ur: scale(&ur), u1: scale(&u1), vr: scale(&vr), v1: scale(&v1), ur_f: to_f64(&ur), u1_f: to_f64(&u1), vr_f: to_f64(&vr), v1_f: to_f64(&v1) }
    }

    fn negated(&self) -> Lin {
        Lin { m: self.m.clone(), ur: -&self.ur, u1: -&self.u1, vr: -&self.vr, v1: -&self.v1, ur_f: -self.ur_f, u1_f: -self.u1_f, vr_f: -self.vr_f, v1_f: -self.v1_f }
    }
}

/// Sign of `u + w·√s` for integers.
fn sign_surd_int(u: &BigInt, w: &BigInt, s: &BigInt) -> Ordering {
    use Ordering::*;
    let su = u.sign();
    let sw = if s.is_zero() { num_bigint::Sign::NoSign } else { w.sign() };
    use num_bigint::Sign::{Minus, NoSign, Plus};
    match (su, sw) {
        (NoSign, NoSign) => Equal,
        (Plus | NoSign, Plus | NoSign) => Greater,
        (Minus | NoSign, Minus | NoSign) => Less,
        (Plus, Minus) => (u * u).cmp(&(w * w * s)),
        (Minus, Plus) => (w * w * s).cmp(&(u * u)),
    }
}

/// Counts above `u64::MAX` saturate.
pub fn sat(v: u128) -> u64 {
    u64::try_from(v).unwrap_or(u64::MAX)
}

/// Exact projection data of a ball union along the integer direction `(a, b)`.
pub fn surd_intervals_of_balls(k: &BallUnion, a: i128, b: i128) -> Result<SurdIntervals> {
    let vals: Vec<Rat> = k.centers.iter().map(|c| c.dot_int(a, b)).collect();
    let (nums, denom) = common_numerators(&vals)?;
    let s = BigInt::from(a) * a + BigInt::from(b) * b;
    Ok(SurdIntervals::new(nums, denom, Rat::zero(), k.radius.clone(), s))
}

/// Exact projection data of a point set along the integer direction `(a, b)`.
pub fn surd_intervals_of_points(pts: &[RatPoint], a: i128, b: i128) -> Result<SurdIntervals> {
    let vals: Vec<Rat> = pts.iter().map(|c| c.dot_int(a, b)).collect();
    let (nums, denom) = common_numerators(&vals)?;
    let s = BigInt::from(a) * a + BigInt::from(b) * b;
    Ok(SurdIntervals::new(nums, denom, Rat::zero(), Rat::zero(), s))
}

/// Numerators over the least common denominator; fails beyond 254 bits.
pub fn common_numerators(vals: &[Rat]) -> Result<(Vec<I256>, BigInt)> {
    use num_integer::Integer;
    let mut d = BigInt::from(1);
    for v in vals {
        d = d.lcm(v.denom());
    }
    let mut out = Vec::with_capacity(vals.len());
    for v in vals {
        let n = v.numer() * (&d / v.denom());
        out.push(crate::exact::bigint_to_i256(&n).ok_or_else(|| Error::Overflow("projection numerator exceeds 254 bits".into()))?);
    }
    Ok((out, d))
}

/// A planar input for the 2-D counts.
#[derive(Clone, Copy, Debug)]
pub enum Planar<'a> {
    Balls(&'a BallUnion),
    Points(&'a PointSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMode {
    Mesh,
    Greedy,
}

/// Mesh mode counts closed `δ`-cells meeting `K`. Greedy mode returns an
/// upper bound for `N(K, δ)`.
pub fn covering_number_2d(k: Planar<'_>, delta: &Rat, mode: CoverMode) -> Result<u64> {
    if !delta.is_positive() {
        return invalid("delta must be positive");
    }
    match (k, mode) {
        (Planar::Balls(b), CoverMode::Mesh) => Ok(mesh_count_balls(b, delta)),
        // Cells of side 7δ/5 have circumradius below δ.
        (Planar::Balls(b), CoverMode::Greedy) => Ok(mesh_count_balls(b, &(delta * Rat::new(7.into(), 5.into())))),
        (Planar::Points(p), CoverMode::Mesh) => Ok(mesh_count_points(p, delta)),
        (Planar::Points(p), CoverMode::Greedy) => Ok(greedy_point_cover(&p.to_float(), to_f64(delta))),
    }
}

/// Closed cells `[iδ,(i+1)δ]` meeting the closed interval `[lo, hi]`.
fn cell_range(lo: &Rat, hi: &Rat, delta: &Rat) -> (i64, i64) {
    let i0 = ceil_int(&(lo / delta)) - BigInt::from(1);
    let i1 = floor_int(&(hi / delta));
    (i0.to_i64().expect("cell index"), i1.to_i64().expect("cell index"))
}

fn merge_count(mut cols: HashMap<i64, Vec<(i64, i64)>>) -> u64 {
    let mut total = 0u64;
    for v in cols.values_mut() {
        v.sort_unstable();
        let mut end: Option<i64> = None;
        for &(lo, hi) in v.iter() {
            match end {
                Some(e) if lo <= e => {
                    if hi > e {
                        total += (hi - e) as u64;
                        end = Some(hi);
                    }
                }
                _ => {
                    total += (hi - lo + 1) as u64;
                    end = Some(hi);
                }
            }
        }
    }
    total
}

/// Closed cells `[iδ,(i+1)δ]` meeting a rational interval union.
pub fn mesh_count_1d(u: &IntervalUnion<Rat>, delta: &Rat) -> Result<u64> {
    if !delta.is_positive() {
        return invalid("delta must be positive");
    }
    let mut cols = HashMap::new();
    cols.insert(0, u.intervals().iter().map(|(lo, hi)| cell_range(lo, hi, delta)).collect());
    Ok(merge_count(cols))
}

fn mesh_count_balls(k: &BallUnion, delta: &Rat) -> u64 {
    let r = &k.radius;
    let r2 = r * r;
    let mut cols: HashMap<i64, Vec<(i64, i64)>> = HashMap::new();
    for c in &k.centers {
        let (i0, i1) = cell_range(&(&c.x - r), &(&c.x + r), delta);
        for i in i0..=i1 {
            let left = delta * rbig(i);
            let right = delta * rbig(i + 1);
            let dx = if c.x < left {
                &left - &c.x
            } else if c.x > right {
                &c.x - &right
            } else {
                Rat::zero()
            };
            let h2 = &r2 - &dx * &dx;
            if h2.is_negative() {
                continue;
            }
            let (j0, j1) = ball_column_range(&c.y, &h2, delta);
            if j0 <= j1 {
                cols.entry(i).or_default().push((j0, j1));
            }
        }
    }
    merge_count(cols)
}

/// Cells `j` with `[jδ,(j+1)δ] ∩ [cy − h, cy + h] ≠ ∅`, where `h² = h2`.
fn ball_column_range(cy: &Rat, h2: &Rat, delta: &Rat) -> (i64, i64) {
    let hf = to_f64(h2).max(0.0).sqrt();
    let cyf = to_f64(cy);
    let df = to_f64(delta);
    // jδ − cy ≤ h
    let top_ok = |j: i64| -> bool {
        let t = delta * rbig(j) - cy;
        !t.is_positive() || &(&t * &t) <= h2
    };
    // cy − (j+1)δ ≤ h
    let bot_ok = |j: i64| -> bool {
        let t = cy - delta * rbig(j + 1);
        !t.is_positive() || &(&t * &t) <= h2
    };
    let mut j1 = ((cyf + hf) / df).floor() as i64;
    while !top_ok(j1) {
        j1 -= 1;
    }
    while top_ok(j1 + 1) {
        j1 += 1;
    }
    let mut j0 = ((cyf - hf) / df).ceil() as i64 - 1;
    while !bot_ok(j0) {
        j0 += 1;
    }
    while bot_ok(j0 - 1) {
        j0 -= 1;
    }
    (j0, j1)
}

fn mesh_count_points(p: &PointSet, delta: &Rat) -> u64 {
    let mut cells: Vec<(i64, i64)> = Vec::new();
    match p {
        PointSet::Exact(v) => {
            for c in v {
                let (i0, i1) = cell_range(&c.x, &c.x, delta);
                let (j0, j1) = cell_range(&c.y, &c.y, delta);
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        cells.push((i, j));
                    }
                }
            }
        }
        PointSet::Float(v) => {
            let d = to_f64(delta);
            for c in v {
                let (i0, i1) = float_cell_range(c.x, d);
                let (j0, j1) = float_cell_range(c.y, d);
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        cells.push((i, j));
                    }
                }
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells.len() as u64
}

fn float_cell_range(x: f64, d: f64) -> (i64, i64) {
    let r = x / d;
    match snap(r) {
        Some(n) => (n as i64 - 1, n as i64),
        None => (r.floor() as i64, r.floor() as i64),
    }
}

fn greedy_point_cover(pts: &[Point], delta: f64) -> u64 {
    let mut grid: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
    let key = |p: &Point| ((p.x / delta).floor() as i64, (p.y / delta).floor() as i64);
    let mut count = 0;
    for p in pts {
        let (gx, gy) = key(p);
        let covered = (-1..=1).any(|dx| (-1..=1).any(|dy| grid.get(&(gx + dx, gy + dy)).is_some_and(|v| v.iter().any(|c| c.dist(p) <= delta + FLOAT_TOL))));
        if !covered {
            grid.entry((gx, gy)).or_default().push(*p);
            count += 1;
        }
    }
    count
}

/// Greedy insertion-order subset with pairwise distance at least `2δ`; a
/// lower bound for `P(K, δ)`.
pub fn packing_number_2d(k: &PointSet, delta: f64) -> Result<u64> {
    if !(delta > 0.0) {
        return invalid("delta must be positive");
    }
    let pts = k.to_float();
    let w = 2.0 * delta;
    let mut grid: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
    let key = |p: &Point| ((p.x / w).floor() as i64, (p.y / w).floor() as i64);
    let mut count = 0;
    for p in &pts {
        let (gx, gy) = key(p);
        let blocked = (-1..=1).any(|dx| (-1..=1).any(|dy| grid.get(&(gx + dx, gy + dy)).is_some_and(|v| v.iter().any(|c| c.dist(p) < w - FLOAT_TOL))));
        if !blocked {
            grid.entry((gx, gy)).or_default().push(*p);
            count += 1;
        }
    }
    Ok(count)
}

/// Exact packing count for an `nx × ny` lattice of the given spacing: every
/// `k`-th point per axis with `k·spacing ≥ 2δ`.
pub fn lattice_packing_count(nx: u64, ny: u64, spacing: &Rat, delta: &Rat) -> u64 {
    let two_delta = delta * rbig(2);
    let k = if spacing >= &two_delta { 1 } else { ceil_int(&(&two_delta / spacing)).to_u64().unwrap_or(u64::MAX) };
    nx.div_ceil(k) * ny.div_ceil(k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleEntry {
    pub delta: f64,
    pub n: u64,
    pub p: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleProfile {
    entries: Vec<ScaleEntry>,
    /// Ambient dimension bounding the slope.
    pub ambient_dim: u32,
}

#[derive(Debug, serde::Serialize, serde::Deserialize)]
struct ProfileRow {
    delta: f64,
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "P")]
    p: Option<u64>,
}

impl ScaleProfile {
    pub fn new(entries: Vec<ScaleEntry>, ambient_dim: u32) -> Result<ScaleProfile> {
        for e in &entries {
            if !(e.delta > 0.0) {
                return invalid("profile scales must be positive");
            }
        }
        for w in entries.windows(2) {
            if !(w[1].delta < w[0].delta) {
                return invalid("profile scales must be strictly decreasing");
            }
            if w[1].n < w[0].n {
                return invalid("covering numbers must be nondecreasing as delta decreases");
            }
        }
        Ok(ScaleProfile { entries, ambient_dim })
    }

    pub fn entries(&self) -> &[ScaleEntry] {
        &self.entries
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for e in &self.entries {
            wr.serialize(ProfileRow { delta: e.delta, n: e.n, p: e.p })?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, ambient_dim: u32) -> Result<ScaleProfile> {
        let mut rd = csv::Reader::from_reader(r);
        let mut entries = Vec::new();
        for row in rd.deserialize() {
            let row: ProfileRow = row?;
            entries.push(ScaleEntry { delta: row.delta, n: row.n, p: row.p });
        }
        ScaleProfile::new(entries, ambient_dim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub scale_range: (f64, f64),
    /// `max log N / −log δ` over scales with `δ < 1`.
    pub max_ratio: f64,
    /// Set when the fitted slope left `[0, ambient_dim]` and was clamped.
    pub clamped: bool,
}

/// Least-squares slope of `log N` against `−log δ`.
pub fn estimate_box_dimension(profile: &ScaleProfile) -> Result<DimensionEstimate> {
    let e = profile.entries();
    if e.len() < 3 {
        return invalid("at least 3 scales are required");
    }
    let xs: Vec<f64> = e.iter().map(|s| -s.delta.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|s| (s.n.max(1) as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let raw = sxy / sxx;
    let intercept = my - raw * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - raw * x).powi(2)).sum::<f64>() / n).sqrt();
    let hi = profile.ambient_dim as f64;
    let slope = raw.clamp(0.0, hi);
    let clamped = slope != raw && (raw - slope).abs() > 1e-12;
    let max_ratio = xs.iter().zip(&ys).filter(|(x, _)| **x > 0.0).map(|(x, y)| y / x).fold(0.0, f64::max);
    Ok(DimensionEstimate { slope: if clamped { slope } else { raw }, intercept, residual, scale_range: (e[e.len() - 1].delta, e[0].delta), max_ratio, clamped })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub direction_index: usize,
    pub delta_index: usize,
    pub direction: Direction,
    pub delta: f64,
    pub n: u64,
    pub p: u64,
}

/// `N` and `P` of `ρ_e(K)` for every `(e, δ)`, in direction-major order.
/// Exact inputs along rational directions are counted exactly.
pub fn direction_sweep(k: Planar<'_>, directions: &[Direction], deltas: &[f64]) -> Result<Vec<SweepRow>> {
    if directions.is_empty() || deltas.is_empty() {
        return invalid("sweep needs directions and scales");
    }
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return invalid("delta must be positive");
    }
    let rows: Result<Vec<Vec<SweepRow>>> = directions.par_iter().enumerate().map(|(di, e)| sweep_direction(k, di, e, deltas)).collect();
    Ok(rows?.into_iter().flatten().collect())
}

fn sweep_direction(k: Planar<'_>, di: usize, e: &Direction, deltas: &[f64]) -> Result<Vec<SweepRow>> {
    let exact = match (k, e.int_vector()) {
        (Planar::Balls(b), Some((a, bb))) => Some(surd_intervals_of_balls(b, a, bb)?),
        (Planar::Points(PointSet::Exact(v)), Some((a, bb))) => Some(surd_intervals_of_points(v, a, bb)?),
        _ => None,
    };
    let float_union = match (&exact, k) {
        (Some(_), _) => None,
        (None, Planar::Balls(b)) => Some(project_union(b, e)),
        (None, Planar::Points(p)) => {
            let v = p
                .to_float()
                .iter()
                .map(|x| {
                    let t = crate::geometry::project(x, e);
                    (t, t)
                })
                .collect();
            Some(IntervalUnion::new(v)?)
        }
    };
    let mut out = Vec::with_capacity(deltas.len());
    for (si, &d) in deltas.iter().enumerate() {
        let (n, p) = match (&exact, &float_union) {
            (Some(s), _) => {
                let r = SurdRadius { r_rat: Rat::zero(), r_surd: from_f64(d) };
                (sat(s.covering(&r)), sat(s.packing(&r)))
            }
            (None, Some(u)) => (covering_number_1d(u, &d)?, packing_number_1d(u, &d)?),
            _ => unreachable!(),
        };
        out.push(SweepRow { direction_index: di, delta_index: si, direction: *e, delta: d, n, p });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rint};
    use crate::geometry::rational_direction;
    use proptest::prelude::*;

    fn fu(v: Vec<(f64, f64)>) -> IntervalUnion<f64> {
        IntervalUnion::new(v).unwrap()
    }

    fn ru(v: &[(i64, i64, i64, i64)]) -> IntervalUnion<Rat> {
        IntervalUnion::new(v.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect()).unwrap()
    }

    #[test]
    fn covering_examples() {
        assert_eq!(covering_number_1d(&fu(vec![(0.0, 1.0)]), &0.25).unwrap(), 2);
        assert_eq!(covering_number_1d(&fu(vec![(0.0, 0.1), (0.5, 0.6)]), &0.05).unwrap(), 2);
        assert_eq!(covering_number_1d(&fu(vec![(0.0, 1.0), (1.2, 1.4)]), &0.1).unwrap(), 6);
        assert_eq!(covering_number_1d(&IntervalUnion::<f64>::empty(), &0.1).unwrap(), 0);
        assert_eq!(covering_number_1d(&ru(&[(0, 1, 1, 1), (6, 5, 7, 5)]), &rat(1, 10)).unwrap(), 6);
    }

    #[test]
    fn packing_examples() {
        assert_eq!(packing_number_1d(&fu(vec![(0.0, 1.0)]), &0.25).unwrap(), 3);
        assert_eq!(packing_number_1d(&fu(vec![(0.3, 0.3)]), &0.25).unwrap(), 1);
        assert_eq!(packing_number_1d(&fu(vec![(0.0, 0.1), (10.0, 10.1)]), &1.0).unwrap(), 2);
        assert_eq!(packing_number_1d(&ru(&[(0, 1, 1, 1)]), &rat(1, 4)).unwrap(), 3);
    }

    #[test]
    fn nonpositive_delta_rejected() {
        assert!(covering_number_1d(&fu(vec![(0.0, 1.0)]), &0.0).is_err());
        assert!(packing_number_1d(&fu(vec![(0.0, 1.0)]), &-1.0).is_err());
    }

    #[test]
    fn mesh_examples() {
        let d = rat(1, 8);
        let b = BallUnion::new(vec![RatPoint::new(rat(1, 16), rat(1, 16))], rat(1, 32)).unwrap();
        assert_eq!(covering_number_2d(Planar::Balls(&b), &d, CoverMode::Mesh).unwrap(), 1);
        let p = PointSet::exact(vec![RatPoint::origin()]).unwrap();
        assert_eq!(covering_number_2d(Planar::Points(&p), &d, CoverMode::Mesh).unwrap(), 4);
        let corners =
            PointSet::exact(vec![RatPoint::new(rat(-1, 2), rat(-1, 2)), RatPoint::new(rat(1, 2), rat(-1, 2)), RatPoint::new(rat(-1, 2), rat(1, 2)), RatPoint::new(rat(1, 2), rat(1, 2))]).unwrap();
        assert_eq!(covering_number_2d(Planar::Points(&corners), &rat(3, 10), CoverMode::Mesh).unwrap(), 4);
        let fl = PointSet::float(vec![Point::new(0.0, 0.0)]);
        assert_eq!(covering_number_2d(Planar::Points(&fl), &d, CoverMode::Mesh).unwrap(), 4);
    }

    #[test]
    fn mesh_1d_examples() {
        let u = IntervalUnion::new(vec![(rat(0, 1), rat(1, 2)), (rat(3, 4), rat(7, 8))]).unwrap();
        // [0,1/2] meets cells -1..=2 at δ = 1/4, [3/4,7/8] meets 2..=3
        assert_eq!(mesh_count_1d(&u, &rat(1, 4)).unwrap(), 5);
        assert!(mesh_count_1d(&u, &rat(0, 1)).is_err());
    }

    #[test]
    fn mesh_of_unit_ball_matches_cell_scan() {
        let k = BallUnion::unit();
        let d = rat(1, 10);
        let m = covering_number_2d(Planar::Balls(&k), &d, CoverMode::Mesh).unwrap();
        // brute force: cell meets ball iff clamped center lies within 1/2
        let mut brute = 0;
        for i in -7..7 {
            for j in -7..7 {
                let cx = rat(0, 1).clamp(rat(i, 10), rat(i + 1, 10));
                let cy = rat(0, 1).clamp(rat(j, 10), rat(j + 1, 10));
                if &cx * &cx + &cy * &cy <= rat(1, 4) {
                    brute += 1;
                }
            }
        }
        assert_eq!(m, brute);
        let g = covering_number_2d(Planar::Balls(&k), &d, CoverMode::Greedy).unwrap();
        assert!(g >= 1 && g <= m);
    }

    #[test]
    fn packing_2d_examples() {
        let g = PointSet::grid(3);
        assert_eq!(packing_number_2d(&g, 0.4).unwrap(), 9);
        let two = PointSet::float(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]);
        assert_eq!(packing_number_2d(&two, 0.6).unwrap(), 1);
        assert_eq!(packing_number_2d(&PointSet::float(vec![Point::new(0.2, 0.3)]), 1.0).unwrap(), 1);
        assert_eq!(lattice_packing_count(3, 3, &rint(1), &rat(2, 5)), 9);
        assert_eq!(lattice_packing_count(5, 5, &rint(1), &rat(1, 2)), 25);
        assert_eq!(lattice_packing_count(5, 5, &rint(1), &rint(1)), 9);
        assert_eq!(lattice_packing_count(5, 5, &rint(1), &rat(3, 2)), 4);
    }

    #[test]
    fn dimension_examples() {
        let flat: Vec<ScaleEntry> = (1..=6).map(|k| ScaleEntry { delta: 0.5f64.powi(k), n: 1, p: None }).collect();
        let est = estimate_box_dimension(&ScaleProfile::new(flat, 1).unwrap()).unwrap();
        assert!(est.slope.abs() < 1e-12);
        let lin: Vec<ScaleEntry> = (4..=12)
            .map(|k| {
                let d = 0.5f64.powi(k);
                ScaleEntry { delta: d, n: (1.0 / d).round() as u64, p: None }
            })
            .collect();
        let est = estimate_box_dimension(&ScaleProfile::new(lin, 1).unwrap()).unwrap();
        assert!((est.slope - 1.0).abs() <= 0.01);
        let two: Vec<ScaleEntry> = (1..=2).map(|k| ScaleEntry { delta: 0.5f64.powi(k), n: 1, p: None }).collect();
        assert!(estimate_box_dimension(&ScaleProfile::new(two, 1).unwrap()).is_err());
    }

    #[test]
    fn profile_validation_and_csv() {
        let bad = vec![ScaleEntry { delta: 0.1, n: 5, p: None }, ScaleEntry { delta: 0.2, n: 6, p: None }];
        assert!(ScaleProfile::new(bad, 2).is_err());
        let shrinking = vec![ScaleEntry { delta: 0.2, n: 5, p: None }, ScaleEntry { delta: 0.1, n: 4, p: None }];
        assert!(ScaleProfile::new(shrinking, 2).is_err());
        let ok = ScaleProfile::new(vec![ScaleEntry { delta: 0.5, n: 1, p: Some(2) }, ScaleEntry { delta: 0.25, n: 2, p: None }], 2).unwrap();
        let mut buf = Vec::new();
        ok.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "delta,N,P\n0.5,1,2\n0.25,2,\n");
        assert_eq!(ScaleProfile::read_csv(&buf[..], 2).unwrap(), ok);
    }

    #[test]
    fn sweep_examples() {
        let k = BallUnion::unit();
        let rows = direction_sweep(Planar::Balls(&k), &[rational_direction(0, 1).unwrap()], &[0.25]).unwrap();
        assert_eq!(rows[0].n, 2);
        let g = PointSet::grid(3);
        let rows = direction_sweep(Planar::Points(&g), &[Direction::from_int(1, 0).unwrap()], &[0.4]).unwrap();
        assert_eq!(rows[0].n, 3);
        let fl = PointSet::float(g.to_float());
        let rows = direction_sweep(Planar::Points(&fl), &[Direction::from_angle(0.0)], &[0.4]).unwrap();
        assert_eq!(rows[0].n, 3);
    }

    fn exact_rat_union(k: &BallUnion, e: &Direction) -> IntervalUnion<Rat> {
        crate::geometry::project_union_exact(k, e).unwrap()
    }

    #[test]
    fn surd_engine_matches_rational_engine_on_pythagorean_directions() {
        let centers = vec![RatPoint::new(rat(0, 1), rat(0, 1)), RatPoint::new(rat(3, 10), rat(1, 5)), RatPoint::new(rat(-2, 7), rat(1, 3)), RatPoint::new(rat(1, 2), rat(-1, 4))];
        let k = BallUnion::new(centers, rat(1, 20)).unwrap();
        for (a, b) in [(3i128, 4i128), (4, -3), (5, 12), (1, 0), (0, 1)] {
            let e = Direction::from_int(a, b).unwrap();
            let u = exact_rat_union(&k, &e);
            let s = surd_intervals_of_balls(&k, a, b).unwrap();
            for d in [rat(1, 100), rat(1, 40), rat(1, 20), rat(3, 40), rat(1, 7), rat(1, 3)] {
                let nr = covering_number_1d(&u, &d).unwrap();
                let pr = packing_number_1d(&u, &d).unwrap();
                let r = SurdRadius { r_rat: Rat::zero(), r_surd: d.clone() };
                assert_eq!(sat(s.covering(&r)), nr, "N at ({a},{b}) δ={d}");
                assert_eq!(sat(s.packing(&r)), pr, "P at ({a},{b}) δ={d}");
            }
        }
    }

    proptest! {
        #[test]
        fn surd_engine_matches_on_random_inputs(
            pts in proptest::collection::vec((-40i64..40, -40i64..40), 1..12),
            rad in 0i64..6,
            dnum in 1i64..30,
            pyth in 0usize..4,
        ) {
            let (a, b) = [(3i128, 4i128), (5, 12), (8, 15), (1, 0)][pyth];
            let centers: Vec<RatPoint> = pts.iter().map(|&(x, y)| RatPoint::new(rat(x, 40), rat(y, 40))).collect();
            let e = Direction::from_int(a, b).unwrap();
            let d = rat(dnum, 200);
            if rad == 0 {
                let vals: Vec<(Rat, Rat)> = centers.iter().map(|c| {
                    let (ux, uy) = e.exact_unit().unwrap();
                    let t = &c.x * &ux + &c.y * &uy;
                    (t.clone(), t)
                }).collect();
                let u = IntervalUnion::new(vals).unwrap();
                let s = surd_intervals_of_points(&centers, a, b).unwrap();
                let r = SurdRadius { r_rat: Rat::zero(), r_surd: d.clone() };
                prop_assert_eq!(sat(s.covering(&r)), covering_number_1d(&u, &d).unwrap());
                prop_assert_eq!(sat(s.packing(&r)), packing_number_1d(&u, &d).unwrap());
            } else {
                let k = BallUnion::new(centers, rat(rad, 100)).unwrap();
                let u = exact_rat_union(&k, &e);
                let s = surd_intervals_of_balls(&k, a, b).unwrap();
                let r = SurdRadius { r_rat: Rat::zero(), r_surd: d.clone() };
                prop_assert_eq!(sat(s.covering(&r)), covering_number_1d(&u, &d).unwrap());
                prop_assert_eq!(sat(s.packing(&r)), packing_number_1d(&u, &d).unwrap());
            }
        }

        #[test]
        fn scaling_preserves_covering(
            ivs in proptest::collection::vec((0i64..200, 0i64..20), 1..10),
            dnum in 1i64..40,
            scale in 1i64..9,
        ) {
            let raw: Vec<(Rat, Rat)> = ivs.iter().map(|&(a, w)| (rat(a, 10), rat(a + w, 10))).collect();
            let u = IntervalUnion::new(raw.clone()).unwrap();
            let r = rat(scale, 3);
            let scaled = IntervalUnion::new(raw.iter().map(|(a, b)| (a * &r, b * &r)).collect()).unwrap();
            let d = rat(dnum, 20);
            prop_assert_eq!(covering_number_1d(&u, &d).unwrap(), covering_number_1d(&scaled, &(&d * &r)).unwrap());
        }

        #[test]
        fn covering_monotone(
            ivs in proptest::collection::vec((0i64..200, 0i64..20), 1..10),
            d1 in 1i64..40,
            d2 in 1i64..40,
        ) {
            let raw: Vec<(Rat, Rat)> = ivs.iter().map(|&(a, w)| (rat(a, 10), rat(a + w, 10))).collect();
            let u = IntervalUnion::new(raw.clone()).unwrap();
            let (lo, hi) = (d1.min(d2), d1.max(d2));
            prop_assert!(covering_number_1d(&u, &rat(lo, 20)).unwrap() >= covering_number_1d(&u, &rat(hi, 20)).unwrap());
            let sub = IntervalUnion::new(raw[..raw.len().div_ceil(2)].to_vec()).unwrap();
            prop_assert!(covering_number_1d(&sub, &rat(lo, 20)).unwrap() <= covering_number_1d(&u, &rat(lo, 20)).unwrap());
        }

        #[test]
        fn log_linear_profiles_recover_slope(s in 0.05f64..1.95, c in 100.0f64..1000.0) {
            let entries: Vec<ScaleEntry> = (2..12).map(|k| {
                let d = 0.5f64.powi(k);
                ScaleEntry { delta: d, n: (c * d.powf(-s)).round() as u64, p: None }
            }).collect();
            if let Ok(p) = ScaleProfile::new(entries, 2) {
                let est = estimate_box_dimension(&p).unwrap();
                prop_assert!((est.slope - s).abs() < 0.05);
            }
        }
    }
}

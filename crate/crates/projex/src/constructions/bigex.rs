//! Bounded-depth tree of star products of rotated factorial blocks.
//!
//! Balls of `B_n` are never materialised: along an integer direction `(a, b)`
//! each `U_n` square projects to a single interval (its column of `F` balls
//! overlaps), so projections of `K_b ⋆ B_n` are unions of `k_b·(n!)²` exact
//! intervals. Skeleton cardinalities use [`BlockSkeleton`].
//!
//! Certificates are computed for expansions of the root, whose direction is
//! `(0, 1)`, so no rotation enters the exact arithmetic.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::blocks::{column_projection, directions_d_vectors, factorial, BlockSkeleton, DirectionCardStream};
use super::check_cap;
use crate::covering::{common_numerators, SurdIntervals, SurdRadius};
use crate::error::{invalid, Error, Result};
use crate::exact::{rat, rbig, to_f64, Rat};
use crate::geometry::{rotate_to, Direction, RatPoint};

/// Largest block index used when measuring constants and certifying (IND).
pub const MEASURE_BLOCKS: u32 = 4;
/// Sampled children tracked for pairwise certificates.
pub const TRACKED_CHILDREN: usize = 9;

#[derive(Clone, Debug)]
pub struct BigexParams {
    pub sigma: f64,
    pub d: u32,
    pub tau: Rat,
    pub t: Rat,
    pub s_tau: Rat,
    pub s: Rat,
}

impl BigexParams {
    pub fn from_sigma(sigma: f64) -> Result<BigexParams> {
        if !(sigma > 0.75 && sigma < 1.0) {
            return invalid("σ must lie in (3/4, 1)");
        }
        let raw = 3.0 / (1.0 - sigma);
        let d = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() } as u32;
        let lo = Rat::new(BigInt::from(d + 1), BigInt::from(d + 2));
        let tau = (&lo + Rat::one()) / rbig(2);
        let t = (&lo + &tau) / rbig(2);
        let s_tau = (rbig(2 + d) * &tau - rbig(d)) / rbig(2);
        let s = (rat(1, 2) + &s_tau) / rbig(2);
        Ok(BigexParams { sigma, d, tau, t, s_tau, s })
    }
}

/// `count ≤ x^{e}` for rationals `x > 0`, `e ≥ 0`, exactly.
pub fn le_rat_pow(count: &BigInt, x: &Rat, e: &Rat) -> bool {
    let num = e.numer().to_u32().expect("small exponent numerator");
    let den = e.denom().to_u32().expect("small exponent denominator");
    // count^den · x.denom^num ≤ x.numer^num
    count.pow(den) * x.denom().pow(num) <= x.numer().pow(num)
}

/// `count ≤ δ^{−τ}`.
fn within_tau(count: u128, delta: &Rat, tau: &Rat) -> bool {
    le_rat_pow(&BigInt::from(count), &delta.recip(), tau)
}

/// Projection of `K ⋆ B_n` along the integer direction `(a, b)` where `K` has
/// ball centers `kc` and diameter `delta_k`.
pub fn star_block_intervals(kc: &[RatPoint], delta_k: &Rat, n: u32, d: u32, a: i128, b: i128) -> Result<SurdIntervals> {
    let cp = column_projection(n, d, a, b)?;
    let mut vals = Vec::with_capacity(kc.len() * cp.centers.len());
    for c in kc {
        let base = c.dot_int(a, b);
        for m in &cp.centers {
            vals.push(&base + delta_k * m);
        }
    }
    let (nums, denom) = common_numerators(&vals)?;
    Ok(SurdIntervals::new(nums, denom, delta_k * &cp.h_rat, delta_k * &cp.h_surd, cp.s))
}

fn cover(si: &SurdIntervals, r: &Rat) -> u128 {
    si.covering(&SurdRadius { r_rat: Rat::zero(), r_surd: r.clone() })
}

/// Dyadic `2^{−i}` in `[lo, 1]` together with `lo` and the extra points.
fn delta_grid(lo: &Rat, extra: &[Rat]) -> Vec<Rat> {
    let mut v = Vec::new();
    let mut x = Rat::one();
    while &x >= lo {
        v.push(x.clone());
        x /= rbig(2);
    }
    v.push(lo.clone());
    for e in extra {
        if e >= lo && *e <= Rat::one() {
            v.push(e.clone());
        }
    }
    v.sort();
    v.dedup();
    v
}

fn block_floor(p: u32, d: u32) -> Result<Rat> {
    Ok(Rat::new(BigInt::one(), BigInt::from(factorial(p)?).pow(2 + d)))
}

#[derive(Clone, Debug)]
pub struct MeasuredConstants {
    /// `max N(ρ_{(0,1)}(B_n), δ)·δ^τ` over measured `n`, `δ`.
    pub c_tau: f64,
    /// Largest dyadic `δ_0` with `N(ρ_u(B_n), δ) ≤ δ^{−s}` for `(n!)^{−2} ≤ δ ≤ δ_0`.
    pub delta_s: Rat,
    /// `max N(ρ_ξ(B_{p,e}), δ)·δ^τ` over tracked pairs.
    pub c_tplus: f64,
}

#[derive(Clone, Debug)]
pub struct BigexVertex {
    pub depth: usize,
    pub direction: Direction,
    /// `k` of the child direction `(k, F)`; `None` for the root.
    pub k_index: Option<u64>,
    pub c: Rat,
    pub delta: Rat,
    pub arc_length: f64,
    /// (vii) on the dyadic grid: checks, violations and the largest `N·δ^τ`.
    pub vii_checked: u64,
    pub vii_violations: u64,
    pub vii_worst: f64,
}

#[derive(Clone, Debug)]
pub struct NSearchRow {
    pub n: u32,
    pub failed: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Expansion {
    pub n: u32,
    pub m: u32,
    pub children: u64,
    pub c_child: Rat,
    pub delta_child: Rat,
    /// Skeleton bound over all children and tracked old directions.
    pub form5_threshold: u64,
    pub form5_max_card: u64,
    pub form5_violations: u64,
    pub form7_value: u128,
    pub arcs_disjoint: bool,
    pub min_gap: f64,
    pub search: Vec<NSearchRow>,
}

#[derive(Clone, Debug, Default)]
pub struct IndReport {
    pub pairs: usize,
    pub checked: u64,
    pub violations: u64,
    pub worst: f64,
}

#[derive(Clone, Debug)]
pub struct BigexReport {
    pub params: BigexParams,
    pub constants: MeasuredConstants,
    pub k_root: u64,
    pub root: BigexVertex,
    /// Root (IND) instance: `N(ρ_{e_r}(K_r ⋆ B_n), δ) ≤ δ^{−τ}`.
    pub root_ind: IndReport,
    pub expansion: Option<Expansion>,
    pub children: Vec<BigexVertex>,
    pub child_ind: IndReport,
}

impl BigexReport {
    pub fn passed(&self) -> bool {
        let vii = self.root.vii_violations == 0 && self.children.iter().all(|v| v.vii_violations == 0);
        let exp = self.expansion.as_ref().is_none_or(|e| e.arcs_disjoint && e.form5_violations == 0 && e.c_child < rbig(2));
        vii && exp && self.root_ind.violations == 0 && self.child_ind.violations == 0
    }
}

/// Tracked children `k`: both ends, quartiles and thirds of `1..=kmax`.
pub fn tracked_children(kmax: u64) -> Vec<u64> {
    let mut v = vec![1, 2, kmax / 4, kmax / 3, kmax / 2, 2 * kmax / 3, 3 * kmax / 4, kmax - 1, kmax];
    v.retain(|&k| k >= 1 && k <= kmax);
    v.sort_unstable();
    v.dedup();
    v.truncate(TRACKED_CHILDREN);
    v
}

fn root_centers(k_root: u64) -> Vec<RatPoint> {
    (0..k_root as i64).map(|i| RatPoint::new(rat(2 * i + 1, 2 * k_root as i64) - rat(1, 2), Rat::zero())).collect()
}

fn measure_c_tau(p: &BigexParams) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 0..=MEASURE_BLOCKS {
        let si = star_block_intervals(&[RatPoint::origin()], &Rat::one(), n, p.d, 0, 1)?;
        for dl in delta_grid(&block_floor(n, p.d)?, &[]) {
            worst = worst.max(cover(&si, &dl) as f64 * to_f64(&dl).powf(to_f64(&p.tau)));
        }
    }
    Ok(worst)
}

fn measure_delta_s(p: &BigexParams, dirs: &[(i128, i128)]) -> Result<Rat> {
    let mut best = Rat::one();
    for n in 1..=MEASURE_BLOCKS {
        let lo = Rat::new(BigInt::one(), BigInt::from(factorial(n)?).pow(2));
        for &(a, b) in dirs {
            let si = star_block_intervals(&[RatPoint::origin()], &Rat::one(), n, p.d, a, b)?;
            for dl in delta_grid(&lo, &[]) {
                if dl > best {
                    continue;
                }
                if !le_rat_pow(&BigInt::from(cover(&si, &dl)), &dl.recip(), &p.s) {
                    // keep only dyadic levels strictly below the violation
                    let mut x = Rat::one();
                    while x >= dl {
                        x /= rbig(2);
                    }
                    best = x;
                }
            }
        }
    }
    Ok(best)
}

/// `u = R_e^{−1} ξ` as a primitive integer vector.
fn relative(e: (i128, i128), xi: (i128, i128)) -> Result<(i128, i128)> {
    let de = Direction::from_int(e.0, e.1)?;
    rotate_to(&de).apply_inverse_int(xi.0, xi.1)
}

fn measure_c_tplus(p: &BigexParams, tracked: &[(i128, i128)]) -> Result<f64> {
    let mut jobs = Vec::new();
    for &e in tracked {
        for &xi in tracked {
            for q in 0..=MEASURE_BLOCKS {
                jobs.push((e, xi, q));
            }
        }
    }
    let vals: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(e, xi, q)| {
            let u = relative(e, xi)?;
            let si = star_block_intervals(&[RatPoint::origin()], &Rat::one(), q, p.d, u.0, u.1)?;
            let tau = to_f64(&p.tau);
            Ok(delta_grid(&block_floor(q, p.d)?, &[]).iter().map(|dl| cover(&si, dl) as f64 * to_f64(dl).powf(tau)).fold(0.0, f64::max))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for v in vals {
        worst = worst.max(v?);
    }
    Ok(worst)
}

/// Parent data for the `n` search.
struct Parent<'a> {
    centers: &'a [RatPoint],
    c: Rat,
    delta: Rat,
    arc_length: f64,
    /// `card ρ_{e_v}(S_{K_b})`
    own_card: u128,
    /// Tracked old directions relative to `e_v`.
    old_dirs: Vec<(i128, i128)>,
    /// `e_v` is `(0, 1)`.
    upright: bool,
}

fn int_floor_pow(base: u64, e: &Rat) -> Result<u64> {
    let num = e.numer().to_u32().ok_or_else(|| Error::Overflow("exponent".into()))?;
    let den = e.denom().to_u32().ok_or_else(|| Error::Overflow("exponent".into()))?;
    let v = BigInt::from(base).pow(num).nth_root(den);
    v.to_u64().ok_or_else(|| Error::Overflow("threshold exceeds 64 bits".into()))
}

/// Cheap conditions for block index `n`; the skeleton bound is checked later.
fn cheap_conditions(p: &BigexParams, par: &Parent<'_>, n: u32, delta_s: &Rat) -> Result<(Vec<String>, u128)> {
    let mut failed = Vec::new();
    let nf = factorial(n)?;
    if n < 3 {
        failed.push("D_n needs n >= 3".to_string());
    } else {
        let (kmax, f) = directions_d_vectors(n, p.d)?;
        if (kmax as f64 / f as f64).atan() >= par.arc_length / 2.0 {
            failed.push("rotated D_n not inside the parent arc".to_string());
        }
    }
    // form7 through the skeleton of the parent
    let si = star_block_intervals(&[RatPoint::origin()], &Rat::one(), n, p.d, 0, 1)?;
    let nn = cover(&si, &Rat::new(BigInt::one(), BigInt::from(nf).pow(2)));
    let val = par.own_card.saturating_mul(nn);
    let two_val = BigInt::from(val) * 2;
    if !le_rat_pow(&two_val, &rbig(nf), &(&p.s_tau * rbig(2))) {
        failed.push(format!("form7: {val} > (n!)^(2s(τ))/2"));
    }
    let cw = &par.c + rbig(2) / (&par.delta * rbig(nf));
    if cw >= rbig(2) {
        failed.push(format!("c_w = {cw} is not below 2"));
    }
    if Rat::new(BigInt::one(), BigInt::from(nf).pow(2)) > *delta_s {
        failed.push("(n!)^-2 exceeds δ_s".to_string());
    }
    Ok((failed, nn))
}

struct Form5 {
    threshold: u64,
    max_card: u64,
    violations: u64,
    min_gap: f64,
    arcs_disjoint: bool,
}

/// Streams all children: skeleton cardinalities and arc gaps.
fn stream_children(p: &BigexParams, par: &Parent<'_>, n: u32, delta_child: f64, k_parent: u128) -> Result<Form5> {
    let (kmax, f) = directions_d_vectors(n, p.d)?;
    check_cap(kmax, "child directions")?;
    let sk = BlockSkeleton::new(n, p.d)?;
    let threshold = int_floor_pow(factorial(n)?, &(&p.t * rbig(2 + p.d)))?;
    let mut max_card = 0u64;
    let mut violations = 0u64;
    for &(a, b) in &par.old_dirs {
        let c = k_parent * sk.projection_card(a, b);
        max_card = max_card.max(c as u64);
        if c > threshold as u128 {
            violations += 1;
        }
    }
    let ff = f as f64;
    let mut min_gap = f64::INFINITY;
    for (k, card) in DirectionCardStream::new(&sk)?.take(kmax as usize) {
        let c = k_parent as u64 * card;
        max_card = max_card.max(c);
        if c > threshold {
            violations += 1;
        }
        if (k as u64) < kmax {
            let kf = k as f64;
            let gap = (1.0 / (ff + kf * (kf + 1.0) / ff)).atan();
            min_gap = min_gap.min(gap);
        }
    }
    let edge = (kmax as f64 / ff).atan() + delta_child / 2.0;
    let arcs_disjoint = (kmax == 1 || min_gap > delta_child) && edge < par.arc_length / 2.0;
    Ok(Form5 { threshold, max_card, violations, min_gap, arcs_disjoint })
}

fn vertex_certificate(p: &BigexParams, depth: usize, dir: Direction, k_index: Option<u64>, c: Rat, delta: Rat, si: &SurdIntervals) -> BigexVertex {
    let tau = to_f64(&p.tau);
    let (mut checked, mut violations, mut worst) = (0, 0, 0.0f64);
    for dl in delta_grid(&delta, &[]) {
        // e ∈ I_v moves projections by at most δ_v/4
        let r = &c * &dl - &delta / rbig(4);
        let n = cover(si, &r);
        checked += 1;
        if !within_tau(n, &dl, &p.tau) {
            violations += 1;
        }
        worst = worst.max(n as f64 * to_f64(&dl).powf(tau));
    }
    BigexVertex { depth, direction: dir, k_index, arc_length: to_f64(&delta), c, delta, vii_checked: checked, vii_violations: violations, vii_worst: worst }
}

pub fn construct_bigex(sigma: f64, depth: usize) -> Result<BigexReport> {
    let p = BigexParams::from_sigma(sigma)?;
    let d = p.d;
    // Tracked directions for the measured constants: root and sampled D_3.
    let (kmax3, f3) = directions_d_vectors(3, d)?;
    let tracked_k = tracked_children(kmax3);
    let mut tracked: Vec<(i128, i128)> = vec![(0, 1)];
    tracked.extend(tracked_k.iter().map(|&k| (k as i128, f3 as i128)));

    let c_tau = measure_c_tau(&p)?;
    let delta_s = measure_delta_s(&p, &tracked)?;
    let c_tplus = measure_c_tplus(&p, &tracked)?;
    let constants = MeasuredConstants { c_tau, delta_s: delta_s.clone(), c_tplus };

    let tau_f = to_f64(&p.tau);
    let mut k_root = 1u64;
    while c_tau * (k_root as f64).powf(-tau_f) > 1.0 {
        k_root += 1;
    }
    let kc = root_centers(k_root);
    let delta_r = Rat::new(BigInt::one(), BigInt::from(k_root));
    let root_si = star_block_intervals(&kc, &delta_r, 0, d, 0, 1)?;
    // K_r ⋆ B_0 = K_r; its own skeleton projects to {0}
    let root = vertex_certificate(&p, 0, Direction::VERTICAL, None, Rat::one(), delta_r.clone(), &root_si);

    let mut root_ind = IndReport { pairs: 1, ..Default::default() };
    for n in 0..=MEASURE_BLOCKS {
        let si = star_block_intervals(&kc, &delta_r, n, d, 0, 1)?;
        for dl in delta_grid(&(&delta_r * block_floor(n, d)?), &[]) {
            let cnt = cover(&si, &dl);
            root_ind.checked += 1;
            if !within_tau(cnt, &dl, &p.tau) {
                root_ind.violations += 1;
            }
            root_ind.worst = root_ind.worst.max(cnt as f64 * to_f64(&dl).powf(tau_f));
        }
    }

    let mut report = BigexReport { params: p.clone(), constants, k_root, root, root_ind, expansion: None, children: Vec::new(), child_ind: IndReport::default() };
    if depth == 0 {
        return Ok(report);
    }

    let parent = Parent { centers: &kc, c: Rat::one(), delta: delta_r.clone(), arc_length: to_f64(&delta_r), own_card: 1, old_dirs: vec![(0, 1)], upright: true };
    let expansion = expand(&p, &parent, &delta_s, c_tplus, k_root as u128)?;
    let n = expansion.n;
    if expansion.m != 1 {
        return invalid("certificates cover star powers with m = 1 only");
    }
    let (_, f) = directions_d_vectors(n, d)?;
    let kids = tracked_children(directions_d_vectors(n, d)?.0);
    let sk = BlockSkeleton::new(n, d)?;

    // (vii) for tracked children and (IND) over tracked pairs.
    let mut child_dirs: Vec<(i128, i128)> = vec![(0, 1)];
    child_dirs.extend(kids.iter().map(|&k| (k as i128, f as i128)));
    let delta_w = expansion.delta_child.clone();
    let c_w = expansion.c_child.clone();
    let mut children = Vec::new();
    for &k in &kids {
        let (a, b) = (k as i128, f as i128);
        let si = star_block_intervals(parent.centers, &parent.delta, n, d, a, b)?;
        children.push(vertex_certificate(&p, 1, Direction::from_int(a, b)?, Some(k), c_w.clone(), delta_w.clone(), &si));
    }
    if !parent.upright {
        return invalid("certificates need an upright parent");
    }
    let mut jobs = Vec::new();
    for &xi in &child_dirs {
        for &e in &child_dirs {
            for q in 0..=MEASURE_BLOCKS {
                jobs.push((xi, e, q));
            }
        }
    }
    let own: Vec<(i128, i128, SurdIntervals, u128)> = child_dirs
        .iter()
        .map(|&(a, b)| {
            let si = star_block_intervals(parent.centers, &parent.delta, n, d, a, b)?;
            Ok((a, b, si, k_root as u128 * sk.projection_card(a, b)))
        })
        .collect::<Result<_>>()?;
    let results: Vec<Result<(u64, u64, f64)>> = jobs
        .par_iter()
        .map(|&(xi, e, q)| {
            let (_, _, own_si, own_card) = own.iter().find(|o| (o.0, o.1) == xi).unwrap();
            let u = relative(e, xi)?;
            let blk = star_block_intervals(&[RatPoint::origin()], &Rat::one(), q, d, u.0, u.1)?;
            let lo = &delta_w * block_floor(q, d)?;
            let (mut checked, mut viol, mut worst) = (0u64, 0u64, 0.0f64);
            for dl in delta_grid(&lo, std::slice::from_ref(&delta_w)) {
                let r = &c_w * &dl;
                let direct = cover(own_si, &r);
                let product = own_card.saturating_mul(cover(&blk, &(&r / &delta_w)));
                let best = direct.min(product);
                checked += 1;
                if !within_tau(best, &dl, &p.tau) {
                    viol += 1;
                }
                worst = worst.max(best as f64 * to_f64(&dl).powf(tau_f));
            }
            Ok((checked, viol, worst))
        })
        .collect();
    let mut ind = IndReport { pairs: child_dirs.len() * child_dirs.len(), ..Default::default() };
    for r in results {
        let (c, v, w) = r?;
        ind.checked += c;
        ind.violations += v;
        ind.worst = ind.worst.max(w);
    }
    report.expansion = Some(expansion);
    report.children = children;
    report.child_ind = ind;

    if depth >= 2 {
        // Expanding a child: the parent skeleton is now large.
        let w = &report.children[0];
        let (a, b) = (w.k_index.unwrap() as i128, f as i128);
        let own_card = k_root as u128 * sk.projection_card(a, b);
        let child = Parent { centers: &kc, c: w.c.clone(), delta: w.delta.clone(), arc_length: w.arc_length, own_card, old_dirs: child_dirs.clone(), upright: false };
        expand(&p, &child, &delta_s, c_tplus, own_card)?;
        return invalid("expansions below depth 1 are not certified");
    }
    Ok(report)
}

fn expand(p: &BigexParams, par: &Parent<'_>, delta_s: &Rat, c_tplus: f64, k_parent: u128) -> Result<Expansion> {
    let mut search = Vec::new();
    let mut n = 1u32;
    loop {
        let children = if n >= 3 { Some(directions_d_vectors(n, p.d)?.0) } else { None };
        let fits = factorial(n).ok().and_then(|f| f.checked_mul(f)).is_some_and(|c| crate::constructions::size_cap() >= c) && children.is_none_or(|c| c <= crate::constructions::size_cap());
        if !fits {
            let detail: Vec<String> = search.iter().map(|r: &NSearchRow| format!("n={}: {}", r.n, r.failed.join("; "))).collect();
            return Err(Error::Condition(format!("no n within the size cap satisfies all conditions ({})", detail.join(" | "))));
        }
        let (mut failed, form7) = cheap_conditions(p, par, n, delta_s)?;
        if failed.is_empty() {
            let nf = factorial(n)?;
            // smallest m with C·(n!)^{m(2+d)(t−τ)} ≤ 1
            let gap = to_f64(&((&p.t - &p.tau) * rbig(2 + p.d)));
            let mut m = 1u32;
            while c_tplus * (nf as f64).powf(m as f64 * gap) > 1.0 {
                m += 1;
            }
            let delta_child = (&par.delta / Rat::from_integer(BigInt::from(nf).pow(2 + p.d))).pow(m as i32);
            let f5 = stream_children(p, par, n, to_f64(&delta_child), k_parent)?;
            if f5.violations > 0 {
                failed.push(format!("form5: {} skeleton projections exceed {}", f5.violations, f5.threshold));
            }
            if !f5.arcs_disjoint {
                failed.push("child arcs overlap or leave the parent arc".to_string());
            }
            if failed.is_empty() {
                search.push(NSearchRow { n, failed: Vec::new() });
                return Ok(Expansion {
                    n,
                    m,
                    children: children.unwrap(),
                    c_child: &par.c + rbig(2) / (&par.delta * rbig(nf)),
                    delta_child,
                    form5_threshold: f5.threshold,
                    form5_max_card: f5.max_card,
                    form5_violations: 0,
                    form7_value: form7,
                    arcs_disjoint: true,
                    min_gap: f5.min_gap,
                    search,
                });
            }
        }
        search.push(NSearchRow { n, failed });
        n += 1;
    }
}

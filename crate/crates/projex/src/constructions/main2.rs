//! Nested squares paired with arcs of rational directions along which the
//! projections stay small at every scale.
//!
//! Exponents are `γ_j = 2/k_j` with integer `k_j`, so `ℓ_j = m_j^{−k_j}` is
//! rational and `ℓ_j^{−γ_j/2} = m_j`.

use ethnum::I256;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::check_cap;
use super::set_e::level_count;
use crate::covering::{common_numerators, lattice_packing_count, SurdIntervals, SurdRadius};
use crate::error::{invalid, Error, Result};
use crate::exact::{from_f64, rat, rbig, simplest_between, to_f64, Rat};
use crate::geometry::{rational_direction, Arc, Direction, RatPoint, Tag};

#[derive(Clone, Debug)]
pub struct Main2Params {
    pub gamma: f64,
    /// `k_j` with `γ_j = 2/k_j`, level `j = 1, 2, …`.
    pub k: Vec<u32>,
    pub t: Vec<f64>,
}

impl Main2Params {
    /// `k_j = 41 − j`, `t_j = j/100`.
    pub fn default_schedule(gamma: f64, depth: usize) -> Main2Params {
        Main2Params { gamma, k: (1..=depth as u32).map(|j| 41 - j).collect(), t: (1..=depth).map(|j| j as f64 / 100.0).collect() }
    }

    /// Schedule from explicit `γ_j`; each `2/γ_j` must be an integer.
    pub fn from_gammas(gamma: f64, gammas: &[f64], t: &[f64]) -> Result<Main2Params> {
        let mut k = Vec::with_capacity(gammas.len());
        for &g in gammas {
            let kk = 2.0 / g;
            if !(kk.is_finite() && (kk - kk.round()).abs() < 1e-9 && kk.round() >= 1.0) {
                return invalid(format!("2/γ_j must be an integer, got γ_j = {g}"));
            }
            k.push(kk.round() as u32);
        }
        Ok(Main2Params { gamma, k, t: t.to_vec() })
    }

    pub fn gamma_j(&self, j: usize) -> f64 {
        2.0 / self.k[j - 1] as f64
    }

    fn validate(&self, depth: usize) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            return invalid("γ must lie in (0, 2)");
        }
        if self.k.len() < depth || self.t.len() < depth {
            return invalid("schedule shorter than depth");
        }
        let gs: Vec<f64> = (1..=depth).map(|j| self.gamma_j(j)).collect();
        if gs.windows(2).any(|w| w[1] <= w[0]) || gs.iter().any(|&g| g >= self.gamma) {
            return invalid("γ_j must increase strictly and stay below γ");
        }
        if self.t[..depth].windows(2).any(|w| w[1] <= w[0]) || self.t[..depth].iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return invalid("t_j must increase in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Main2Level {
    pub level: usize,
    pub n: u64,
    pub k: u32,
    /// `ℓ_j^{−γ_j/2}`
    pub m: u64,
    /// Square side `ℓ_j`.
    pub ell: Rat,
    /// Number of squares `q_j`.
    pub q: u64,
    /// Arc length `r_j`.
    pub r: f64,
    /// `max (1 + |p|)(1 + q)` over the level's tags.
    pub big_m: u128,
    pub centers: Vec<RatPoint>,
    /// Tags of the arc midpoints; arcs of parent `i` occupy `i·n .. (i+1)·n`.
    pub tags: Vec<Tag>,
}

impl Main2Level {
    pub fn arcs(&self) -> Vec<Arc> {
        self.tags.iter().map(|t| Arc { mid: tag_direction(*t), length: self.r }).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Main2State {
    pub params: Main2Params,
    pub levels: Vec<Main2Level>,
}

fn tag_direction(t: Tag) -> Direction {
    rational_direction(t.p, t.q).expect("tag has q > 0")
}

fn tag_angle(t: Tag) -> f64 {
    (t.p as f64).atan2(t.q as f64)
}

/// Simplest rational slope with angle in `[θ − w, θ + w]`, `|θ| + w < π/2`.
pub fn simplest_tag(theta: f64, w: f64) -> Result<Tag> {
    let lo = from_f64((theta - w).tan());
    let hi = from_f64((theta + w).tan());
    let s = simplest_between(&lo, &hi);
    match (s.numer().to_i128(), s.denom().to_i128()) {
        (Some(p), Some(q)) => Ok(Tag { p, q }),
        _ => Err(Error::Overflow("tag exceeds 128 bits".into())),
    }
}

fn ell_conditions(gamma: f64, k: u32, m: u64, ell_prev: &Rat, q_prev: u64, big_m: u128) -> bool {
    let mb = BigInt::from(m);
    if !(ell_prev * Rat::from_integer(mb.pow(k - 1)) > Rat::one()) {
        return false;
    }
    let bound = (q_prev as u128).saturating_mul(4u128.max(10 * big_m));
    if gamma == 1.0 {
        BigInt::from(bound).pow(2) <= mb.pow(k - 2)
    } else {
        (bound as f64).ln() <= (k as f64 * gamma - 2.0) / 2.0 * (m as f64).ln()
    }
}

pub fn construct_main2(params: &Main2Params, depth: usize) -> Result<Main2State> {
    params.validate(depth)?;
    let gamma = params.gamma;
    let mut levels = vec![Main2Level { level: 0, n: 1, k: 0, m: 1, ell: Rat::one(), q: 1, r: 1.0, big_m: 2, centers: vec![RatPoint::new(rat(1, 2), rat(1, 2))], tags: vec![Tag { p: 0, q: 1 }] }];
    for j in 1..=depth {
        let prev = &levels[j - 1];
        let k = params.k[j - 1];
        if k as f64 * gamma <= 2.0 {
            return invalid(format!("level {j}: k_j·γ must exceed 2"));
        }
        let n = level_count(params.t[j - 1], prev.r);
        check_cap((prev.tags.len() as u64).saturating_mul(n), "main2 arc family")?;
        let h = prev.r / (n as f64 + 1.0);
        let lo = -((n / 2) as i64);
        let mut tags = Vec::with_capacity(prev.tags.len() * n as usize);
        for &pt in &prev.tags {
            let th = tag_angle(pt);
            for i in lo..lo + n as i64 {
                tags.push(if i == 0 { pt } else { simplest_tag(th + i as f64 * h, h / 4.0)? });
            }
        }
        let big_m = tags.iter().map(|t| (1 + t.p.unsigned_abs()) * (1 + t.q as u128)).max().unwrap();
        let mut m = 2u64;
        while !ell_conditions(gamma, k, m, &prev.ell, prev.q, big_m) {
            m += 1;
            if m > 1 << 20 {
                return Err(Error::Condition(format!("level {j}: no feasible m below 2^20")));
            }
        }
        let q = prev.q.checked_mul(m * m).ok_or_else(|| Error::Cap(format!("square count overflows at level {j}; achievable depth {}", j - 1)))?;
        check_cap(q, &format!("main2 squares (achievable depth {})", j - 1))?;
        let ell = Rat::new(BigInt::one(), BigInt::from(m).pow(k));
        let half = Rat::new(BigInt::from(m as i64 - 1), BigInt::from(2));
        let mut centers = Vec::with_capacity(q as usize);
        for c in &prev.centers {
            for a in 0..m {
                for b in 0..m {
                    let dx = &ell * (rbig(a as i64) - &half);
                    let dy = &ell * (rbig(b as i64) - &half);
                    centers.push(RatPoint::new(&c.x + dx, &c.y + dy));
                }
            }
        }
        let r = if gamma == 1.0 { 1.0 / (8.0 * (q as f64).powi(2)) } else { 0.5 * (4.0 * (q as f64).powi(2)).powf(-1.0 / gamma) };
        levels.push(Main2Level { level: j, n, k, m, ell, q, r, big_m, centers, tags });
    }
    Ok(Main2State { params: params.clone(), levels })
}

/// Exact projection data of a level's squares (side `side`) along tags.
pub struct SquareProjector {
    xs: Vec<I256>,
    ys: Vec<I256>,
    /// Bit length bound of all coordinate numerators.
    bits: u32,
    denom: BigInt,
    side: Rat,
}

fn bit_len(v: I256) -> u32 {
    256 - v.unsigned_abs().leading_zeros()
}

impl SquareProjector {
    pub fn new(centers: &[RatPoint], side: Rat) -> Result<Self> {
        let vals: Vec<Rat> = centers.iter().flat_map(|c| [c.x.clone(), c.y.clone()]).collect();
        let (nums, denom) = common_numerators(&vals)?;
        let xs = nums.iter().step_by(2).copied().collect();
        let ys = nums.iter().skip(1).step_by(2).copied().collect();
        let bits = nums.iter().map(|&v| bit_len(v)).max().unwrap_or(0);
        Ok(SquareProjector { xs, ys, bits, denom, side })
    }

    fn numerators(&self, t: Tag) -> Result<Vec<I256>> {
        let (a, b) = (I256::from(t.q), I256::from(t.p));
        if self.bits + bit_len(a).max(bit_len(b)) + 1 < 250 {
            return Ok(self.xs.iter().zip(&self.ys).map(|(&x, &y)| a.wrapping_mul(x).wrapping_add(b.wrapping_mul(y))).collect());
        }
        let lim = I256::ONE << 250;
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| {
                let v = a * x + b * y;
                if v.abs() >= lim {
                    Err(Error::Overflow("square projection exceeds 250 bits".into()))
                } else {
                    Ok(v)
                }
            })
            .collect()
    }

    /// Projections of squares of side `side` along the tag, scaled by `|(q, p)|`.
    pub fn intervals(&self, t: Tag, side: &Rat) -> Result<SurdIntervals> {
        let s = BigInt::from(t.p) * t.p + BigInt::from(t.q) * t.q;
        Ok(SurdIntervals::new(self.numerators(t)?, self.denom.clone(), half_width(t, side), Rat::zero(), s))
    }

    /// `card ρ_e` of the square centers.
    pub fn card(&self, t: Tag) -> Result<usize> {
        let mut v = self.numerators(t)?;
        v.sort_unstable();
        v.dedup();
        Ok(v.len())
    }

    /// `N(ρ_e(K), l)` with the level's squares.
    pub fn cover(&self, t: Tag, l: &Rat) -> Result<u128> {
        let side = self.side.clone();
        Ok(self.intervals(t, &side)?.covering(&SurdRadius { r_rat: Rat::zero(), r_surd: l.clone() }))
    }
}

/// Scaled half-width `side·(|p| + |q|)/2` of a projected square.
fn half_width(t: Tag, side: &Rat) -> Rat {
    side * rbig(t.p.abs() + t.q.abs()) / rbig(2)
}

/// `l^{−γ/2}` test for `l = 2^{−i}`, exact when `γ = 1`.
fn small_enough(count: u128, i: u32, gamma: f64) -> bool {
    if gamma == 1.0 {
        BigInt::from(count).pow(2) <= BigInt::one() << i
    } else {
        (count as f64).ln() <= gamma / 2.0 * i as f64 * 2f64.ln()
    }
}

/// Outcome of the invariant suite at one level.
#[derive(Clone, Debug, Default)]
pub struct Main2Report {
    pub level: usize,
    /// (i): children inside parents and parent centers inside children.
    pub nesting: bool,
    /// (ii): parent tags kept among the children.
    pub tags_nested: bool,
    /// Midpoint separation and child arcs disjoint inside the parent.
    pub arcs_ok: bool,
    /// (iii): sampled `(e, l)` pairs and violations.
    pub iii_checked: u64,
    pub iii_violations: u64,
    /// Shrunken-square variant for `l ≤ ℓ_j`.
    pub tech_checked: u64,
    pub tech_violations: u64,
    /// Skeleton bound for every midpoint tag.
    pub form3_max_card: usize,
    pub form3_ok: bool,
    /// (iv): lattice packing inside one parent versus `ℓ_j^{−γ_j}`.
    pub packing: u64,
    pub packing_ok: bool,
}

impl Main2Report {
    pub fn passed(&self) -> bool {
        self.nesting && self.tags_nested && self.arcs_ok && self.iii_violations == 0 && self.tech_violations == 0 && self.form3_ok && self.packing_ok
    }
}

/// Up to `count` distinct exponents `i` with `2^{−i}` between `lo` and `hi`.
fn dyadic_exponents(lo: u32, hi: u32, count: usize) -> Vec<u32> {
    let mut v: Vec<u32> = (0..count).map(|s| if count == 1 { lo } else { lo + ((hi - lo) as u64 * s as u64 / (count as u64 - 1)) as u32 }).collect();
    v.dedup();
    v
}

/// Largest `i` with `2^{−i} ≥ x` for `0 < x ≤ 1`.
fn log2_floor_inv(x: &Rat) -> u32 {
    let mut i = 0;
    let mut p = Rat::one();
    while &(&p / rbig(2)) >= x {
        p /= rbig(2);
        i += 1;
    }
    i
}

pub fn verify_main2(st: &Main2State, e_per_arc: usize, l_per_level: usize) -> Result<Vec<Main2Report>> {
    let gamma = st.params.gamma;
    let mut out = Vec::with_capacity(st.levels.len());
    for (j, lv) in st.levels.iter().enumerate() {
        let mut rep = Main2Report { level: j, nesting: true, tags_nested: true, arcs_ok: true, form3_ok: true, packing_ok: true, ..Default::default() };
        let proj = SquareProjector::new(&lv.centers, lv.ell.clone())?;
        if j > 0 {
            let prev = &st.levels[j - 1];
            let per = (lv.m * lv.m) as usize;
            let half_prev = &prev.ell / rbig(2);
            let half = &lv.ell / rbig(2);
            for (pi, pc) in prev.centers.iter().enumerate() {
                let kids = &lv.centers[pi * per..(pi + 1) * per];
                let inside = kids.iter().all(|c| (&c.x - &pc.x).abs() + &half <= half_prev && (&c.y - &pc.y).abs() + &half <= half_prev);
                let covered = kids.iter().any(|c| (&c.x - &pc.x).abs() <= half && (&c.y - &pc.y).abs() <= half);
                rep.nesting &= inside && covered;
            }
            let n = lv.n as usize;
            let sep = prev.r / (10.0 * lv.n as f64);
            for (pi, pt) in prev.tags.iter().enumerate() {
                let kids = &lv.tags[pi * n..(pi + 1) * n];
                rep.tags_nested &= kids.contains(pt);
                let pa = tag_angle(*pt);
                let mut angles: Vec<f64> = kids.iter().map(|t| tag_angle(*t)).collect();
                angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
                rep.arcs_ok &= angles.iter().all(|a| (a - pa).abs() + lv.r / 2.0 < prev.r / 2.0);
                rep.arcs_ok &= angles.windows(2).all(|w| w[1] - w[0] > sep.max(lv.r));
            }
            // form3: card ≤ q_{j−1}(1+|p|)(1+q)·m ≤ ℓ_j^{−γ/2}/10
            let cards: Vec<Result<usize>> = lv.tags.par_iter().map(|t| proj.card(*t)).collect();
            for (t, c) in lv.tags.iter().zip(cards) {
                let c = c?;
                rep.form3_max_card = rep.form3_max_card.max(c);
                let b1 = prev.q as u128 * (1 + t.p.unsigned_abs()) * (1 + t.q as u128) * lv.m as u128;
                let second =
                    if gamma == 1.0 { (BigInt::from(b1) * BigInt::from(10)).pow(2u32) <= BigInt::from(lv.m).pow(lv.k) } else { 10.0 * b1 as f64 <= (lv.m as f64).powf(gamma * lv.k as f64 / 2.0) };
                rep.form3_ok &= (c as u128) <= b1 && second;
            }
            rep.packing = lattice_packing_count(lv.m, lv.m, &lv.ell, &(&lv.ell / rbig(2)));
            rep.packing_ok = rep.packing >= lv.m * lv.m;
        }
        // (iii) on sampled directions and dyadic scales in [ℓ_j, 1]
        let top = log2_floor_inv(&lv.ell);
        let dyadic = |i: u32| (i, Rat::new(BigInt::one(), BigInt::one() << i));
        let ls: Vec<(u32, Rat)> = dyadic_exponents(0, top, l_per_level).into_iter().map(dyadic).collect();
        let tech: Vec<(u32, Rat)> = dyadic_exponents(top + 1, top + 8, 8).into_iter().map(dyadic).collect();
        let arcs = lv.arcs();
        let results: Vec<Result<(u64, u64, u64, u64)>> = arcs
            .par_iter()
            .map(|arc| {
                let (mut c1, mut v1, mut c2, mut v2) = (0, 0, 0, 0);
                let th = arc.mid.angle();
                for s in 0..e_per_arc {
                    let off = arc.length * ((s as f64 + 0.5) / e_per_arc as f64 - 0.5);
                    let t = simplest_tag(th + off, arc.length / 256.0)?;
                    if !arc.contains(&tag_direction(t)) {
                        return Err(Error::Condition("sampled tag left its arc".into()));
                    }
                    let si = proj.intervals(t, &lv.ell)?;
                    for (i, l) in &ls {
                        let cnt = si.covering(&SurdRadius { r_rat: Rat::zero(), r_surd: l.clone() });
                        c1 += 1;
                        if !small_enough(cnt, *i, gamma) {
                            v1 += 1;
                        }
                    }
                    for (i, l) in &tech {
                        let shrunk = si.with_half_width(half_width(t, l), Rat::zero());
                        let cnt = shrunk.covering(&SurdRadius { r_rat: Rat::zero(), r_surd: l.clone() });
                        c2 += 1;
                        if !small_enough(cnt, *i, gamma) {
                            v2 += 1;
                        }
                    }
                }
                Ok((c1, v1, c2, v2))
            })
            .collect();
        for r in results {
            let (c1, v1, c2, v2) = r?;
            rep.iii_checked += c1;
            rep.iii_violations += v1;
            rep.tech_checked += c2;
            rep.tech_violations += v2;
        }
        out.push(rep);
    }
    Ok(out)
}

/// `(δ, N(ρ_e(K_j), δ))` on dyadic `δ = 2^{−i}` down to `ℓ_j`.
pub fn main2_profile(st: &Main2State, level: usize, t: Tag, step: u32) -> Result<Vec<(f64, u128)>> {
    let lv = &st.levels[level];
    let proj = SquareProjector::new(&lv.centers, lv.ell.clone())?;
    let si = proj.intervals(t, &lv.ell)?;
    let top = log2_floor_inv(&lv.ell);
    let mut out = Vec::new();
    let mut i = 0;
    while i <= top {
        let l = Rat::new(BigInt::one(), BigInt::one() << i);
        out.push((to_f64(&l), si.covering(&SurdRadius { r_rat: Rat::zero(), r_surd: l })));
        i += step.max(1);
    }
    Ok(out)
}

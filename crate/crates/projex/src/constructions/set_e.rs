//! Nested arc families on S¹ with prescribed packing growth.
//!
//! Arc midpoints are stored as exact rational angles (radians) measured from
//! `(1, 0)`; arc lengths are dyadic.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::check_cap;
use crate::covering::packing_number_1d;
use crate::error::{invalid, Result};
use crate::exact::{rbig, to_f64, Rat};
use crate::geometry::{Arc, Direction, IntervalUnion};

#[derive(Clone, Debug)]
pub struct SetELevel {
    pub level: usize,
    pub t: f64,
    pub n: u64,
    /// Arc length `r_j`.
    pub r: Rat,
    /// Midpoint spacing inside a parent arc.
    pub spacing: Rat,
    /// Packing count of one parent's midpoints at scale `r_{j−1}/(10 n_j)`.
    pub packing: u64,
    /// `(r_{j−1}/(10 n_j))^{−t_j}`.
    pub packing_target: f64,
    /// Midpoint angles of all level-`j` arcs.
    pub midpoints: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub struct SetEState {
    pub levels: Vec<SetELevel>,
}

impl SetEState {
    pub fn arcs(&self, level: usize) -> Vec<Arc> {
        let l = &self.levels[level];
        let len = to_f64(&l.r);
        l.midpoints.iter().map(|a| Arc { mid: Direction::from_angle(to_f64(a)), length: len }).collect()
    }
}

/// Smallest `n` with `n^{1−t}·r^t ≥ 10` (relative slack `1e−12`).
pub fn level_count(t: f64, r: f64) -> u64 {
    let holds = |n: u64| (1.0 - t) * (n as f64).ln() + t * r.ln() >= 10f64.ln() - 1e-12;
    let mut n = ((10.0 * r.powf(-t)).powf(1.0 / (1.0 - t)).floor() as u64).max(1);
    while n > 1 && holds(n - 1) {
        n -= 1;
    }
    while !holds(n) {
        n += 1;
    }
    n
}

/// Offsets `i·h`, `h = r/(n+1)`, `i ∈ [−⌊n/2⌋, n − ⌊n/2⌋)`.
fn offsets(n: u64, r: &Rat) -> (Vec<Rat>, Rat) {
    let h = r / rbig(n as i64 + 1);
    let lo = -((n / 2) as i64);
    ((lo..lo + n as i64).map(|i| &h * rbig(i)).collect(), h)
}

/// Largest dyadic `2^{−k}` below the spacing that keeps every child arc
/// inside its parent.
fn child_length(offs: &[Rat], h: &Rat, r_parent: &Rat) -> Rat {
    let max_off = offs.iter().map(|o| if o < &Rat::zero() { -o.clone() } else { o.clone() }).max().unwrap();
    let mut r = Rat::one();
    while !(&r < h && &max_off + &r / rbig(2) <= r_parent / rbig(2)) {
        r /= rbig(2);
    }
    r
}

pub fn construct_set_e(t: &[f64], depth: usize) -> Result<SetEState> {
    if depth > t.len() {
        return invalid("need one exponent t_j per level");
    }
    if t.iter().any(|&v| !(v > 0.0 && v < 1.0)) || t.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("t_j must be increasing in (0, 1)");
    }
    let mut levels = vec![SetELevel { level: 0, t: 0.0, n: 1, r: Rat::one(), spacing: Rat::one(), packing: 1, packing_target: 1.0, midpoints: vec![Rat::zero()] }];
    for j in 1..=depth {
        let prev = &levels[j - 1];
        let tj = t[j - 1];
        let n = level_count(tj, to_f64(&prev.r));
        check_cap((prev.midpoints.len() as u64).saturating_mul(n), "arc family")?;
        let (offs, h) = offsets(n, &prev.r);
        let r = child_length(&offs, &h, &prev.r);
        let scale = &prev.r / rbig(10 * n as i64);
        let pts = IntervalUnion::new(offs.iter().map(|o| (o.clone(), o.clone())).collect())?;
        let packing = packing_number_1d(&pts, &scale)?;
        let packing_target = to_f64(&scale).powf(-tj);
        let mut midpoints = Vec::with_capacity(prev.midpoints.len() * n as usize);
        for m in &prev.midpoints {
            for o in &offs {
                midpoints.push(m + o);
            }
        }
        levels.push(SetELevel { level: j, t: tj, n, r, spacing: h, packing, packing_target, midpoints });
    }
    Ok(SetEState { levels })
}

/// Failure description of the first violated property, if any.
pub fn check_set_e(st: &SetEState) -> std::result::Result<(), String> {
    let l0 = &st.levels[0];
    if l0.r != Rat::one() || l0.n != 1 || l0.midpoints != vec![Rat::zero()] {
        return Err("(P0) base level".into());
    }
    for w in st.levels.windows(2) {
        let (p, c) = (&w[0], &w[1]);
        let lhs = (1.0 - c.t) * (c.n as f64).ln() + c.t * to_f64(&p.r).ln();
        if lhs < 10f64.ln() - 1e-12 {
            return Err(format!("(P1) at level {}", c.level));
        }
        let sep = &p.r / rbig(10 * c.n as i64);
        let half = &p.r / rbig(2);
        for (pi, pm) in p.midpoints.iter().enumerate() {
            let kids = &c.midpoints[pi * c.n as usize..(pi + 1) * c.n as usize];
            if !kids.contains(pm) {
                return Err(format!("(P2) parent midpoint missing at level {}", c.level));
            }
            for (a, k) in kids.iter().enumerate() {
                let off = k - pm;
                let abs = if off < Rat::zero() { -off } else { off };
                if abs >= half || &abs + &c.r / rbig(2) > half {
                    return Err(format!("(P2)/(P3) containment at level {}", c.level));
                }
                if a > 0 {
                    let gap = k - &kids[a - 1];
                    if gap <= sep {
                        return Err(format!("(P2) separation at level {}", c.level));
                    }
                    if gap <= c.r {
                        return Err(format!("(P3) disjointness at level {}", c.level));
                    }
                }
            }
        }
        // chord distance ≥ (2/π)·arc distance
        if to_f64(&c.spacing) * 2.0 / std::f64::consts::PI <= to_f64(&sep) {
            return Err(format!("(P2) chord separation at level {}", c.level));
        }
        if c.packing < c.n || (c.packing as f64) < c.packing_target {
            return Err(format!("packing certificate at level {}", c.level));
        }
    }
    Ok(())
}

pub fn gamma(st: &SetEState, j: usize) -> BigInt {
    st.levels[..=j].iter().fold(BigInt::one(), |a, l| a * l.n)
}

//! Ball cascade whose projections have small content along a dense set of
//! directions.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{check_cap, GenSet, Generation};
use crate::covering::{sat, surd_intervals_of_balls, SurdRadius};
use crate::error::{invalid, Error, Result};
use crate::exact::{from_f64, rbig, simplest_between, to_f64, CalkinWilf, Rat};
use crate::geometry::{Arc, BallUnion, Direction, RatPoint};
use std::f64::consts::PI;

/// Dense directions `e_m` and exponents `s_n ↓ 0` (both 1-based).
#[derive(Clone, Debug)]
pub struct MainParams {
    pub directions: Vec<Direction>,
    pub exponents: Vec<f64>,
}

/// Pythagorean direction `((b² − a²), 2ab)/(a² + b²)` of the half-angle
/// tangent `t = a/b`.
pub fn pythagorean_direction(a: i64, b: i64) -> Result<Direction> {
    let (a, b) = (a as i128, b as i128);
    Direction::from_int(b * b - a * a, 2 * a * b)
}

impl MainParams {
    /// Directions from `t = 0` followed by the Calkin–Wilf enumeration of the
    /// positive rationals, and `s_n = ratio^n`.
    pub fn pythagorean(m: usize, n: usize, ratio: f64) -> Result<MainParams> {
        let mut directions = vec![pythagorean_direction(0, 1)?];
        for (a, b) in CalkinWilf::new().take(m.saturating_sub(1)) {
            directions.push(pythagorean_direction(a as i64, b as i64)?);
        }
        let exponents = (1..=n as i32).map(|k| ratio.powi(k)).collect();
        let p = MainParams { directions, exponents };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.exponents.iter().any(|&s| !(s > 0.0 && s < 2.0)) {
            return invalid("exponents s_n must lie in (0, 2)");
        }
        if self.exponents.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("exponents s_n must be strictly decreasing");
        }
        if self.directions.iter().any(|e| e.exact_unit().is_none()) {
            return invalid("cascade directions need rational unit vectors");
        }
        Ok(())
    }
}

/// Pair `(m, n)` of the `step`-th position (1-based) in the diagonal order
/// `(1,1), (1,2), (2,1), (1,3), (2,2), (3,1), …`.
pub fn diagonal_pair(step: usize) -> (usize, usize) {
    let mut r = 1;
    let mut left = step;
    while left > r {
        left -= r;
        r += 1;
    }
    (left, r + 1 - left)
}

/// Record of one cascade step.
#[derive(Clone, Debug)]
pub struct MainState {
    pub step: usize,
    pub m: usize,
    pub n: usize,
    pub direction: Direction,
    pub s: f64,
    /// Ball count and diameter before subdivision.
    pub p: u64,
    pub dm: Rat,
    pub q: u64,
    /// `N(ρ_{e_m}(K), dm/(2q))`, at most `p`.
    pub cover_count: u64,
    /// `p·(dm/q)^s`; `None` for the base step.
    pub certificate: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct MainCascade {
    pub generations: Vec<Generation>,
    pub states: Vec<MainState>,
    pub params: MainParams,
}

/// Smallest `q ≥ 2` with `p·(dm/q)^s ≤ 1/2`.
pub fn subdivision_count(p: u64, dm: f64, s: f64) -> u64 {
    let holds = |q: u64| (p as f64).ln() + s * (dm.ln() - (q as f64).ln()) <= -(2f64.ln());
    let est = (dm * (2.0 * p as f64).powf(1.0 / s)).ceil().max(2.0) as u64;
    let mut q = est.max(2);
    while q > 2 && holds(q - 1) {
        q -= 1;
    }
    while !holds(q) {
        q += 1;
    }
    q
}

fn split(k: &BallUnion, e: &Direction, q: u64) -> Result<BallUnion> {
    let (ux, uy) = e.exact_unit().ok_or_else(|| Error::Invalid("direction is not Pythagorean".into()))?;
    let (px, py) = (-uy, ux);
    let dm = &k.radius * rbig(2);
    let qq = rbig(q as i64);
    let mut centers = Vec::with_capacity(k.len() * q as usize);
    for c in &k.centers {
        for i in 0..q as i64 {
            let t = &dm * (Rat::new(BigInt::from(2 * i + 1), BigInt::from(2)) / &qq - Rat::new(1.into(), 2.into()));
            centers.push(RatPoint::new(&c.x + &px * &t, &c.y + &py * &t));
        }
    }
    BallUnion::new(centers, &k.radius / &qq)
}

fn int_vector(e: &Direction) -> Result<(i128, i128)> {
    e.int_vector().ok_or_else(|| Error::Invalid("direction has no integer vector".into()))
}

/// Exact `N(ρ_e(K), r)` for a direction with an integer vector.
pub fn projection_cover(k: &BallUnion, e: &Direction, r: &Rat) -> Result<u64> {
    let (a, b) = int_vector(e)?;
    let si = surd_intervals_of_balls(k, a, b)?;
    Ok(sat(si.covering(&SurdRadius { r_rat: Rat::from_integer(0.into()), r_surd: r.clone() })))
}

pub fn construct_main(params: &MainParams, steps: usize) -> Result<MainCascade> {
    params.validate()?;
    if steps == 0 {
        return invalid("steps must be >= 1");
    }
    let mut generations = Vec::with_capacity(steps);
    let mut states = Vec::with_capacity(steps);
    let mut k = BallUnion::unit();
    for step in 1..=steps {
        let (m, n) = diagonal_pair(step);
        let e = *params.directions.get(m - 1).ok_or_else(|| Error::Invalid(format!("step {step} needs direction e_{m}")))?;
        let s = *params.exponents.get(n - 1).ok_or_else(|| Error::Invalid(format!("step {step} needs exponent s_{n}")))?;
        let p = k.len() as u64;
        let dm = &k.radius * rbig(2);
        if step == 1 {
            let cover_count = projection_cover(&k, &e, &k.radius)?;
            states.push(MainState { step, m, n, direction: e, s, p, dm, q: 1, cover_count, certificate: None });
            generations.push(Generation { level: 1, set: Some(GenSet::Balls(k.clone())), arcs: vec![Arc::new(e, 2.0 * PI)?] });
            continue;
        }
        let q = subdivision_count(p, to_f64(&dm), s);
        check_cap(p.saturating_mul(q), "cascade generation")?;
        k = split(&k, &e, q)?;
        let w = &dm / rbig(q as i64);
        let cover_count = projection_cover(&k, &e, &(&w / rbig(2)))?;
        let certificate = (p as f64) * to_f64(&w).powf(s);
        states.push(MainState { step, m, n, direction: e, s, p, dm, q, cover_count, certificate: Some(certificate) });
        generations.push(Generation { level: step, set: Some(GenSet::Balls(k.clone())), arcs: vec![Arc::new(e, to_f64(&w))?] });
    }
    Ok(MainCascade { generations, states, params: params.clone() })
}

/// Pythagorean direction within `tol` of the angle `theta` (mod π).
pub fn pythagorean_near(theta: f64, tol: f64) -> Result<Direction> {
    let mut t = theta.rem_euclid(PI);
    if t > PI / 2.0 {
        t -= PI;
    }
    let lo = from_f64(((t - tol) / 2.0).tan());
    let hi = from_f64(((t + tol) / 2.0).tan());
    let r = simplest_between(&lo, &hi);
    let (a, b) = (r.numer().to_i64(), r.denom().to_i64());
    match (a, b) {
        (Some(a), Some(b)) if a.unsigned_abs() < 1 << 31 && b < 1 << 31 => pythagorean_direction(a, b),
        _ => Err(Error::Overflow("Pythagorean approximation too large".into())),
    }
}

/// Upper bound `min_λ N(ρ_e(K), λ/2)·λ^s` for the `s`-content at scale `1/n`,
/// over dyadic `λ ≤ 1/n` down to `floor` and the extra scale `extra`.
pub fn content_proxy(k: &BallUnion, e: &Direction, s: f64, n: usize, extra: Option<&Rat>, floor: &Rat) -> Result<f64> {
    let cap = Rat::new(BigInt::one(), BigInt::from(n));
    let mut lambdas: Vec<Rat> = Vec::new();
    let mut l = Rat::one();
    while &l >= floor {
        if l <= cap {
            lambdas.push(l.clone());
        }
        l /= rbig(2);
    }
    if let Some(x) = extra {
        if *x <= cap {
            lambdas.push(x.clone());
        }
    }
    let (a, b) = int_vector(e)?;
    let si = surd_intervals_of_balls(k, a, b)?;
    let mut best = f64::INFINITY;
    for lam in lambdas {
        let r = SurdRadius { r_rat: Rat::from_integer(0.into()), r_surd: &lam / rbig(2) };
        let v = si.covering(&r) as f64 * to_f64(&lam).powf(s);
        best = best.min(v);
    }
    Ok(best)
}

/// Sampled content proxies of every step's set along `samples` directions of
/// its arc.
pub fn verify_main_content(c: &MainCascade, samples: usize) -> Result<Vec<Vec<(Direction, f64)>>> {
    let mut out = Vec::with_capacity(c.states.len());
    for (st, g) in c.states.iter().zip(&c.generations) {
        let k = match &g.set {
            Some(GenSet::Balls(b)) => b,
            _ => return invalid("cascade generation without balls"),
        };
        let arc = g.arcs[0];
        let width = arc.length.min(PI);
        let tol = width / (8.0 * samples as f64);
        let new_d = &k.radius * rbig(2);
        let extra = if st.certificate.is_some() { Some(&new_d * rbig(2)) } else { None };
        let floor = &new_d / rbig(8);
        let mut row = Vec::with_capacity(samples);
        for i in 0..samples {
            let theta = arc.mid.angle() - width / 2.0 + width * (i as f64 + 0.5) / samples as f64;
            let e = pythagorean_near(theta, tol)?;
            if arc.length < 2.0 * PI && e.antipodal_distance(&arc.mid) > arc.length / 2.0 {
                return Err(Error::Condition("sampled direction left its arc".into()));
            }
            row.push((e, content_proxy(k, &e, st.s, st.n, extra.as_ref(), &floor)?));
        }
        out.push(row);
    }
    Ok(out)
}

//! Exact-arithmetic helpers shared by the geometric modules.

use std::cmp::Ordering;

use ethnum::I256;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rbig(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact binary expansion of a finite float.
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

pub fn pow_rat(base: &Rat, e: u32) -> Rat {
    num_traits::pow(base.clone(), e as usize)
}

pub fn i256_to_bigint(x: I256) -> BigInt {
    BigInt::from_signed_bytes_le(&x.to_le_bytes())
}

pub fn bigint_to_i256(x: &BigInt) -> Option<I256> {
    if x.bits() > 254 {
        return None;
    }
    let bytes = x.to_signed_bytes_le();
    let fill = if x.sign() == Sign::Minus { 0xff } else { 0 };
    let mut buf = [fill; 32];
    buf[..bytes.len()].copy_from_slice(&bytes);
    Some(I256::from_le_bytes(buf))
}

/// Sign of `u + v·√s` for rationals `u`, `v` and an integer `s ≥ 0`.
pub fn sign_surd(u: &Rat, v: &Rat, s: &BigInt) -> Ordering {
    let su = u.cmp(&Rat::zero());
    let sv = if s.is_zero() { Ordering::Equal } else { v.cmp(&Rat::zero()) };
    use Ordering::*;
    match (su, sv) {
        (Equal, Equal) => Equal,
        (Greater | Equal, Greater | Equal) => Greater,
        (Less | Equal, Less | Equal) => Less,
        (Greater, Less) => {
            let lhs = u * u;
            let rhs = v * v * Rat::from_integer(s.clone());
            lhs.cmp(&rhs)
        }
        (Less, Greater) => {
            let lhs = v * v * Rat::from_integer(s.clone());
            let rhs = u * u;
            lhs.cmp(&rhs)
        }
    }
}

/// The rational with least denominator in the closed interval `[lo, hi]`;
/// ties in denominator resolve to the least absolute numerator.
pub fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo <= hi, "empty interval");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Rat::zero();
    }
    if hi.is_negative() {
        return -simplest_nonneg(&-hi.clone(), &-lo.clone());
    }
    simplest_nonneg(lo, hi)
}

fn simplest_nonneg(lo: &Rat, hi: &Rat) -> Rat {
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let fl = lo.floor();
    let a = (hi - &fl).recip();
    let b = (lo - &fl).recip();
    fl + simplest_nonneg(&a, &b).recip()
}

/// Breadth-first enumeration of the positive rationals without repetition.
pub struct CalkinWilf {
    cur: (u64, u64),
}

impl CalkinWilf {
    pub fn new() -> Self {
        CalkinWilf { cur: (1, 1) }
    }
}

impl Default for CalkinWilf {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for CalkinWilf {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        let (a, b) = self.cur;
        // next = 1 / (2 floor(x) - x + 1) with x = a/b
        let fl = a / b;
        let num = b;
        let den = (2 * fl + 1) * b - a;
        let g = num.gcd(&den);
        self.cur = (num / g, den / g);
        Some((a, b))
    }
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    a.unsigned_abs().gcd(&b.unsigned_abs()) as i128
}

pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// `n^s` compared against an integer count: returns `floor(n^s)` with an exact
/// guard when `n^s` lies within 1e-9 of an integer.
pub fn floor_pow(n: u64, s: f64) -> u64 {
    let v = (n as f64).powf(s);
    let r = v.round();
    if (v - r).abs() < 1e-9 * v.max(1.0) {
        if let Some(exact) = exact_pow_le(n, s, r as u64) {
            return exact;
        }
    }
    v.floor() as u64
}

// For rational s = a/b with small b: decide whether r^b <= n^a exactly.
fn exact_pow_le(n: u64, s: f64, r: u64) -> Option<u64> {
    let sr = from_f64(s);
    let a = sr.numer().to_u32()?;
    let b = sr.denom().to_u32()?;
    if b > 64 || a > 256 {
        return None;
    }
    let lhs = num_traits::pow(BigInt::from(r), b as usize);
    let rhs = num_traits::pow(BigInt::from(n), a as usize);
    if lhs <= rhs {
        Some(r)
    } else {
        Some(r - 1)
    }
}

pub fn one() -> Rat {
    Rat::one()
}

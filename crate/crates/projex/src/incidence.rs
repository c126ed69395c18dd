//! Projection cardinalities, critical directions and point-line incidences of
//! finite point sets in exact rational arithmetic.
//!
//! Directions are primitive integer vectors `(a, b)` with the first nonzero
//! coordinate positive, so antipodal directions coincide; counts over the
//! whole circle are twice the counts reported here. `ρ_{(a,b)}(x) = ax + by`
//! differs from the unit-vector projection by the factor `1/|(a, b)|`, which
//! does not change cardinalities.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact::{floor_pow, Rat};
use crate::geometry::{project, Direction, PointSet, RatPoint};

/// Primitive integer vector in normal form.
pub type IntDir = (i128, i128);

/// `(a, b)/gcd` with the first nonzero coordinate positive.
pub fn normalize_dir(a: i128, b: i128) -> Result<IntDir> {
    if a == 0 && b == 0 {
        return invalid("zero direction vector");
    }
    let g = a.gcd(&b);
    let (a, b) = (a / g, b / g);
    Ok(if a < 0 || (a == 0 && b < 0) { (-a, -b) } else { (a, b) })
}

fn int_dir(e: &Direction) -> Result<IntDir> {
    let (a, b) = e.int_vector().ok_or_else(|| Error::Invalid("exact mode needs a rational direction".into()))?;
    normalize_dir(a, b)
}

fn values(pts: &[RatPoint], d: IntDir) -> Vec<Rat> {
    let mut v: Vec<Rat> = pts.iter().map(|p| p.dot_int(d.0, d.1)).collect();
    v.sort();
    v
}

/// `card {ax + by : (x, y) ∈ P}`.
pub fn projection_cardinality_int(pts: &[RatPoint], d: IntDir) -> usize {
    let mut v = values(pts, d);
    v.dedup();
    v.len()
}

/// Number of distinct values `x·e` over `P`. Float inputs whose projections
/// differ by a nonzero amount below 1e−9 are rejected.
pub fn projection_cardinality(p: &PointSet, e: &Direction) -> Result<usize> {
    match p {
        PointSet::Exact(v) => Ok(projection_cardinality_int(v, int_dir(e)?)),
        PointSet::Float(v) => {
            let mut t: Vec<f64> = v.iter().map(|x| project(x, e)).collect();
            t.sort_by(f64::total_cmp);
            let mut card = usize::from(!t.is_empty());
            for w in t.windows(2) {
                let gap = w[1] - w[0];
                if gap > 0.0 && gap < 1e-9 {
                    return Err(Error::NeedExact);
                }
                if gap > 0.0 {
                    card += 1;
                }
            }
            Ok(card)
        }
    }
}

/// Critical direction with the point pairs `(i, j)`, `i < j`, it collapses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalDirection {
    pub dir: IntDir,
    pub pairs: Vec<(usize, usize)>,
}

/// Sorted by direction, without duplicates. Every other direction projects
/// `P` injectively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalDirectionSet {
    pub directions: Vec<CriticalDirection>,
}

impl CriticalDirectionSet {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn contains(&self, d: IntDir) -> bool {
        self.directions.binary_search_by(|c| c.dir.cmp(&d)).is_ok()
    }
}

/// Primitive integer vector parallel to the rational vector `(x, y)`.
fn primitive_of(x: &Rat, y: &Rat) -> Result<IntDir> {
    let l = x.denom().lcm(y.denom());
    let a = x.numer() * (&l / x.denom());
    let b = y.numer() * (&l / y.denom());
    let g = a.gcd(&b);
    let to = |v: BigInt| (v / &g).to_i128().ok_or_else(|| Error::Overflow("direction exceeds 128 bits".into()));
    normalize_dir(to(a)?, to(b)?)
}

/// Directions perpendicular to some difference `x − y`, `x ≠ y ∈ P`.
pub fn critical_directions(pts: &[RatPoint]) -> Result<CriticalDirectionSet> {
    let mut map: BTreeMap<IntDir, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = &pts[j].x - &pts[i].x;
            let dy = &pts[j].y - &pts[i].y;
            if dx.is_zero() && dy.is_zero() {
                return invalid("duplicate point");
            }
            map.entry(primitive_of(&-dy, &dx)?).or_default().push((i, j));
        }
    }
    Ok(CriticalDirectionSet { directions: map.into_iter().map(|(dir, pairs)| CriticalDirection { dir, pairs }).collect() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub a: i128,
    pub b: i128,
    pub cardinality: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalReport {
    pub n: usize,
    /// `⌊n^s⌋`.
    pub threshold: u64,
    pub count: usize,
    pub witnesses: Vec<Witness>,
    /// `count / n^{2s−1}`.
    pub ratio: f64,
}

impl ExceptionalReport {
    /// CSV `a,b,cardinality`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["a", "b", "cardinality"])?;
        for x in &self.witnesses {
            wr.write_record([x.a.to_string(), x.b.to_string(), x.cardinality.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Directions with `card ρ_e(P) ≤ n^s`, found among the critical directions.
pub fn exceptional_direction_count(pts: &[RatPoint], s: f64) -> Result<ExceptionalReport> {
    let n = pts.len();
    if n < 2 {
        return invalid("need at least two points");
    }
    if !(0.5..1.0).contains(&s) {
        return invalid("s must lie in [1/2, 1)");
    }
    let threshold = floor_pow(n as u64, s);
    let crit = critical_directions(pts)?;
    let cards: Vec<usize> = crit.directions.par_iter().map(|c| projection_cardinality_int(pts, c.dir)).collect();
    let witnesses: Vec<Witness> = crit.directions.iter().zip(cards).filter(|(_, k)| *k as u64 <= threshold).map(|(c, k)| Witness { a: c.dir.0, b: c.dir.1, cardinality: k }).collect();
    let count = witnesses.len();
    Ok(ExceptionalReport { n, threshold, count, ratio: count as f64 / (n as f64).powf(2.0 * s - 1.0), witnesses })
}

/// The line `{z : z·(a, b) = t}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line {
    pub dir: IntDir,
    pub offset: Rat,
}

/// Lines without duplicates, sorted by direction and offset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LineFamily {
    lines: Vec<Line>,
}

impl LineFamily {
    pub fn new(mut lines: Vec<Line>) -> Result<LineFamily> {
        for l in &lines {
            if normalize_dir(l.dir.0, l.dir.1)? != l.dir {
                return invalid("line direction must be primitive with first nonzero coordinate positive");
            }
        }
        lines.sort();
        lines.dedup();
        Ok(LineFamily { lines })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Fibers `ρ_e^{−1}{t}` for `e ∈ S` and `t ∈ ρ_e(P)`.
pub fn fiber_family(pts: &[RatPoint], dirs: &[IntDir]) -> Result<LineFamily> {
    let mut lines = Vec::new();
    for &d in dirs {
        let d = normalize_dir(d.0, d.1)?;
        let mut v = values(pts, d);
        v.dedup();
        lines.extend(v.into_iter().map(|offset| Line { dir: d, offset }));
    }
    LineFamily::new(lines)
}

/// `card {(p, L) : p ∈ P, L ∈ L, p ∈ L}`.
pub fn incidence_count(pts: &[RatPoint], lines: &LineFamily) -> u64 {
    let mut by_dir: BTreeMap<IntDir, Vec<&Rat>> = BTreeMap::new();
    for l in lines.lines() {
        by_dir.entry(l.dir).or_default().push(&l.offset);
    }
    by_dir
        .into_iter()
        .map(|(d, offs)| {
            let mut hist: HashMap<Rat, u64> = HashMap::new();
            for p in pts {
                *hist.entry(p.dot_int(d.0, d.1)).or_default() += 1;
            }
            offs.iter().map(|t| hist.get(*t).copied().unwrap_or(0)).sum::<u64>()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StReport {
    pub incidences: u64,
    /// Number of lines.
    pub m: usize,
    /// Number of points.
    pub n: usize,
    /// `m^{2/3}n^{2/3} + m + n`.
    pub shape: f64,
    pub holds: bool,
    /// `incidences / shape`, or 0 without incidences.
    pub minimal_a: f64,
}

/// `I(P, L) ≤ A(m^{2/3}n^{2/3} + m + n)`.
pub fn st_bound_check(pts: &[RatPoint], lines: &LineFamily, a: f64) -> StReport {
    let incidences = incidence_count(pts, lines);
    let (m, n) = (lines.len(), pts.len());
    let shape = ((m as f64) * (n as f64)).powf(2.0 / 3.0) + m as f64 + n as f64;
    let minimal_a = if incidences == 0 { 0.0 } else { incidences as f64 / shape };
    StReport { incidences, m, n, shape, holds: incidences as f64 <= a * shape, minimal_a }
}

/// The grid `{1..n}²`.
pub fn grid_points(n: i64) -> Vec<RatPoint> {
    match PointSet::grid(n) {
        PointSet::Exact(v) => v,
        PointSet::Float(_) => unreachable!(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCheck {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub cardinality: u64,
    /// `(1 + p)(1 + q)n`.
    pub bound: u64,
    /// Least number of points of `G_n' = {1..n(1+p)} × {−nq+1..n}` on a fiber
    /// through `G_n`.
    pub min_preimages: u64,
}

impl GridCheck {
    pub fn holds(&self) -> bool {
        self.cardinality <= self.bound && self.min_preimages >= self.n
    }
}

/// Cardinality of `{1..n}²` along `c(1, p/q)` and the preimage counts in the
/// enlarged grid `G_n'`, for `p ≥ 0`, `q ≥ 1`.
pub fn grid_check(n: u64, p: u64, q: u64) -> Result<GridCheck> {
    if n == 0 || q == 0 {
        return invalid("need n >= 1 and q >= 1");
    }
    let (ni, pi, qi) = (n as i64, p as i64, q as i64);
    // fibers of c(1, p/q) are the level sets of qx + py
    let key = |x: i64, y: i64| qi * x + pi * y;
    let lo = key(1, -ni * qi + 1).min(key(1, 1));
    let hi = key(ni * (1 + pi), ni);
    let width = usize::try_from(hi - lo + 1).map_err(|_| Error::Overflow("grid too large".into()))?;
    let mut big = vec![0u64; width];
    for x in 1..=ni * (1 + pi) {
        for y in -ni * qi + 1..=ni {
            big[(key(x, y) - lo) as usize] += 1;
        }
    }
    let mut seen = vec![false; width];
    for x in 1..=ni {
        for y in 1..=ni {
            seen[(key(x, y) - lo) as usize] = true;
        }
    }
    let cardinality = seen.iter().filter(|s| **s).count() as u64;
    let min_preimages = seen.iter().zip(&big).filter(|(s, _)| **s).map(|(_, c)| *c).min().unwrap_or(0);
    Ok(GridCheck { n, p, q, cardinality, bound: (1 + p) * (1 + q) * n, min_preimages })
}

/// Exact image of `P` under `z ↦ r·z + v`.
pub fn homothety(pts: &[RatPoint], r: &Rat, v: &RatPoint) -> Vec<RatPoint> {
    pts.iter().map(|p| RatPoint::new(r * &p.x + &v.x, r * &p.y + &v.y)).collect()
}

/// Exact rotation by the rational unit vector `(c, s)`.
pub fn rotate_points(pts: &[RatPoint], c: &Rat, s: &Rat) -> Vec<RatPoint> {
    pts.iter().map(|p| RatPoint::new(c * &p.x - s * &p.y, s * &p.x + c * &p.y)).collect()
}

/// Image of the integer direction `(a, b)` under the rotation by `(c, s)`
/// with `c = c_n/h`, `s = s_n/h`.
pub fn rotate_dir(d: IntDir, cn: i128, sn: i128) -> Result<IntDir> {
    normalize_dir(cn * d.0 - sn * d.1, sn * d.0 + cn * d.1)
}

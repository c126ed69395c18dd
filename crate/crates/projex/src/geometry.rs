//! Planar primitives: points, directions on S¹, rotations, projections,
//! ball and square unions, arcs and the projection of a ball union onto a line.
//!
//! Directions are identified antipodally. A rational direction `c(1, p/q)` is
//! stored with its reduced tag `(p, q)`, `q > 0`; exact projections along it
//! are reported as the pre-normalisation value `x + p·y/q`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::{gcd_i128, is_perfect_square, rbig, to_f64, Rat};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, o: &Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatPoint {
    pub x: Rat,
    pub y: Rat,
}

impl RatPoint {
    pub fn new(x: Rat, y: Rat) -> Self {
        RatPoint { x, y }
    }

    pub fn origin() -> Self {
        RatPoint { x: Rat::zero(), y: Rat::zero() }
    }

    pub fn to_point(&self) -> Point {
        Point::new(to_f64(&self.x), to_f64(&self.y))
    }

    /// `a·x + b·y` for an integer vector `(a, b)`.
    pub fn dot_int(&self, a: i128, b: i128) -> Rat {
        &self.x * rbig(a) + &self.y * rbig(b)
    }

    pub fn dist2(&self, o: &RatPoint) -> Rat {
        let dx = &self.x - &o.x;
        let dy = &self.y - &o.y;
        &dx * &dx + &dy * &dy
    }
}

/// Reduced tag of the rational direction `c(1, p/q)`: `q > 0`, `gcd(|p|, q) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag {
    pub p: i128,
    pub q: i128,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub tag: Option<Tag>,
}

/// `c(1, p/q)` with antipodal normalisation; `q = 0` is rejected.
pub fn rational_direction(p: i128, q: i128) -> Result<Direction> {
    if q == 0 {
        return Err(Error::VerticalDirection);
    }
    let g = gcd_i128(p, q);
    let (mut p, mut q) = (p / g, q / g);
    if q < 0 {
        p = -p;
        q = -q;
    }
    let (pf, qf) = (p as f64, q as f64);
    let h = pf.hypot(qf);
    Ok(Direction { x: qf / h, y: pf / h, tag: Some(Tag { p, q }) })
}

impl Direction {
    pub const VERTICAL: Direction = Direction { x: 0.0, y: 1.0, tag: None };

    /// Unit vector along `(x, y)`, untagged, antipodally normalised.
    pub fn from_vector(x: f64, y: f64) -> Result<Direction> {
        let h = x.hypot(y);
        if !(h > 0.0) || !h.is_finite() {
            return invalid("zero or non-finite direction vector");
        }
        Ok(Direction { x: x / h, y: y / h, tag: None }.normalized())
    }

    pub fn from_angle(theta: f64) -> Direction {
        Direction { x: theta.cos(), y: theta.sin(), tag: None }.normalized()
    }

    /// Direction along the integer vector `(a, b)`; exact when `a ≠ 0` via the
    /// tag `(b, a)`, and exactly `(0, 1)` when `a = 0`.
    pub fn from_int(a: i128, b: i128) -> Result<Direction> {
        if a == 0 && b == 0 {
            return invalid("zero direction vector");
        }
        if a == 0 {
            return Ok(Direction::VERTICAL);
        }
        rational_direction(b, a)
    }

    /// First nonzero coordinate made positive.
    pub fn normalized(self) -> Direction {
        if self.x < 0.0 || (self.x == 0.0 && self.y < 0.0) {
            Direction { x: -self.x, y: -self.y, tag: self.tag }
        } else {
            self
        }
    }

    /// Primitive integer vector `(a, b)` parallel to the direction, when exact.
    pub fn int_vector(&self) -> Option<(i128, i128)> {
        match self.tag {
            Some(t) => Some((t.q, t.p)),
            None if self.x == 0.0 && self.y.abs() == 1.0 => Some((0, 1)),
            None => None,
        }
    }

    /// Exact rational unit vector when `p² + q²` is a perfect square.
    pub fn exact_unit(&self) -> Option<(Rat, Rat)> {
        let (a, b) = self.int_vector()?;
        let n2 = BigInt::from(a) * a + BigInt::from(b) * b;
        let n = is_perfect_square(&n2)?;
        Some((Rat::new(BigInt::from(a), n.clone()), Rat::new(BigInt::from(b), n)))
    }

    /// Angle in `(-π, π]`.
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dot(&self, o: &Direction) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm_error(&self) -> f64 {
        (self.x.hypot(self.y) - 1.0).abs()
    }

    /// Angular distance on S¹ modulo the antipodal map, in `[0, π/2]`.
    pub fn antipodal_distance(&self, o: &Direction) -> f64 {
        let d = wrap_angle(self.angle() - o.angle()).abs();
        d.min(PI - d)
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut t = t % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// `ρ_e(x) = x · e`.
pub fn project(x: &Point, e: &Direction) -> f64 {
    x.x * e.x + x.y * e.y
}

/// Exact projection value before the factor `c`: `x + p·y/q` for tagged
/// directions, `y` for the vertical direction.
pub fn project_exact(x: &RatPoint, e: &Direction) -> Result<Rat> {
    match (e.tag, e.int_vector()) {
        (Some(t), _) => Ok(&x.x + &x.y * Rat::new(t.p.into(), t.q.into())),
        (None, Some((0, 1))) => Ok(x.y.clone()),
        _ => invalid("exact projection needs a rational direction"),
    }
}

/// The rotation `R_e` taking `(0, 1)` to `e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub ex: f64,
    pub ey: f64,
    /// Integer vector of `e` when `e` is rational.
    pub int: Option<(i128, i128)>,
}

pub fn rotate_to(e: &Direction) -> Rotation {
    Rotation { ex: e.x, ey: e.y, int: e.int_vector() }
}

impl Rotation {
    pub fn apply(&self, p: &Point) -> Point {
        Point::new(self.ey * p.x + self.ex * p.y, -self.ex * p.x + self.ey * p.y)
    }

    pub fn apply_inverse(&self, p: &Point) -> Point {
        Point::new(self.ey * p.x - self.ex * p.y, self.ex * p.x + self.ey * p.y)
    }

    pub fn apply_dir(&self, d: &Direction) -> Result<Direction> {
        match (self.int, d.int_vector()) {
            (Some(_), Some((a, b))) => {
                let (x, y) = self.apply_int(a, b)?;
                Direction::from_int(x, y)
            }
            _ => {
                let p = self.apply(&Point::new(d.x, d.y));
                Direction::from_vector(p.x, p.y)
            }
        }
    }

    pub fn apply_inverse_dir(&self, d: &Direction) -> Result<Direction> {
        match (self.int, d.int_vector()) {
            (Some(_), Some((a, b))) => {
                let (x, y) = self.apply_inverse_int(a, b)?;
                Direction::from_int(x, y)
            }
            _ => {
                let p = self.apply_inverse(&Point::new(d.x, d.y));
                Direction::from_vector(p.x, p.y)
            }
        }
    }

    /// Image of an integer vector up to the positive factor `|e|`.
    pub fn apply_int(&self, a: i128, b: i128) -> Result<(i128, i128)> {
        let (ea, eb) = self.int.ok_or_else(|| Error::Invalid("rotation is not rational".into()))?;
        let x = mul_add(eb, a, ea, b)?;
        let y = mul_add(-ea, a, eb, b)?;
        reduce(x, y)
    }

    pub fn apply_inverse_int(&self, a: i128, b: i128) -> Result<(i128, i128)> {
        let (ea, eb) = self.int.ok_or_else(|| Error::Invalid("rotation is not rational".into()))?;
        let x = mul_add(eb, a, -ea, b)?;
        let y = mul_add(ea, a, eb, b)?;
        reduce(x, y)
    }
}

fn mul_add(a: i128, b: i128, c: i128, d: i128) -> Result<i128> {
    a.checked_mul(b).and_then(|u| c.checked_mul(d).and_then(|v| u.checked_add(v))).ok_or_else(|| Error::Overflow("integer rotation exceeds 128 bits".into()))
}

fn reduce(x: i128, y: i128) -> Result<(i128, i128)> {
    let g = gcd_i128(x, y);
    if g == 0 {
        return invalid("zero vector after rotation");
    }
    Ok((x / g, y / g))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Ball> {
        if !(radius > 0.0) {
            return invalid("ball radius must be positive");
        }
        Ok(Ball { center, radius })
    }
}

/// Closed balls of a common rational radius.
#[derive(Clone, Debug, PartialEq)]
pub struct BallUnion {
    pub centers: Vec<RatPoint>,
    pub radius: Rat,
}

impl BallUnion {
    pub fn new(centers: Vec<RatPoint>, radius: Rat) -> Result<BallUnion> {
        if !radius.is_positive() {
            return invalid("generation radius must be positive");
        }
        if centers.is_empty() {
            return invalid("ball union must be nonempty");
        }
        Ok(BallUnion { centers, radius })
    }

    pub fn unit() -> BallUnion {
        BallUnion { centers: vec![RatPoint::origin()], radius: Rat::new(1.into(), 2.into()) }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn balls(&self) -> Vec<Ball> {
        let r = to_f64(&self.radius);
        self.centers.iter().map(|c| Ball { center: c.to_point(), radius: r }).collect()
    }

    /// Pairwise center distance at least `2r`, decided exactly.
    pub fn is_interior_disjoint(&self) -> bool {
        min_pair_dist2_at_least(&self.centers, &(&self.radius * &self.radius * Rat::from(BigInt::from(4))))
    }

    /// Every ball lies inside `B(0, 1/2)`.
    pub fn inside_unit_ball(&self) -> bool {
        let half = Rat::new(1.into(), 2.into());
        if self.radius > half {
            return false;
        }
        let room = &half - &self.radius;
        let room2 = &room * &room;
        self.centers.iter().all(|c| c.dist2(&RatPoint::origin()) <= room2)
    }

    pub fn diameter_sum(&self) -> Rat {
        &self.radius * Rat::from(BigInt::from(2 * self.centers.len() as i64))
    }
}

/// Decides `min |a − b|² ≥ bound2` by hashing into cells of side at least
/// `√bound2`, so close pairs lie in neighbouring cells.
pub fn min_pair_dist2_at_least(pts: &[RatPoint], bound2: &Rat) -> bool {
    use std::collections::HashMap;
    if pts.len() < 2 || !bound2.is_positive() {
        return true;
    }
    let side = crate::exact::from_f64(to_f64(bound2).sqrt() * (1.0 + 1e-9) + f64::MIN_POSITIVE);
    if &(&side * &side) < bound2 {
        return min_pair_quadratic(pts, bound2);
    }
    let mut cells: HashMap<(BigInt, BigInt), Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        let key = ((&p.x / &side).floor().to_integer(), (&p.y / &side).floor().to_integer());
        cells.entry(key).or_default().push(i);
    }
    for ((cx, cy), members) in &cells {
        for dx in -1..=1i32 {
            for dy in -1..=1i32 {
                let Some(other) = cells.get(&(cx + dx, cy + dy)) else { continue };
                for &i in members {
                    for &j in other {
                        if i < j && &pts[i].dist2(&pts[j]) < bound2 {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

fn min_pair_quadratic(pts: &[RatPoint], bound2: &Rat) -> bool {
    (0..pts.len()).all(|i| (i + 1..pts.len()).all(|j| &pts[i].dist2(&pts[j]) >= bound2))
}

/// Closed axis-parallel squares of a common rational side.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareUnion {
    pub centers: Vec<RatPoint>,
    pub side: Rat,
}

impl SquareUnion {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Squares are pairwise interior-disjoint: for every pair the centers
    /// differ by at least the side in one coordinate.
    pub fn is_interior_disjoint(&self) -> bool {
        let s = &self.side;
        let mut sorted: Vec<&RatPoint> = self.centers.iter().collect();
        sorted.sort_by(|a, b| a.x.cmp(&b.x).then(a.y.cmp(&b.y)));
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                let dx = &sorted[j].x - &sorted[i].x;
                if &dx >= s {
                    break;
                }
                if &(&sorted[j].y - &sorted[i].y).abs() < s {
                    return false;
                }
            }
        }
        true
    }
}

/// Sorted, merged union of closed intervals: `b_i < a_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalUnion<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Clone + PartialOrd> IntervalUnion<T> {
    pub fn new(mut raw: Vec<(T, T)>) -> Result<Self> {
        if raw.iter().any(|(a, b)| a > b || a.partial_cmp(b).is_none()) {
            return invalid("interval with a > b or unordered endpoints");
        }
        raw.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
        let mut out: Vec<(T, T)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            if let Some(last) = out.last_mut() {
                if a <= last.1 {
                    if b > last.1 {
                        last.1 = b;
                    }
                    continue;
                }
            }
            out.push((a, b));
        }
        Ok(IntervalUnion { intervals: out })
    }

    pub fn empty() -> Self {
        IntervalUnion { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

impl IntervalUnion<f64> {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

/// Closed arc of S¹ (no antipodal identification).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub mid: Direction,
    pub length: f64,
}

impl Arc {
    pub fn new(mid: Direction, length: f64) -> Result<Arc> {
        if !(length > 0.0 && length <= 2.0 * PI) {
            return invalid("arc length must lie in (0, 2π]");
        }
        Ok(Arc { mid, length })
    }

    pub fn offset(&self, e: &Direction) -> f64 {
        wrap_angle(e.angle() - self.mid.angle())
    }

    pub fn contains(&self, e: &Direction) -> bool {
        self.length >= 2.0 * PI || self.offset(e).abs() <= self.length / 2.0
    }

    /// Interior membership with a safety margin on both ends.
    pub fn contains_with_margin(&self, e: &Direction, margin: f64) -> bool {
        self.length >= 2.0 * PI || self.offset(e).abs() + margin < self.length / 2.0
    }

    pub fn direction_at(&self, offset: f64) -> Direction {
        let t = self.mid.angle() + offset;
        Direction { x: t.cos(), y: t.sin(), tag: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointSet {
    Float(Vec<Point>),
    Exact(Vec<RatPoint>),
}

impl PointSet {
    /// Exact point set; duplicates are rejected.
    pub fn exact(points: Vec<RatPoint>) -> Result<PointSet> {
        let mut s = points.clone();
        s.sort();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate point in exact point set");
        }
        Ok(PointSet::Exact(points))
    }

    pub fn float(points: Vec<Point>) -> PointSet {
        PointSet::Float(points)
    }

    pub fn len(&self) -> usize {
        match self {
            PointSet::Float(v) => v.len(),
            PointSet::Exact(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_float(&self) -> Vec<Point> {
        match self {
            PointSet::Float(v) => v.clone(),
            PointSet::Exact(v) => v.iter().map(RatPoint::to_point).collect(),
        }
    }

    /// Integer `n × n` grid `{1..n}²` in exact mode.
    pub fn grid(n: i64) -> PointSet {
        let mut v = Vec::with_capacity((n * n) as usize);
        for i in 1..=n {
            for j in 1..=n {
                v.push(RatPoint::new(rbig(i), rbig(j)));
            }
        }
        PointSet::Exact(v)
    }
}

/// `ρ_e(K)` as a merged interval union.
pub fn project_union(k: &BallUnion, e: &Direction) -> IntervalUnion<f64> {
    let r = to_f64(&k.radius);
    let raw = k
        .centers
        .iter()
        .map(|c| {
            let t = project(&c.to_point(), e);
            (t - r, t + r)
        })
        .collect();
    IntervalUnion::new(raw).expect("finite projections")
}

/// `ρ_e(K)` in exact arithmetic; `e` must have a rational unit vector.
pub fn project_union_exact(k: &BallUnion, e: &Direction) -> Result<IntervalUnion<Rat>> {
    let (ux, uy) = e.exact_unit().ok_or_else(|| Error::Invalid("exact projection union needs a rational unit vector".into()))?;
    let raw = k
        .centers
        .iter()
        .map(|c| {
            let t = &c.x * &ux + &c.y * &uy;
            (&t - &k.radius, &t + &k.radius)
        })
        .collect();
    IntervalUnion::new(raw)
}

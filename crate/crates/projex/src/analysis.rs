//! δ-tubes, (δ,1)-sets and tube energies of finite weighted point sets.
//!
//! A tube family of width `δ` along `e` is `{ρ_e^{−1}[jδ, (j+1)δ) : j ∈ ℤ}`;
//! two points are related along `e` when they share a tube. Direction nets
//! are `⌈π/δ⌉` equally spaced angles in `[0, π)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::covering::covering_number_1d;
use crate::error::{invalid, Error, Result};
use crate::exact::{floor_int, Rat};
use crate::geometry::{project, Direction, IntervalUnion, Point};

/// Relative distance below which a float quotient is snapped to the integer
/// tube boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// `⌊t/δ⌋`; quotients within `BOUNDARY_TOL` of an integer count as lying on
/// that boundary, which belongs to the upper tube.
pub fn tube_index_value(t: f64, delta: f64) -> i64 {
    let q = t / delta;
    let r = q.round();
    if (q - r).abs() <= BOUNDARY_TOL * r.abs().max(1.0) {
        r as i64
    } else {
        q.floor() as i64
    }
}

pub fn tube_index(x: &Point, e: &Direction, delta: f64) -> i64 {
    tube_index_value(project(x, e), delta)
}

/// Exact `⌊t/δ⌋`.
pub fn tube_index_exact(t: &Rat, delta: &Rat) -> Result<num_bigint::BigInt> {
    if *delta <= Rat::from_integer(0.into()) {
        return invalid("delta must be positive");
    }
    Ok(floor_int(&(t / delta)))
}

/// `⌈π/δ⌉` directions at angles `iπ/N`.
pub fn direction_net(delta: f64) -> Result<Vec<Direction>> {
    if !(delta > 0.0 && delta <= PI) {
        return invalid("net spacing must lie in (0, π]");
    }
    let n = (PI / delta).ceil() as usize;
    Ok((0..n).map(|i| Direction::from_angle(i as f64 * PI / n as f64)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaOneReport {
    pub passed: bool,
    /// Least `A` with `card(C ∩ B(x, r)) ≤ A·r/δ` at all checked `(x, r)`.
    pub a_star: f64,
    /// Radius attaining `a_star`.
    pub worst_radius: f64,
    pub separated: bool,
    pub min_distance: f64,
}

/// Checks `δ`-separation and `card(C ∩ B(x, r)) ≤ A·r/δ` for centers `x ∈ C`
/// and dyadic `r = δ·2^k` up to the diameter. The general condition then
/// holds with `2A*`.
pub fn is_delta_one_set(c: &[Point], delta: f64, a: f64) -> Result<DeltaOneReport> {
    if !(delta > 0.0) {
        return invalid("delta must be positive");
    }
    if c.is_empty() {
        return Ok(DeltaOneReport { passed: true, a_star: 0.0, worst_radius: delta, separated: true, min_distance: f64::INFINITY });
    }
    let per_center: Vec<(f64, f64, f64, f64)> = c
        .par_iter()
        .map(|x| {
            let mut d: Vec<f64> = c.iter().map(|y| x.dist(y)).collect();
            d.sort_by(f64::total_cmp);
            let min_d = d.get(1).copied().unwrap_or(f64::INFINITY);
            let diam = *d.last().unwrap();
            let (mut best, mut best_r) = (0.0f64, delta);
            let mut r = delta;
            loop {
                let card = d.partition_point(|&v| v <= r * (1.0 + 1e-12));
                let ratio = card as f64 * delta / r;
                if ratio > best {
                    best = ratio;
                    best_r = r;
                }
                if r >= diam {
                    break;
                }
                r *= 2.0;
            }
            (best, best_r, min_d, diam)
        })
        .collect();
    let mut a_star = 0.0f64;
    let mut worst_radius = delta;
    let mut min_distance = f64::INFINITY;
    for &(b, r, m, _) in &per_center {
        if b > a_star {
            a_star = b;
            worst_radius = r;
        }
        min_distance = min_distance.min(m);
    }
    let separated = min_distance >= delta * (1.0 - 1e-12);
    Ok(DeltaOneReport { passed: separated && a_star <= a, a_star, worst_radius, separated, min_distance })
}

/// One point from each kept tube of `T_ξ`, keeping occupied tubes greedily
/// from the lowest index with index gaps at least 2.
pub fn extract_delta_one_subset(p: &[Point], delta: f64, xi: &Direction) -> Result<Vec<Point>> {
    if !(delta > 0.0) {
        return invalid("delta must be positive");
    }
    let mut first: BTreeMap<i64, Point> = BTreeMap::new();
    for x in p {
        first.entry(tube_index(x, xi, delta)).or_insert(*x);
    }
    let mut out = Vec::new();
    let mut last: Option<i64> = None;
    for (j, x) in first {
        if last.is_none_or(|l| j - l >= 2) {
            out.push(x);
            last = Some(j);
        }
    }
    Ok(out)
}

/// Atoms with nonnegative weights summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPointSet {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<WeightedPointSet> {
        if points.len() != weights.len() || points.is_empty() {
            return invalid("need one weight per point and at least one point");
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return invalid("weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("weights sum to {total}, not 1"));
        }
        Ok(WeightedPointSet { points, weights })
    }

    /// Equal weights `1/n`.
    pub fn uniform(points: Vec<Point>) -> Result<WeightedPointSet> {
        let n = points.len();
        WeightedPointSet::new(points, vec![1.0 / n as f64; n])
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyRow {
    pub direction_index: usize,
    pub direction: Direction,
    /// Occupied tubes `(j, mass)` in increasing `j`.
    pub histogram: Vec<(i64, f64)>,
    pub energy: f64,
    /// `(Σ_j m_j)² / K` over the `K` occupied tubes.
    pub cs_lower: f64,
}

impl EnergyRow {
    pub fn occupied_tubes(&self) -> usize {
        self.histogram.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub rows: Vec<EnergyRow>,
    /// Sum of the rows in direction order.
    pub total: f64,
}

impl EnergyReport {
    fn from_rows(rows: Vec<EnergyRow>) -> EnergyReport {
        let total = rows.iter().map(|r| r.energy).sum();
        EnergyReport { rows, total }
    }

    /// CSV `direction_index,ex,ey,occupied_tubes,energy,cs_lower`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["direction_index", "ex", "ey", "occupied_tubes", "energy", "cs_lower"])?;
        for r in &self.rows {
            wr.write_record([r.direction_index.to_string(), r.direction.x.to_string(), r.direction.y.to_string(), r.occupied_tubes().to_string(), r.energy.to_string(), r.cs_lower.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Tube members `j → [point indices]` along `e`.
fn tubes(points: &[Point], e: &Direction, width: f64) -> BTreeMap<i64, Vec<usize>> {
    let mut m: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, x) in points.iter().enumerate() {
        m.entry(tube_index(x, e, width)).or_default().push(i);
    }
    m
}

fn cs_lower(hist: &[(i64, f64)]) -> f64 {
    let s: f64 = hist.iter().map(|h| h.1).sum();
    if hist.is_empty() {
        0.0
    } else {
        s * s / hist.len() as f64
    }
}

/// `Σ_e card{(x, y) ∈ C × C : x ∼_e y}`, ordered pairs with the diagonal.
pub fn counting_energy(c: &[Point], dirs: &[Direction], delta: f64) -> Result<EnergyReport> {
    if !(delta > 0.0) {
        return invalid("delta must be positive");
    }
    let rows = dirs
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let hist: Vec<(i64, f64)> = tubes(c, e, delta).into_iter().map(|(j, v)| (j, v.len() as f64)).collect();
            let energy = hist.iter().map(|h| h.1 * h.1).sum();
            EnergyRow { direction_index: i, direction: *e, cs_lower: cs_lower(&hist), histogram: hist, energy }
        })
        .collect();
    Ok(EnergyReport::from_rows(rows))
}

/// `Σ_e Σ_{x ∼_e y} w_x w_y |x − y|^κ` over tubes of the given width; the
/// diagonal contributes only for `κ = 0`.
pub fn weighted_energy(mu: &WeightedPointSet, dirs: &[Direction], width: f64, kernel_exponent: f64) -> Result<EnergyReport> {
    if !(width > 0.0) {
        return invalid("tube width must be positive");
    }
    if !kernel_exponent.is_finite() {
        return invalid("kernel exponent must be finite");
    }
    let (pts, w) = (mu.points(), mu.weights());
    let rows = dirs
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let mut hist = Vec::new();
            let mut energy = 0.0;
            for (j, members) in tubes(pts, e, width) {
                let mass: f64 = members.iter().map(|&a| w[a]).sum();
                hist.push((j, mass));
                if kernel_exponent == 0.0 {
                    energy += mass * mass;
                } else {
                    for &a in &members {
                        for &b in &members {
                            if a != b {
                                energy += w[a] * w[b] * pts[a].dist(&pts[b]).powf(kernel_exponent);
                            }
                        }
                    }
                }
            }
            EnergyRow { direction_index: i, direction: *e, cs_lower: cs_lower(&hist), histogram: hist, energy }
        })
        .collect();
    Ok(EnergyReport::from_rows(rows))
}

/// `Σ_{x ≠ y} w_x w_y |x − y|^{−γ}`.
pub fn riesz_energy(mu: &WeightedPointSet, gamma: f64) -> f64 {
    let (pts, w) = (mu.points(), mu.weights());
    let per: Vec<f64> = (0..pts.len())
        .into_par_iter()
        .map(|a| {
            let mut s = 0.0;
            for b in 0..pts.len() {
                if a != b {
                    s += w[a] * w[b] * pts[a].dist(&pts[b]).powf(-gamma);
                }
            }
            s
        })
        .collect();
    per.iter().sum()
}

/// Net directions `e` with `x ∼_e y` at width `δ`.
pub fn pair_direction_count(x: &Point, y: &Point, net: &[Direction], delta: f64) -> usize {
    net.iter().filter(|e| tube_index(x, e, delta) == tube_index(y, e, delta)).count()
}

/// `⌈π/D⌉ + 1` for points at distance `D`: the related directions form
/// an arc of length at most `πδ/D` and the net spacing is about `δ`.
pub fn pair_direction_bound(dist: f64) -> u64 {
    (PI / dist).ceil() as u64 + 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarstrandScan {
    /// Indices into the net of the exceptional directions.
    pub indices: Vec<usize>,
    pub directions: Vec<Direction>,
    pub count: usize,
    pub net_size: usize,
    /// `count / (δ^{τ−1} log(1/δ))`.
    pub ratio: f64,
}

/// `N(ρ_e(C), δ)` for a finite point set.
pub fn projected_cover(c: &[Point], e: &Direction, delta: f64) -> Result<u64> {
    let u = IntervalUnion::new(c.iter().map(|x| (project(x, e), project(x, e))).collect())?;
    covering_number_1d(&u, &delta)
}

/// Net directions with `N(ρ_e(C), δ) ≤ δ^τ·n`. `C` must be a `(δ,1)`-set with
/// constant `a`.
pub fn marstrand_exceptional_scan(c: &[Point], delta: f64, tau: f64, a: f64) -> Result<MarstrandScan> {
    if !(delta > 0.0 && delta < 1.0) {
        return invalid("delta must lie in (0, 1)");
    }
    let v = is_delta_one_set(c, delta, a)?;
    if !v.passed {
        return Err(if v.separated {
            Error::Condition(format!("not a (δ,1)-set: constant {} > {a} at radius {}", v.a_star, v.worst_radius))
        } else {
            Error::Condition(format!("not δ-separated: minimum distance {}", v.min_distance))
        });
    }
    let net = direction_net(delta)?;
    let threshold = delta.powf(tau) * c.len() as f64;
    let flags: Result<Vec<bool>> = net.par_iter().map(|e| Ok(projected_cover(c, e, delta)? as f64 <= threshold)).collect();
    let indices: Vec<usize> = flags?.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect();
    let count = indices.len();
    let ratio = count as f64 / (delta.powf(tau - 1.0) * (1.0 / delta).ln());
    Ok(MarstrandScan { directions: indices.iter().map(|&i| net[i]).collect(), indices, count, net_size: net.len(), ratio })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitBranch {
    /// Mass outside the window is at most `c·δ^σ`.
    Concentrated,
    /// The masses below and above the window have ratio in `[1/2, 2]`.
    Balanced,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    /// Lower end of the window.
    pub position: f64,
    pub branch: SplitBranch,
    pub below: f64,
    pub above: f64,
}

impl Split {
    pub fn ratio(&self) -> f64 {
        self.below / self.above
    }
}

/// Window `[s, s + w]` over a mass profile `(position, mass)` along a tube,
/// with `s` stepping by `δ` from the lowest atom. A concentrated position is
/// preferred; otherwise the balanced position with ratio nearest 1.
pub fn balanced_split(profile: &[(f64, f64)], delta: f64, split_width: f64, c: f64, sigma: f64) -> Result<Split> {
    if profile.is_empty() {
        return invalid("empty profile");
    }
    if !(delta > 0.0 && split_width >= 0.0) {
        return invalid("delta must be positive and the width nonnegative");
    }
    if profile.iter().any(|p| !(p.1 >= 0.0)) {
        return invalid("masses must be nonnegative");
    }
    let lo = profile.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = profile.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let small = c * delta.powf(sigma);
    let steps = (((hi - lo - split_width) / delta).ceil().max(0.0)) as u64;
    let centre = (lo + hi - split_width) / 2.0;
    let mut best: Option<(f64, f64, Split)> = None;
    let mut best_ratio = f64::NAN;
    for k in 0..=steps {
        let s = lo + k as f64 * delta;
        let (mut below, mut above) = (0.0, 0.0);
        for &(t, m) in profile {
            if t < s {
                below += m;
            } else if t > s + split_width {
                above += m;
            }
        }
        if below + above <= small {
            return Ok(Split { position: s, branch: SplitBranch::Concentrated, below, above });
        }
        if below > 0.0 && above > 0.0 {
            let r = below / above;
            let score = r.ln().abs();
            if best_ratio.is_nan() || score < best_ratio.ln().abs() {
                best_ratio = r;
            }
            if (0.5..=2.0).contains(&r) {
                let off = (s - centre).abs();
                let cand = Split { position: s, branch: SplitBranch::Balanced, below, above };
                if best.as_ref().is_none_or(|b| (score, off) < (b.0, b.1)) {
                    best = Some((score, off, cand));
                }
            }
        }
    }
    match best {
        Some((_, _, s)) => Ok(s),
        None => Err(Error::Condition(format!("no window position at step δ is concentrated or balanced; best ratio {best_ratio}"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentIteration {
    /// `τ_1, …, τ_n`.
    pub taus: Vec<f64>,
    /// `ρσ/γ − (ρ − 1)`.
    pub limit: f64,
    /// `σγ/(γ + σ(γ − 1))`, reported when `ρ` is the optimal choice.
    pub first_bound: Option<f64>,
}

/// `γ/(γ + σ(γ − 1))`.
pub fn optimal_rho(sigma: f64, gamma: f64) -> f64 {
    gamma / (gamma + sigma * (gamma - 1.0))
}

/// `σγ/(γ + σ(γ − 1))`.
pub fn first_bound(sigma: f64, gamma: f64) -> f64 {
    sigma * gamma / (gamma + sigma * (gamma - 1.0))
}

/// Iterates `τ ← ρσ − γ(ρ − 1) + (1 − γ)τ` from `τ0`.
pub fn exponent_iteration(sigma: f64, gamma: f64, rho: f64, tau0: f64, n: usize) -> Result<ExponentIteration> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return invalid("gamma must lie in (0, 1)");
    }
    if !(rho >= 1.0) || !rho.is_finite() {
        return invalid("rho must be at least 1");
    }
    let step = rho * sigma - gamma * (rho - 1.0);
    let mut taus = Vec::with_capacity(n);
    let mut t = tau0;
    for _ in 0..n {
        t = step + (1.0 - gamma) * t;
        taus.push(t);
    }
    let limit = rho * sigma / gamma - (rho - 1.0);
    let opt = optimal_rho(sigma, gamma);
    let first_bound = ((rho - opt).abs() <= 1e-12 * opt.abs().max(1.0)).then(|| first_bound(sigma, gamma));
    Ok(ExponentIteration { taus, limit, first_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    fn line(n: usize, delta: f64) -> Vec<Point> {
        (0..n).map(|i| Point::new(i as f64 * delta, 0.0)).collect()
    }

    fn grid(n: usize, delta: f64) -> Vec<Point> {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                v.push(Point::new(i as f64 * delta, j as f64 * delta));
            }
        }
        v
    }

    #[test]
    fn tube_index_examples() {
        assert_eq!(tube_index_value(0.25, 0.1), 2);
        assert_eq!(tube_index_value(0.3, 0.1), 3);
        assert_eq!(tube_index_value(-0.05, 0.1), -1);
        assert_eq!(tube_index_exact(&rat(7, 3), &rat(1, 2)).unwrap(), 4.into());
        assert_eq!(tube_index_exact(&rat(3, 10), &rat(1, 10)).unwrap(), 3.into());
    }

    #[test]
    fn delta_one_examples() {
        let r = is_delta_one_set(&line(50, 0.01), 0.01, 3.0).unwrap();
        assert!(r.passed && r.a_star <= 3.0, "{r:?}");
        let g = is_delta_one_set(&grid(16, 0.01), 0.01, 8.0).unwrap();
        assert!(!g.passed && g.a_star > 8.0);
        let one = is_delta_one_set(&[Point::new(0.1, 0.2)], 0.01, 1.0).unwrap();
        assert_eq!(one.a_star, 1.0);
        assert!(one.passed);
        assert!(!is_delta_one_set(&line(3, 0.005), 0.01, 10.0).unwrap().separated);
    }

    #[test]
    fn extraction_examples() {
        for n in [5usize, 8, 13] {
            let g = grid(n, 0.01);
            let e = Direction::from_vector(1.0, 0.0).unwrap();
            let s = extract_delta_one_subset(&g, 0.01, &e).unwrap();
            assert_eq!(s.len(), n.div_ceil(2));
            assert!(is_delta_one_set(&s, 0.01, 3.0).unwrap().passed);
        }
        assert!(extract_delta_one_subset(&[], 0.1, &Direction::VERTICAL).unwrap().is_empty());
        let far = vec![Point::new(0.0, 0.0), Point::new(0.0, 0.5), Point::new(0.0, 0.9)];
        assert_eq!(extract_delta_one_subset(&far, 0.01, &Direction::VERTICAL).unwrap(), far);
    }

    #[test]
    fn counting_energy_examples() {
        let c = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let r = counting_energy(&c, &[Direction::VERTICAL, Direction::from_vector(1.0, 0.0).unwrap()], 0.1).unwrap();
        assert_eq!(r.rows[0].energy, 4.0);
        assert_eq!(r.rows[1].energy, 2.0);
        assert_eq!(r.total, 6.0);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("direction_index,ex,ey,occupied_tubes,energy,cs_lower\n0,0,1,1,4,4\n"));
    }

    #[test]
    fn weighted_energy_examples() {
        let one = WeightedPointSet::uniform(vec![Point::new(0.0, 0.0), Point::new(0.0, 0.3), Point::new(0.05, 0.6)]).unwrap();
        let r = weighted_energy(&one, &[Direction::VERTICAL, Direction::from_vector(1.0, 0.0).unwrap()], 0.1, 0.0).unwrap();
        assert!((r.rows[1].energy - 1.0).abs() < 1e-15);
        assert!(r.rows[0].energy >= 1.0 / r.rows[0].occupied_tubes() as f64 - 1e-15);
        let two = WeightedPointSet::uniform(vec![Point::new(0.0, 0.0), Point::new(0.0, 0.5)]).unwrap();
        let e = Direction::from_vector(1.0, 0.0).unwrap();
        let v = weighted_energy(&two, &[e], 0.1, 0.5).unwrap();
        assert!((v.total - 2f64.powf(-1.5)).abs() < 1e-15);
        assert!(WeightedPointSet::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], vec![1.5, -0.5]).is_err());
        assert!(WeightedPointSet::new(vec![Point::new(0.0, 0.0)], vec![0.9]).is_err());
    }

    #[test]
    fn riesz_examples() {
        let one = WeightedPointSet::uniform(vec![Point::new(0.3, 0.3)]).unwrap();
        assert_eq!(riesz_energy(&one, 1.0), 0.0);
        let two = WeightedPointSet::uniform(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
        assert!((riesz_energy(&two, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn marstrand_examples() {
        let delta = 1.0 / 64.0;
        let c = line(64, delta);
        let s = marstrand_exceptional_scan(&c, delta, 0.5, 3.0).unwrap();
        assert!(s.indices.contains(&(s.net_size / 2)), "vertical direction collapses the line");
        assert!(!s.indices.contains(&0));
        // a closed radius-δ ball holds three consecutive points: ⌈64/3⌉
        assert_eq!(projected_cover(&c, &Direction::from_vector(1.0, 0.0).unwrap(), delta).unwrap(), 22);
        let err = marstrand_exceptional_scan(&grid(16, delta), delta, 0.5, 3.0).unwrap_err();
        assert!(err.to_string().contains("radius"));
    }

    #[test]
    fn split_examples() {
        let inside = [(0.0, 0.5), (0.01, 0.5)];
        let s = balanced_split(&inside, 0.01, 0.05, 0.1, 0.5).unwrap();
        assert_eq!(s.branch, SplitBranch::Concentrated);
        let uniform: Vec<(f64, f64)> = (0..=100).map(|i| (i as f64 * 0.01, 1.0 / 101.0)).collect();
        let u = balanced_split(&uniform, 0.01, 0.2, 1e-3, 0.5).unwrap();
        assert_eq!(u.branch, SplitBranch::Balanced);
        assert!((u.ratio() - 1.0).abs() < 1e-9, "{u:?}");
        let ends = [(0.0, 0.5), (1.0, 0.5)];
        let e = balanced_split(&ends, 0.01, 0.3, 1e-3, 0.5).unwrap();
        assert_eq!((e.branch, e.ratio()), (SplitBranch::Balanced, 1.0));
        let lopsided = [(0.0, 0.9), (1.0, 0.1)];
        assert!(balanced_split(&lopsided, 0.01, 0.3, 1e-3, 0.5).is_err());
    }

    #[test]
    fn iteration_examples() {
        let it = exponent_iteration(1.0 / 3.0, 0.5, 1.5, 1.0, 40).unwrap();
        assert!((it.limit - 0.5).abs() < 1e-15);
        assert!((it.taus[39] - 0.5).abs() < 1e-9);
        let fixed = exponent_iteration(1.0 / 3.0, 0.5, 1.5, 0.5, 5).unwrap();
        assert!(fixed.taus.iter().all(|t| (t - 0.5).abs() < 1e-15));
        let (s, g) = (0.4, 0.8);
        let opt = exponent_iteration(s, g, optimal_rho(s, g), 1.0, 3).unwrap();
        assert!((opt.limit - first_bound(s, g)).abs() < 1e-12);
        assert_eq!(opt.first_bound, Some(first_bound(s, g)));
        assert!(exponent_iteration(s, 1.0, 1.5, 1.0, 3).is_err());
    }

    proptest! {
        #[test]
        fn energy_dominates_cs(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..40), ang in 0.0f64..std::f64::consts::PI, delta in 0.01f64..0.3) {
            let c: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
            let r = counting_energy(&c, &[Direction::from_angle(ang)], delta).unwrap();
            let row = &r.rows[0];
            let total: f64 = row.histogram.iter().map(|h| h.1).sum();
            prop_assert_eq!(total, c.len() as f64);
            prop_assert_eq!(row.energy, row.histogram.iter().map(|h| h.1 * h.1).sum::<f64>());
            prop_assert!(row.energy * row.occupied_tubes() as f64 >= total * total);
        }

        #[test]
        fn pair_directions_bounded(x in (0.0f64..1.0, 0.0f64..1.0), y in (0.0f64..1.0, 0.0f64..1.0), k in 4u32..9) {
            let delta = 2f64.powi(-(k as i32));
            let (x, y) = (Point::new(x.0, x.1), Point::new(y.0, y.1));
            let d = x.dist(&y);
            prop_assume!(d >= delta);
            let net = direction_net(delta).unwrap();
            prop_assert!(pair_direction_count(&x, &y, &net, delta) as u64 <= pair_direction_bound(d));
        }

        #[test]
        fn iteration_monotone(s in 0.05f64..0.95, g in 0.05f64..0.95, rho in 1.0f64..3.0, t0 in -2.0f64..2.0) {
            let it = exponent_iteration(s, g, rho, t0, 30).unwrap();
            let mut prev = t0;
            for &t in &it.taus {
                prop_assert!((t - it.limit).abs() <= (prev - it.limit).abs() + 1e-12);
                prop_assert!((t - it.limit) * (t0 - it.limit) >= -1e-12);
                prev = t;
            }
        }

        #[test]
        fn riesz_scaling(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..12), r in 0.1f64..4.0, g in 0.1f64..1.9) {
            let c: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
            prop_assume!((0..c.len()).all(|i| (i + 1..c.len()).all(|j| c[i].dist(&c[j]) > 1e-3)));
            let mu = WeightedPointSet::uniform(c.clone()).unwrap();
            let scaled = WeightedPointSet::uniform(c.iter().map(|p| Point::new(p.x * r, p.y * r)).collect()).unwrap();
            let (a, b) = (riesz_energy(&mu, g), riesz_energy(&scaled, g));
            prop_assert!((b - a * r.powf(-g)).abs() <= 1e-9 * a.max(1.0));
        }
    }
}

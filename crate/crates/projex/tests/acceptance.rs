//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits nonzero when any criterion fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use projex::analysis::{counting_energy, direction_net, exponent_iteration, extract_delta_one_subset, marstrand_exceptional_scan, optimal_rho};
use projex::bounds::{estimate_bound1, estimate_bound2, falconer_howroyd, fh_lower};
use projex::cli::{cs_certificate, incidence_instance, product_counts, pythagorean_pair, random_ball_union, random_rational_points};
use projex::constructions::blocks::DirectionCardStream;
use projex::constructions::main2::{main2_profile, verify_main2};
use projex::constructions::main_cascade::{diagonal_pair, verify_main_content};
use projex::constructions::{construct_bigex, construct_main, construct_main2, BlockSkeleton, GenSet, Main2Params, MainParams};
use projex::covering::{covering_number_1d, estimate_box_dimension, packing_number_1d, ScaleEntry, ScaleProfile};
use projex::exact::{rat, rint};
use projex::geometry::{Direction, IntervalUnion, Point};
use projex::incidence::{grid_check, grid_points};

const GRID_RUNTIME: Duration = Duration::from_secs(10);
const SKELETON_RUNTIME: Duration = Duration::from_secs(60);
const MAIN_RUNTIME: Duration = Duration::from_secs(30);
const BIGEX_RUNTIME: Duration = Duration::from_secs(300);
const MARSTRAND_CONSTANT: f64 = 64.0;
const MARSTRAND_A: f64 = 3.0;
const INCIDENCE_CONSTANT: f64 = 8.0;
const CERTIFICATE_CAP: f64 = 0.5;
const CONTENT_CAP: f64 = 1.0;
const BOUNDS_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 1e-9;
const MAIN2_SLOPE_CAP: f64 = 0.55;
const SANDWICH_CASES: usize = 10_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: projex::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn dyadic(i: u32) -> BigRational {
    rat(1, 1 << i)
}

fn grid_suite() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 2..=64u64 {
        for p in 1..=5u64 {
            for q in 1..=5u64 {
                let g = lib(grid_check(n, p, q))?;
                check(g.cardinality <= (1 + p) * (1 + q) * n, || format!("n={n} p={p} q={q}: {} > bound", g.cardinality))?;
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < GRID_RUNTIME, || format!("runtime {elapsed:?}"))?;
    // direct oracle: distinct values of q·x + p·y on {1..n}²
    for n in [2u64, 7, 16, 33] {
        for (p, q) in [(1u64, 1u64), (2, 3), (5, 4)] {
            let vals: HashSet<u64> = (1..=n).flat_map(|x| (1..=n).map(move |y| q * x + p * y)).collect();
            let g = lib(grid_check(n, p, q))?;
            check(g.cardinality == vals.len() as u64, || format!("n={n} p={p} q={q}: {} vs oracle {}", g.cardinality, vals.len()))?;
        }
    }
    Ok(format!("{checked} triples, 0 violations, {elapsed:.2?}"))
}

fn skeleton_suite() -> Outcome {
    let mut notes = Vec::new();
    for (n, d) in [(3u32, 3u32), (3, 4), (4, 3)] {
        let start = Instant::now();
        let sk = lib(BlockSkeleton::new(n, d))?;
        check(sk.x_coordinates_are_half_integers(), || format!("({n},{d}): x-coordinate form"))?;
        let kmax = (sk.nf as u64).pow(d - 3) as i64;
        for k in 1..=kmax {
            sk.check_line_intersections(k).map_err(|(key, total)| format!("({n},{d}) k={k} key={key}: {total} points"))?;
        }
        let bound = 3u128 * (sk.nf as u128).pow(1 + d);
        let mut max_card = 0;
        for (k, c) in lib(DirectionCardStream::new(&sk))?.take(kmax as usize) {
            check(c as u128 <= bound, || format!("({n},{d}) k={k}: card {c} > {bound}"))?;
            max_card = max_card.max(c);
        }
        let elapsed = start.elapsed();
        if (n, d) == (3, 4) {
            check(elapsed < SKELETON_RUNTIME, || format!("(3,4) runtime {elapsed:?}"))?;
        }
        notes.push(format!("({n},{d}) card {max_card}<={bound} {elapsed:.2?}"));
    }
    Ok(notes.join(", "))
}

fn incidence_suite() -> Outcome {
    let mut sets: Vec<Vec<_>> = (2..=14).map(grid_points).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    sets.extend((0..500).map(|_| random_rational_points(12, &mut rng)));
    let mut worst = 0.0f64;
    for (i, pts) in sets.iter().enumerate() {
        for s in [0.5, 0.6, 0.75] {
            let (count, bound, identity, _) = lib(incidence_instance(pts, s))?;
            check((bound - INCIDENCE_CONSTANT * (pts.len() as f64).powf(2.0 * s - 1.0)).abs() == 0.0, || "bound formula".into())?;
            check(count as f64 <= bound, || format!("set {i} s={s}: {count} > {bound}"))?;
            check(identity, || format!("set {i} s={s}: incidence identity fails"))?;
            worst = worst.max(count as f64 / bound);
        }
    }
    Ok(format!("{} sets, largest count/bound {worst:.4}", sets.len()))
}

fn marstrand_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let xi = Direction::from_angle(0.0);
    let mut runs = 0;
    let mut directions = 0;
    for n in [256usize, 1024, 4096] {
        let pts: Vec<Point> = (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        for i in 6..=12 {
            let delta = (-(i as f64)).exp2();
            let c = lib(extract_delta_one_subset(&pts, delta, &xi))?;
            for tau in [0.3, 0.5, 0.7] {
                let scan = lib(marstrand_exceptional_scan(&c, delta, tau, MARSTRAND_A))?;
                let bound = MARSTRAND_CONSTANT * delta.powf(tau - 1.0) * (1.0 / delta).ln();
                check(scan.count as f64 <= bound, || format!("n={n} delta=2^-{i} tau={tau}: {} > {bound}", scan.count))?;
                runs += 1;
            }
            let rep = lib(counting_energy(&c, &lib(direction_net(delta))?, delta))?;
            for row in &rep.rows {
                check(cs_certificate(&row.histogram), || format!("n={n} delta=2^-{i}: certificate fails at {}", row.direction_index))?;
            }
            directions += rep.rows.len();
        }
    }
    Ok(format!("{runs} scans within bound, certificate exact in {directions} directions"))
}

fn main_suite() -> Outcome {
    let start = Instant::now();
    let steps = 6;
    let (mmax, nmax) = (1..=steps).map(diagonal_pair).fold((1, 1), |(a, b), (m, n)| (a.max(m), b.max(n)));
    let c = lib(construct_main(&lib(MainParams::pythagorean(mmax, nmax, 0.9))?, steps))?;
    let Some(GenSet::Balls(k)) = c.generations.last().and_then(|g| g.set.as_ref()) else {
        return Err("last generation has no balls".into());
    };
    let sum = k.diameter_sum();
    check(sum == BigRational::one(), || format!("diameter sum {sum}"))?;
    let mut worst_cert = 0.0f64;
    for st in &c.states {
        if let Some(cert) = st.certificate {
            check(cert <= CERTIFICATE_CAP, || format!("step {}: certificate {cert}", st.step))?;
            worst_cert = worst_cert.max(cert);
        }
    }
    let mut worst = 0.0f64;
    for (st, row) in c.states.iter().zip(lib(verify_main_content(&c, 16))?) {
        for (e, v) in row {
            check(v <= CONTENT_CAP, || format!("step {} direction ({}, {}): content proxy {v}", st.step, e.x, e.y))?;
            worst = worst.max(v);
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < MAIN_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("certificates <= {worst_cert:.4}, content proxy <= {worst:.6}, {elapsed:.2?}"))
}

fn main2_suite() -> Outcome {
    let start = Instant::now();
    let st = lib(construct_main2(&Main2Params::default_schedule(1.0, 3), 3))?;
    let reps = lib(verify_main2(&st, 32, 16))?;
    check(reps.len() == 4, || format!("{} level reports", reps.len()))?;
    let mut checked = 0;
    for r in &reps {
        check(r.passed(), || format!("level {} fails: {r:?}", r.level))?;
        checked += r.iii_checked + r.tech_checked;
    }
    Ok(format!("levels 0..=3, {checked} cover checks, 0 violations, {:.1?}", start.elapsed()))
}

fn product_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut checks = 0;
    for idx in 0..100 {
        let k = random_ball_union(&mut rng);
        let (c, s) = pythagorean_pair(rng.gen_range(0..=12), rng.gen_range(1..=12));
        check(&c * &c + &s * &s == BigRational::one(), || "axis pair not orthonormal".into())?;
        for i in 4..=10 {
            let (full, ne, nx) = lib(product_counts(&k, &c, &s, &dyadic(i)))?;
            check(full as u128 <= ne as u128 * nx as u128, || format!("union {idx} delta=2^-{i}: {full} > {ne}*{nx}"))?;
            checks += 1;
        }
    }
    Ok(format!("100 unions, {checks} exact checks"))
}

fn sandwich_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for case in 0..SANDWICH_CASES {
        let k = rng.gen_range(1..=6);
        let raw = (0..k)
            .map(|_| {
                let a = rng.gen_range(-64..=64);
                (rat(a, 16), rat(a + rng.gen_range(0..=24), 16))
            })
            .collect();
        let u = lib(IntervalUnion::new(raw))?;
        let delta = rat(rng.gen_range(1..=8), rng.gen_range(1..=32));
        let n2 = lib(covering_number_1d(&u, &(&delta * rint(2))))?;
        let p = lib(packing_number_1d(&u, &delta))?;
        let nh = lib(covering_number_1d(&u, &(&delta / rint(2))))?;
        check(n2 <= p && p <= nh, || format!("case {case}: N(2d)={n2} P(d)={p} N(d/2)={nh}"))?;
    }
    Ok(format!("{SANDWICH_CASES} random unions, 0 violations"))
}

fn bounds_suite() -> Outcome {
    let mut worst = 0.0f64;
    for i in 1..=50 {
        for j in 1..=50 {
            let g = i as f64 / 50.0 * 0.98 + 0.01;
            let s = j as f64 / 51.0 * g;
            let it = lib(exponent_iteration(s, g, optimal_rho(s, g), 1.0, 1))?;
            let b = lib(estimate_bound1(g, s))?;
            // the limit is a fixed point of τ ↦ ρσ − γ(ρ − 1) + (1 − γ)τ
            let rho = optimal_rho(s, g);
            let image = rho * s - g * (rho - 1.0) + (1.0 - g) * it.limit;
            let err = (it.limit - b).abs().max((image - it.limit).abs());
            check(err <= BOUNDS_TOL, || format!("gamma={g} sigma={s}: error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    for g in [0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
        let limits = [(lib(estimate_bound1(g, g))?, 1.0), (lib(estimate_bound1(g, g / 2.0))?, g / (1.0 + g)), (lib(estimate_bound2(g, g / 2.0))?, g / 2.0), (lib(estimate_bound2(g, g))?, 2.0 - g)];
        for (k, (v, want)) in limits.iter().enumerate() {
            check((v - want).abs() <= BOUNDS_TOL, || format!("gamma={g} limit {k}: {v} vs {want}"))?;
        }
    }
    // γ/(1 + (1 − 1/2)γ) = 2γ/(2 + γ) in exact arithmetic, and bitwise in f64
    for (a, b) in [(1i64, 10i64), (1, 4), (1, 2), (3, 4), (1, 1), (3, 2), (2, 1)] {
        let g = rat(a, b);
        let lhs = &g / (BigRational::one() + (BigRational::one() - rat(1, 2)) * &g);
        let rhs = rint(2) * &g / (rint(2) + &g);
        check(lhs == rhs, || format!("gamma={g}: {lhs} vs {rhs}"))?;
        let gf = a as f64 / b as f64;
        let (v, w) = (lib(falconer_howroyd(gf, 1.0))?, lib(fh_lower(gf))?);
        check(v == w, || format!("gamma={gf}: {v} vs {w}"))?;
    }
    Ok(format!("2500 fixed points (max error {worst:.1e}), 24 limits, 7 exact identities"))
}

fn dimension_suite() -> Outcome {
    for s in [0.25, 0.5, 1.0, 1.5] {
        let entries = (0..=8u32).map(|k| ScaleEntry { delta: (-(4.0 * k as f64)).exp2(), n: (4.0 * k as f64 * s).exp2() as u64, p: None }).collect();
        let est = lib(estimate_box_dimension(&lib(ScaleProfile::new(entries, 2))?))?;
        check((est.slope - s).abs() <= SLOPE_TOL, || format!("s={s}: slope {}", est.slope))?;
    }
    let st = lib(construct_main2(&Main2Params::default_schedule(1.0, 3), 3))?;
    let lv = &st.levels[3];
    let step = lv.tags.len().div_ceil(16).max(1);
    let mut worst = 0.0f64;
    let mut swept = 0;
    for t in lv.tags.iter().step_by(step) {
        let entries = lib(main2_profile(&st, 3, *t, 1))?.into_iter().map(|(delta, n)| ScaleEntry { delta, n: u64::try_from(n).unwrap_or(u64::MAX), p: None }).collect();
        let est = lib(estimate_box_dimension(&lib(ScaleProfile::new(entries, 2))?))?;
        check(est.slope <= MAIN2_SLOPE_CAP, || format!("tag {}/{}: slope {}", t.p, t.q, est.slope))?;
        worst = worst.max(est.slope);
        swept += 1;
    }
    Ok(format!("4 synthetic slopes exact, {swept} generation-3 directions with slope <= {worst:.4}"))
}

fn bigex_suite() -> Outcome {
    let start = Instant::now();
    let rep = lib(construct_bigex(0.76, 1))?;
    let e = rep.expansion.as_ref().ok_or("no expansion at depth 1")?;
    check(rep.root_ind.violations == 0 && rep.child_ind.violations == 0, || format!("(IND) violations: root {}, children {}", rep.root_ind.violations, rep.child_ind.violations))?;
    check(e.c_child < rint(2), || format!("c_w = {}", e.c_child))?;
    check(e.arcs_disjoint, || "child arcs overlap".into())?;
    check(rep.passed(), || "certificate suite fails".into())?;
    let elapsed = start.elapsed();
    check(elapsed < BIGEX_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("(IND) {} + {} checks, c_w = {}, {} children, {elapsed:.1?}", rep.root_ind.checked, rep.child_ind.checked, e.c_child, e.children))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("grid projection bound", grid_suite),
        ("skeleton line intersections", skeleton_suite),
        ("exceptional directions of finite sets", incidence_suite),
        ("delta-discretised exceptional scan", marstrand_suite),
        ("main cascade", main_suite),
        ("main2 invariants", main2_suite),
        ("product inequality", product_suite),
        ("1-D covering/packing sandwich", sandwich_suite),
        ("bound identities", bounds_suite),
        ("box-dimension estimator", dimension_suite),
        ("bigex depth 1", bigex_suite),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

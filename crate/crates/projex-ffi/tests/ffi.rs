use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use projex_ffi::*;

fn last_error() -> String {
    let p = projex_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn absent() -> ProjexBoundQuery {
    ProjexBoundQuery { gamma: f64::NAN, sigma: f64::NAN, s: f64::NAN, tau: f64::NAN, m: f64::NAN }
}

#[test]
fn grid_handle_and_cardinality() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(projex_point_set_grid(3, &mut g), ProjexStatus::Ok);
        assert_eq!(projex_point_set_len(g), 9);
        let mut card = 0u64;
        assert_eq!(projex_projection_cardinality(g, 1, 0, &mut card), ProjexStatus::Ok);
        assert_eq!(card, 3);
        // x + y takes the values 2..=6 on {1,2,3}²
        assert_eq!(projex_projection_cardinality(g, 1, 1, &mut card), ProjexStatus::Ok);
        assert_eq!(card, 5);
        assert_eq!(projex_projection_cardinality(g, 0, 0, &mut card), ProjexStatus::InvalidArgument);
        let mut count = 0u64;
        assert_eq!(projex_exceptional_direction_count(g, 0.5, &mut count), ProjexStatus::Ok);
        // only the two axis directions give 3 = 9^{1/2} values
        assert_eq!(count, 2);
        projex_point_set_free(g);
    }
}

#[test]
fn rational_point_set_dedups() {
    let (xn, xd, yn, yd) = ([1i64, 2, 1], [2i64, 4, 3], [0i64, 0, 1], [1i64, 1, 1]);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(projex_point_set_new(xn.as_ptr(), xd.as_ptr(), yn.as_ptr(), yd.as_ptr(), 3, &mut s), ProjexStatus::Ok);
        assert_eq!(projex_point_set_len(s), 2);
        projex_point_set_free(s);
        let zero = [0i64; 3];
        assert_eq!(projex_point_set_new(xn.as_ptr(), zero.as_ptr(), yn.as_ptr(), yd.as_ptr(), 3, &mut s), ProjexStatus::InvalidArgument);
        assert!(last_error().contains("denominator"));
        assert_eq!(projex_point_set_new(ptr::null(), xd.as_ptr(), yn.as_ptr(), yd.as_ptr(), 3, &mut s), ProjexStatus::NullPointer);
    }
}

#[test]
fn grid_check_matches_bound() {
    let mut g = ProjexGridCheck::default();
    unsafe {
        assert_eq!(projex_grid_check(4, 1, 1, &mut g), ProjexStatus::Ok);
    }
    // x + y on {1..4}² takes 7 values
    assert_eq!((g.cardinality, g.bound, g.holds), (7, 16, 1));
    unsafe {
        assert_eq!(projex_grid_check(0, 1, 1, &mut g), ProjexStatus::InvalidArgument);
        assert_eq!(projex_grid_check(4, 1, 1, ptr::null_mut()), ProjexStatus::NullPointer);
    }
}

#[test]
fn ball_union_cover() {
    let (xn, xd, yn, yd) = ([0i64, 3], [1i64, 1], [0i64, 0], [1i64, 1]);
    unsafe {
        let mut pts = ptr::null_mut();
        assert_eq!(projex_point_set_new(xn.as_ptr(), xd.as_ptr(), yn.as_ptr(), yd.as_ptr(), 2, &mut pts), ProjexStatus::Ok);
        let mut k = ptr::null_mut();
        assert_eq!(projex_ball_union_new(pts, 1, 2, &mut k), ProjexStatus::Ok);
        assert_eq!(projex_ball_union_len(k), 2);
        let mut n = 0u64;
        // projections [−1/2, 1/2] ∪ [5/2, 7/2] on the x-axis
        assert_eq!(projex_projection_cover(k, 1, 0, 1, 2, &mut n), ProjexStatus::Ok);
        assert_eq!(n, 2);
        assert_eq!(projex_projection_cover(k, 1, 0, 1, 4, &mut n), ProjexStatus::Ok);
        assert_eq!(n, 4);
        // the y-axis projection is the single interval [−1/2, 1/2]
        assert_eq!(projex_projection_cover(k, 0, 1, 1, 4, &mut n), ProjexStatus::Ok);
        assert_eq!(n, 2);
        assert_eq!(projex_projection_cover(k, 1, 0, -1, 4, &mut n), ProjexStatus::InvalidArgument);
        assert_eq!(projex_ball_union_new(pts, 0, 1, &mut k), ProjexStatus::InvalidArgument);
        projex_ball_union_free(k);
        projex_point_set_free(pts);
        let mut b = ptr::null_mut();
        assert_eq!(projex_block_b(3, 3, &mut b), ProjexStatus::Ok);
        assert_eq!(projex_ball_union_len(b), 7776);
        projex_ball_union_free(b);
        assert_eq!(projex_block_b(3, 2, &mut b), ProjexStatus::InvalidArgument);
    }
}

#[test]
fn bounds_through_c_abi() {
    let name = CString::new("estimate1").unwrap();
    let mut q = absent();
    q.gamma = 1.0;
    q.sigma = 0.5;
    let mut v = 0.0;
    unsafe {
        assert_eq!(projex_bounds_evaluate(name.as_ptr(), &q, &mut v), ProjexStatus::Ok);
    }
    assert_eq!(v, 0.5);
    let fh = CString::new("falconer-howroyd").unwrap();
    q.sigma = 1.0;
    unsafe {
        assert_eq!(projex_bounds_evaluate(fh.as_ptr(), &q, &mut v), ProjexStatus::Ok);
    }
    assert!((v - 2.0 / 3.0).abs() < 1e-15);
    let unknown = CString::new("nope").unwrap();
    unsafe {
        assert_eq!(projex_bounds_evaluate(unknown.as_ptr(), &q, &mut v), ProjexStatus::InvalidArgument);
    }
    assert!(last_error().contains("nope"));
    q.gamma = f64::NAN;
    unsafe {
        assert_eq!(projex_bounds_evaluate(name.as_ptr(), &q, &mut v), ProjexStatus::InvalidArgument);
    }
}

#[test]
fn box_dimension_of_exact_profile() {
    // N = 2^i at δ = 2^{−i}
    let deltas = [1.0, 0.5, 0.25, 0.125];
    let counts = [1u64, 2, 4, 8];
    let mut s = 0.0;
    unsafe {
        assert_eq!(projex_box_dimension(deltas.as_ptr(), counts.as_ptr(), 4, 2, &mut s), ProjexStatus::Ok);
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(projex_box_dimension(deltas.as_ptr(), counts.as_ptr(), 2, 2, &mut s), ProjexStatus::InvalidArgument);
    }
}

#[test]
fn bigex_root_only() {
    let mut h = ptr::null_mut();
    let mut sum = ProjexBigexSummary::default();
    unsafe {
        assert_eq!(projex_bigex_new(0.76, 0, &mut h), ProjexStatus::Ok);
        assert_eq!(projex_bigex_summary(h, &mut sum), ProjexStatus::Ok);
        projex_bigex_free(h);
        assert_eq!(projex_bigex_summary(ptr::null(), &mut sum), ProjexStatus::NullPointer);
    }
    assert_eq!((sum.passed, sum.expanded, sum.root_violations), (1, 0, 0));
    assert!(sum.root_checks > 0);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(projex_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("projex.h").exists());
    let lib = target_dir().join("libprojex_ffi.a");
    let cc = ["cc", "clang", "gcc"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok());
    let (Some(cc), true) = (cc, lib.exists()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <math.h>
#include "projex.h"
int main(void) {
    ProjexPointSet *g = NULL;
    if (projex_point_set_grid(4, &g) != PROJEX_STATUS_OK) return 10;
    uint64_t card = 0;
    if (projex_projection_cardinality(g, 1, 1, &card) != PROJEX_STATUS_OK) return 11;
    projex_point_set_free(g);
    ProjexBoundQuery q = { 1.0, 0.5, NAN, NAN, NAN };
    double v = 0.0;
    if (projex_bounds_evaluate("estimate1", &q, &v) != PROJEX_STATUS_OK) return 12;
    if (projex_bounds_evaluate("nope", &q, &v) != PROJEX_STATUS_INVALID_ARGUMENT) return 13;
    printf("%llu %g %s\n", (unsigned long long)card, v, projex_last_error() ? "err" : "none");
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let out = Command::new(cc).arg(&src).arg("-I").arg(&header_dir).arg(&lib).args(["-lpthread", "-ldl", "-lm", "-o"]).arg(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "7 0.5 err\n");
}

use std::path::Path;
use std::process::{Command, Output};

fn projex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projex")).args(args).env_remove("PROJEX_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn grid_suite_reports_zero_violations() {
    let o = projex(&["verify", "grid", "--pmax", "5", "--qmax", "5", "--nmax", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 violations"), "{}", stdout(&o));
}

#[test]
fn line_intersections_at_three() {
    let o = projex(&["verify", "line-intersect", "--n", "3", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("every meeting line hits S_n^+ in 6 points"), "{}", stdout(&o));
}

#[test]
fn bounds_eval_table() {
    let o = projex(&["bounds", "eval", "--formula", "estimate1", "--gamma", "1", "--sigma", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "formula,params,value\nestimate1,gamma=1;sigma=0.5,0.5\n");
}

#[test]
fn configuration_errors_exit_two() {
    let o = projex(&["bounds", "eval", "--formula", "nope", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert_eq!(projex(&["verify", "grid", "--nmin", "9", "--nmax", "3"]).status.code(), Some(2));
    assert_eq!(projex(&["no-such-command"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[verify.grid]\npmax = 2\nbogus = 1\n").unwrap();
    let o = projex(&["--config", p(&cfg), "verify", "grid"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[verify.grid]\npmax = 2\nqmax = 2\nnmin = 2\nnmax = 4\n").unwrap();
    let o = projex(&["--config", p(&cfg), "verify", "grid"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("grid suite: 12 triples"), "{}", stdout(&o));
    let o = projex(&["--config", p(&cfg), "verify", "grid", "--nmax", "5"]);
    assert!(stdout(&o).contains("grid suite: 16 triples"), "{}", stdout(&o));
}

#[test]
fn verification_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    assert_eq!(projex(&["sweep", "--source", "grid:8", "--directions", "3", "--imin", "1", "--imax", "5", "--out", p(&sweep)]).status.code(), Some(0));
    let o = projex(&["dimest", "--input", p(&sweep), "--max-slope", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("violation: direction"));
    assert_eq!(projex(&["dimest", "--input", p(&sweep), "--max-slope", "2"]).status.code(), Some(0));
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = projex(&["sweep", "--source", "random:300", "--seed", seed, "--directions", "8", "--imin", "2", "--imax", "7", "--out", p(&out)]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    let (a, b, c) = (run("a.csv", "7"), run("b.csv", "7"), run("c.csv", "8"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with(b"direction_index,ex,ey,delta,N,P\n"));
}

#[test]
fn sweep_svg_embeds_rows() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("plot.svg");
    let o = projex(&["sweep", "--source", "grid:4", "--directions", "2", "--imin", "1", "--imax", "3", "--svg", p(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.matches("<!-- ").count() >= 6);
}

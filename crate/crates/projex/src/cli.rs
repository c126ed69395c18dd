//! Experiment runner behind the `projex` binary.
//!
//! Every subcommand reads its parameters from the matching section of an
//! optional TOML file (`--config`) and lets command-line flags override them:
//!
//! ```toml
//! cap = 100000000
//!
//! [verify.grid]
//! pmax = 5
//! nmax = 64
//!
//! [sweep]
//! source = "block:3:3"
//! directions = 16
//! imax = 12
//! ```
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on configuration
//! or input errors. Verification summaries go to stdout; tables go to `--out`
//! or stdout, in which case summaries of table-producing commands go to
//! stderr.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{counting_energy, direction_net, extract_delta_one_subset, marstrand_exceptional_scan, riesz_energy, weighted_energy, WeightedPointSet};
use crate::bounds::{evaluate, BoundQuery, FORMULAS};
use crate::constructions::blocks::DirectionCardStream;
use crate::constructions::main2::{main2_profile, simplest_tag, verify_main2};
use crate::constructions::main_cascade::verify_main_content;
use crate::constructions::set_e::check_set_e;
use crate::constructions::textfmt::{read_generations, write_generations};
use crate::constructions::{block_B, construct_bigex, construct_main, construct_main2, construct_set_e, BlockSkeleton, GenSet, Generation, Main2Params, MainParams};
use crate::covering::{covering_number_2d, direction_sweep, estimate_box_dimension, mesh_count_1d, CoverMode, Planar, ScaleEntry, ScaleProfile};
use crate::error::{Error, Result};
use crate::exact::{rat, Rat};
use crate::geometry::{rational_direction, BallUnion, Direction, IntervalUnion, Point, PointSet, RatPoint, SquareUnion};
use crate::incidence::{exceptional_direction_count, fiber_family, incidence_count, rotate_points, IntDir};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "projex", version, about = "Projections of planar fractal sets: constructions, sweeps and exact verification suites")]
pub struct Cli {
    /// TOML file with one section per pipeline; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Bound on materialised objects; overrides `PROJEX_CAP`.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a nested construction and write its generations.
    Construct {
        #[command(subcommand)]
        which: ConstructCmd,
    },
    /// Covering and packing numbers of projections over directions and scales.
    Sweep(SweepArgs),
    /// Box-dimension estimates from a profile or sweep table.
    Dimest(DimestArgs),
    /// Tube energies over a direction net.
    Energy(EnergyArgs),
    /// Exact verification suites.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Closed-form exponent bounds.
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConstructCmd {
    Main(MainArgs),
    Main2(Main2Args),
    #[command(name = "set-e")]
    SetE(SetEArgs),
    Bigex(BigexArgs),
    Block(BlockArgs),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    Grid(GridArgs),
    #[command(name = "line-intersect")]
    LineIntersect(LineArgs),
    Marstrand(MarstrandArgs),
    Incidence(IncidenceArgs),
    Product(ProductArgs),
    #[command(name = "setE", alias = "set-e")]
    SetE(SetEArgs),
    Main(MainArgs),
    Main2(Main2Args),
    Bigex(BigexArgs),
}

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    Eval(EvalArgs),
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct MainArgs {
    /// Diagonal steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Ratio `r` of the exponents `s_n = r^n`.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Sampled directions per arc for the content proxy.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct Main2Args {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub e_per_arc: Option<usize>,
    #[arg(long)]
    pub l_per_level: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct SetEArgs {
    /// Increasing exponents `t_j` in (0, 1), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct BigexArgs {
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct BlockArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    /// `grid:N`, `random:N`, `block:n:d`, `file:PATH` or `main2:gamma:depth`.
    #[arg(long)]
    pub source: Option<String>,
    /// Generation level for `file:` sources (default: last with a set).
    #[arg(long)]
    pub level: Option<usize>,
    /// Number of rational directions.
    #[arg(long)]
    pub directions: Option<usize>,
    /// Scales `δ = 2^{−i}` for `imin ≤ i ≤ imax`.
    #[arg(long)]
    pub imin: Option<u32>,
    #[arg(long)]
    pub imax: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional log-log plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct DimestArgs {
    /// CSV with `delta,N[,P]` or a sweep table.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Ambient dimension bounding the slope.
    #[arg(long)]
    pub ambient: Option<u32>,
    /// Fail when any slope exceeds this value.
    #[arg(long)]
    pub max_slope: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyArgs {
    /// `grid:N`, `random:N`, `block:n:d` or `file:PATH`.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub level: Option<usize>,
    /// Net and tube width `δ = 2^{−i}`.
    #[arg(long)]
    pub delta_exp: Option<u32>,
    /// Tube width (default `δ`).
    #[arg(long)]
    pub width: Option<f64>,
    /// Kernel exponent `κ` of the weights `|e − e'|^{−κ}`; 0 gives counting energy.
    #[arg(long)]
    pub kernel: Option<f64>,
    /// Also report the Riesz energy `I_γ` of the uniform measure.
    #[arg(long)]
    pub riesz: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct GridArgs {
    #[arg(long)]
    pub pmax: Option<u64>,
    #[arg(long)]
    pub qmax: Option<u64>,
    #[arg(long)]
    pub nmin: Option<u64>,
    #[arg(long)]
    pub nmax: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct LineArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct MarstrandArgs {
    /// Random input points before extraction.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub delta_exp: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub tau: Vec<f64>,
    /// `(δ,1)`-set constant.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct IncidenceArgs {
    /// Side of the grid `{1..n}²`; ignored when `points` is set.
    #[arg(long)]
    pub grid: Option<i64>,
    /// Size of random rational point sets.
    #[arg(long)]
    pub points: Option<usize>,
    /// Number of random sets.
    #[arg(long)]
    pub sets: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct ProductArgs {
    /// Number of random ball unions.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub imin: Option<u32>,
    #[arg(long)]
    pub imax: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct EvalArgs {
    /// Formula name or `all`.
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the pipeline and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Condition(_) => EXIT_FAILED,
                _ => EXIT_CONFIG,
            }
        }
    }
}

/// Runs a parsed command; `Ok(false)` is a failed verification.
pub fn execute(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli.config.as_deref())?;
    let cap = match cli.cap {
        Some(c) => Some(c),
        None => match cfg.get("cap") {
            Some(v) => Some(v.as_integer().filter(|c| *c >= 1).ok_or_else(|| Error::Config("cap must be a positive integer".into()))? as u64),
            None => None,
        },
    };
    if let Some(c) = cap {
        if c == 0 {
            return Err(Error::Config("cap must be at least 1".into()));
        }
        std::env::set_var("PROJEX_CAP", c.to_string());
    }
    match &cli.command {
        Command::Construct { which } => match which {
            ConstructCmd::Main(a) => construct_main_cmd(&resolve(a, &cfg, "construct.main")?, false),
            ConstructCmd::Main2(a) => construct_main2_cmd(&resolve(a, &cfg, "construct.main2")?),
            ConstructCmd::SetE(a) => set_e_cmd(&resolve(a, &cfg, "construct.set-e")?, false),
            ConstructCmd::Bigex(a) => bigex_cmd(&resolve(a, &cfg, "construct.bigex")?, false),
            ConstructCmd::Block(a) => block_cmd(&resolve(a, &cfg, "construct.block")?),
        },
        Command::Sweep(a) => sweep_cmd(&resolve(a, &cfg, "sweep")?),
        Command::Dimest(a) => dimest_cmd(&resolve(a, &cfg, "dimest")?),
        Command::Energy(a) => energy_cmd(&resolve(a, &cfg, "energy")?),
        Command::Verify { which } => match which {
            VerifyCmd::Grid(a) => verify_grid(&resolve(a, &cfg, "verify.grid")?),
            VerifyCmd::LineIntersect(a) => verify_line_intersect(&resolve(a, &cfg, "verify.line-intersect")?),
            VerifyCmd::Marstrand(a) => verify_marstrand(&resolve(a, &cfg, "verify.marstrand")?),
            VerifyCmd::Incidence(a) => verify_incidence(&resolve(a, &cfg, "verify.incidence")?),
            VerifyCmd::Product(a) => verify_product(&resolve(a, &cfg, "verify.product")?),
            VerifyCmd::SetE(a) => set_e_cmd(&resolve(a, &cfg, "verify.setE")?, true),
            VerifyCmd::Main(a) => construct_main_cmd(&resolve(a, &cfg, "verify.main")?, true),
            VerifyCmd::Main2(a) => verify_main2_cmd(&resolve(a, &cfg, "verify.main2")?),
            VerifyCmd::Bigex(a) => bigex_cmd(&resolve(a, &cfg, "verify.bigex")?, true),
        },
        Command::Bounds { which } => match which {
            BoundsCmd::Eval(a) => bounds_eval(&resolve(a, &cfg, "bounds.eval")?),
        },
    }
}

const SECTIONS: [&str; 6] = ["construct", "sweep", "dimest", "energy", "verify", "bounds"];

fn load_config(path: Option<&Path>) -> Result<toml::Table> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    for key in table.keys() {
        if key != "cap" && !SECTIONS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown config key `{key}`")));
        }
    }
    Ok(table)
}

/// Config section overlaid with every flag given on the command line.
fn resolve<T: Serialize + DeserializeOwned>(cli: &T, cfg: &toml::Table, section: &str) -> Result<T> {
    let mut node = Some(cfg);
    for part in section.split('.') {
        node = match node.and_then(|t| t.get(part)) {
            Some(toml::Value::Table(t)) => Some(t),
            Some(_) => return Err(Error::Config(format!("`{section}` must be a table"))),
            None => None,
        };
    }
    let mut merged = node.cloned().unwrap_or_default();
    let flags = toml::Table::try_from(cli).map_err(|e| Error::Config(e.to_string()))?;
    for (k, v) in flags {
        if !matches!(&v, toml::Value::Array(a) if a.is_empty()) {
            merged.insert(k, v);
        }
    }
    toml::Value::Table(merged).try_into().map_err(|e: toml::de::Error| Error::Config(format!("[{section}] {}", e.message())))
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Summary sink: stdout when the table goes to a file, stderr otherwise.
fn note(table_to_file: bool, line: &str) {
    if table_to_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn dyadic(i: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << i)
}

fn scale_exponents(imin: u32, imax: u32) -> Result<Vec<u32>> {
    if imin > imax || imax > 60 {
        return config_err("scales need imin <= imax <= 60");
    }
    Ok((imin..=imax).collect())
}

/// `count` rational directions, evenly spread in angle over `(−π/2, π/2)`.
pub fn rational_directions(count: usize) -> Result<Vec<Direction>> {
    if count == 0 {
        return config_err("need at least one direction");
    }
    let w = PI / (8.0 * count as f64);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let theta = -PI / 2.0 + PI * (i as f64 + 0.5) / count as f64;
        let t = simplest_tag(theta, w)?;
        out.push(rational_direction(t.p, t.q)?);
    }
    Ok(out)
}

fn write_gens(path: Option<&Path>, gens: &[Generation]) -> Result<()> {
    let mut w = open_out(path)?;
    write_generations(&mut w, gens)?;
    w.flush()?;
    Ok(())
}

fn construct_main_cmd(a: &MainArgs, verify: bool) -> Result<bool> {
    let steps = a.steps.unwrap_or(6);
    let samples = a.samples.unwrap_or(16);
    if steps == 0 {
        return config_err("steps must be at least 1");
    }
    let (mut mmax, mut nmax) = (1, 1);
    for step in 1..=steps {
        let (m, n) = crate::constructions::main_cascade::diagonal_pair(step);
        mmax = mmax.max(m);
        nmax = nmax.max(n);
    }
    let params = MainParams::pythagorean(mmax, nmax, a.ratio.unwrap_or(0.9))?;
    let c = construct_main(&params, steps)?;
    let to_file = a.out.is_some() || verify;
    if !verify || a.out.is_some() {
        write_gens(a.out.as_deref(), &c.generations)?;
    }
    let mut ok = true;
    let last = c.generations.last().and_then(|g| match &g.set {
        Some(GenSet::Balls(b)) => Some(b),
        _ => None,
    });
    if let Some(b) = last {
        let sum = b.diameter_sum();
        note(to_file, &format!("diameter sum after {steps} steps: {sum}"));
        if sum != Rat::one() {
            note(to_file, &format!("violation: diameter sum {sum} != 1"));
            ok = false;
        }
    }
    for st in &c.states {
        if let Some(cert) = st.certificate {
            let line = format!("step {} (m={}, n={}): p={} q={} certificate {cert:.6e}", st.step, st.m, st.n, st.p, st.q);
            note(to_file, &line);
            if cert > 0.5 {
                note(to_file, &format!("violation: step {} certificate {cert} > 1/2", st.step));
                ok = false;
            }
        }
    }
    if verify {
        let content = verify_main_content(&c, samples)?;
        let mut worst = 0.0f64;
        for (st, row) in c.states.iter().zip(&content) {
            for (e, v) in row {
                worst = worst.max(*v);
                if *v > 1.0 {
                    note(to_file, &format!("violation: step {} direction ({}, {}) content proxy {v}", st.step, e.x, e.y));
                    ok = false;
                }
            }
        }
        note(to_file, &format!("largest content proxy over {samples} directions per step: {worst:.6}"));
        note(to_file, if ok { "main cascade: all checks passed" } else { "main cascade: FAILED" });
    }
    Ok(ok)
}

fn main2_state(a: &Main2Args) -> Result<crate::constructions::Main2State> {
    let gamma = a.gamma.unwrap_or(1.0);
    let depth = a.depth.unwrap_or(3);
    construct_main2(&Main2Params::default_schedule(gamma, depth), depth)
}

fn main2_generations(st: &crate::constructions::Main2State) -> Vec<Generation> {
    st.levels.iter().map(|lv| Generation { level: lv.level, set: Some(GenSet::Squares(SquareUnion { centers: lv.centers.clone(), side: lv.ell.clone() })), arcs: lv.arcs() }).collect()
}

fn construct_main2_cmd(a: &Main2Args) -> Result<bool> {
    let st = main2_state(a)?;
    write_gens(a.out.as_deref(), &main2_generations(&st))?;
    for lv in &st.levels {
        note(a.out.is_some(), &format!("level {}: n={} k={} m={} squares={} side={} arcs={}", lv.level, lv.n, lv.k, lv.m, lv.centers.len(), lv.ell, lv.tags.len()));
    }
    Ok(true)
}

fn verify_main2_cmd(a: &Main2Args) -> Result<bool> {
    let st = main2_state(a)?;
    if a.out.is_some() {
        write_gens(a.out.as_deref(), &main2_generations(&st))?;
    }
    let reps = verify_main2(&st, a.e_per_arc.unwrap_or(32), a.l_per_level.unwrap_or(16))?;
    let mut ok = true;
    for r in &reps {
        println!(
            "level {}: nesting={} tags={} arcs={} (iii) {}/{} violations, shrunken {}/{} violations, form3 max card {} ok={}, packing {} ok={}",
            r.level, r.nesting, r.tags_nested, r.arcs_ok, r.iii_violations, r.iii_checked, r.tech_violations, r.tech_checked, r.form3_max_card, r.form3_ok, r.packing, r.packing_ok
        );
        if !r.passed() {
            println!("violation: level {} fails the invariant suite", r.level);
            ok = false;
        }
    }
    println!("{}", if ok { "main2: all invariants hold" } else { "main2: FAILED" });
    Ok(ok)
}

fn set_e_cmd(a: &SetEArgs, verify: bool) -> Result<bool> {
    let t = if a.t.is_empty() { vec![0.1, 0.2] } else { a.t.clone() };
    let depth = a.depth.unwrap_or(t.len());
    let st = construct_set_e(&t, depth)?;
    let gens: Vec<Generation> = (0..st.levels.len()).map(|j| Generation { level: j, set: None, arcs: st.arcs(j) }).collect();
    if !verify || a.out.is_some() {
        write_gens(a.out.as_deref(), &gens)?;
    }
    let to_file = verify || a.out.is_some();
    for lv in &st.levels {
        note(to_file, &format!("level {}: t={} n={} r={} arcs={} packing={} target={:.3}", lv.level, lv.t, lv.n, lv.r, lv.midpoints.len(), lv.packing, lv.packing_target));
    }
    if !verify {
        return Ok(true);
    }
    match check_set_e(&st) {
        Ok(()) => {
            println!("set E: all properties hold");
            Ok(true)
        }
        Err(w) => {
            println!("violation: {w}");
            Ok(false)
        }
    }
}

fn bigex_cmd(a: &BigexArgs, verify: bool) -> Result<bool> {
    let sigma = a.sigma.unwrap_or(0.76);
    let depth = a.depth.unwrap_or(1);
    let rep = construct_bigex(sigma, depth)?;
    let to_file = verify || a.out.is_some();
    let mut w = open_out(a.out.as_deref())?;
    if !verify || a.out.is_some() {
        writeln!(w, "depth,k_index,c,delta,arc_length,vii_checked,vii_violations,vii_worst")?;
        for v in std::iter::once(&rep.root).chain(&rep.children) {
            let k = v.k_index.map(|k| k.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{},{},{},{}", v.depth, k, v.c, v.delta, v.arc_length, v.vii_checked, v.vii_violations, v.vii_worst)?;
        }
        w.flush()?;
    }
    let p = &rep.params;
    note(to_file, &format!("sigma={sigma} d={} tau={} k_root={}", p.d, p.tau, rep.k_root));
    note(to_file, &format!("root (IND): {} checks, {} violations", rep.root_ind.checked, rep.root_ind.violations));
    if let Some(e) = &rep.expansion {
        note(
            to_file,
            &format!(
                "expansion: n={} m={} children={} c_w={} delta={} arcs disjoint={} form5 max card {} <= {} ({} violations)",
                e.n, e.m, e.children, e.c_child, e.delta_child, e.arcs_disjoint, e.form5_max_card, e.form5_threshold, e.form5_violations
            ),
        );
        note(to_file, &format!("children (IND): {} checks, {} violations", rep.child_ind.checked, rep.child_ind.violations));
    }
    for v in std::iter::once(&rep.root).chain(&rep.children) {
        if v.vii_violations > 0 {
            note(to_file, &format!("violation: vertex k={:?} has {} (vii) violations, worst {}", v.k_index, v.vii_violations, v.vii_worst));
        }
    }
    let ok = rep.passed();
    if verify {
        println!("{}", if ok { "bigex: all certificates pass" } else { "bigex: FAILED" });
    }
    Ok(ok || !verify)
}

fn block_cmd(a: &BlockArgs) -> Result<bool> {
    let (n, d) = (a.n.unwrap_or(3), a.d.unwrap_or(3));
    let b = block_B(n, d)?;
    note(a.out.is_some(), &format!("B_{n} (d={d}): {} balls of radius {}", b.len(), b.radius));
    write_gens(a.out.as_deref(), &[Generation { level: 0, set: Some(GenSet::Balls(b)), arcs: vec![] }])?;
    Ok(true)
}

/// Planar input named by a source string.
enum Source {
    Balls(BallUnion),
    Points(PointSet),
}

impl Source {
    fn planar(&self) -> Planar<'_> {
        match self {
            Source::Balls(b) => Planar::Balls(b),
            Source::Points(p) => Planar::Points(p),
        }
    }

    fn points(&self) -> Vec<Point> {
        match self {
            Source::Balls(b) => b.centers.iter().map(|c| c.to_point()).collect(),
            Source::Points(p) => p.to_float(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Config(format!("bad {what} `{s}`")))
}

fn load_source(src: &str, level: Option<usize>, seed: u64) -> Result<Source> {
    let parts: Vec<&str> = src.splitn(2, ':').collect();
    let arg = parts.get(1).copied().unwrap_or("");
    match parts[0] {
        "grid" => Ok(Source::Points(PointSet::grid(parse_num(arg, "grid side")?))),
        "random" => {
            let n: usize = parse_num(arg, "point count")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(Source::Points(PointSet::float((0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect())))
        }
        "block" => {
            let (n, d) = arg.split_once(':').ok_or_else(|| Error::Config("block source is block:n:d".into()))?;
            Ok(Source::Balls(block_B(parse_num(n, "n")?, parse_num(d, "d")?)?))
        }
        "file" => {
            let gens = read_generations(BufReader::new(File::open(arg)?))?;
            let g = match level {
                Some(l) => gens.iter().find(|g| g.level == l),
                None => gens.iter().rev().find(|g| g.set.is_some()),
            };
            match g.and_then(|g| g.set.as_ref()) {
                Some(GenSet::Balls(b)) => Ok(Source::Balls(b.clone())),
                Some(GenSet::Squares(s)) => Ok(Source::Points(PointSet::exact(s.centers.clone())?)),
                None => config_err(format!("{arg}: no generation with a set at the requested level")),
            }
        }
        other => config_err(format!("unknown source `{other}`")),
    }
}

struct ProfileRow {
    direction_index: usize,
    ex: f64,
    ey: f64,
    delta: f64,
    n: u128,
    p: Option<u128>,
}

fn sweep_cmd(a: &SweepArgs) -> Result<bool> {
    let source = a.source.clone().unwrap_or_else(|| "grid:16".into());
    let exps = scale_exponents(a.imin.unwrap_or(1), a.imax.unwrap_or(8))?;
    let count = a.directions.unwrap_or(16);
    let mut rows = Vec::new();
    if let Some(rest) = source.strip_prefix("main2:") {
        let (g, d) = rest.split_once(':').ok_or_else(|| Error::Config("main2 source is main2:gamma:depth".into()))?;
        let st = main2_state(&Main2Args { gamma: Some(parse_num(g, "gamma")?), depth: Some(parse_num(d, "depth")?), ..Default::default() })?;
        let level = a.level.unwrap_or(st.levels.len() - 1);
        let lv = st.levels.get(level).ok_or_else(|| Error::Config(format!("main2 has no level {level}")))?;
        let step = lv.tags.len().div_ceil(count).max(1);
        for (di, t) in lv.tags.iter().step_by(step).enumerate() {
            let e = rational_direction(t.p, t.q)?;
            for (delta, n) in main2_profile(&st, level, *t, 1)? {
                rows.push(ProfileRow { direction_index: di, ex: e.x, ey: e.y, delta, n, p: None });
            }
        }
    } else {
        let src = load_source(&source, a.level, a.seed.unwrap_or(0))?;
        let dirs = rational_directions(count)?;
        let deltas: Vec<f64> = exps.iter().map(|&i| (-(i as f64)).exp2()).collect();
        for r in direction_sweep(src.planar(), &dirs, &deltas)? {
            rows.push(ProfileRow { direction_index: r.direction_index, ex: r.direction.x, ey: r.direction.y, delta: r.delta, n: r.n as u128, p: Some(r.p as u128) });
        }
    }
    let mut w = open_out(a.out.as_deref())?;
    writeln!(w, "direction_index,ex,ey,delta,N,P")?;
    for r in &rows {
        let p = r.p.map(|p| p.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{},{}", r.direction_index, r.ex, r.ey, r.delta, r.n, p)?;
    }
    w.flush()?;
    note(a.out.is_some(), &format!("sweep of {source}: {} rows", rows.len()));
    if let Some(path) = &a.svg {
        let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for r in &rows {
            if series.last().is_none_or(|s| s.0 != r.direction_index.to_string()) {
                series.push((r.direction_index.to_string(), Vec::new()));
            }
            series.last_mut().unwrap().1.push((r.delta, r.n as f64));
        }
        write_loglog_svg(path, &format!("N(rho_e K, delta) for {source}"), &series)?;
    }
    Ok(true)
}

fn dimest_cmd(a: &DimestArgs) -> Result<bool> {
    let Some(input) = &a.input else {
        return config_err("dimest needs --input");
    };
    let ambient = a.ambient.unwrap_or(2);
    let mut rd = csv::Reader::from_reader(BufReader::new(File::open(input)?));
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (dc, nc) = match (col("delta"), col("N")) {
        (Some(d), Some(n)) => (d, n),
        _ => return config_err("input needs `delta` and `N` columns"),
    };
    let ic = col("direction_index");
    let mut groups: Vec<(usize, Vec<ScaleEntry>)> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let idx = match ic {
            Some(i) => parse_num(&rec[i], "direction index")?,
            None => 0,
        };
        let delta: f64 = parse_num(&rec[dc], "delta")?;
        let n: u128 = parse_num(&rec[nc], "N")?;
        let entry = ScaleEntry { delta, n: crate::covering::sat(n), p: None };
        match groups.iter_mut().find(|g| g.0 == idx) {
            Some(g) => g.1.push(entry),
            None => groups.push((idx, vec![entry])),
        }
    }
    if groups.is_empty() {
        return config_err("input has no rows");
    }
    let mut w = open_out(a.out.as_deref())?;
    writeln!(w, "direction_index,slope,intercept,residual,max_ratio,clamped")?;
    let mut ok = true;
    let mut series = Vec::new();
    for (idx, mut entries) in groups {
        entries.sort_by(|x, y| y.delta.total_cmp(&x.delta));
        series.push((idx.to_string(), entries.iter().map(|e| (e.delta, e.n as f64)).collect()));
        let est = estimate_box_dimension(&ScaleProfile::new(entries, ambient)?)?;
        writeln!(w, "{idx},{},{},{},{},{}", est.slope, est.intercept, est.residual, est.max_ratio, est.clamped)?;
        if let Some(m) = a.max_slope {
            if est.slope > m {
                note(a.out.is_some(), &format!("violation: direction {idx} slope {} > {m}", est.slope));
                ok = false;
            }
        }
    }
    w.flush()?;
    if let Some(path) = &a.svg {
        write_loglog_svg(path, "dimension profile", &series)?;
    }
    Ok(ok)
}

fn energy_cmd(a: &EnergyArgs) -> Result<bool> {
    let src = load_source(a.source.as_deref().unwrap_or("grid:16"), a.level, a.seed.unwrap_or(0))?;
    let pts = src.points();
    let delta = (-(a.delta_exp.unwrap_or(6) as f64)).exp2();
    let net = direction_net(delta)?;
    let kernel = a.kernel.unwrap_or(0.0);
    let rep = if kernel == 0.0 && a.width.is_none() { counting_energy(&pts, &net, delta)? } else { weighted_energy(&WeightedPointSet::uniform(pts.clone())?, &net, a.width.unwrap_or(delta), kernel)? };
    let mut w = open_out(a.out.as_deref())?;
    rep.write_csv(&mut w)?;
    w.flush()?;
    note(a.out.is_some(), &format!("energy over {} directions: total {}", rep.rows.len(), rep.total));
    if let Some(g) = a.riesz {
        let mu = WeightedPointSet::uniform(pts)?;
        note(a.out.is_some(), &format!("riesz energy I_{g}: {}", riesz_energy(&mu, g)));
    }
    Ok(true)
}

fn verify_grid(a: &GridArgs) -> Result<bool> {
    let (pmax, qmax) = (a.pmax.unwrap_or(5), a.qmax.unwrap_or(5));
    let (nmin, nmax) = (a.nmin.unwrap_or(2), a.nmax.unwrap_or(64));
    if pmax == 0 || qmax == 0 || nmin == 0 || nmin > nmax {
        return config_err("grid suite needs pmax, qmax >= 1 and 1 <= nmin <= nmax");
    }
    let mut table = match &a.out {
        Some(p) => {
            let mut w = open_out(Some(p))?;
            writeln!(w, "n,p,q,cardinality,bound,min_preimages")?;
            Some(w)
        }
        None => None,
    };
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for n in nmin..=nmax {
        for p in 1..=pmax {
            for q in 1..=qmax {
                let g = crate::incidence::grid_check(n, p, q)?;
                checked += 1;
                if let Some(w) = table.as_mut() {
                    writeln!(w, "{},{},{},{},{},{}", g.n, g.p, g.q, g.cardinality, g.bound, g.min_preimages)?;
                }
                if !g.holds() {
                    violations.push(g);
                }
            }
        }
    }
    if let Some(mut w) = table {
        w.flush()?;
    }
    println!("grid suite: {checked} triples, n in {nmin}..={nmax}, p in 1..={pmax}, q in 1..={qmax}");
    for g in violations.iter().take(20) {
        println!("violation: n={} p={} q={} cardinality={} bound={} min_preimages={}", g.n, g.p, g.q, g.cardinality, g.bound, g.min_preimages);
    }
    println!("{} violations", violations.len());
    Ok(violations.is_empty())
}

fn verify_line_intersect(a: &LineArgs) -> Result<bool> {
    let (n, d) = (a.n.unwrap_or(3), a.d.unwrap_or(3));
    let sk = BlockSkeleton::new(n, d)?;
    let kmax = (sk.nf as u64).checked_pow(d - 3).filter(|k| *k <= 1 << 40).ok_or_else(|| Error::Overflow("direction family too large".into()))? as i64;
    let mut ok = true;
    if !sk.x_coordinates_are_half_integers() {
        println!("violation: a skeleton x-coordinate is not of the form (r + 1/2)(n!)^-2");
        ok = false;
    }
    let mut lines = 0u64;
    for k in 1..=kmax {
        match sk.check_line_intersections(k) {
            Ok(c) => lines += c,
            Err((key, total)) => {
                println!("violation: slope -{k}/{} line with key {key} meets S_n^+ in {total} points, expected {}", sk.f, sk.nf);
                ok = false;
                break;
            }
        }
    }
    let bound = 3u128 * (sk.nf as u128).pow(1 + d);
    let mut max_card = 0u64;
    for (k, c) in DirectionCardStream::new(&sk)?.take(kmax as usize) {
        max_card = max_card.max(c);
        if c as u128 > bound {
            println!("violation: card rho_xi(S_n) = {c} > {bound} at xi ~ ({k}, {})", sk.f);
            ok = false;
        }
    }
    println!("skeleton S_{n} (d={d}): {} points, {kmax} directions, {lines} meeting lines", sk.len());
    println!("max card rho_xi(S_n) over D_n: {max_card} <= {bound}");
    if ok {
        println!("every meeting line hits S_n^+ in {} points", sk.nf);
    }
    Ok(ok)
}

/// Cauchy-Schwarz certificate `(Σ m_j²)·K ≥ n²` for integer tube counts.
pub fn cs_certificate(histogram: &[(i64, f64)]) -> bool {
    let counts: Vec<u128> = histogram.iter().map(|&(_, m)| m as u128).collect();
    let n: u128 = counts.iter().sum();
    let sq: u128 = counts.iter().map(|m| m * m).sum();
    sq * counts.len() as u128 >= n * n
}

fn random_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect()
}

fn verify_marstrand(a: &MarstrandArgs) -> Result<bool> {
    let n = a.n.unwrap_or(1024);
    let i = a.delta_exp.unwrap_or(8);
    let taus = if a.tau.is_empty() { vec![0.3, 0.5, 0.7] } else { a.tau.clone() };
    let delta = (-(i as f64)).exp2();
    let c = extract_delta_one_subset(&random_points(n, a.seed.unwrap_or(0)), delta, &Direction::from_angle(0.0))?;
    let mut ok = true;
    println!("extracted (delta,1)-subset: {} of {n} points, delta = 2^-{i}", c.len());
    for &tau in &taus {
        let scan = marstrand_exceptional_scan(&c, delta, tau, a.a.unwrap_or(3.0))?;
        let bound = 64.0 * delta.powf(tau - 1.0) * (1.0 / delta).ln();
        println!("tau={tau}: {} exceptional of {} net directions, bound {bound:.1}", scan.count, scan.net_size);
        if scan.count as f64 > bound {
            println!("violation: tau={tau} count {} > {bound}", scan.count);
            ok = false;
        }
    }
    let net = direction_net(delta)?;
    let rep = counting_energy(&c, &net, delta)?;
    let bad: Vec<_> = rep.rows.iter().filter(|r| !cs_certificate(&r.histogram)).collect();
    for r in bad.iter().take(5) {
        println!("violation: Cauchy-Schwarz certificate fails at direction {}", r.direction_index);
    }
    println!("Cauchy-Schwarz certificate: {} of {} directions hold", rep.rows.len() - bad.len(), rep.rows.len());
    Ok(ok && bad.is_empty())
}

/// Random set of `k` distinct rational points with small numerators and denominators.
pub fn random_rational_points(k: usize, rng: &mut impl Rng) -> Vec<RatPoint> {
    let mut out: Vec<RatPoint> = Vec::with_capacity(k);
    while out.len() < k {
        let p = RatPoint::new(rat(rng.gen_range(-20..=20), rng.gen_range(1..=6)), rat(rng.gen_range(-20..=20), rng.gen_range(1..=6)));
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Exceptional count, its bound `8·n^{2s−1}` and the incidence identity for one set.
pub fn incidence_instance(pts: &[RatPoint], s: f64) -> Result<(usize, f64, bool, Vec<IntDir>)> {
    let rep = exceptional_direction_count(pts, s)?;
    let dirs: Vec<IntDir> = rep.witnesses.iter().map(|w| (w.a, w.b)).collect();
    let fam = fiber_family(pts, &dirs)?;
    let identity = incidence_count(pts, &fam) == (pts.len() * dirs.len()) as u64;
    Ok((rep.count, 8.0 * (pts.len() as f64).powf(2.0 * s - 1.0), identity, dirs))
}

fn verify_incidence(a: &IncidenceArgs) -> Result<bool> {
    let ss = if a.s.is_empty() { vec![0.5, 0.6, 0.75] } else { a.s.clone() };
    let sets: Vec<(String, Vec<RatPoint>)> = match a.points {
        Some(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(0));
            (0..a.sets.unwrap_or(1)).map(|i| (format!("random set {i}"), random_rational_points(k, &mut rng))).collect()
        }
        None => {
            let n = a.grid.unwrap_or(8);
            vec![(format!("grid {n}x{n}"), crate::incidence::grid_points(n))]
        }
    };
    let mut table = match &a.out {
        Some(p) => {
            let mut w = open_out(Some(p))?;
            writeln!(w, "set,s,count,bound,identity")?;
            Some(w)
        }
        None => None,
    };
    let mut ok = true;
    let mut worst = 0.0f64;
    for (name, pts) in &sets {
        for &s in &ss {
            let (count, bound, identity, _) = incidence_instance(pts, s)?;
            worst = worst.max(count as f64 / bound);
            if let Some(w) = table.as_mut() {
                writeln!(w, "{name},{s},{count},{bound},{identity}")?;
            }
            if count as f64 > bound || !identity {
                println!("violation: {name} s={s} count={count} bound={bound:.3} identity={identity}");
                ok = false;
            }
        }
    }
    if let Some(mut w) = table {
        w.flush()?;
    }
    println!("incidence suite: {} sets x {} exponents, largest count/bound {worst:.4}", sets.len(), ss.len());
    println!("{}", if ok { "all exceptional counts within bound, incidence identity exact" } else { "incidence suite: FAILED" });
    Ok(ok)
}

/// Random union of up to 8 balls with dyadic centers in `[−1, 1]²` and a common dyadic radius.
pub fn random_ball_union(rng: &mut impl Rng) -> BallUnion {
    let k = rng.gen_range(1..=8);
    let centers = (0..k).map(|_| RatPoint::new(rat(rng.gen_range(-64..=64), 64), rat(rng.gen_range(-64..=64), 64))).collect();
    BallUnion::new(centers, rat(1, 1 << rng.gen_range(2..=5))).expect("nonempty union with positive radius")
}

/// Mesh counts `(N(K, δ), N(K_e, δ), N(K_ξ, δ))` in the frame `e = (c, s)`, `ξ = (−s, c)`.
pub fn product_counts(k: &BallUnion, c: &Rat, s: &Rat, delta: &Rat) -> Result<(u64, u64, u64)> {
    // coordinates in the rotated frame: x·e and x·ξ
    let rotated = BallUnion::new(rotate_points(&k.centers, c, &-s), k.radius.clone())?;
    let full = covering_number_2d(Planar::Balls(&rotated), delta, CoverMode::Mesh)?;
    let r = &rotated.radius;
    let xs = IntervalUnion::new(rotated.centers.iter().map(|p| (&p.x - r, &p.x + r)).collect())?;
    let ys = IntervalUnion::new(rotated.centers.iter().map(|p| (&p.y - r, &p.y + r)).collect())?;
    Ok((full, mesh_count_1d(&xs, delta)?, mesh_count_1d(&ys, delta)?))
}

/// Pythagorean unit vector `((b² − a²), 2ab)/(a² + b²)`.
pub fn pythagorean_pair(a: i64, b: i64) -> (Rat, Rat) {
    let h = a * a + b * b;
    (rat(b * b - a * a, h), rat(2 * a * b, h))
}

fn verify_product(a: &ProductArgs) -> Result<bool> {
    let count = a.count.unwrap_or(100);
    let exps = scale_exponents(a.imin.unwrap_or(4), a.imax.unwrap_or(10))?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(0));
    let mut ok = true;
    let mut checks = 0u64;
    for idx in 0..count {
        let k = random_ball_union(&mut rng);
        let (c, s) = pythagorean_pair(rng.gen_range(0..=12), rng.gen_range(1..=12));
        for &i in &exps {
            let (full, ne, nx) = product_counts(&k, &c, &s, &dyadic(i))?;
            checks += 1;
            if full as u128 > ne as u128 * nx as u128 {
                println!("violation: union {idx} axes ({c}, {s}) delta=2^-{i}: {full} > {ne}*{nx}");
                ok = false;
            }
        }
    }
    println!("product suite: {count} unions, {checks} checks");
    println!("{}", if ok { "N(K,delta) <= N(K_e,delta) N(K_xi,delta) in every instance" } else { "product suite: FAILED" });
    Ok(ok)
}

fn bounds_eval(a: &EvalArgs) -> Result<bool> {
    let Some(formula) = a.formula.as_deref() else {
        return config_err(format!("bounds eval needs --formula (one of: all, {})", FORMULAS.join(", ")));
    };
    let q = BoundQuery { gamma: a.gamma, sigma: a.sigma, s: a.s, tau: a.tau, m: a.m };
    let rows: Vec<(&str, f64, String)> = if formula == "all" {
        FORMULAS.iter().filter_map(|&f| evaluate(f, &q).ok().map(|(v, p)| (f, v, p))).collect()
    } else {
        let (v, p) = evaluate(formula, &q)?;
        vec![(formula, v, p)]
    };
    let mut w = open_out(a.out.as_deref())?;
    writeln!(w, "formula,params,value")?;
    for (f, v, p) in rows {
        writeln!(w, "{f},{p},{v}")?;
    }
    w.flush()?;
    Ok(true)
}

/// Log-log plot of `(δ, N)` series; the raw data are embedded as comments.
pub fn write_loglog_svg(path: &Path, title: &str, series: &[(String, Vec<(f64, f64)>)]) -> Result<()> {
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter()).filter(|(d, n)| *d > 0.0 && *n > 0.0).map(|(d, n)| (-d.log2(), n.log2())).collect();
    if pts.is_empty() {
        return config_err("nothing to plot");
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (w, h, m) = (640.0, 480.0, 50.0);
    let sx = |x: f64| m + (x - x0) / (x1 - x0).max(1e-9) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0).max(1e-9) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
    let _ = writeln!(s, "<!-- {} -->", title.replace("--", "- -"));
    let _ = writeln!(s, "<!-- series,delta,N -->");
    for (name, data) in series {
        for (d, n) in data {
            let _ = writeln!(s, "<!-- {name},{d},{n} -->");
        }
    }
    let _ = writeln!(s, r#"<text x="{m}" y="20" font-size="14">{}</text>"#, title.replace('<', "&lt;").replace('&', "&amp;"));
    let _ = writeln!(s, r#"<line x1="{m}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - m, w - m, h - m);
    let _ = writeln!(s, r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{}" stroke="black"/>"#, h - m);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">log2(1/delta)</text>"#, w / 2.0, h - 15.0);
    let _ = writeln!(s, r#"<text x="5" y="{}" font-size="12">log2 N</text>"#, m - 10.0);
    for (name, data) in series {
        let path: Vec<String> = data.iter().filter(|(d, n)| *d > 0.0 && *n > 0.0).map(|(d, n)| format!("{:.2},{:.2}", sx(-d.log2()), sy(n.log2()))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" points="{}"><title>{name}</title></polyline>"#, path.join(" "));
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cfg: toml::Table = "[verify.grid]\npmax = 2\nnmax = 9\n".parse().unwrap();
        let cli = GridArgs { pmax: Some(4), ..Default::default() };
        let r = resolve(&cli, &cfg, "verify.grid").unwrap();
        assert_eq!((r.pmax, r.nmax, r.qmax), (Some(4), Some(9), None));
        let empty = resolve(&GridArgs::default(), &toml::Table::new(), "verify.grid").unwrap();
        assert_eq!(empty.pmax, None);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let cfg: toml::Table = "[verify.grid]\npmaxx = 2\n".parse().unwrap();
        assert!(matches!(resolve(&GridArgs::default(), &cfg, "verify.grid"), Err(Error::Config(_))));
        let cfg: toml::Table = "[verify]\ngrid = 3\n".parse().unwrap();
        assert!(resolve(&GridArgs::default(), &cfg, "verify.grid").is_err());
    }

    #[test]
    fn list_flags_keep_config_when_absent() {
        let cfg: toml::Table = "[construct.set-e]\nt = [0.1, 0.3]\n".parse().unwrap();
        let r = resolve(&SetEArgs::default(), &cfg, "construct.set-e").unwrap();
        assert_eq!(r.t, vec![0.1, 0.3]);
        let r = resolve(&SetEArgs { t: vec![0.2], ..Default::default() }, &cfg, "construct.set-e").unwrap();
        assert_eq!(r.t, vec![0.2]);
    }

    #[test]
    fn rational_directions_are_distinct_and_tagged() {
        let d = rational_directions(16).unwrap();
        assert_eq!(d.len(), 16);
        assert!(d.iter().all(|e| e.tag.is_some()));
        assert!(d.windows(2).all(|w| w[0].angle() < w[1].angle()));
    }

    #[test]
    fn cs_certificate_examples() {
        assert!(cs_certificate(&[(0, 3.0), (1, 1.0)]));
        assert!(cs_certificate(&[(0, 2.0), (5, 2.0)]));
        assert!(cs_certificate(&[]));
    }

    #[test]
    fn product_counts_on_axis_frame() {
        let k = BallUnion::new(vec![RatPoint::origin()], rat(1, 2)).unwrap();
        let (full, ne, nx) = product_counts(&k, &rat(1, 1), &rat(0, 1), &rat(1, 4)).unwrap();
        // [−1/2, 1/2] meets the closed cells −3..=2
        assert_eq!((ne, nx), (6, 6));
        assert!(full <= 36);
        let (c, s) = pythagorean_pair(1, 2);
        assert_eq!(&c * &c + &s * &s, rat(1, 1));
    }

    #[test]
    fn svg_embeds_data() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.svg");
        write_loglog_svg(&p, "t", &[("0".into(), vec![(0.5, 2.0), (0.25, 4.0)])]).unwrap();
        let s = std::fs::read_to_string(&p).unwrap();
        assert!(s.contains("<!-- 0,0.25,4 -->"));
        assert!(write_loglog_svg(&p, "t", &[]).is_err());
    }
}

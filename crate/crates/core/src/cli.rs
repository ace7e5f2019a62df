//! The `halfline` command line driver.
//!
//! A run is a command plus a flat `key = value` map, read from `--config`
//! and then overridden by flags and `--set key=value`. Exit codes: 0 on
//! success, 1 when a verification exceeds its tolerance, 2 on any error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::cone::{verify_prop1, ConeProgram};
use crate::csv::{fmt_num, read_matrix, read_samples, write_atomic, Table};
use crate::envelope::{class_hull, concave_majorant};
use crate::error::{Error, Result};
use crate::fg::{check_fg_identity, chord_condition, ChordVerdict, Counterexample};
use crate::function::{make_log_grid, sample, FunctionSpec, HalfLineGrid, SampledFunction};
use crate::linalg::SymmetricMatrix;
use crate::norms::{verify_u_rel, EnergyOperator, NormProblem};
use crate::transforms::{compose_fg, compose_gf, g_value, transform_f, GValue};
use crate::verify::verify_theorem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Transform,
    Hull,
    VerifyTheorem,
    FgCheck,
    Cone,
    Norms,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Hull => "hull",
            Command::VerifyTheorem => "verify-theorem",
            Command::FgCheck => "fg-check",
            Command::Cone => "cone",
            Command::Norms => "norms",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Parser)]
#[command(name = "halfline", version, about = "Half-line transforms, concave hulls and energy-constrained norms")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Flat key=value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Builtin function name
    #[arg(long)]
    pub function: Option<String>,
    /// Builtin parameters, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Samples file with `z,value` rows
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub tail_slope: Option<f64>,
    #[arg(long)]
    pub matrix_a: Option<PathBuf>,
    #[arg(long)]
    pub matrix_g: Option<PathBuf>,
    /// Extra config entry, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Keys whose values are file paths, resolved against the config file's
/// directory.
const PATH_KEYS: [&str; 3] = ["samples", "a_matrix", "g_matrix"];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub keys: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let mut keys = BTreeMap::new();
        if let Some(path) = &cli.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            keys = parse_config(&text)?;
            let base = path.parent().unwrap_or(Path::new(""));
            for k in PATH_KEYS {
                if let Some(v) = keys.get_mut(k) {
                    if Path::new(v.as_str()).is_relative() {
                        *v = base.join(v.as_str()).to_string_lossy().into_owned();
                    }
                }
            }
        }
        let path = |p: &PathBuf| p.to_string_lossy().into_owned();
        let flags = [
            ("out", cli.out.as_ref().map(path)),
            ("tol", cli.tol.map(|v| v.to_string())),
            ("function", cli.function.clone()),
            ("params", cli.params.clone()),
            ("samples", cli.samples.as_ref().map(path)),
            ("tail_slope", cli.tail_slope.map(|v| v.to_string())),
            ("a_matrix", cli.matrix_a.as_ref().map(path)),
            ("g_matrix", cli.matrix_g.as_ref().map(path)),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                keys.insert(k.to_string(), v);
            }
        }
        for kv in &cli.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            keys.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { command: cli.command, keys })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.keys.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("`{}` needs key `{key}`", self.command)))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse()
                .map_err(|_| Error::Config(format!("`{key}`: expected a count, got `{v}`")))
        })
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(Error::Config(format!("`{key}`: expected true/false, got `{v}`"))),
        }
    }

    fn out_path(&self) -> PathBuf {
        self.get("out")
            .map_or_else(|| PathBuf::from(format!("{}.csv", self.command)), PathBuf::from)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: expected a number, got `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

/// `z:v,z:v,...`
fn parse_knots(v: &str) -> Result<Vec<(f64, f64)>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (z, y) = kv
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("`knots`: expected z:v, got `{kv}`")))?;
            Ok((parse_f64("knots", z.trim())?, parse_f64("knots", y.trim())?))
        })
        .collect()
}

/// Sampled input function plus the grid outputs are reported on.
fn load_function(cfg: &RunConfig) -> Result<(SampledFunction, HalfLineGrid)> {
    let z_grid = make_log_grid(
        cfg.f64_or("z_min", 1e-3)?,
        cfg.f64_or("z_max", 1e3)?,
        cfg.usize_or("n", 1025)?,
    )?;
    let (spec, grid) = if let Some(path) = cfg.get("samples") {
        let (grid, values) = read_samples(Path::new(path))?;
        (FunctionSpec::samples(grid.clone(), values), grid)
    } else if let Some(k) = cfg.get("knots") {
        let knots = parse_knots(k)?;
        let zs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        (FunctionSpec::piecewise(knots), z_grid.with_points(&zs))
    } else {
        let name = cfg.require("function")?;
        let params = cfg.get("params").map_or(Ok(Vec::new()), |v| parse_list("params", v))?;
        let spec = FunctionSpec::builtin(name, &params);
        let grid = z_grid.with_points(&spec.breakpoints()?);
        (spec, grid)
    };
    let mut spec = spec;
    if let Some(v) = cfg.get("tail_slope") {
        spec = spec.with_tail_slope(parse_f64("tail_slope", v)?);
    }
    if let Some(v) = cfg.get("value_at_zero") {
        spec = spec.with_value_at_zero(parse_f64("value_at_zero", v)?);
    }
    let f = sample(&spec, &grid)?;
    let x_grid = x_grid(cfg)?.unwrap_or_else(|| f.grid().clone());
    Ok((f, x_grid))
}

fn x_grid(cfg: &RunConfig) -> Result<Option<HalfLineGrid>> {
    if ["x_min", "x_max", "m"].iter().all(|k| cfg.get(k).is_none()) {
        return Ok(None);
    }
    make_log_grid(
        cfg.f64_or("x_min", cfg.f64_or("z_min", 1e-3)?)?,
        cfg.f64_or("x_max", cfg.f64_or("z_max", 1e3)?)?,
        cfg.usize_or("m", cfg.usize_or("n", 1025)?)?,
    )
    .map(Some)
}

/// Positive evaluation points for the cone and norm commands.
fn positive_points(cfg: &RunConfig) -> Result<Vec<f64>> {
    let g = make_log_grid(
        cfg.f64_or("x_min", 1e-2)?,
        cfg.f64_or("x_max", 1e3)?,
        cfg.usize_or("m", 64)?,
    )?;
    Ok(g.positive().to_vec())
}

/// Result of a run that did not hit an error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub outputs: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Transform => run_transform(cfg),
        Command::Hull => run_hull(cfg),
        Command::VerifyTheorem => run_verify_theorem(cfg),
        Command::FgCheck => run_fg_check(cfg),
        Command::Cone => run_cone(cfg),
        Command::Norms => run_norms(cfg),
    }
}

fn run_transform(cfg: &RunConfig) -> Result<Outcome> {
    let (f, xg) = load_function(cfg)?;
    let out = cfg.out_path();
    let ff = transform_f(&f, &xg)?;
    let g: Vec<f64> = xg
        .points()
        .iter()
        .map(|&x| {
            Ok(match g_value(&f, x)? {
                GValue::Finite(v) => v,
                GValue::UnboundedBelow => f64::NEG_INFINITY,
            })
        })
        .collect::<Result<_>>()?;
    let gf = compose_gf(&f, &xg)?;
    let fg = match compose_fg(&f, &xg) {
        Ok(fg) => Some(fg),
        Err(Error::UnboundedBelow { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut t = Table::new(&["x", "F", "G", "GF", "FG"]);
    for (k, &x) in xg.points().iter().enumerate() {
        let fgv = fg.as_ref().map_or(f64::NAN, |s| s.values()[k]);
        t.push(vec![x, ff.values()[k], g[k], gf.values()[k], fgv]);
    }
    t.write(&out)?;
    Ok(Outcome {
        passed: true,
        summary: format!("transform: {} points", xg.len()),
        outputs: vec![out],
    })
}

fn run_hull(cfg: &RunConfig) -> Result<Outcome> {
    let (f, _) = load_function(cfg)?;
    let out = cfg.out_path();
    let maj = concave_majorant(&f)?;
    let dec = class_hull(&f)?;
    let mut t = Table::new(&["x", "majorant", "hull"]);
    for (k, &x) in f.grid().points().iter().enumerate() {
        t.push(vec![x, maj.values()[k], dec.hull.values()[k]]);
    }
    t.write(&out)?;
    let bp = sibling(&out, "breakpoints.csv");
    let line = format!("class,a1,a2\n{},{},{}\n", dec.class, dec.first, dec.second);
    write_atomic(&bp, line.as_bytes())?;
    Ok(Outcome {
        passed: true,
        summary: format!("hull: class {} a1={} a2={}", dec.class, dec.first, dec.second),
        outputs: vec![out, bp],
    })
}

fn run_verify_theorem(cfg: &RunConfig) -> Result<Outcome> {
    let (f, _) = load_function(cfg)?;
    let out = cfg.out_path();
    let tol = cfg.f64_or("tol", 1e-4)?;
    let r = verify_theorem(&f, tol, cfg.bool_or("allow_estimated_tail", false)?)?;
    let mut t = Table::new(&["x", "gf", "hull", "deviation"]);
    for row in &r.rows {
        t.push(vec![row.x, row.gf, row.hull, row.deviation]);
    }
    t.write(&out)?;
    Ok(Outcome {
        passed: r.holds(),
        summary: format!(
            "verify-theorem: class {} max deviation {} bound {} {}",
            r.class,
            fmt_num(r.max_deviation),
            fmt_num(r.bound),
            verdict(r.holds())
        ),
        outputs: vec![out],
    })
}

/// Exit 1 when the chord condition holds but the direct identity check
/// fails. The converse is not an error: the arc family excludes its own
/// limits (constants, rays through the origin), so the condition is only
/// sufficient on sampled data.
fn run_fg_check(cfg: &RunConfig) -> Result<Outcome> {
    let (f, xg) = load_function(cfg)?;
    let out = cfg.out_path();
    let tol = cfg.f64_or("tol", 1e-6)?;
    let chord = chord_condition(&f, cfg.usize_or("pair_budget", 20_000)?);
    let id = check_fg_identity(&f, &xg, tol)?;
    let mut t = Table::new(&["x", "f", "FG", "deviation"]);
    for (k, &x) in xg.points().iter().enumerate() {
        let v = f.evaluate(x)?;
        let fg = id.fg.values()[k];
        t.push(vec![x, v, fg, (fg - v).abs()]);
    }
    t.write(&out)?;
    let mut ce = Table::new(&Counterexample::CSV_HEADER);
    for c in &chord.counterexamples {
        ce.push(c.record().to_vec());
    }
    let ce_path = sibling(&out, "chord.csv");
    ce.write(&ce_path)?;
    let consistent = match chord.verdict {
        ChordVerdict::Holds => id.identity_holds,
        ChordVerdict::Fails | ChordVerdict::NotApplicable => true,
    };
    Ok(Outcome {
        passed: consistent,
        summary: format!(
            "fg-check: chord {:?} ({} pairs), identity {} (max deviation {}) {}",
            chord.verdict,
            chord.pairs_checked,
            if id.identity_holds { "holds" } else { "fails" },
            fmt_num(id.max_abs_deviation),
            if consistent { "CONSISTENT" } else { "INCONSISTENT" }
        ),
        outputs: vec![out, ce_path],
    })
}

fn run_cone(cfg: &RunConfig) -> Result<Outcome> {
    let cp = ConeProgram::from_config(&cfg.keys)?;
    let out = cfg.out_path();
    let tol = cfg.f64_or("tol", 1e-6)?;
    let r = verify_prop1(&cp, &positive_points(cfg)?, tol)?;
    let mut t = Table::new(&["x", "f", "g", "F_of_f", "G_of_g"]);
    for row in &r.rows {
        t.push(vec![row.x, row.f, row.g, row.f_transformed, row.g_transformed]);
    }
    t.write(&out)?;
    let [d0, d1, d2] = r.max_deviation;
    Ok(Outcome {
        passed: r.holds(),
        summary: format!(
            "cone: n={} deviations g=F[f] {} f=G[g] {} rescaling {} {}",
            cp.dim(),
            fmt_num(d0),
            fmt_num(d1),
            fmt_num(d2),
            verdict(r.holds())
        ),
        outputs: vec![out],
    })
}

fn run_norms(cfg: &RunConfig) -> Result<Outcome> {
    let a = read_matrix(Path::new(cfg.require("a_matrix")?))?;
    let g = read_matrix(Path::new(cfg.require("g_matrix")?))?;
    let p = NormProblem::new(a, EnergyOperator::new(SymmetricMatrix::new(g)?)?)?;
    let out = cfg.out_path();
    let tol = cfg.f64_or("tol", 1e-4)?;
    let r = verify_u_rel(&p, &positive_points(cfg)?, tol)?;
    let mut t = Table::new(&["E", "f_A", "g_A", "F_of_f", "G_of_g"]);
    for row in &r.rows {
        t.push(vec![row.energy, row.f, row.g, row.f_transformed, row.g_transformed]);
    }
    t.write(&out)?;
    Ok(Outcome {
        passed: r.holds(),
        summary: format!(
            "norms: head value {} deviations g=F[f] {} f=G[g] {} {}",
            fmt_num(r.head_value),
            fmt_num(r.max_deviation[0]),
            fmt_num(r.max_deviation[1]),
            verdict(r.holds())
        ),
        outputs: vec![out],
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("HALFLINE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a second call in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parse arguments, run, print the summary; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match RunConfig::from_cli(&cli).and_then(|cfg| run(&cfg)) {
        Ok(o) => {
            println!("{}", o.summary);
            o.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

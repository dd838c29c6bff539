//! Batch front end: parses a run configuration (flags, optionally seeded
//! from a `key = value` file), runs one campaign and writes CSV or JSON.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bases::{gen_hermite, phi_tensor, Alpha, MultiIndex};
use crate::error::{Error, Result};
use crate::func::{Decay, Func, FuncNd};
use crate::hardy::{
    bound_constants, default_delta, geometric_grid, hardy_sum, halfinteger_ratios, make_counterexample_atom,
    parity_coefficient_check, parity_reduction_check, sharpness_sweep, AtomParams, Basis, HardyReport, SharpnessOptions,
};
use crate::kernels::{
    kernel_quad_spec, lemma33_sweep, lemma34_sweep, mehler_check, prop32_sweep, reproduce, KernelParams, Lemma33Grid,
    Lemma34Grid, Prop32Grid,
};
use crate::quadrature::{gram_matrix, QuadSpec};

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "HARDYLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Laguerre,
    Hermite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Prop32,
    Lemma33,
    Lemma34,
}

/// Built-in test functions for `hardy-sum` and `parity-check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sample {
    /// `e^{−(u−1/2)²}`
    Gaussian,
    /// `|u|^{−1/2}` on `(−1, 1)`
    InvSqrt,
    /// indicator of `(0, 1)`
    Step,
    /// `sgn(u)|u|^{−1/3} e^{−u²}`
    OddCusp,
    /// `(1 + u) e^{−|u|}`
    Tent,
    /// the counterexample atom for `--k-big`, `--delta`
    Atom,
}

impl Sample {
    pub fn func(self) -> Func {
        match self {
            Sample::Gaussian => Func::new(|u: f64| (-(u - 0.5).powi(2)).exp(), Decay::Gaussian(0.5)),
            Sample::InvSqrt => Func::new(
                |u: f64| if u != 0.0 && u.abs() < 1.0 { u.abs().powf(-0.5) } else { 0.0 },
                Decay::Support(1.0),
            )
            .with_breakpoints(vec![-1.0, 0.0, 1.0]),
            Sample::Step => Func::new(|u: f64| if u > 0.0 && u < 1.0 { 1.0 } else { 0.0 }, Decay::Support(1.0))
                .with_breakpoints(vec![0.0, 1.0]),
            Sample::OddCusp => Func::new(
                |u: f64| if u == 0.0 { 0.0 } else { u.signum() * u.abs().powf(-1.0 / 3.0) * (-u * u).exp() },
                Decay::Gaussian(1.0),
            )
            .with_breakpoints(vec![0.0]),
            Sample::Tent => Func::new(|u: f64| (1.0 + u) * (-u.abs()).exp(), Decay::Exponential(1.0))
                .with_breakpoints(vec![0.0]),
            Sample::Atom => unreachable!("atoms are built from their parameters"),
        }
    }
}

/// `start:stop:x<factor>` or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct KGrid(pub Vec<usize>);

impl FromStr for KGrid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let [a, b, f] = s.split(':').collect::<Vec<_>>()[..] {
            let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad K grid {s:?}: {e}"));
            let factor = f.trim().strip_prefix('x').ok_or_else(|| format!("bad K grid {s:?}: factor needs an x prefix"))?;
            return geometric_grid(parse(a)?, parse(b)?, parse(factor)?)
                .map(KGrid)
                .map_err(|e| e.to_string());
        }
        let ks = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad K grid {s:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if ks.is_empty() || ks.contains(&0) {
            return Err(format!("bad K grid {s:?}"));
        }
        Ok(KGrid(ks))
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed flags from a `key = value` file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t = Family::Laguerre)]
    pub family: Family,
    /// Order per coordinate (α for Laguerre, λ for Hermite).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub u: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct OrthoArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 128)]
    pub kmax: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct KernelArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long)]
    pub r: f64,
    /// Points per axis of the (u, v) grid.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    /// Largest degree for the reproducing check.
    #[arg(long, default_value_t = 20)]
    pub kmax: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct HardySumArgs {
    #[arg(long, value_enum, default_value_t = Family::Hermite)]
    pub family: Family,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Sample::Gaussian)]
    pub function: Sample,
    #[arg(long, default_value_t = 0.75)]
    pub exponent: f64,
    #[arg(long, default_value_t = 1024)]
    pub nmax: usize,
    /// Atom size K (for `--function atom`).
    #[arg(long, default_value_t = 256)]
    pub k_big: usize,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct SharpnessArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    #[arg(long, default_value = "16:4096:x2")]
    pub k_grid: KGrid,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct ParityArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Sample::Gaussian)]
    pub function: Sample,
    #[arg(long, default_value_t = 80)]
    pub nmax: usize,
    /// Exponent for the even-index sum comparison against the atom.
    #[arg(long, default_value_t = 0.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// One basis function value.
    Eval(EvalArgs),
    /// Gram matrix defect of φ_0..φ_kmax.
    Orthocheck(OrthoArgs),
    /// Closed-form kernel against its series, and the reproducing property.
    KernelCheck(KernelArgs),
    /// Boundedness sweep for one kernel estimate.
    BoundCheck(BoundArgs),
    /// Σ |⟨f, ψ_n⟩| / (n+1)^E for a built-in function.
    HardySum(HardySumArgs),
    /// Growth of the atom sums at exponent 3d/4 − ε.
    Sharpness(SharpnessArgs),
    /// Hermite coefficients against their parity-reduced Laguerre form.
    ParityCheck(ParityArgs),
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Eval(a) => &a.out,
            Command::Orthocheck(a) => &a.out,
            Command::KernelCheck(a) => &a.out,
            Command::BoundCheck(a) => &a.out,
            Command::HardySum(a) => &a.out,
            Command::Sharpness(a) => &a.out,
            Command::ParityCheck(a) => &a.out,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Parser, Serialize)]
#[command(name = "hardylab", version, about = "Hermite-type Laguerre expansions: kernels, Hardy sums, sharpness")]
#[command(args_override_self = true)]
pub struct RunConfig {
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub result: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    /// Set when a tolerance or boundedness check failed.
    pub failure: Option<String>,
}

impl Artifact {
    fn new(result: impl Serialize, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Result<Self> {
        Ok(Artifact {
            result: serde_json::to_value(result).map_err(|e| Error::Config(e.to_string()))?,
            csv_header: header,
            csv_rows: rows,
            failure: None,
        })
    }

    fn fail_if(mut self, bad: bool, msg: impl FnOnce() -> String) -> Self {
        if bad {
            self.failure = Some(msg());
        }
        self
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn spec_with(tol: f64) -> QuadSpec {
    QuadSpec::with_tol(tol, QuadSpec::default().rel_tol)
}

fn sample_func(f: Sample, lambda_or_alpha: f64, k_big: usize, delta: Option<f64>) -> Result<Func> {
    if f != Sample::Atom {
        return Ok(f.func());
    }
    let bc = bound_constants(lambda_or_alpha, k_big)?;
    let delta = match delta {
        Some(d) => d,
        None => default_delta(&bc)?,
    };
    let p = AtomParams::new(k_big, delta, bc.c, Alpha::scalar(lambda_or_alpha)?)?;
    make_counterexample_atom(&p)?.to_func()
}

fn hardy_rows(r: &HardyReport, k: Option<usize>) -> Vec<Vec<String>> {
    let k = k.map_or(String::new(), |k| k.to_string());
    let tail = r.tail_estimate.value.map_or("inf".to_string(), num);
    r.partial_sums
        .iter()
        .map(|p| vec![k.clone(), num(r.exponent), p.n.to_string(), num(p.sum), tail.clone()])
        .collect()
}

/// Runs one command. Numerical failures are errors; failed tolerance checks
/// come back as an [`Artifact`] with `failure` set.
pub fn run(cfg: &RunConfig) -> Result<Artifact> {
    match &cfg.command {
        Command::Eval(a) => {
            let d = a.alpha.len();
            if a.k.len() != d || a.u.len() != d {
                return Err(Error::Config(format!("--alpha, --k and --u need the same length ({d})")));
            }
            let n = MultiIndex::new(a.k.clone())?;
            let value = match a.family {
                Family::Laguerre => phi_tensor(&n, &Alpha::new(a.alpha.clone())?, &a.u)?,
                Family::Hermite => gen_hermite(&n, &a.alpha, &a.u)?,
            };
            let fmt_list = |v: &[String]| v.join(" ");
            let row = vec![
                fmt_list(&a.k.iter().map(|k| k.to_string()).collect::<Vec<_>>()),
                fmt_list(&a.u.iter().map(|&u| num(u)).collect::<Vec<_>>()),
                num(value),
            ];
            Artifact::new(json!({ "value": value }), vec!["k", "u", "value"], vec![row])
        }
        Command::Orthocheck(a) => {
            let g = gram_matrix(a.alpha, a.kmax, &QuadSpec::with_tol(1e-13, 1e-12))?;
            let row = vec![num(g.alpha), g.k_max.to_string(), num(g.max_defect), num(g.max_error)];
            Ok(Artifact::new(&g, vec!["alpha", "kmax", "max_defect", "max_error"], vec![row])?
                .fail_if(!(g.max_defect <= a.tol), || format!("max defect {:e} exceeds tol {:e}", g.max_defect, a.tol)))
        }
        Command::KernelCheck(a) => {
            let m = mehler_check(a.alpha, a.r, a.grid, a.tol / 100.0)?;
            let p = KernelParams::scalar(a.alpha, a.r)?;
            let spec = kernel_quad_spec();
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for &u in &[0.3, 1.0, 2.5] {
                for k in 0..=a.kmax {
                    let q = reproduce(&p, u, k, &spec)?;
                    let want = a.r.powi(k as i32) * crate::bases::phi(k, a.alpha, u)?;
                    let diff = (q.value - want).abs();
                    worst = worst.max(diff);
                    rows.push(vec![num(u), k.to_string(), num(q.value), num(want), num(diff)]);
                }
            }
            let result = json!({ "mehler": m, "reproduce_max_diff": worst });
            let bad = !(m.max_abs_diff <= a.tol) || !(worst <= a.tol);
            Ok(Artifact::new(result, vec!["u", "k", "integral", "expected", "diff"], rows)?.fail_if(bad, || {
                format!("kernel check: series diff {:e}, reproduce diff {:e}, tol {:e}", m.max_abs_diff, worst, a.tol)
            }))
        }
        Command::BoundCheck(a) => {
            let spec = kernel_quad_spec();
            let rep = match a.check {
                Check::Prop32 => prop32_sweep(a.alpha, &Prop32Grid::v1(), &spec)?,
                Check::Lemma33 => lemma33_sweep(a.alpha, &Lemma33Grid::v1())?,
                Check::Lemma34 => lemma34_sweep(a.alpha, &Lemma34Grid::v1(), &spec)?,
            };
            let rows = rep
                .rows
                .iter()
                .map(|s| {
                    let opt = |x: Option<f64>| x.map_or(String::new(), num);
                    vec![num(s.alpha), opt(s.r), s.k.map_or(String::new(), |k| k.to_string()), num(s.u), opt(s.v), num(s.ratio)]
                })
                .collect();
            let bounded = rep.bounded();
            let slope = rep.slope.slope;
            Ok(Artifact::new(&rep, vec!["alpha", "r", "k", "u", "v", "ratio"], rows)?
                .fail_if(!bounded, || format!("fitted slope {slope:e} exceeds the boundedness limit")))
        }
        Command::HardySum(a) => {
            let f = sample_func(a.function, a.alpha, a.k_big, a.delta)?;
            let basis = match a.family {
                Family::Laguerre => Basis::Laguerre(Alpha::scalar(a.alpha)?),
                Family::Hermite => Basis::Hermite(vec![a.alpha]),
            };
            let fnd: FuncNd = f.into();
            let r = hardy_sum(&fnd, &basis, a.exponent, a.nmax, &spec_with(a.tol))?;
            let rows = hardy_rows(&r, None);
            Artifact::new(&r, vec!["K", "E", "N", "partial_sum", "tail_estimate"], rows)
        }
        Command::Sharpness(a) => {
            let mut opts = SharpnessOptions::new(Alpha::new(a.alpha.clone())?, a.epsilon, a.k_grid.0.clone());
            opts.delta = a.delta;
            opts.spec = spec_with(a.tol);
            let r = sharpness_sweep(&opts)?;
            let mut rows = Vec::new();
            let e_control = r.control.map_or(f64::NAN, |c| c.exponent);
            for s in &r.k_sweep {
                let tail = |t: &crate::hardy::TailEstimate| t.value.map_or("inf".to_string(), num);
                rows.push(vec![s.k_big.to_string(), num(r.exponent), s.k_big.to_string(), num(s.sum), tail(&s.tail)]);
                rows.push(vec![s.k_big.to_string(), num(e_control), s.k_big.to_string(), num(s.control_sum), tail(&s.control_tail)]);
            }
            Artifact::new(&r, vec!["K", "E", "N", "partial_sum", "tail_estimate"], rows)
        }
        Command::ParityCheck(a) => {
            let spec = spec_with(a.tol / 100.0);
            let f = sample_func(a.function, a.lambda - 0.5, 64, None)?;
            let f = if a.function == Sample::Atom { f.even_extension() } else { f };
            let c = parity_coefficient_check(&f, a.lambda, a.nmax, &spec)?;
            let rows = (0..=a.nmax)
                .map(|n| vec![n.to_string(), num(c.hermite[n]), num(c.reduced[n]), num((c.hermite[n] - c.reduced[n]).abs())])
                .collect();
            let reduction = if a.lambda == 0.0 {
                let bc = bound_constants(-0.5, a.nmax.max(1))?;
                let atom = make_counterexample_atom(&AtomParams::new(a.nmax.max(1), default_delta(&bc)?, bc.c, Alpha::scalar(-0.5)?)?)?;
                let r = parity_reduction_check(&atom.to_func()?, 0.0, a.exponent, a.nmax.max(1), &spec)?;
                Some(r)
            } else {
                None
            };
            let half = if a.lambda == 0.0 {
                Some(halfinteger_ratios(a.nmax.max(1), None, &spec)?.min_ratio)
            } else {
                None
            };
            let bad = !(c.max_defect <= a.tol) || reduction.is_some_and(|r| !r.consistent);
            let defect = c.max_defect;
            let result = json!({ "coefficients": c, "reduction": reduction, "halfinteger_min_ratio": half });
            Ok(Artifact::new(result, vec!["n", "hermite", "reduced", "defect"], rows)?
                .fail_if(bad, || format!("parity check failed: coefficient defect {defect:e}")))
        }
    }
}

/// JSON document: schema, version, resolved config and result.
pub fn render_json(cfg: &RunConfig, art: &Artifact) -> String {
    let doc = json!({
        "schema": SCHEMA,
        "version": VERSION,
        "config": cfg,
        "result": art.result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// CSV with a `#` preamble carrying schema, version and config.
pub fn render_csv(cfg: &RunConfig, art: &Artifact) -> String {
    let mut s = String::new();
    let config = serde_json::to_string(cfg).expect("serializable");
    let _ = writeln!(s, "# schema={SCHEMA} version={VERSION}");
    let _ = writeln!(s, "# config={config}");
    let _ = writeln!(s, "{}", art.csv_header.join(","));
    for r in &art.csv_rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

/// Machine-readable error record.
pub fn error_record(kind: &str, message: &str) -> String {
    let doc = json!({ "schema": SCHEMA, "version": VERSION, "error": { "kind": kind, "message": message } });
    format!("{doc}\n")
}

/// Reads a `key = value` file into `--key value` flags. Blank lines and `#`
/// comments are skipped; `true`/`false` toggle bare flags.
pub fn config_file_args(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        let key = k.trim().replace('_', "-");
        let v = v.trim();
        if key == "config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        match v {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

/// Splices config-file flags in front of the explicit ones, so that the
/// explicit flags override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let inline = args.iter().position(|a| a.to_string_lossy().starts_with("--config="));
    let path = match (pos, inline) {
        (Some(i), _) => args.get(i + 1).map(PathBuf::from),
        (None, Some(i)) => Some(PathBuf::from(&args[i].to_string_lossy()["--config=".len()..])),
        _ => None,
    };
    let Some(path) = path else {
        return Ok(args);
    };
    if args.len() < 2 {
        return Ok(args);
    }
    // list-valued flags accumulate on repetition, so a file flag that is
    // also given explicitly is dropped rather than overridden
    let explicit: Vec<String> = args[2..]
        .iter()
        .filter_map(|a| a.to_str())
        .filter(|a| a.starts_with("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut out = args[..2].to_vec();
    let mut keep = true;
    for a in config_file_args(&path)? {
        if a.starts_with("--") {
            keep = !explicit.contains(&a);
        }
        if keep {
            out.push(OsString::from(a));
        }
    }
    out.extend(args[2..].iter().cloned());
    Ok(out)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn write_out(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

/// Parses, runs and writes. Returns the process exit status: 0 on success,
/// 1 on numerical or tolerance failure, 2 on usage errors.
pub fn main_with_args(args: impl IntoIterator<Item = impl Into<OsString>>) -> i32 {
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprint!("{}", error_record(e.kind(), &e.to_string()));
            return 2;
        }
    };
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprint!("{}", error_record(e.kind(), &e.to_string()));
        return 2;
    }
    let out = cfg.command.output();
    match run(&cfg) {
        Ok(art) => {
            let text = match out.format {
                Format::Json => render_json(&cfg, &art),
                Format::Csv => render_csv(&cfg, &art),
            };
            if let Err(e) = write_out(out.output.as_deref(), &text) {
                eprint!("{}", error_record("io", &e.to_string()));
                return 1;
            }
            match art.failure {
                Some(msg) => {
                    eprint!("{}", error_record("tolerance", &msg));
                    1
                }
                None => 0,
            }
        }
        Err(e) => {
            let code = if matches!(e, Error::Config(_)) { 2 } else { 1 };
            let rec = error_record(e.kind(), &e.to_string());
            eprint!("{rec}");
            if let Some(p) = out.output.as_deref() {
                let _ = std::fs::write(p, &rec);
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<RunConfig, clap::Error> {
        RunConfig::try_parse_from(std::iter::once("hardylab").chain(args.iter().copied()))
    }

    #[test]
    fn k_grid_syntax() {
        assert_eq!("16:128:x2".parse::<KGrid>().unwrap().0, vec![16, 32, 64, 128]);
        assert_eq!("4,8,9".parse::<KGrid>().unwrap().0, vec![4, 8, 9]);
        assert!("16:128:2".parse::<KGrid>().is_err());
        assert!("0:8:x2".parse::<KGrid>().is_err());
    }

    #[test]
    fn flags_parse_and_override() {
        let c = parse(&["eval", "--alpha", "0.5", "--k", "3", "--u", "1.0"]).unwrap();
        assert!(matches!(c.command, Command::Eval(ref e) if e.k == vec![3]));
        let c = parse(&["orthocheck", "--alpha", "-0.5", "--kmax", "8", "--kmax", "16"]).unwrap();
        assert!(matches!(c.command, Command::Orthocheck(ref o) if o.kmax == 16 && o.alpha == -0.5));
        assert!(parse(&["orthocheck"]).is_err());
        assert!(parse(&["sharpness", "--alpha", "0", "--k-grid", "1:2:3"]).is_err());
    }

    #[test]
    fn eval_runs() {
        let c = parse(&["eval", "--alpha", "0.5", "--k", "3", "--u", "1.0"]).unwrap();
        let a = run(&c).unwrap();
        let v = a.result["value"].as_f64().unwrap();
        assert!((v - crate::bases::phi(3, 0.5, 1.0).unwrap()).abs() < 1e-15);
        let j = render_json(&c, &a);
        assert!(j.contains("\"schema\": 1") && j.contains("\"command\": \"eval\""));
    }
}

//! Command-line front end: class-number caches, traces, murmuration series,
//! the limiting measure ν and the checks around it.

use clap::{Args, Parser, Subcommand, ValueEnum};
use murmur_core::classnum::{sieve_class_numbers, ClassNumberTable};
use murmur_core::compare::{compare, Curve};
use murmur_core::interval::{Endpoint, Interval};
use murmur_core::murmur::{compute_series, MurmurationRequest, SummandDomain, Weighting};
use murmur_core::nu::{Cutoff, NuContext, NuEvaluation, NuWeight};
use murmur_core::numeric::ZETA2;
use murmur_core::qexp::oracle_trace;
use murmur_core::trace::{weight_progression, TraceContext};
use murmur_core::window::WindowFunction;
use num_bigint::BigInt;
use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] murmur_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use murmur_core::Error as E;
        match self {
            CliError::Core(E::OutOfRange { .. }) => EXIT_CAPACITY,
            CliError::Core(E::Io(_) | E::Format(_)) | CliError::Io { .. } => EXIT_IO,
            CliError::Input(_) => EXIT_IO,
            _ => EXIT_USAGE,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Attach the path to a core I/O error.
fn with_path(path: &Path) -> impl FnOnce(murmur_core::Error) -> CliError + '_ {
    move |e| match e {
        murmur_core::Error::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other.into(),
    }
}

#[derive(Debug, Parser)]
#[command(name = "murmur", version, about = "Weight-aspect murmurations of level-1 modular forms")]
pub struct Cli {
    /// Worker threads (default: MURMUR_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sieve class numbers and write a cache file.
    Sieve(SieveArgs),
    /// Tr T_n on S_k(1) for n ≤ nmax, as TSV.
    Trace(TraceArgs),
    /// The murmuration series over a weight progression.
    Murmur(MurmurArgs),
    /// ν(E) by both formulas, or a cumulative ν([0, t]) curve.
    Nu(NuArgs),
    /// Compare a murmuration CSV with a ν curve CSV.
    Compare(CompareArgs),
    /// Numeric check of the major-arc main term.
    Propcircle(PropCircleArgs),
    /// Identities of the window W and its Fourier transform.
    WindowSelftest,
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    /// Largest |D| to cover.
    #[arg(long)]
    pub dmax: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub nmax: u64,
    /// Check every trace against the q-expansion oracle (k ≤ 26).
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightingArg {
    Unit,
    SqrtP,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DomainArg {
    Primes,
    Integers,
}

#[derive(Debug, Args)]
pub struct MurmurArgs {
    #[arg(long = "K")]
    pub big_k: f64,
    #[arg(long = "H")]
    pub big_h: f64,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub delta: u8,
    /// Interval of n/N, e.g. 0:2 or 1/4:4.
    #[arg(long = "E")]
    pub interval: String,
    /// Class number cache from `sieve`; sieved in memory when absent.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// CSV of the series; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary; stdout when absent and --out is given.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "unit")]
    pub weighting: WeightingArg,
    #[arg(long, value_enum, default_value = "primes")]
    pub domain: DomainArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightArg {
    Cubic,
    Quartic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CutoffArg {
    Smooth,
    Sharp,
}

#[derive(Debug, Args)]
pub struct NuArgs {
    /// Single interval u:v.
    #[arg(long = "E", conflicts_with = "grid")]
    pub interval: Option<String>,
    /// Cumulative curve lo:hi:n, n + 1 points.
    #[arg(long, required_unless_present = "interval")]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 5000)]
    pub qmax: u64,
    #[arg(long, default_value_t = 5000)]
    pub tmax: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub quad_tol: f64,
    #[arg(long, value_enum, default_value = "cubic")]
    pub weight: WeightArg,
    #[arg(long, value_enum, default_value = "smooth")]
    pub cutoff: CutoffArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// CSV written by `murmur`.
    #[arg(long)]
    pub murmur: PathBuf,
    /// CSV written by `nu --grid`.
    #[arg(long)]
    pub nu: PathBuf,
    /// Sign (−1)^δ applied to ν.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub delta: u8,
    /// Points of the common grid, spread over (0, last p/N].
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 2.0)]
    pub at: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PropCircleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: i64,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse, run, and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let env = match std::env::var("MURMUR_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Check(format!("MURMUR_THREADS must be a positive integer, got '{v}'")))?,
        ),
        Err(_) => None,
    };
    let Some(n) = flag.or(env) else {
        return Ok(());
    };
    if n == 0 {
        return Err(CliError::Check("thread count must be positive".into()));
    }
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Sieve(a) => cmd_sieve(&a),
        Command::Trace(a) => cmd_trace(&a),
        Command::Murmur(a) => cmd_murmur(&a),
        Command::Nu(a) => cmd_nu(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Propcircle(a) => cmd_propcircle(&a),
        Command::WindowSelftest => cmd_window_selftest(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A buffered sink: the file at `path`, or stdout.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>, path: Option<&Path>) -> Result<()> {
    w.flush().map_err(io_err(path.unwrap_or(Path::new("<stdout>"))))
}

fn write_json(value: &serde_json::Value, path: Option<&Path>) -> Result<()> {
    let mut w = sink(path)?;
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    writeln!(w, "{text}").map_err(io_err(path.unwrap_or(Path::new("<stdout>"))))?;
    finish(w, path)
}

/// `x` with 12 significant digits, in the shorter of fixed and exponent form.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cmd_sieve(a: &SieveArgs) -> Result<()> {
    if a.dmax < 3 {
        return Err(CliError::Check("--dmax must be at least 3".into()));
    }
    let table = sieve_class_numbers(a.dmax)?;
    table.save(&a.out).map_err(with_path(&a.out))?;
    println!("{}", json!({ "bound": table.bound(), "out": a.out.display().to_string() }));
    Ok(())
}

fn cmd_trace(a: &TraceArgs) -> Result<()> {
    if a.nmax == 0 {
        return Err(CliError::Check("--nmax must be positive".into()));
    }
    let ctx = TraceContext::new(a.nmax)?;
    let mut w = sink(a.out.as_deref())?;
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    writeln!(w, "n\ttrace\tnormalized_sum").map_err(io_err(&path))?;
    for n in 1..=a.nmax {
        let tr: BigInt = ctx.trace_hecke(a.k, n)?;
        let normalized = if a.k >= 4 { ctx.eigenvalue_sum(a.k, n)? } else { 0.0 };
        if a.verify {
            let oracle = oracle_trace(a.k, n)?;
            if oracle != tr {
                return Err(CliError::Check(format!("k={}, n={n}: trace {tr} but oracle {oracle}", a.k)));
            }
        }
        writeln!(w, "{n}\t{tr}\t{}", sig12(normalized)).map_err(io_err(&path))?;
    }
    finish(w, a.out.as_deref())
}

fn load_or_sieve(cache: Option<&Path>, required: u64) -> Result<ClassNumberTable> {
    match cache {
        Some(p) => {
            let table = ClassNumberTable::load(p).map_err(with_path(p))?;
            if table.bound() < required {
                return Err(murmur_core::Error::OutOfRange {
                    what: "class number cache",
                    required,
                    available: table.bound(),
                }
                .into());
            }
            Ok(table)
        }
        None => Ok(sieve_class_numbers(required.max(4))?),
    }
}

fn cmd_murmur(a: &MurmurArgs) -> Result<()> {
    let interval: Interval = a.interval.parse()?;
    let weighting = match a.weighting {
        WeightingArg::Unit => Weighting::Unit,
        WeightingArg::SqrtP => Weighting::SqrtP,
    };
    let domain = match a.domain {
        DomainArg::Primes => SummandDomain::Primes,
        DomainArg::Integers => SummandDomain::Integers,
    };
    let req = MurmurationRequest::new(a.delta, a.big_k, a.big_h, interval)?
        .with_weighting(weighting)
        .with_domain(domain);
    let table = load_or_sieve(a.cache.as_deref(), req.required_bound())?;
    let ctx = TraceContext::from_table(table);
    let series = compute_series(&req, &ctx)?;

    let mut w = sink(a.out.as_deref())?;
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    writeln!(w, "p,p_over_N,numerator_term,denominator_term,cumulative_r").map_err(io_err(&path))?;
    for (p, r) in series.points.iter().zip(&series.cumulative) {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.n,
            sig12(p.n_over_conductor),
            sig12(p.numerator),
            sig12(p.denominator),
            sig12(*r)
        )
        .map_err(io_err(&path))?;
    }
    finish(w, a.out.as_deref())?;

    let (k_min, m) = weight_progression(req.big_k, req.big_h, req.delta);
    let n = series.conductor;
    let summary = json!({
        "N": n,
        "K": req.big_k,
        "H": req.big_h,
        "delta": req.delta,
        "E": interval.to_string(),
        "weighting": format!("{:?}", a.weighting).to_lowercase(),
        "domain": format!("{:?}", a.domain).to_lowercase(),
        "weights": { "k_min": k_min, "count": m },
        "points": series.points.len(),
        "num_total": series.numerator_total,
        "den_total": series.denominator_total,
        "ratio": series.ratio(),
        "den_over_sqrt_N": series.denominator_total / n.sqrt(),
        "den_prediction": req.big_h * req.big_k * req.big_k * interval.length() / (96.0 * std::f64::consts::PI),
        "r_endpoints": {
            "u": series.cumulative.first().copied(),
            "v": series.cumulative.last().copied(),
        },
    });
    match (&a.summary, &a.out) {
        (Some(p), _) => write_json(&summary, Some(p)),
        (None, Some(_)) => write_json(&summary, None),
        (None, None) => Ok(()),
    }
}

#[derive(Serialize)]
struct EndpointTermOut {
    a: u64,
    q: u64,
    halved: bool,
    mass: f64,
}

fn evaluation_json(ev: &NuEvaluation) -> serde_json::Value {
    let r = &ev.rational;
    let terms: Vec<EndpointTermOut> = r
        .endpoint_terms
        .iter()
        .map(|t| EndpointTermOut {
            a: t.a,
            q: t.q,
            halved: t.halved,
            mass: t.mass,
        })
        .collect();
    json!({
        "E": ev.interval.to_string(),
        "weight": format!("{:?}", ev.weight).to_lowercase(),
        "rational": {
            "value": r.value,
            "corrected": r.corrected(),
            "q_max": r.q_max,
            "tail_estimate": r.tail_estimate,
            "tail_constant": r.tail_constant,
            "endpoint_terms": terms,
        },
        "fourier": ev.fourier.as_ref().map(|f| json!({
            "value": f.value,
            "t_max": f.t_max,
            "cutoff": format!("{:?}", f.cutoff).to_lowercase(),
            "quad_tol": f.quad_tol,
            "truncation_estimate": f.truncation_estimate,
            "quadrature_error": f.quadrature_error,
        })),
        "difference": ev.difference(),
        "combined_bound": ev.combined_bound(),
    })
}

/// lo:hi:n as n + 1 grid points, exact when both ends are.
pub fn parse_grid(s: &str) -> Result<Vec<Endpoint>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(CliError::Check(format!("grid '{s}' is not of the form lo:hi:n")));
    };
    let lo: Endpoint = lo.parse()?;
    let hi: Endpoint = hi.parse()?;
    let n: i64 = n
        .trim()
        .parse()
        .map_err(|_| CliError::Check(format!("grid count '{n}' is not an integer")))?;
    if n < 1 || !(lo.value() >= 0.0 && lo.value() < hi.value()) {
        return Err(CliError::Check(format!("grid '{s}' needs 0 ≤ lo < hi and n ≥ 1")));
    }
    Ok((0..=n)
        .map(|j| match (lo.exact(), hi.exact()) {
            (Some(l), Some(h)) => Endpoint::Exact(l + (h - l) * Ratio::new(j, n)),
            _ => Endpoint::Float(lo.value() + (hi.value() - lo.value()) * j as f64 / n as f64),
        })
        .collect())
}

fn cmd_nu(a: &NuArgs) -> Result<()> {
    let weight = match a.weight {
        WeightArg::Cubic => NuWeight::Cubic,
        WeightArg::Quartic => NuWeight::Quartic,
    };
    let cutoff = match a.cutoff {
        CutoffArg::Smooth => Cutoff::Smooth,
        CutoffArg::Sharp => Cutoff::Sharp,
    };
    if a.qmax == 0 {
        return Err(CliError::Check("--qmax must be positive".into()));
    }
    let ctx = NuContext::new(a.qmax.max(a.tmax))?;
    if let Some(e) = &a.interval {
        let e: Interval = e.parse()?;
        let ev = ctx.evaluate(&e, a.qmax, a.tmax, a.quad_tol, weight, cutoff)?;
        return write_json(&evaluation_json(&ev), a.out.as_deref());
    }
    let grid = parse_grid(a.grid.as_deref().expect("clap requires --grid without --E"))?;
    let values = ctx.cumulative(&grid, a.qmax, weight)?;
    let mut w = sink(a.out.as_deref())?;
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    writeln!(w, "t,nu_cumulative_rational,nu_cumulative_fourier_if_available").map_err(io_err(&path))?;
    for (t, v) in grid.iter().zip(values) {
        // the Fourier form needs u > 0, so it is never available for [0, t]
        writeln!(w, "{},{},", sig12(t.value()), sig12(v)).map_err(io_err(&path))?;
    }
    finish(w, a.out.as_deref())
}

/// Two named columns of a CSV file.
pub fn read_columns(path: &Path, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Input(format!("{}: empty file", path.display())))?
        .map_err(io_err(path))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        names
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| CliError::Input(format!("{}: no column '{name}'", path.display())))
    };
    let (ix, iy) = (find(x)?, find(y)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |j: usize| -> Result<f64> {
            cells
                .get(j)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| CliError::Input(format!("{}: bad value on line {}", path.display(), i + 2)))
        };
        xs.push(get(ix)?);
        ys.push(get(iy)?);
    }
    Ok((xs, ys))
}

/// Prepend (0, 0) when the samples start after 0: r and ν([0, t]) both vanish there.
fn curve_from_zero(mut t: Vec<f64>, mut y: Vec<f64>) -> Result<Curve> {
    if t.first().is_none_or(|&t0| t0 > 0.0) {
        t.insert(0, 0.0);
        y.insert(0, 0.0);
    }
    Ok(Curve::new(t, y)?)
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    if a.points < 2 {
        return Err(CliError::Check("--points must be at least 2".into()));
    }
    let (mt, my) = read_columns(&a.murmur, "p_over_N", "cumulative_r")?;
    let (nt, ny) = read_columns(&a.nu, "t", "nu_cumulative_rational")?;
    let murmur = curve_from_zero(mt, my)?;
    let nu = curve_from_zero(nt, ny)?;
    let end = *murmur.t.last().expect("nonempty");
    let grid: Vec<f64> = (1..=a.points).map(|j| end * j as f64 / a.points as f64).collect();
    let resampled = Curve::new(grid.clone(), murmur.resample(&grid)?)?;
    let sign = if a.delta == 0 { 1.0 } else { -1.0 };
    let c = compare(&resampled, &nu, sign, a.at.min(end))?;
    write_json(
        &json!({
            "points": c.points,
            "grid_end": end,
            "sign": c.sign,
            "max_abs_deviation": c.max_abs_deviation,
            "deviation_at": { "t": c.deviation_at.0, "value": c.deviation_at.1 },
            "pearson": c.pearson,
        }),
        a.out.as_deref(),
    )
}

fn cmd_propcircle(a: &PropCircleArgs) -> Result<()> {
    let span = murmur_core::nu::PROP_CIRCLE_SPAN;
    let ctx = NuContext::new((span * a.x.max(1.0)).ceil() as u64)?;
    let window = WindowFunction::new();
    let r = ctx.prop_circle_check(a.a, a.q, a.theta, a.x, &window)?;
    write_json(
        &json!({
            "a": a.a,
            "q": a.q,
            "theta": a.theta,
            "x": a.x,
            "t_max": r.t_max,
            "lhs": r.lhs,
            "main_term": r.main_term,
            "residual": r.residual,
            "residual_times_x": r.residual * a.x,
        }),
        a.out.as_deref(),
    )
}

fn cmd_window_selftest() -> Result<()> {
    let w = WindowFunction::new();
    let mut checks: Vec<(&str, f64, f64)> = Vec::new();
    checks.push(("W(0) = 1", (w.eval(0.0) - 1.0).abs(), 1e-12));
    checks.push(("W(1/2) = 1/2", (w.eval(0.5) - 0.5).abs(), 1e-12));
    let partition = (0..=100)
        .map(|i| {
            let x = i as f64 / 100.0;
            (w.eval(x) + w.eval(1.0 - x) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    checks.push(("W(x) + W(1 − x) = 1", partition, 1e-10));
    checks.push(("Ŵ(0) = 1", (w.eval_hat(0.0) - 1.0).abs(), 1e-10));
    let integers = (1..=20).map(|l| w.eval_hat(l as f64).abs()).fold(0.0, f64::max);
    checks.push(("Ŵ(ℓ) = 0 for ℓ = 1..20", integers, 1e-13));
    checks.push(("|Ŵ(120)| below cutoff", w.eval_hat(120.0).abs(), 1e-12));
    let poisson = [(30i64, 40.0, 0.37), (3850, 25.0, 1.1), (602, 15.0, -0.8)]
        .iter()
        .map(|&(k0, h, phi)| (w.cosine_progression_sum(k0, h, phi) - w.cosine_progression_poisson(k0, h, phi)).abs())
        .fold(0.0, f64::max);
    checks.push(("Poisson summation over k₀ + 4ℤ", poisson, 1e-7));
    let mut failed = 0;
    for (name, err, tol) in &checks {
        let ok = err <= tol;
        failed += usize::from(!ok);
        println!("{} {name}: error {err:.3e} (tolerance {tol:.0e})", if ok { "ok  " } else { "FAIL" });
    }
    println!("ζ(2) = {ZETA2}, c = {}", w.c());
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} window checks failed")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(123456.789), "123456.789");
        assert_eq!(sig12(1.234e-9), "1.234e-9");
        assert_eq!(sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(sig12(std::f64::consts::PI * 1e5), "314159.265359");
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:2:200").unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[100], Endpoint::Exact(Ratio::from_integer(1)));
        assert_eq!(g[0].value(), 0.0);
        let f = parse_grid("0.5:1.5:4").unwrap();
        assert_eq!(f[2], Endpoint::Float(1.0));
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn exit_codes() {
        let cap = CliError::Core(murmur_core::Error::OutOfRange {
            what: "x",
            required: 2,
            available: 1,
        });
        assert_eq!(cap.exit_code(), EXIT_CAPACITY);
        assert_eq!(CliError::Core(murmur_core::Error::Format("bad".into())).exit_code(), EXIT_IO);
        assert_eq!(CliError::Check("x".into()).exit_code(), EXIT_USAGE);
    }
}

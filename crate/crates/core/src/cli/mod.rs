//! The `polymix` command line.

pub mod args;
pub mod output;
pub mod simulate;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rayon::prelude::*;

use crate::chains::{image_gibbs_model, ChainSpec, State};
use crate::convergence::{
    chisq_brute_force, chisq_exact_rational, mixing_bounds, mixing_bounds_normal_ar, steps_to_epsilon,
    tv_upper, MixingBound, SpectralSum,
};
use crate::error::{Error, Result};
use crate::numerics::{ratio_to_f64, ExactScalar};
use crate::spectra::{eigenvalues, normal_ar_spectrum};
use crate::verify::{check, check_eigenfunctions, CheckResult, Scope};

use args::{ChainArgs, OutputArgs};
use output::{exact_pair, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "polymix", version, about = "Exact chi-square mixing analysis for urn chains and Gaussian AR processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and multiplicities
    Spectrum {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Chi-square curve from the start state
    Chisq(ChisqArgs),
    /// Closed-form step thresholds for a corner start
    Bounds {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Comma-separated values of c
        #[arg(long, default_value = "0,0.5,1,2")]
        c: String,
    },
    /// Replica histograms at checkpoints
    Simulate(SimulateArgs),
    /// Exact oracle checks
    Verify(VerifyArgs),
    /// Gaussian image restoration sweep: spectrum, thresholds and curve
    ImageDemo(ImageArgs),
}

#[derive(Debug, Args)]
pub struct ChisqArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long, default_value_t = 100)]
    pub l_max: u64,
    /// Also report the first step with chi-square at most eps
    #[arg(long)]
    pub eps: Option<f64>,
    /// Also report the closed-form thresholds at this c
    #[arg(long)]
    pub c: Option<f64>,
    /// Exact rational spectral sum
    #[arg(long)]
    pub exact: bool,
    /// Compute from matrix powers instead of the spectral sum
    #[arg(long, value_enum)]
    pub oracle: Option<Oracle>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Stat {
    Watterson,
    Counts,
    Coordinate,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long, default_value_t = 5000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    /// Comma-separated checkpoints; defaults to 1,10,50,100,200,500,1000 up to --steps
    #[arg(long)]
    pub checkpoints: Option<String>,
    #[arg(long, value_enum, default_value_t = Stat::Watterson)]
    pub stat: Stat,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyScope {
    Orthogonality,
    Eigenfunctions,
    Kernels,
    Balance,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = VerifyScope::All)]
    pub scope: VerifyScope,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Test fixture: shift the degree-1 eigenvalue by 1/100
    #[arg(long, hide = true)]
    pub corrupt_eigenvalue: bool,
}

#[derive(Debug, Args)]
pub struct ImageArgs {
    #[arg(long, default_value_t = 100.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// `rows x cols`, or a single side length
    #[arg(long, default_value = "16x16")]
    pub grid: String,
    #[arg(long, default_value_t = 30)]
    pub l_max: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Result of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    VerificationFailed,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity { .. } => EXIT_CAPACITY,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::VerificationFailed) => EXIT_VERIFY,
        Err(e) => {
            eprintln!("polymix: {e}");
            if matches!(e, Error::Capacity { .. }) {
                eprintln!("hint: lower --N or --d, or use a corner start (--start Ne1) and drop --exact/--oracle");
            }
            exit_code(&e)
        }
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Spectrum { chain, out } => cmd_spectrum(&chain, &out),
        Command::Chisq(a) => cmd_chisq(&a),
        Command::Bounds { chain, out, c } => cmd_bounds(&chain, &out, &c),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::ImageDemo(a) => cmd_image_demo(&a),
    }
    .map(|_| Outcome::Done)
    .or_else(|e| match e {
        Error::Domain(ref msg) if msg == VERIFY_FAILED => Ok(Outcome::VerificationFailed),
        e => Err(e),
    })
}

const VERIFY_FAILED: &str = "verification failed";

fn table_for(command: &str, spec: &ChainSpec, columns: &[&'static str]) -> Table {
    let mut t = Table::new(command, columns);
    t.meta("chain", spec);
    t
}

fn cmd_spectrum(chain: &ChainArgs, out: &OutputArgs) -> Result<()> {
    let spec = chain.spec()?;
    if let ChainSpec::NormalAr { a, sigma } = &spec {
        let s = normal_ar_spectrum(a, sigma)?;
        let mut t = table_for("spectrum", &spec, &["index", "lambda"]);
        for (i, l) in s.lambdas.iter().enumerate() {
            t.push(vec![Cell::Int(i as u64 + 1), Cell::Float(*l)]);
        }
        return t.write(out.out.as_deref(), out.format);
    }
    let mut t = table_for("spectrum", &spec, &["n", "beta_exact", "beta", "multiplicity"]);
    for term in eigenvalues(&spec)? {
        let [e, f] = exact_pair(term.eigenvalue);
        t.push(vec![Cell::Int(term.degree), e, f, Cell::Text(term.multiplicity.to_string())]);
    }
    t.write(out.out.as_deref(), out.format)
}

fn corner_color(spec: &ChainSpec, x: &[u64]) -> Option<usize> {
    let pop = spec.population();
    x.iter().position(|&v| v == pop).filter(|_| pop > 0)
}

fn bound_meta(t: &mut Table, b: &MixingBound) {
    t.meta("bound", b);
}

fn cmd_chisq(a: &ChisqArgs) -> Result<()> {
    let spec = a.chain.spec()?;
    let start = a.chain.start(&spec)?;
    let x = match start {
        State::Point(x) => return chisq_ar(a, &spec, &x),
        State::Counts(x) => x,
    };
    let exact = a.exact || a.oracle.is_some();
    let columns: &[&'static str] = if exact { &["l", "chisq_exact", "chisq", "tv_upper"] } else { &["l", "chisq", "tv_upper"] };
    let mut t = table_for("chisq", &spec, columns);
    t.meta("start", &x);
    t.meta("l_max", a.l_max);
    t.meta("method", if exact { "exact" } else { "spectral" });
    if exact {
        let values: Vec<ExactScalar> = match a.oracle {
            Some(Oracle::Matrix) => chisq_brute_force(&spec, &x, a.l_max)?.into_iter().map(|(c, _)| c).collect(),
            None => (0..=a.l_max).into_par_iter().map(|l| chisq_exact_rational(&spec, &x, l)).collect::<Result<_>>()?,
        };
        for (l, v) in values.into_iter().enumerate() {
            let f = ratio_to_f64(&v);
            t.push(vec![Cell::Int(l as u64), Cell::Exact(v), Cell::Float(f), Cell::Float(tv_upper(f))]);
        }
    } else {
        let sum = SpectralSum::new(&spec, &x)?;
        let points: Vec<f64> = (0..=a.l_max).into_par_iter().map(|l| sum.eval(l)).collect();
        for (l, v) in points.into_iter().enumerate() {
            t.push(vec![Cell::Int(l as u64), Cell::Float(v), Cell::Float(tv_upper(v))]);
        }
    }
    if let Some(eps) = a.eps {
        let steps = steps_to_epsilon(&spec, &x, eps)?;
        eprintln!("steps to chi-square <= {eps}: {steps}");
        t.meta("eps", eps);
        t.meta("steps_to_epsilon", steps);
    }
    if let (Some(c), Some(i)) = (a.c, corner_color(&spec, &x)) {
        bound_meta(&mut t, &mixing_bounds(&spec, i, c)?);
    }
    t.write(a.out.out.as_deref(), a.out.format)
}

fn chisq_ar(a: &ChisqArgs, spec: &ChainSpec, x: &DVector<f64>) -> Result<()> {
    let ChainSpec::NormalAr { a: mat, sigma } = spec else { unreachable!() };
    if a.exact || a.oracle.is_some() {
        return Err(Error::Unsupported("--exact and --oracle apply to finite chains".into()));
    }
    let s = normal_ar_spectrum(mat, sigma)?;
    let mut t = table_for("chisq", spec, &["l", "chisq", "tv_upper"]);
    t.meta("start", x.as_slice());
    t.meta("l_max", a.l_max);
    t.meta("lambda_1", s.lambdas.first().copied().unwrap_or(0.0));
    t.push(vec![Cell::Int(0), Cell::Float(f64::INFINITY), Cell::Float(f64::INFINITY)]);
    let points = (1..=a.l_max).into_par_iter().map(|l| s.chisq(x, l)).collect::<Result<Vec<_>>>()?;
    for (l, v) in points.into_iter().enumerate() {
        t.push(vec![Cell::Int(l as u64 + 1), Cell::Float(v), Cell::Float(tv_upper(v))]);
    }
    if let Some(c) = a.c {
        if x.iter().all(|v| *v == 0.0) {
            bound_meta(&mut t, &mixing_bounds_normal_ar(mat, sigma, c)?);
        }
    }
    t.write(a.out.out.as_deref(), a.out.format)
}

fn cmd_bounds(chain: &ChainArgs, out: &OutputArgs, cs: &str) -> Result<()> {
    let spec = chain.spec()?;
    let cs = args::expand_list(cs)?
        .iter()
        .map(|c| c.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad c {c:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut t = table_for(
        "bounds",
        &spec,
        &["c", "upper", "upper_level", "lower", "lower_level", "rate", "asymptotic", "upper_applies"],
    );
    let color = match chain.start(&spec)? {
        State::Counts(x) => Some(corner_color(&spec, &x).ok_or_else(|| Error::Domain("bounds need a corner start".into()))?),
        State::Point(p) if p.iter().all(|v| *v == 0.0) => None,
        State::Point(_) => return Err(Error::Domain("AR bounds need the start 0".into())),
    };
    if let Some(i) = color {
        t.meta("start", format!("Ne{}", i + 1));
    }
    for c in cs {
        let b = match (&spec, color) {
            (ChainSpec::NormalAr { a, sigma }, _) => mixing_bounds_normal_ar(a, sigma, c)?,
            (_, Some(i)) => mixing_bounds(&spec, i, c)?,
            _ => unreachable!(),
        };
        t.push(vec![
            Cell::Float(c),
            Cell::Float(b.upper),
            Cell::Float(b.upper_level),
            Cell::Float(b.lower),
            Cell::Float(b.lower_level),
            Cell::Float(b.rate),
            Cell::Float(b.asymptotic.unwrap_or(f64::NAN)),
            Cell::Text(b.upper_applies.to_string()),
        ]);
    }
    t.write(out.out.as_deref(), out.format)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let spec = a.chain.spec()?;
    let start = a.chain.start(&spec)?;
    if a.bins == 0 {
        return Err(Error::InvalidParameter("--bins must be positive".into()));
    }
    let checkpoints = match &a.checkpoints {
        Some(s) => args::parse_counts(s, None, "checkpoints")?,
        None => simulate::checkpoints_for(a.steps),
    };
    let finite = spec.is_finite();
    match (a.stat, finite) {
        (Stat::Coordinate, true) => return Err(Error::InvalidParameter("--stat coordinate is for normal-ar".into())),
        (Stat::Watterson | Stat::Counts, false) => {
            return Err(Error::InvalidParameter("normal-ar supports --stat coordinate only".into()))
        }
        _ => {}
    }
    let runs = simulate::run_replicas(&spec, &start, a.replicas, &checkpoints, a.out.seed)?;
    let mut t;
    match a.stat {
        Stat::Watterson | Stat::Coordinate => {
            t = table_for("simulate", &spec, &["step", "bin", "lo", "hi", "count", "freq", "stationary"]);
            let (lo, hi) = simulate::coordinate_range(&spec).unwrap_or((0.0, 1.0));
            let stationary = if finite {
                simulate::stationary_watterson_bins(&spec, a.bins).ok()
            } else {
                simulate::stationary_coordinate_bins(&spec, a.bins)
            };
            let width = (hi - lo) / a.bins as f64;
            for (c, states) in checkpoints.iter().zip(&runs) {
                let h = if finite {
                    simulate::watterson_histogram(states, a.bins)
                } else {
                    simulate::coordinate_histogram(states, lo, hi, a.bins)
                };
                for (k, count) in h.into_iter().enumerate() {
                    t.push(vec![
                        Cell::Int(*c),
                        Cell::Int(k as u64),
                        Cell::Float(lo + k as f64 * width),
                        Cell::Float(lo + (k + 1) as f64 * width),
                        Cell::Int(count),
                        Cell::Float(count as f64 / a.replicas as f64),
                        Cell::Float(stationary.as_ref().map_or(f64::NAN, |s| s[k])),
                    ]);
                }
            }
        }
        Stat::Counts => {
            t = table_for("simulate", &spec, &["step", "state", "count", "freq", "stationary"]);
            for (c, states) in checkpoints.iter().zip(&runs) {
                let mut tally = std::collections::BTreeMap::<Vec<u64>, u64>::new();
                for s in states {
                    if let State::Counts(x) = s {
                        *tally.entry(x.clone()).or_default() += 1;
                    }
                }
                for (x, count) in tally {
                    let label = x.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
                    t.push(vec![
                        Cell::Int(*c),
                        Cell::Text(label),
                        Cell::Int(count),
                        Cell::Float(count as f64 / a.replicas as f64),
                        Cell::Float(ratio_to_f64(&spec.stationary_pmf(&x)?)),
                    ]);
                }
            }
        }
    }
    match &start {
        State::Counts(x) => t.meta("start", x),
        State::Point(p) => t.meta("start", p.as_slice()),
    }
    t.meta("replicas", a.replicas);
    t.meta("seed", a.out.seed);
    t.meta("stat", format!("{:?}", a.stat).to_lowercase());
    t.write(a.out.out.as_deref(), a.out.format)
}

/// Small instances of every finite family used when `verify` gets no `--chain`.
pub fn default_suite(n: u64, d: usize) -> Result<Vec<ChainSpec>> {
    if n == 0 || d < 2 {
        return Err(Error::InvalidParameter("the default suite needs N >= 1 and d >= 2".into()));
    }
    let alpha: Vec<ExactScalar> = (1..=d as i64).map(|i| ExactScalar::new(i.into(), 2.into())).collect();
    let uniform = vec![ExactScalar::new(1.into(), (d as i64).into()); d];
    let p: Vec<ExactScalar> = {
        // 1, 2, ..., d normalized
        let total = (d * (d + 1) / 2) as i64;
        (1..=d as i64).map(|i| ExactScalar::new(i.into(), total.into())).collect()
    };
    let m = ExactScalar::new(1.into(), 4.into());
    let caps = vec![n; d];
    let s = n.min(2);
    let mut specs = vec![
        ChainSpec::PolyaLevel { n, alpha: alpha.clone(), s },
        ChainSpec::PolyaDownUp { n, alpha: alpha.clone(), s },
        ChainSpec::PolyaUpDown { n, alpha: alpha.clone(), s },
        ChainSpec::Moran { n, m: m.clone(), p: p.clone() },
        ChainSpec::GibbsDm { n, alpha },
        ChainSpec::BlLevel { caps: caps.clone(), n, s: 1 },
        ChainSpec::BlDownUp { caps: caps.clone(), n, s },
        ChainSpec::BlUpDown { caps, n, s: 1 },
        ChainSpec::Ehrenfest { n, p: uniform, s: 1 },
    ];
    if n >= 2 {
        specs.insert(4, ChainSpec::Hubbell { n, m, p });
    }
    Ok(specs)
}

fn cmd_verify(a: &VerifyArgs) -> Result<()> {
    let specs = if a.chain.chain.is_some() {
        vec![a.chain.spec()?]
    } else {
        default_suite(a.chain.n.unwrap_or(3), a.chain.d.unwrap_or(3))?
    };
    let scopes: Vec<Scope> = match a.scope {
        VerifyScope::Orthogonality => vec![Scope::Orthogonality],
        VerifyScope::Eigenfunctions => vec![Scope::Eigenfunctions],
        VerifyScope::Kernels => vec![Scope::Kernels],
        VerifyScope::Balance => vec![Scope::Balance],
        VerifyScope::All => Scope::ALL.to_vec(),
    };
    let mut results: Vec<CheckResult> = Vec::new();
    for spec in &specs {
        for &scope in &scopes {
            let r = if scope == Scope::Eigenfunctions && a.corrupt_eigenvalue {
                let mut terms = eigenvalues(spec)?;
                if let Some(t) = terms.iter_mut().find(|t| t.degree == 1) {
                    t.eigenvalue += ExactScalar::new(1.into(), 100.into());
                }
                check_eigenfunctions(spec, Some(&terms))?
            } else {
                check(spec, scope)?
            };
            results.push(r);
        }
    }
    let mut t = Table::new("verify", &["scope", "chain", "passed", "checked", "failure"]);
    t.meta("chains", &specs);
    for r in &results {
        t.push(vec![
            Cell::Text(r.scope.name().into()),
            Cell::Text(r.chain.clone()),
            Cell::Text(r.passed.to_string()),
            Cell::Int(r.checked),
            Cell::Text(r.failure.clone().unwrap_or_default().replace(',', ";")),
        ]);
    }
    t.write(a.out.out.as_deref(), a.out.format)?;
    match results.iter().find(|r| !r.passed) {
        Some(r) => {
            eprintln!("FAIL {} {}: {}", r.scope.name(), r.chain, r.failure.as_deref().unwrap_or("?"));
            Err(Error::Domain(VERIFY_FAILED.into()))
        }
        None => Ok(()),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("bad --grid {s:?}"));
    let (r, c) = s.split_once('x').unwrap_or((s, s));
    let r = r.trim().parse().map_err(|_| bad())?;
    let c = c.trim().parse().map_err(|_| bad())?;
    if r == 0 || c == 0 {
        return Err(bad());
    }
    Ok((r, c))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}{ext}"))
}

fn cmd_image_demo(a: &ImageArgs) -> Result<()> {
    let (rows, cols) = parse_grid(&a.grid)?;
    let model = image_gibbs_model(a.delta, a.sigma, rows, cols)?;
    let sigma = model.sigma()?;
    let spectrum = normal_ar_spectrum(&model.a, &sigma)?;
    let bound = mixing_bounds_normal_ar(&model.a, &sigma, 0.0)?;
    let lambda1 = spectrum.lambdas.first().copied().unwrap_or(0.0);
    let pixels = (rows * cols) as u64;
    let origin = DVector::zeros(rows * cols);

    let mut t = Table::new("image-demo", &["l", "chisq", "tv_upper", "mini_steps"]);
    t.meta("delta", a.delta);
    t.meta("sigma", a.sigma);
    t.meta("grid", format!("{rows}x{cols}"));
    t.meta("lambda_1", lambda1);
    t.meta("threshold", format!("l = {} + {} c", output::fmt_f64(bound.upper), output::fmt_f64(bound.rate)));
    t.meta("mini_steps_per_step", format!("2 x {pixels} = {}", 2 * pixels));
    let l8 = 8 * 2 * pixels;
    t.meta("mini_step_example", format!("8 x 2 x {pixels} = {l8}"));
    t.push(vec![Cell::Int(0), Cell::Float(f64::INFINITY), Cell::Float(f64::INFINITY), Cell::Int(0)]);
    let points =
        (1..=a.l_max).into_par_iter().map(|l| spectrum.chisq(&origin, l)).collect::<Result<Vec<_>>>()?;
    for (k, v) in points.into_iter().enumerate() {
        let l = k as u64 + 1;
        t.push(vec![Cell::Int(l), Cell::Float(v), Cell::Float(tv_upper(v)), Cell::Int(2 * pixels * l)]);
    }
    t.write(a.out.out.as_deref(), a.out.format)?;

    let mut s = Table::new("image-demo", &["index", "lambda"]);
    s.meta("delta", a.delta);
    s.meta("sigma", a.sigma);
    s.meta("grid", format!("{rows}x{cols}"));
    for (i, l) in spectrum.lambdas.iter().enumerate() {
        s.push(vec![Cell::Int(i as u64 + 1), Cell::Float(*l)]);
    }
    match &a.out.out {
        Some(path) => s.write(Some(&sibling(path, "-spectrum")), a.out.format)?,
        None => eprintln!("lambda_1 = {lambda1}; l = {} + {} c", bound.upper, bound.rate),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        main_with(std::iter::once("polymix").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["spectrum", "--chain", "nope", "--N", "3"]), EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]), EXIT_USAGE);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        let out = out.to_str().unwrap();
        assert_eq!(
            run_args(&["chisq", "--chain", "gibbs-dm", "--N", "30", "--alpha", "1x4", "--oracle", "matrix", "--out", out]),
            EXIT_CAPACITY
        );
        assert_eq!(run_args(&["verify", "eigenfunctions", "--N", "2", "--d", "2", "--corrupt-eigenvalue", "--out", out]), EXIT_VERIFY);
        assert_eq!(run_args(&["verify", "balance", "--chain", "bl-downup", "--l", "2,2", "--N", "2", "--s", "1", "--out", out]), EXIT_OK);
    }

    #[test]
    fn grids_and_siblings() {
        assert_eq!(parse_grid("16").unwrap(), (16, 16));
        assert_eq!(parse_grid("3x4").unwrap(), (3, 4));
        assert!(parse_grid("0x4").is_err());
        assert_eq!(sibling(Path::new("/t/curve.csv"), "-spectrum"), PathBuf::from("/t/curve-spectrum.csv"));
    }

    #[test]
    fn default_suite_is_valid() {
        for spec in default_suite(3, 3).unwrap() {
            spec.validate().unwrap();
        }
        assert!(default_suite(1, 2).unwrap().iter().all(|s| s.name() != "hubbell"));
    }
}

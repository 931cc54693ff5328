//! Experiment drivers behind the `rmflat` binary. Each subcommand turns an
//! [`ExperimentConfig`] into a [`Run`]: ordered result rows, violation rows
//! and the first failed check, if any.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

use rmflat::counterex::counterexample_experiment;
use rmflat::flattest::{
    delta_of, ktod_report, pw_report, rej_exact_within, rej_gn_exact_within, rej_montecarlo, theorem1_report,
    RatioTracker, RejCalculator,
};
use rmflat::gowers::{check_xor_theorem, gowers_exact_within, gowers_sampled};
use rmflat::ratio::{pow2, render, to_f64};
use rmflat::sewing::{collect_witnesses, sew_collected, sew_unchecked, Scan};
use rmflat::{seeded_rng, BooleanFunction, Budget, RmCode, ThmConstants};

#[derive(Parser, Debug)]
#[command(name = "rmflat", version, about = "Low-degree testing experiments over F2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Rejection probability of the k-flat test, exact or sampled.
    RejectProb(ExperimentArgs),
    /// Check the flat-test inequalities on every function of n <= 4 variables.
    ExhaustiveVerify(ExperimentArgs),
    /// Sew hyperplane-local fits of a function into one global polynomial.
    Sew(ExperimentArgs),
    /// Rejection rate of the symmetric polynomial S_{d+1,n} by the (d+1)-flat test.
    Counterexample(ExperimentArgs),
    /// Gowers uniformity norm, exact or sampled.
    Gowers(ExperimentArgs),
    /// Distance of an XOR power against its lower bound.
    Xor(ExperimentArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RejectProb(_) => "reject-prob",
            Command::ExhaustiveVerify(_) => "exhaustive-verify",
            Command::Sew(_) => "sew",
            Command::Counterexample(_) => "counterexample",
            Command::Gowers(_) => "gowers",
            Command::Xor(_) => "xor",
        }
    }

    pub fn args(&self) -> &ExperimentArgs {
        match self {
            Command::RejectProb(a)
            | Command::ExhaustiveVerify(a)
            | Command::Sew(a)
            | Command::Counterexample(a)
            | Command::Gowers(a)
            | Command::Xor(a) => a,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentArgs {
    /// Number of variables (taken from the file for file: inputs).
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree; exhaustive-verify takes a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Flat dimension, or the Gowers order.
    #[arg(long)]
    pub k: Option<usize>,
    /// XOR power.
    #[arg(long)]
    pub t: Option<usize>,
    /// Noise rate for builtin:noisy, as a decimal or a/b.
    #[arg(long)]
    pub delta: Option<String>,
    /// Local distance threshold for sewing, as a decimal or a/b.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// builtin:<name> or file:<path>.
    #[arg(long = "fn", default_value = "builtin:random")]
    pub function: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Cap on flats or direction tuples enumerated by exact computations.
    #[arg(long)]
    pub budget: Option<u64>,
}

/// A parsed invocation.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub subcommand: &'static str,
    pub args: ExperimentArgs,
}

impl ExperimentConfig {
    pub fn new(command: &Command) -> Self {
        ExperimentConfig { subcommand: command.name(), args: command.args().clone() }
    }

    /// Every field, including defaults, so a run can be repeated from it.
    pub fn echo(&self) -> Value {
        let a = &self.args;
        json!({
            "subcommand": self.subcommand,
            "n": a.n,
            "d": a.d,
            "k": a.k,
            "t": a.t,
            "delta": a.delta,
            "alpha": a.alpha,
            "trials": a.trials,
            "seed": a.seed,
            "mode": a.mode.map(|m| format!("{m:?}").to_lowercase()),
            "fn": a.function,
            "format": format!("{:?}", a.format).to_lowercase(),
            "budget": a.budget,
            "command_line": self.command_line(),
        })
    }

    pub fn command_line(&self) -> String {
        let a = &self.args;
        let mut parts = vec!["rmflat".to_string(), self.subcommand.to_string()];
        let mut push = |flag: &str, v: Option<String>| {
            if let Some(v) = v {
                parts.push(format!("--{flag} {v}"));
            }
        };
        push("n", a.n.map(|v| v.to_string()));
        push(
            "d",
            (!a.d.is_empty()).then(|| a.d.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")),
        );
        push("k", a.k.map(|v| v.to_string()));
        push("t", a.t.map(|v| v.to_string()));
        push("delta", a.delta.clone());
        push("alpha", a.alpha.clone());
        push("trials", a.trials.map(|v| v.to_string()));
        push("seed", Some(a.seed.to_string()));
        push("mode", a.mode.map(|m| format!("{m:?}").to_lowercase()));
        push("fn", Some(a.function.clone()));
        push("budget", a.budget.map(|v| v.to_string()));
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<rmflat::Error> for CliError {
    fn from(e: rmflat::Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn fail<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError(msg.into()))
}

pub type Row = Map<String, Value>;

#[derive(Clone, Debug, Default)]
pub struct Run {
    pub results: Vec<Row>,
    pub violations: Vec<Row>,
    /// First failed check, in run order.
    pub first_failure: Option<String>,
    /// Notes for stderr that are not failures.
    pub warnings: Vec<String>,
}

impl Run {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }
}

macro_rules! row {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut r = Row::new();
        $( r.insert($k.to_string(), json!($v)); )*
        r
    }};
}

/// `3/8`, `0.375` or `-2` as an exact rational.
pub fn parse_rational(s: &str) -> CliResult<BigRational> {
    let s = s.trim();
    let bad = || CliError(format!("cannot read {s:?} as a rational"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = BigRational::new(digits, den);
    Ok(if neg { -v } else { v })
}

fn budget(args: &ExperimentArgs) -> Budget {
    let mut b = Budget::default();
    if let Some(v) = args.budget {
        b.flats = v;
        b.tuples = v;
    }
    b
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError(format!("--{flag} is required")))
}

fn single_d(args: &ExperimentArgs) -> CliResult<usize> {
    match args.d.as_slice() {
        [d] => Ok(*d),
        [] => fail("--d is required"),
        _ => fail("--d takes a single value for this subcommand"),
    }
}

/// Seed for experiment randomness, kept apart from the one that builds
/// builtin functions.
fn run_seed(seed: u64) -> u64 {
    seed ^ 0x5eed_5eed_5eed_5eed
}

pub const BUILTINS: &[&str] = &["zero", "one", "codeword", "noisy", "symmetric", "random", "and2", "maj3"];

/// Resolves `--fn`. `d` is the degree used by `codeword`, `noisy` and
/// `symmetric` (which is `S_{d+1,n}`).
pub fn load_function(args: &ExperimentArgs, d: Option<usize>) -> CliResult<BooleanFunction> {
    let spec = args.function.as_str();
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("reading {path}: {e}")))?;
        let f = BooleanFunction::parse_table_file(&text)?;
        if let Some(n) = args.n {
            if n != f.n() {
                return fail(format!("--n {n} disagrees with n={} in {path}", f.n()));
            }
        }
        return Ok(f);
    }
    let Some(name) = spec.strip_prefix("builtin:") else {
        return fail(format!("--fn must be builtin:<name> or file:<path>, got {spec:?}"));
    };
    let n = match name {
        "and2" => args.n.unwrap_or(2),
        "maj3" => args.n.unwrap_or(3),
        _ => require(args.n, "n")?,
    };
    if n > Budget::default().table_vars as usize {
        return fail(format!("n = {n} is too large for a truth table"));
    }
    let mut rng = seeded_rng(args.seed);
    let degree = || d.ok_or_else(|| CliError(format!("builtin:{name} needs --d")));
    Ok(match name {
        "zero" => BooleanFunction::zero(n),
        "one" => BooleanFunction::one(n),
        "random" => BooleanFunction::from_fn(n, |_| rng.gen()),
        "and2" if n >= 2 => BooleanFunction::monomial(n, 0b11),
        "maj3" if n >= 3 => BooleanFunction::from_fn(n, |x| (x & 0b111).count_ones() >= 2),
        "codeword" => RmCode::new(degree()?, n)?.random_codeword(&mut rng),
        "noisy" | "codeword+noise" => {
            let d = degree()?;
            let rate = match &args.delta {
                Some(s) => parse_rational(s)?,
                None => pow2(-(d as i64) - 4),
            };
            if rate < BigRational::zero() || rate > BigRational::one() {
                return fail("--delta must lie in [0, 1]");
            }
            let errors = (rate * BigInt::from(1u64 << n)).floor().to_integer();
            let errors: usize = errors.try_into().map_err(|_| CliError("noise count overflow".into()))?;
            let g = RmCode::new(d, n)?.random_codeword(&mut rng);
            let pts: Vec<u64> = (0..1u64 << n).collect();
            pts.choose_multiple(&mut rng, errors).fold(g, |f, &p| f.flipped(p))
        }
        "symmetric" => BooleanFunction::symmetric_poly(degree()? + 1, n)?,
        "and2" | "maj3" => return fail(format!("builtin:{name} needs more variables than n = {n}")),
        other => return fail(format!("unknown builtin {other:?}; known: {}", BUILTINS.join(", "))),
    })
}

pub fn run(config: &ExperimentConfig) -> CliResult<Run> {
    let a = &config.args;
    match config.subcommand {
        "reject-prob" => cmd_reject_prob(a),
        "exhaustive-verify" => cmd_exhaustive_verify(a),
        "sew" => cmd_sew(a),
        "counterexample" => cmd_counterexample(a),
        "gowers" => cmd_gowers(a),
        "xor" => cmd_xor(a),
        other => fail(format!("unknown subcommand {other}")),
    }
}

pub fn cmd_reject_prob(a: &ExperimentArgs) -> CliResult<Run> {
    let d = single_d(a)?;
    let k = require(a.k, "k")?;
    let f = load_function(a, Some(d))?;
    let mode = a.mode.unwrap_or(Mode::Exact);
    let mut run = Run::default();
    let row = match mode {
        Mode::Exact => {
            let r = rej_exact_within(&f, d, k, &budget(a))?;
            row! {"n" => f.n(), "d" => d, "k" => k, "mode" => "exact", "value" => render(&r.value()),
                  "trials" => "", "seed" => a.seed}
        }
        Mode::Mc => {
            let trials = a.trials.unwrap_or(10_000);
            let r = rej_montecarlo(&f, d, k, trials, run_seed(a.seed))?;
            row! {"n" => f.n(), "d" => d, "k" => k, "mode" => "mc", "value" => r.estimate(),
                  "trials" => trials, "seed" => a.seed}
        }
    };
    run.results.push(row);
    Ok(run)
}

/// All functions on `n <= 4` variables against the flat-test inequalities.
pub fn cmd_exhaustive_verify(a: &ExperimentArgs) -> CliResult<Run> {
    let n = require(a.n, "n")?;
    if n == 0 || n > 4 {
        return fail("exhaustive-verify needs 1 <= n <= 4");
    }
    let ds: Vec<usize> = if a.d.is_empty() { (0..n).collect() } else { a.d.clone() };
    if let Some(&d) = ds.iter().find(|&&d| d >= n) {
        return fail(format!("d = {d} must be below n = {n}"));
    }
    let consts = ThmConstants::default();
    let calcs: Vec<RejCalculator> = (1..=n).map(|k| RejCalculator::new(n, k)).collect::<Result<_, _>>()?;
    let count = 1u64 << (1 << n);
    let mut run = Run::default();
    for &d in &ds {
        let mut tracker = RatioTracker::default();
        let mut bad = [0u64; 4];
        let mut cases = [0u64; 4];
        let names = ["theorem1", "completeness", "pw", "ktod"];
        for t in 0..count {
            let f = BooleanFunction::from_u64(n, t);
            let delta = delta_of(&f, d)?;
            let counts: Vec<Vec<u64>> = calcs.iter().map(|c| c.reject_counts(&f)).collect();
            let rej = |k: usize| {
                BigRational::new(BigInt::from(counts[k - 1][d]), BigInt::from(calcs[k - 1].total_flats()))
            };
            let is_low = f.degree() <= d as i32;
            let mut fails: Vec<(usize, String)> = Vec::new();

            let r1 = theorem1_report(delta.clone(), rej(d + 1), d, &consts);
            tracker.add(&r1);
            cases[0] += 1;
            if !r1.holds {
                fails.push((0, format!("Rej = {} < {}", render(&r1.rej), render(&r1.bound))));
            }
            for k in d + 1..=n {
                cases[1] += 1;
                if rej(k).is_zero() != is_low {
                    fails.push((1, format!("k = {k}: Rej = {} with degree {}", render(&rej(k)), f.degree())));
                }
                cases[2] += 1;
                let pw = pw_report(delta.clone(), rej(k), d, k);
                if !pw.passed() {
                    fails.push((2, format!("k = {k}: Rej = {}, delta = {}", render(&pw.rej), render(&pw.delta))));
                }
                for k2 in d + 1..=k {
                    cases[3] += 1;
                    if !ktod_report(n, !is_low, k, k2, rej(k), rej(k2)).passed() {
                        fails.push((3, format!("k = {k}, k' = {k2}")));
                    }
                }
            }
            for (c, detail) in fails {
                bad[c] += 1;
                let table = f.to_hex();
                run.check(false, || format!("{} at d = {d}, table {table}: {detail}", names[c]));
                run.violations.push(row! {"n" => n, "d" => d, "check" => names[c], "table" => table, "detail" => detail});
            }
        }
        for c in 0..4 {
            let min_ratio = if c == 0 { tracker.min_ratio.as_ref().map(render) } else { None };
            run.results.push(row! {
                "n" => n, "d" => d, "check" => names[c], "functions" => count, "cases" => cases[c],
                "violations" => bad[c], "min_ratio" => min_ratio.unwrap_or_default(),
                "eps1" => render(&consts.eps1),
            });
        }
    }
    Ok(run)
}

pub fn cmd_sew(a: &ExperimentArgs) -> CliResult<Run> {
    let d = single_d(a)?;
    let f = load_function(a, Some(d))?;
    let limit = pow2(-(d as i64) - 2);
    let alpha = match &a.alpha {
        Some(s) => parse_rational(s)?,
        None => limit.clone(),
    };
    let scan = match a.trials {
        Some(count) => Scan::Sample { count: count as usize, seed: run_seed(a.seed) },
        None => Scan::All { max_planes: a.budget.unwrap_or(1 << 14) as usize },
    };
    let ws = collect_witnesses(&f, d, &alpha, scan)?;
    let hypothesis = alpha <= limit;
    let mut run = Run::default();
    if !hypothesis {
        run.warnings.push(format!(
            "alpha = {} is not below 2^-(d+2); sewing without the distance precondition",
            render(&alpha)
        ));
    }
    let report = if hypothesis { sew_collected(&f, d, &ws)? } else { sew_unchecked(&f, d, &ws.list)? };
    let checks = [
        ("degree", report.degree_ok(d)),
        ("agrees_with_witnesses", report.mismatched.is_empty()),
        ("dist_bound", report.dist_ok()),
        ("tau_bound", report.tau_ok()),
    ];
    for (name, ok) in checks {
        run.check(ok, || format!("sew check {name} failed"));
        if !ok {
            run.violations.push(row! {"check" => name, "detail" => match name {
                "agrees_with_witnesses" => format!("{} witnesses differ", report.mismatched.len()),
                "dist_bound" => format!("{} > {}", render(&report.global_dist), render(&report.bound)),
                "tau_bound" => format!("{} > 9/{}", render(&report.tau), report.k),
                _ => format!("degree {}", report.sewn.degree()),
            }});
        }
    }
    run.results.push(row! {
        "n" => f.n(), "d" => d, "alpha_threshold" => render(&alpha), "K" => report.k,
        "scanned" => ws.scanned, "sampled" => report.sampled || ws.sampled,
        "max_alpha" => render(&report.alpha), "global_dist" => render(&report.global_dist),
        "bound" => render(&report.bound), "tau" => render(&report.tau),
        "tau_limit" => render(&BigRational::new(9.into(), (report.k as u64).into())),
        "sewn_degree" => report.sewn.degree(), "sewn_table" => report.sewn.to_hex(),
        "degree_ok" => checks[0].1, "agrees_with_witnesses" => checks[1].1,
        "dist_ok" => checks[2].1, "tau_ok" => checks[3].1, "seed" => a.seed,
    });
    Ok(run)
}

pub fn cmd_counterexample(a: &ExperimentArgs) -> CliResult<Run> {
    let d = single_d(a)?;
    let n = require(a.n, "n")?;
    let mut run = Run::default();
    if d < 3 {
        run.warnings.push(format!("d = {d} < 3: the bound is only claimed for d >= 3; reported as a measurement"));
    }
    match a.mode.unwrap_or(Mode::Mc) {
        Mode::Mc => {
            let trials = a.trials.unwrap_or(100_000);
            let r = counterexample_experiment(d, n, trials, a.seed)?;
            let pass = r.within(0.01) && r.mismatches == 0;
            if d >= 3 {
                run.check(pass, || {
                    format!("estimate {:.5} + 3 sigma exceeds {} + 0.01", r.estimate, render(&r.bound))
                });
            }
            run.results.push(row! {
                "d" => d, "n" => n, "mode" => "mc", "trials" => trials, "seed" => a.seed,
                "rejections" => r.rejections, "estimate" => r.estimate, "std_error" => r.std_error,
                "bound" => render(&r.bound), "cross_checked" => r.cross_checked,
                "mismatches" => r.mismatches, "pass" => pass,
            });
        }
        Mode::Exact => {
            let s = BooleanFunction::symmetric_poly(d + 1, n)?;
            let r = rej_exact_within(&s, d, d + 1, &budget(a))?.value();
            let bound = BigRational::new(1.into(), 2.into()) - pow2(-7);
            let pass = r <= bound;
            if d >= 3 {
                run.check(pass, || format!("Rej = {} exceeds {}", render(&r), render(&bound)));
            }
            run.results.push(row! {
                "d" => d, "n" => n, "mode" => "exact", "trials" => "", "seed" => a.seed,
                "rejections" => "", "estimate" => render(&r), "std_error" => 0.0,
                "bound" => render(&bound), "cross_checked" => "", "mismatches" => "", "pass" => pass,
            });
        }
    }
    Ok(run)
}

pub fn cmd_gowers(a: &ExperimentArgs) -> CliResult<Run> {
    let k = require(a.k, "k")?;
    let d = a.d.first().copied();
    let f = load_function(a, d)?;
    let mut run = Run::default();
    match a.mode.unwrap_or(Mode::Exact) {
        Mode::Exact => {
            let b = budget(a);
            let g = gowers_exact_within(&f, k, &b)?;
            let rho = rej_gn_exact_within(&f, k, &b)?.value();
            let matches = g.raw == BigRational::one() - BigRational::from_integer(2.into()) * &rho;
            run.check(matches, || format!("raw {} differs from 1 - 2 * {}", render(&g.raw), render(&rho)));
            run.results.push(row! {
                "n" => f.n(), "k" => k, "mode" => "exact", "raw" => render(&g.raw), "norm" => g.norm,
                "rho" => render(&rho), "identity_holds" => matches, "trials" => "", "std_error" => 0.0,
                "seed" => a.seed,
            });
        }
        Mode::Mc => {
            let trials = a.trials.unwrap_or(10_000);
            let g = gowers_sampled(&f, k, trials, &mut seeded_rng(run_seed(a.seed)))?;
            run.results.push(row! {
                "n" => f.n(), "k" => k, "mode" => "mc", "raw" => to_f64(&g.raw), "norm" => g.norm,
                "rho" => "", "identity_holds" => "", "trials" => trials, "std_error" => g.std_error,
                "seed" => a.seed,
            });
        }
    }
    Ok(run)
}

pub fn cmd_xor(a: &ExperimentArgs) -> CliResult<Run> {
    let d = single_d(a)?;
    let t = require(a.t, "t")?;
    let f = load_function(a, Some(d))?;
    let r = check_xor_theorem(&f, d, t, &ThmConstants::default())?;
    let mut run = Run::default();
    run.check(r.holds, || {
        format!("delta(f^{t}) = {} is below the bound {:.6e}", render(&r.power_delta), r.bound)
    });
    run.results.push(row! {
        "n" => f.n(), "d" => d, "t" => t, "delta" => render(&r.delta), "power_delta" => render(&r.power_delta),
        "q" => render(&r.q), "bound" => r.bound, "holds" => r.holds, "holds_norm_form" => r.holds_norm_form,
        "seed" => a.seed,
    });
    Ok(run)
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn to_csv(rows: &[Row]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.keys()).map_err(|e| CliError(e.to_string()))?;
        for r in rows {
            w.write_record(first.keys().map(|k| r.get(k).map(cell).unwrap_or_default()))
                .map_err(|e| CliError(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError(e.to_string()))
}

pub fn to_json(config: &ExperimentConfig, run: &Run) -> String {
    let doc = json!({
        "config": config.echo(),
        "results": run.results,
        "violations": run.violations,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes the run where the config asks. In CSV mode with `--out`,
/// violations go to a sibling `<out>.violations.csv`.
pub fn emit(config: &ExperimentConfig, run: &Run) -> CliResult<Option<String>> {
    let a = &config.args;
    let text = match a.format {
        Format::Json => to_json(config, run),
        Format::Csv => to_csv(&run.results)?,
    };
    let Some(path) = &a.out else {
        return Ok(Some(text));
    };
    std::fs::write(path, &text).map_err(|e| CliError(format!("writing {}: {e}", path.display())))?;
    if a.format == Format::Csv && config.subcommand == "exhaustive-verify" {
        let mut vpath = path.clone().into_os_string();
        vpath.push(".violations.csv");
        let body = if run.violations.is_empty() {
            "n,d,check,table,detail\n".to_string()
        } else {
            to_csv(&run.violations)?
        };
        std::fs::write(&vpath, body).map_err(|e| CliError(format!("writing violations: {e}")))?;
    }
    Ok(None)
}

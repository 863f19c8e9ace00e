//! Command-line front end.
//!
//! Exit codes: 0 when every verdict passes, 1 when at least one fails (the
//! report then carries witnesses), 2 for usage or configuration errors.

use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::euler::{
    classical_euler_poly, q_euler_number, q_euler_number_closed, q_euler_poly, q_euler_poly_closed,
    verify_shift_identity, ClassicalEulerCache, QEulerCache,
};
use crate::padic::{convergence_profile, FSpec, PadicQ, PadicRing, DEFAULT_PRECISION};
use crate::qcalc::{format_rational, parse_rational, sample_points, BracketArg, QSample, Rational};
use crate::symmetry::{
    verify_invariance, InvarianceConfig, Mode, SymmetryReport, WeightVector, DEFAULT_BUDGET,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable consulted for the worker count.
pub const WORKERS_ENV: &str = "QEULER_WORKERS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qeuler", version, about = "Exact q-Euler numbers, p-adic q-integrals and symmetry identities")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, env = WORKERS_ENV, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of q-Euler numbers E_{n,q^W} and polynomials E_{n,q^W}(x).
    Euler(EulerArgs),
    /// Table of classical Euler polynomials E_n(x).
    Classical(ClassicalArgs),
    /// Verify the symmetric-group invariance identities at sampled q.
    Symmetry(SymmetryArgs),
    /// Verify the invariance identities as formal identities in q.
    Certify(CertifyArgs),
    /// Convergence profiles of truncated fermionic p-adic q-integrals.
    Padic(PadicArgs),
    /// Check the shift identity of the fermionic q-integral exactly.
    Shift(ShiftArgs),
}

#[derive(Debug, Args)]
struct EulerArgs {
    /// Index range, e.g. `0..5` (inclusive) or `3`.
    #[arg(long, default_value = "0..5")]
    n: String,
    /// Comma-separated values of q.
    #[arg(long, default_value = "2")]
    q: String,
    /// Comma-separated base powers W (the tables use q^W).
    #[arg(long, default_value = "1")]
    w: String,
    /// Comma-separated polynomial arguments; omit for numbers only.
    #[arg(long)]
    x: Option<String>,
}

#[derive(Debug, Args)]
struct ClassicalArgs {
    #[arg(long, default_value = "0..5")]
    n: String,
    #[arg(long, default_value = "0")]
    x: String,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Comma-separated odd weights; repeat the flag for several vectors.
    #[arg(long, required = true)]
    weights: Vec<String>,
    #[arg(long, default_value_t = 4)]
    m_max: usize,
    /// Comma-separated nonnegative integers.
    #[arg(long, default_value = "0")]
    x: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Ceiling on n! * prod(w) * samples.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Debug, Args)]
struct SymmetryArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 8)]
    q_count: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Sampled)]
    mode: ModeArg,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Sampled,
    Certified,
}

#[derive(Debug, Args)]
struct PadicArgs {
    #[arg(long, default_value = "3,5,7")]
    primes: String,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    k: u32,
    #[arg(long, default_value_t = 5)]
    n_max: u32,
    #[arg(long, default_value_t = 4)]
    m_max: u32,
    #[arg(long, default_value_t = 2)]
    a_max: u64,
    /// q = 1 + p t.
    #[arg(long, default_value_t = 1)]
    t: u64,
}

#[derive(Debug, Args)]
struct ShiftArgs {
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    #[arg(long, default_value_t = 6)]
    n_shift_max: u32,
    #[arg(long, default_value_t = 8)]
    q_count: usize,
    /// Explicit comma-separated q values (overrides --q-count).
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

/// A finished subcommand, ready to render in any format.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub config: Value,
    pub results: Vec<Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub witnesses: Vec<Value>,
    pub passed: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a Value,
    results: &'a [Value],
    verdict: &'a str,
    witnesses: &'a [Value],
}

impl Outcome {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let report = JsonReport {
                    schema_version: SCHEMA_VERSION,
                    command: self.command,
                    config: &self.config,
                    results: &self.results,
                    verdict: self.verdict(),
                    witnesses: &self.witnesses,
                };
                let mut text = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                text.push('\n');
                Ok(text)
            }
            Format::Csv => {
                let mut writer = csv::Writer::from_writer(Vec::new());
                let io_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
                writer.write_record(&self.columns).map_err(io_err)?;
                for row in &self.rows {
                    writer.write_record(row).map_err(io_err)?;
                }
                let bytes = writer.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
            }
            Format::Text => Ok(self.render_text()),
        }
    }

    fn render_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = String::new();
        out.push_str(&line(self.columns.clone()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        for w in &self.witnesses {
            out.push_str(&format!("witness: {w}\n"));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict()));
        out
    }
}

/// Inclusive range `a..b`, `a..=b` or a single index.
pub fn parse_range(text: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::InvalidArgument(format!("cannot parse range {text:?}"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let range = match text.split_once("..") {
        Some((lo, hi)) => parse(lo)?..=parse(hi.trim_start_matches('='))?,
        None => {
            let n = parse(text)?;
            n..=n
        }
    };
    if range.is_empty() {
        return Err(bad());
    }
    Ok(range)
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = text.split(',').filter(|s| !s.trim().is_empty()).map(item).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::InvalidArgument(format!("empty list {text:?}")));
    }
    Ok(items)
}

fn parse_u64(text: &str) -> Result<u64> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{text:?} is not a nonnegative integer")))
}

fn rat(value: &Rational) -> String {
    format_rational(value)
}

fn run_euler(args: &EulerArgs) -> Result<Outcome> {
    let range = parse_range(&args.n)?;
    let qs = parse_list(&args.q, |s| s.parse::<QSample>())?;
    let ws = parse_list(&args.w, parse_u64)?;
    if ws.contains(&0) {
        return Err(Error::ZeroBasePower);
    }
    let xs = args.x.as_deref().map(|x| parse_list(x, parse_rational)).transpose()?;
    let cache = QEulerCache::new();

    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut passed = true;
    for q in &qs {
        for &w in &ws {
            let args_for_w: Vec<Option<BracketArg>> = match &xs {
                None => vec![None],
                Some(xs) => xs
                    .iter()
                    .map(|x| BracketArg::new(x.clone(), w).map(Some))
                    .collect::<Result<_>>()?,
            };
            for arg in &args_for_w {
                for n in range.clone() {
                    let (value, closed) = match arg {
                        None => (q_euler_number(n, w, q, &cache), q_euler_number_closed(n, w, q)),
                        Some(a) => (q_euler_poly(n, a, q, &cache), q_euler_poly_closed(n, a, q)),
                    };
                    let agree = value == closed;
                    passed &= agree;
                    let x_text = arg.as_ref().map(|a| rat(a.value())).unwrap_or_default();
                    results.push(json!({
                        "n": n, "w": w, "q": rat(q.value()), "x": arg.as_ref().map(|a| rat(a.value())),
                        "value": rat(&value), "closed_form_agrees": agree,
                    }));
                    rows.push(vec![
                        n.to_string(),
                        w.to_string(),
                        rat(q.value()),
                        x_text,
                        rat(&value),
                        agree.to_string(),
                    ]);
                }
            }
        }
    }
    Ok(Outcome {
        command: "euler",
        config: json!({
            "n": [range.start(), range.end()],
            "q": qs.iter().map(|q| rat(q.value())).collect::<Vec<_>>(),
            "w": ws,
            "x": xs.map(|xs| xs.iter().map(rat).collect::<Vec<_>>()),
        }),
        results,
        columns: vec!["n", "w", "q", "x", "value", "closed_form_agrees"],
        rows,
        witnesses: Vec::new(),
        passed,
    })
}

fn run_classical(args: &ClassicalArgs) -> Result<Outcome> {
    let range = parse_range(&args.n)?;
    let xs = parse_list(&args.x, parse_rational)?;
    let mut cache = ClassicalEulerCache::new();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for x in &xs {
        for n in range.clone() {
            let value = classical_euler_poly(n, x, &mut cache);
            results.push(json!({ "n": n, "x": rat(x), "value": rat(&value) }));
            rows.push(vec![n.to_string(), rat(x), rat(&value)]);
        }
    }
    Ok(Outcome {
        command: "classical",
        config: json!({ "n": [range.start(), range.end()], "x": xs.iter().map(rat).collect::<Vec<_>>() }),
        results,
        columns: vec!["n", "x", "value"],
        rows,
        witnesses: Vec::new(),
        passed: true,
    })
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Sampled => "sampled",
        Mode::Certified => "certified",
    }
}

/// Runs `verify_invariance` over every (weights, x) pair of a grid.
#[allow(clippy::too_many_arguments)]
pub fn symmetry_outcome(
    command: &'static str,
    weights: &[WeightVector],
    xs: &[u64],
    m_max: usize,
    q_count: usize,
    mode: Mode,
    seed: Option<u64>,
    budget: u128,
) -> Result<Outcome> {
    let cache = QEulerCache::new();
    let mut reports: Vec<SymmetryReport> = Vec::new();
    for wv in weights {
        for &x in xs {
            let config = InvarianceConfig {
                weights: wv.clone(),
                m_max,
                x,
                q_count,
                mode,
                seed,
                budget,
            };
            reports.push(verify_invariance(&config, &cache)?);
        }
    }

    let mut rows = Vec::new();
    for report in &reports {
        let w_text = join(report.weights.weights());
        for cell in &report.cells {
            for v in &cell.values {
                rows.push(vec![
                    w_text.clone(),
                    report.x.to_string(),
                    cell.m.to_string(),
                    rat(&cell.q),
                    join(&v.sigma.images()),
                    rat(&v.theorem2),
                    rat(&v.theorem3),
                    if cell.passed() { "PASS" } else { "FAIL" }.to_string(),
                ]);
            }
        }
    }
    let witnesses = reports
        .iter()
        .flat_map(|r| r.witnesses.iter().map(|w| {
            let mut value = to_value(w);
            value["weights"] = json!(r.weights);
            value["x"] = json!(r.x);
            value
        }))
        .collect();
    Ok(Outcome {
        command,
        config: json!({
            "weights": weights,
            "x": xs,
            "m_max": m_max,
            "q_count": if mode == Mode::Sampled { Some(q_count) } else { None },
            "mode": mode_name(mode),
            "seed": seed,
        }),
        passed: reports.iter().all(SymmetryReport::passed),
        results: reports.iter().map(to_value).collect(),
        columns: vec!["weights", "x", "m", "q", "sigma", "theorem2", "theorem3", "cell"],
        rows,
        witnesses,
    })
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize to JSON")
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_grid(grid: &GridArgs) -> Result<(Vec<WeightVector>, Vec<u64>)> {
    let weights = grid
        .weights
        .iter()
        .map(|w| WeightVector::new(parse_list(w, parse_u64)?))
        .collect::<Result<Vec<_>>>()?;
    let xs = parse_list(&grid.x, parse_u64)?;
    Ok((weights, xs))
}

fn run_symmetry(args: &SymmetryArgs) -> Result<Outcome> {
    let (weights, xs) = parse_grid(&args.grid)?;
    let mode = match args.mode {
        ModeArg::Sampled => Mode::Sampled,
        ModeArg::Certified => Mode::Certified,
    };
    if mode == Mode::Sampled && args.q_count == 0 {
        return Err(Error::InvalidArgument("--q-count must be at least 1".into()));
    }
    symmetry_outcome("symmetry", &weights, &xs, args.grid.m_max, args.q_count, mode, args.grid.seed, args.grid.budget)
}

fn run_certify(args: &CertifyArgs) -> Result<Outcome> {
    let (weights, xs) = parse_grid(&args.grid)?;
    symmetry_outcome("certify", &weights, &xs, args.grid.m_max, 0, Mode::Certified, args.grid.seed, args.grid.budget)
}

fn run_padic(args: &PadicArgs) -> Result<Outcome> {
    let primes = parse_list(&args.primes, parse_u64)?;
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    for &p in &primes {
        let ring = PadicRing::new(p, args.k)?;
        let q = PadicQ::from_offset(ring, args.t)?;
        for m in 0..=args.m_max {
            for a in 0..=args.a_max {
                let f = FSpec::new(m, a);
                let profile = convergence_profile(ring, f, q, args.n_max)?;
                let monotone = profile.windows(2).all(|w| w[0].valuation <= w[1].valuation);
                let floor = profile.iter().all(|pt| pt.valuation + 1 >= pt.level);
                let ok = monotone && floor;
                if !ok {
                    witnesses.push(json!({ "p": p, "m": m, "a": a, "profile": profile,
                        "nondecreasing": monotone, "floor_met": floor }));
                }
                let q_json = json!({ "p": p, "K": args.k, "residue": q.value().residue() });
                results.push(json!({ "p": p, "q": q_json, "m": m, "a": a, "profile": profile,
                    "nondecreasing": monotone, "floor_met": floor }));
                for pt in &profile {
                    rows.push(vec![
                        p.to_string(),
                        q.value().residue().to_string(),
                        m.to_string(),
                        a.to_string(),
                        pt.level.to_string(),
                        pt.valuation.to_string(),
                        if ok { "PASS" } else { "FAIL" }.to_string(),
                    ]);
                }
            }
        }
    }
    Ok(Outcome {
        command: "padic",
        config: json!({ "primes": primes, "K": args.k, "n_max": args.n_max, "m_max": args.m_max,
            "a_max": args.a_max, "t": args.t }),
        passed: witnesses.is_empty(),
        results,
        columns: vec!["p", "q", "m", "a", "N", "v_N", "profile"],
        rows,
        witnesses,
    })
}

fn run_shift(args: &ShiftArgs) -> Result<Outcome> {
    if args.n_shift_max == 0 {
        return Err(Error::InvalidArgument("--n-shift-max must be at least 1".into()));
    }
    let qs = match &args.q {
        Some(list) => parse_list(list, |s| s.parse::<QSample>())?,
        None => sample_points(args.q_count, &[], args.seed),
    };
    if qs.is_empty() {
        return Err(Error::InvalidArgument("no q values to test".into()));
    }
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    for q in &qs {
        for m in 0..=args.m_max {
            for k in 1..=args.n_shift_max {
                let holds = verify_shift_identity(m, k, q)?;
                let entry = json!({ "q": rat(q.value()), "m": m, "n_shift": k, "holds": holds });
                if !holds {
                    witnesses.push(entry.clone());
                }
                results.push(entry);
                rows.push(vec![rat(q.value()), m.to_string(), k.to_string(), holds.to_string()]);
            }
        }
    }
    Ok(Outcome {
        command: "shift",
        config: json!({ "m_max": args.m_max, "n_shift_max": args.n_shift_max,
            "q": qs.iter().map(|q| rat(q.value())).collect::<Vec<_>>() }),
        passed: witnesses.is_empty(),
        results,
        columns: vec!["q", "m", "n_shift", "holds"],
        rows,
        witnesses,
    })
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Euler(a) => run_euler(a),
        Command::Classical(a) => run_classical(a),
        Command::Symmetry(a) => run_symmetry(a),
        Command::Certify(a) => run_certify(a),
        Command::Padic(a) => run_padic(a),
        Command::Shift(a) => run_shift(a),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = err.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: cannot start workers: {err}");
            return EXIT_USAGE;
        }
    };
    let outcome = match pool.install(|| execute(&cli.command)) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    let text = match outcome.render(cli.format) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    if let Err(err) = emit(&text, cli.out.as_ref()) {
        eprintln!("error: cannot write report: {err}");
        return EXIT_USAGE;
    }
    if outcome.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..3").unwrap(), 0..=3);
        assert_eq!(parse_range("2..=4").unwrap(), 2..=4);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("1, 3,5", parse_u64).unwrap(), vec![1, 3, 5]);
        assert!(parse_list("", parse_u64).is_err());
        assert!(parse_list("1,x", parse_u64).is_err());
    }
}

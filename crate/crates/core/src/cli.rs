//! Command-line interface: `expand`, `gk`, `qn` and `mc`.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 failed acceptance check.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cf::{convergents, expand, expand_exact, Convergent, DigitSequence, Parameter, Truncation};
use crate::error::Error;
use crate::gk::iterate_gk;
use crate::grid::{GridFunction, GridKind, DEFAULT_INTERVALS};
use crate::montecarlo::{monte_carlo_cdf, GENERATOR};
use crate::qn::{check_against_published, qn_exact, qn_value, reproduce_table, table_csv, table_text, DEFAULT_PRECISION};
use crate::transfer::TailPolicy;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "renyi-cf", version, about = "Rényi-type continued fractions R_N(x) = {N/(1-x)}")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Digits, convergents and residuals of x.
    Expand(ExpandArgs),
    /// Gauss–Kuzmin iteration of a distribution function; JSON report.
    Gk(GkArgs),
    /// Certificate for q_N, or the table of its bounds.
    Qn(QnArgs),
    /// Monte-Carlo empirical CDF of R_N^n and its KS distance to rho_N.
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct ExpandArgs {
    #[arg(long = "N")]
    pub n: u64,
    /// A decimal (float arithmetic) or a fraction j/k (exact arithmetic).
    #[arg(long)]
    pub x: String,
    /// Number of digits.
    #[arg(long = "n", default_value_t = 10)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, clap::Args)]
pub struct GkArgs {
    #[arg(long = "N")]
    pub n: u64,
    /// Number of grid intervals M.
    #[arg(long, default_value_t = DEFAULT_INTERVALS)]
    pub grid: usize,
    #[arg(long, default_value_t = 25)]
    pub steps: usize,
    /// `uniform` for F_0(x) = x, or a CSV file `x,F` on a uniform grid.
    #[arg(long, default_value = "uniform")]
    pub initial: String,
    /// Exit 3 if the fitted rate exceeds q_N by more than this (negative values tighten the check).
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub rate_tolerance: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct QnArgs {
    #[arg(long = "N", required_unless_present = "table", conflicts_with = "table")]
    pub n: Option<u64>,
    /// Significant digits of the certificate.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    /// Print the bounds for the tabulated values of N.
    #[arg(long)]
    pub table: bool,
    /// Compare the table with the published strings; exit 3 on any mismatch.
    #[arg(long, requires = "table")]
    pub check_paper: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, clap::Args)]
pub struct McArgs {
    #[arg(long = "N")]
    pub n: u64,
    /// Number of applications of R_N.
    #[arg(long = "n", default_value_t = 20)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Abscissae in the CSV output.
    #[arg(long, default_value_t = 1025)]
    pub points: usize,
    /// Envelope is multiplier/sqrt(samples) + q_N^n.
    #[arg(long, default_value_t = 3.0)]
    pub ks_multiplier: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failure with its exit code and one-line diagnostic.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CHECK_FAILED,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(format!("I/O error: {e}"))
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                writeln!(err, "error: {}", first_line(&text))
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Expand(a) => cmd_expand(a, out),
        Command::Gk(a) => cmd_gk(a, out, err),
        Command::Qn(a) => cmd_qn(a, out, err),
        Command::Mc(a) => cmd_mc(a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn first_line(text: &str) -> &str {
    text.lines()
        .map(|l| l.trim_start_matches("error: ").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("invalid arguments")
}

fn parameter(n: u64) -> std::result::Result<Parameter, Failure> {
    Ok(Parameter::new(n)?)
}

enum Input {
    Exact(BigRational),
    Float(f64),
}

fn parse_x(text: &str) -> std::result::Result<Input, Failure> {
    if let Some((num, den)) = text.split_once('/') {
        let parse = |s: &str| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| Failure::usage(format!("cannot parse fraction {text:?}")))
        };
        let (num, den) = (parse(num)?, parse(den)?);
        if den.is_zero() {
            return Err(Failure::usage(format!("zero denominator in {text:?}")));
        }
        let x = BigRational::new(num, den);
        if x.is_negative() || x >= BigRational::from_integer(1.into()) {
            return Err(Failure::usage(format!("x = {text} is outside [0, 1)")));
        }
        return Ok(Input::Exact(x));
    }
    let x: f64 = text
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("cannot parse x = {text:?}")))?;
    if !(x.is_finite() && (0.0..1.0).contains(&x)) {
        return Err(Failure::usage(format!("x = {text} is outside [0, 1)")));
    }
    Ok(Input::Float(x))
}

#[derive(Serialize)]
struct ConvergentRow {
    k: usize,
    p: String,
    q: String,
    residual: f64,
}

#[derive(Serialize)]
struct ExpandReport {
    #[serde(rename = "N")]
    n: u64,
    x: String,
    arithmetic: &'static str,
    digits: Vec<u64>,
    convergents: Vec<ConvergentRow>,
    note: Option<String>,
}

fn residual(x: &BigRational, c: &Convergent) -> f64 {
    (x - c.value()).abs().to_f64().unwrap_or(f64::NAN)
}

fn cmd_expand(a: &ExpandArgs, out: &mut dyn Write) -> CmdResult {
    let n = parameter(a.n)?;
    let (exact_x, digits, arithmetic, note) = match parse_x(&a.x)? {
        Input::Exact(x) => {
            let e = expand_exact(n, &x, a.count)?;
            (x, e.digits, "exact", None)
        }
        Input::Float(x) => {
            let e = expand(n, x, a.count)?;
            let note = e.truncation.map(|t| match t {
                Truncation::HitOne { step } => format!("orbit reached 1 at step {step}"),
                Truncation::PrecisionLoss { position } => {
                    format!("digit {position} exceeds double precision; expansion stopped")
                }
            });
            let x = BigRational::from_float(x).expect("finite x");
            (x, e.digits(), "float", note)
        }
    };
    let rows: Vec<ConvergentRow> = convergents(&digits)
        .iter()
        .skip(1)
        .map(|c| ConvergentRow {
            k: c.index,
            p: c.p.to_string(),
            q: c.q.to_string(),
            residual: residual(&exact_x, c),
        })
        .collect();
    write_expansion(a, n, &digits, arithmetic, note, rows, out)
}

fn write_expansion(
    a: &ExpandArgs,
    n: Parameter,
    digits: &DigitSequence,
    arithmetic: &'static str,
    note: Option<String>,
    rows: Vec<ConvergentRow>,
    out: &mut dyn Write,
) -> CmdResult {
    match a.format {
        Format::Json => {
            let report = ExpandReport {
                n: n.get(),
                x: a.x.clone(),
                arithmetic,
                digits: digits.digits().to_vec(),
                convergents: rows,
                note,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
        }
        Format::Csv => {
            writeln!(out, "k,digit,p,q,residual")?;
            for (row, d) in rows.iter().zip(digits.digits()) {
                writeln!(out, "{},{d},{},{},{}", row.k, row.p, row.q, row.residual)?;
            }
        }
        Format::Text => {
            writeln!(out, "N = {n}, x = {} ({arithmetic} arithmetic)", a.x)?;
            let list: Vec<String> = digits.digits().iter().map(u64::to_string).collect();
            writeln!(out, "digits: {}", list.join(", "))?;
            for (row, d) in rows.iter().zip(digits.digits()) {
                writeln!(
                    out,
                    "k = {:>3}  a_k = {d:<6} p_k/q_k = {}/{}  |x - p_k/q_k| = {:e}",
                    row.k, row.p, row.q, row.residual
                )?;
            }
            if let Some(note) = note {
                writeln!(out, "note: {note}")?;
            }
        }
    }
    Ok(())
}

/// Reads a two-column CSV `x,F` with an optional header; the nodes must be
/// `k / M` for `k = 0..=M`.
pub fn read_initial_csv(n: Parameter, path: &Path) -> crate::error::Result<GridFunction> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [x, f] => x.parse::<f64>().ok().zip(f.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((x, f)) => {
                xs.push(x);
                values.push(f);
            }
            None if line_no == 0 => continue,
            None => {
                return Err(Error::InvalidArgument(format!(
                    "{}:{}: expected two numeric columns",
                    path.display(),
                    line_no + 1
                )))
            }
        }
    }
    let m = xs.len().saturating_sub(1).max(1) as f64;
    if let Some(k) = xs.iter().enumerate().position(|(k, &x)| (x - k as f64 / m).abs() > 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "{}: node {k} is not on the uniform grid k/{}",
            path.display(),
            xs.len().saturating_sub(1)
        )));
    }
    GridFunction::new(n, GridKind::Cdf, values)
}

fn cmd_gk(a: &GkArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let n = parameter(a.n)?;
    if !a.rate_tolerance.is_finite() {
        return Err(Failure::usage("--rate-tolerance must be a finite number"));
    }
    if a.steps == 0 {
        return Err(Failure::usage("--steps must be at least 1"));
    }
    let initial = match a.initial.as_str() {
        "uniform" => GridFunction::lebesgue_cdf(n, a.grid)?,
        path => read_initial_csv(n, Path::new(path))?,
    };
    let report = iterate_gk(&initial, a.steps, &TailPolicy::default_for(n))?;
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    match &a.output {
        Some(path) => fs::write(path, format!("{json}\n"))?,
        None => writeln!(out, "{json}")?,
    }
    match report.fitted_rate {
        Some(rate) if rate > report.q_n + a.rate_tolerance => Err(Failure::check(format!(
            "fitted rate {rate} exceeds q_N + tolerance = {}",
            report.q_n + a.rate_tolerance
        ))),
        Some(_) => Ok(()),
        None => {
            writeln!(err, "warning: {}", report.note.as_deref().unwrap_or("no rate fitted"))?;
            Ok(())
        }
    }
}

fn cmd_qn(a: &QnArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.precision == 0 || a.precision > 1000 {
        return Err(Failure::usage("--precision must lie in 1..=1000"));
    }
    if a.table {
        let rows = reproduce_table();
        match a.format {
            Format::Text => write!(out, "{}", table_text(&rows))?,
            Format::Csv => write!(out, "{}", table_csv(&rows))?,
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("serializable"))?,
        }
        if a.check_paper {
            let bad = check_against_published(&rows);
            for m in &bad {
                writeln!(err, "mismatch: N = {} {}: expected {}, got {}", m.n, m.column, m.expected, m.got)?;
            }
            if !bad.is_empty() {
                return Err(Failure::check(format!("{} table value(s) differ from the published table", bad.len())));
            }
            writeln!(err, "all {} table values match the published table", 2 * rows.len())?;
        }
        return Ok(());
    }
    let n = parameter(a.n.expect("clap enforces --N without --table"))?;
    let cert = qn_exact(n, a.precision)?.to_json();
    match a.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&cert).expect("serializable"))?,
        Format::Csv => {
            writeln!(out, "N,q,error_bound,lower,upper,zeta2,zeta3")?;
            writeln!(
                out,
                "{},{},{:e},{},{},{},{}",
                cert.n, cert.q, cert.error_bound, cert.lower, cert.upper, cert.zeta2, cert.zeta3
            )?;
        }
        Format::Text => {
            writeln!(out, "N           = {}", cert.n)?;
            writeln!(out, "q_N         = {} (± {:e})", cert.q, cert.error_bound)?;
            writeln!(out, "lower bound = {}", cert.lower)?;
            writeln!(out, "upper bound = {}", cert.upper)?;
            writeln!(out, "zeta(2, N)  = {}", cert.zeta2)?;
            writeln!(out, "zeta(3, N)  = {}", cert.zeta3)?;
        }
    }
    Ok(())
}

fn cmd_mc(a: &McArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let n = parameter(a.n)?;
    if a.samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    if a.points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    if !(a.ks_multiplier.is_finite() && a.ks_multiplier > 0.0) {
        return Err(Failure::usage("--ks-multiplier must be positive"));
    }
    let run = monte_carlo_cdf(n, a.iterations, a.samples, a.seed)?;
    let csv = run.to_csv(a.points);
    match &a.output {
        Some(path) => fs::write(path, &csv)?,
        None => write!(out, "{csv}")?,
    }
    // With no map applications the sample is uniform; otherwise compare with rho_N.
    let (target, ks, envelope) = if a.iterations == 0 {
        ("uniform", run.ks_uniform, a.ks_multiplier / (a.samples as f64).sqrt())
    } else {
        ("rho_N", run.ks_rho, run.envelope(qn_value(n), a.ks_multiplier))
    };
    writeln!(
        err,
        "N={} n={} samples={} seed={} generator=\"{GENERATOR}\" ks_rho={} ks_uniform={} envelope({target})={}",
        n, a.iterations, a.samples, a.seed, run.ks_rho, run.ks_uniform, envelope
    )?;
    if ks > envelope {
        return Err(Failure::check(format!("KS distance {ks} to {target} exceeds the envelope {envelope}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("renyi-cf").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn expand_fraction_uses_exact_path() {
        let (code, out, _) = call(&["expand", "--N", "2", "--x", "1/2", "--n", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("exact arithmetic"));
        assert!(out.contains("digits: 4, 2, 2"));
        assert!(out.contains("3/5") && out.contains("7/13") && out.contains("15/29"));
    }

    #[test]
    fn expand_decimal_uses_float_path() {
        let (code, out, _) = call(&["expand", "--N", "2", "--x", "0", "--n", "2", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next(), Some("k,digit,p,q,residual"));
        assert!(out.lines().nth(1).unwrap().starts_with("1,2,"));
        assert!(out.lines().nth(2).unwrap().starts_with("2,2,"));
        let (_, text, _) = call(&["expand", "--N", "2", "--x", "0.25"]);
        assert!(text.contains("float arithmetic"));
    }

    #[test]
    fn usage_errors_exit_2_with_one_line() {
        for args in [
            &["expand", "--N", "2", "--x", "1.5"][..],
            &["expand", "--N", "2", "--x", "3/2"],
            &["expand", "--N", "2", "--x", "abc"],
            &["expand", "--N", "1", "--x", "0.5"],
            &["qn", "--N", "1"],
            &["gk", "--N", "1"],
            &["mc", "--N", "2", "--samples", "0"],
            &["qn", "--check-paper"],
            &["frobnicate"],
        ] {
            let (code, _, err) = call(args);
            assert_eq!(code, 2, "{args:?}");
            assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        }
    }

    #[test]
    fn qn_table_checks_out() {
        let (code, out, err) = call(&["qn", "--table", "--check-paper"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().count(), 9);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("expand"));
    }
}

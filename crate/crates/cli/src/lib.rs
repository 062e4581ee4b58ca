//! Command-line front end: sum grids, ψ on series expressions, verification
//! sweeps, sharpness scans and fixed-point checks.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use psi_core::congruences::{verify_sweep, BoundKind, CongruenceRecord, SumKind, SweepSpec};
use psi_core::report::{self, OutputFormat};
use psi_core::{expr, psi, Error, LaurentSeries, PadicContext};

pub const WORKERS_ENV: &str = "PSI_CALC_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "psi-calc", version, about)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Alternating binomial sums over a grid of (n, r, j).
    Fleck(GridArgs),
    /// Multinomial-coefficient sums over a grid of (n, r, j).
    Multi(GridArgs),
    /// Apply ψ^a to a series expression.
    Psi(SeriesArgs),
    /// Check every applicable bound over a grid; exit 1 on any failure.
    Verify(SweepArgs),
    /// List tight instances (valuation equal to the bound).
    Scan(SweepArgs),
    /// Check ψ-fixedness of the cyclotomic elements or of an expression.
    Fixed(FixedArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub a: u32,
    /// json, csv or text.
    #[arg(long, default_value = "text")]
    pub format: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: Common,
    /// Values like `5`, `0..10`, `0..=10`, `-3..=-1,7`.
    #[arg(long, allow_hyphen_values = true)]
    pub n: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub r: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub j: String,
    /// Comma-separated bounds; defaults to the family's sharp bound.
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "fleck")]
    pub kind: String,
    #[arg(long, default_value_t = 40)]
    pub n_max: u64,
    #[arg(long, default_value_t = 5)]
    pub j_max: u64,
    /// Overrides the standard n range.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// Overrides the standard r set (all classes mod p^a plus −3..−1).
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    /// Comma-separated bounds; defaults to every bound that applies.
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub expr: String,
    /// π-adic precision: coefficients below π^M are tracked.
    #[arg(long = "M", default_value_t = 64, allow_hyphen_values = true)]
    pub m: i64,
    /// p-adic precision: residues mod p^N.
    #[arg(long = "N", default_value_t = 32)]
    pub n: u32,
}

#[derive(Debug, Clone, Args)]
pub struct FixedArgs {
    #[command(flatten)]
    pub common: Common,
    /// Expression to test instead of the cyclotomic family.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Comma-separated a values for a/((1+π)^a − 1) − 1/π.
    #[arg(long, default_value = "1,2,3,4")]
    pub units: String,
    #[arg(long = "M", default_value_t = 64, allow_hyphen_values = true)]
    pub m: i64,
    #[arg(long = "N", default_value_t = 32)]
    pub n: u32,
}

/// Failure of a run, already mapped to its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl ToString) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::config(e)
    }
}

/// Parses `5`, `a..b`, `a..=b` and comma-separated mixtures of these.
pub fn parse_values(spec: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let num = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad integer {s:?} in {spec:?}"))
        };
        // Search from 1 so a leading minus sign is never mistaken for a range.
        if let Some(idx) = part.get(1..).and_then(|s| s.find("..")).map(|i| i + 1) {
            let lo = num(&part[..idx])?;
            let rest = &part[idx + 2..];
            let hi = match rest.strip_prefix('=') {
                Some(h) => num(h)?,
                None => num(rest)? - 1,
            };
            if hi.saturating_sub(lo) > 10_000_000 {
                return Err(format!("range {part:?} is too large"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err(format!("empty value list {spec:?}"));
    }
    Ok(out)
}

fn parse_unsigned(spec: &str, name: &str) -> Result<Vec<u64>, Failure> {
    parse_values(spec)
        .map_err(Failure::config)?
        .into_iter()
        .map(|v| {
            u64::try_from(v).map_err(|_| Failure::config(format!("{name} must be nonnegative")))
        })
        .collect()
}

fn parse_bounds(spec: &str) -> Result<Vec<BoundKind>, Failure> {
    spec.split(',')
        .map(|s| s.trim().parse::<BoundKind>().map_err(Failure::from))
        .collect()
}

fn check_p_a(common: &Common) -> Result<OutputFormat, Failure> {
    if !psi_core::padic::is_prime(common.p) {
        return Err(Error::NotPrime(common.p).into());
    }
    if common.a == 0 {
        return Err(Failure::config("a must be at least 1"));
    }
    Ok(common.format.parse()?)
}

/// Applies the `PSI_CALC_WORKERS` override, if set.
pub fn apply_env(cli: &mut CliConfig) -> Result<(), Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let w: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::config(format!("{WORKERS_ENV}={raw:?} is not a count")))?;
    match &mut cli.command {
        Command::Fleck(g) | Command::Multi(g) => g.workers = Some(w),
        Command::Verify(s) | Command::Scan(s) => s.workers = Some(w),
        Command::Psi(_) | Command::Fixed(_) => {}
    }
    Ok(())
}

/// Everything a run produces: the report body and diagnostics for stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub diagnostics: String,
}

fn grid_spec(kind: SumKind, g: &GridArgs) -> Result<SweepSpec, Failure> {
    let bounds = match &g.bounds {
        Some(b) => parse_bounds(b)?,
        None => vec![kind.primary_bound()],
    };
    Ok(SweepSpec {
        kind,
        p: g.common.p,
        a: g.common.a,
        n: parse_unsigned(&g.n, "n")?,
        r: parse_values(&g.r).map_err(Failure::config)?,
        j: parse_unsigned(&g.j, "j")?,
        bounds,
        workers: g.workers,
    })
}

fn sweep_spec(s: &SweepArgs) -> Result<SweepSpec, Failure> {
    let kind: SumKind = s.kind.parse()?;
    let mut spec = SweepSpec::standard(kind, s.common.p, s.common.a, s.n_max, s.j_max);
    if let Some(n) = &s.n {
        spec.n = parse_unsigned(n, "n")?;
    }
    if let Some(r) = &s.r {
        spec.r = parse_values(r).map_err(Failure::config)?;
    }
    if let Some(j) = &s.j {
        spec.j = parse_unsigned(j, "j")?;
    }
    if let Some(b) = &s.bounds {
        spec.bounds = parse_bounds(b)?;
    }
    spec.workers = s.workers;
    Ok(spec)
}

fn render_timing(timing: &std::collections::BTreeMap<String, Duration>, out: &mut String) {
    for (k, v) in timing {
        let _ = writeln!(out, "timing {k}: {:.3}s", v.as_secs_f64());
    }
}

fn records_outcome(records: &[CongruenceRecord], format: OutputFormat) -> Result<String, Failure> {
    Ok(report::render(records, format)?)
}

fn render_series(s: &LaurentSeries, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => format!("{s}\nprofile: {}\n", s.render_profile()),
        OutputFormat::Json => {
            let coefficients: Vec<_> = s
                .iter()
                .map(|(e, c, g)| {
                    serde_json::json!({
                        "exponent": e,
                        "coefficient": c.value().to_string(),
                        "precision": g,
                    })
                })
                .collect();
            let value = serde_json::json!({
                "p": s.context().p(),
                "precision": s.context().precision(),
                "low": s.low(),
                "high": s.high(),
                "series": s.to_string(),
                "coefficients": coefficients,
            });
            let mut text = serde_json::to_string_pretty(&value).expect("json value");
            text.push('\n');
            text
        }
        OutputFormat::Csv => {
            let mut text = String::from("exponent,coefficient,precision\n");
            for (e, c, g) in s.iter() {
                let _ = writeln!(text, "{e},{},{g}", c.value());
            }
            text
        }
    }
}

fn series_context(p: u64, n: u32, m: i64) -> Result<PadicContext, Failure> {
    if m < 1 {
        return Err(Failure::config("M must be at least 1"));
    }
    Ok(PadicContext::new(p, n)?)
}

fn run_psi(args: &SeriesArgs) -> Result<Outcome, Failure> {
    let format = check_p_a(&args.common)?;
    let ctx = series_context(args.common.p, args.n, args.m)?;
    let x = expr::evaluate(&args.expr, &ctx, args.m)?;
    let y = psi::psi_iterate(&x, args.common.a)?;
    Ok(Outcome {
        code: EXIT_OK,
        report: render_series(&y.series, format),
        diagnostics: String::new(),
    })
}

fn run_fixed(args: &FixedArgs) -> Result<Outcome, Failure> {
    let format = check_p_a(&args.common)?;
    let ctx = series_context(args.common.p, args.n, args.m)?;
    let mut rows: Vec<(String, bool)> = Vec::new();
    if let Some(src) = &args.expr {
        let x = expr::evaluate(src, &ctx, args.m)?;
        rows.push((src.clone(), psi::check_fixed_point(&x)?));
    } else {
        for a in parse_unsigned(&args.units, "units")? {
            if a == 0 || a % args.common.p == 0 {
                return Err(Failure::config(format!(
                    "unit {a} is not prime to p={}",
                    args.common.p
                )));
            }
            let x = LaurentSeries::cyclotomic_element(a, &ctx, args.m)?;
            rows.push((a.to_string(), psi::check_fixed_point(&x)?));
        }
    }
    let report = match format {
        OutputFormat::Text => rows
            .iter()
            .map(|(k, ok)| format!("{k}: {}\n", if *ok { "fixed" } else { "NOT fixed" }))
            .collect(),
        OutputFormat::Json => {
            let value: Vec<_> = rows
                .iter()
                .map(|(k, ok)| serde_json::json!({ "element": k, "fixed": ok }))
                .collect();
            serde_json::to_string_pretty(&value).expect("json value") + "\n"
        }
        OutputFormat::Csv => {
            let mut text = String::from("element,fixed\n");
            for (k, ok) in &rows {
                let _ = writeln!(text, "\"{k}\",{ok}");
            }
            text
        }
    };
    let all_fixed = rows.iter().all(|r| r.1);
    Ok(Outcome {
        code: if all_fixed { EXIT_OK } else { EXIT_FAILED },
        report,
        diagnostics: String::new(),
    })
}

/// Runs a parsed command. The report is deterministic for a fixed command;
/// timing and summaries go to `diagnostics`.
pub fn execute(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Fleck(g) | Command::Multi(g) => {
            let kind = if matches!(command, Command::Fleck(_)) {
                SumKind::Fleck
            } else {
                SumKind::Multinomial
            };
            let format = check_p_a(&g.common)?;
            let swept = verify_sweep(&grid_spec(kind, g)?)?;
            Ok(Outcome {
                code: EXIT_OK,
                report: records_outcome(&swept.records, format)?,
                diagnostics: String::new(),
            })
        }
        Command::Verify(s) | Command::Scan(s) => {
            let format = check_p_a(&s.common)?;
            let swept = verify_sweep(&sweep_spec(s)?)?;
            let mut diagnostics = String::new();
            render_timing(&swept.timing, &mut diagnostics);
            let _ = writeln!(
                diagnostics,
                "{} records, {} failures, {} tight",
                swept.records.len(),
                swept.failures.len(),
                swept.tight_instances.len()
            );
            let (records, code) = if matches!(command, Command::Verify(_)) {
                let code = if swept.passed() { EXIT_OK } else { EXIT_FAILED };
                (&swept.records, code)
            } else {
                (&swept.tight_instances, EXIT_OK)
            };
            Ok(Outcome {
                code,
                report: records_outcome(records, format)?,
                diagnostics,
            })
        }
        Command::Psi(args) => run_psi(args),
        Command::Fixed(args) => run_fixed(args),
    }
}

fn output_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Fleck(g) | Command::Multi(g) => g.common.out.as_ref(),
        Command::Verify(s) | Command::Scan(s) => s.common.out.as_ref(),
        Command::Psi(a) => a.common.out.as_ref(),
        Command::Fixed(f) => f.common.out.as_ref(),
    }
}

/// Runs the command, writing the report to `--out` or `stdout`, and returns
/// the exit status.
pub fn run(cli: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    let written = match output_path(&cli.command) {
        Some(path) => std::fs::write(path, &outcome.report),
        None => stdout.write_all(outcome.report.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_CONFIG;
    }
    let _ = stderr.write_all(outcome.diagnostics.as_bytes());
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("5").unwrap(), vec![5]);
        assert_eq!(parse_values("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_values("0..=3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_values("-3..=-1, 7").unwrap(), vec![-3, -2, -1, 7]);
        assert_eq!(parse_values("-2").unwrap(), vec![-2]);
        assert_eq!(parse_values("-2..1").unwrap(), vec![-2, -1, 0]);
        assert!(parse_values("").is_err());
        assert!(parse_values("x").is_err());
        assert!(parse_values("3..1").unwrap_or_default().is_empty());
    }

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let cli =
            CliConfig::try_parse_from(std::iter::once("psi-calc").chain(args.iter().copied()))
                .expect("arguments parse");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cli, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn fleck_single_record() {
        let (code, out, _) = run_args(&["fleck", "--p", "3", "--n", "5", "--format", "csv"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            out,
            "p,a,n,r,j,sum,valuation,bound,bound_kind,tight\n3,1,5,0,0,9,2,2,fleck,true\n"
        );
    }

    #[test]
    fn psi_of_pi_squared() {
        let (code, out, _) =
            run_args(&["psi", "--p", "2", "--expr", "pi^2", "--M", "16", "--N", "8"]);
        assert_eq!(code, EXIT_OK);
        let first = out.lines().next().unwrap();
        assert!(first.starts_with("2 + pi + O(pi^"), "{out}");
        assert!(out.contains("profile: "));
    }

    #[test]
    fn config_errors_exit_2() {
        assert_eq!(run_args(&["fleck", "--p", "4", "--n", "1"]).0, EXIT_CONFIG);
        assert_eq!(
            run_args(&["psi", "--p", "3", "--expr", "pi^", "--M", "8"]).0,
            EXIT_CONFIG
        );
        assert_eq!(
            run_args(&["psi", "--p", "3", "--expr", "pi^-4", "--M", "8"]).0,
            EXIT_CONFIG
        );
        assert_eq!(
            run_args(&["fixed", "--p", "3", "--units", "3", "--M", "8"]).0,
            EXIT_CONFIG
        );
        assert_eq!(
            run_args(&["verify", "--p", "2", "--kind", "nope"]).0,
            EXIT_CONFIG
        );
    }
}

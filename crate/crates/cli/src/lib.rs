//! Command-line front end. [`run`] parses argv, runs one subcommand and
//! writes the report to `out`; diagnostics go to `err`. It returns the exit
//! code: 0 on success, 1 on usage, parse or evaluation errors, 2 when a
//! verification suite has failing cases.

use std::io::Write;

use bchyper::coherent::{level_rows, state_coefficients, CoherentSpec, LevelRow, DEFAULT_TRUNCATION};
use bchyper::hyper::{classify, pfq, probe_convergence, PfqParams, SeriesConfig, DEFAULT_MAX_TERMS, DEFAULT_TOL};
use bchyper::numbers::{parse_list, BiComplex};
use bchyper::suites::{self, Metric, SuiteOptions, SuiteReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

pub const REPORT_VERSION: &str = "1";
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bchyper", version, about = "Bicomplex generalized hypergeometric functions")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate pFq(alphas; betas; Z).
    Eval(EvalArgs),
    /// Report the convergence class of a parameter set.
    Classify(ParamArgs),
    /// Run a seeded verification suite (`all` runs every suite).
    Verify(VerifyArgs),
    /// Sample convergence over a grid of (|z1|, |z2|) for p = q + 1.
    RegionPlot(RegionArgs),
    /// Per-level table of a truncated coherent state.
    Coherent(CoherentArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Expected `p,q`; checked against the parameter lists.
    #[arg(long)]
    pub pfq: Option<String>,
    /// Comma-separated numerator parameters.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub alphas: String,
    /// Comma-separated denominator parameters.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub betas: String,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Argument, e.g. `0.5e1+0.25e2` or `0.3+0.2i2`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    /// Relative size of the terms that stops the series.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Term limit per component.
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite id such as thm4.1 or cs-eigen, or `all`.
    pub id: String,
    /// Case count; each suite has its own default.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed; each case derives its own.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Residual tolerance for residual-based suites.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Grid points per axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Largest modulus on each axis.
    #[arg(long, default_value_t = 1.5)]
    pub rmax: f64,
    /// Argument of both components.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Term budget per probe.
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    pub budget: usize,
}

#[derive(Args, Debug)]
pub struct CoherentArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Argument, e.g. `0.5e1+0.25e2` or `0.3+0.2i2`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    /// Initial truncation; raised until the tail is negligible.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    pub truncation: usize,
}

/// Failure that maps to exit code 1.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

pub fn parse_params(a: &ParamArgs) -> std::result::Result<PfqParams, String> {
    let alphas = parse_list(&a.alphas).map_err(|e| format!("--alphas: {e}"))?;
    let betas = parse_list(&a.betas).map_err(|e| format!("--betas: {e}"))?;
    if let Some(shape) = &a.pfq {
        let (p, q) = shape
            .split_once(',')
            .and_then(|(p, q)| Some((p.trim().parse::<usize>().ok()?, q.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| format!("--pfq expects p,q, got {shape:?}"))?;
        if (p, q) != (alphas.len(), betas.len()) {
            return Err(format!("--pfq {p},{q} does not match {} alphas and {} betas", alphas.len(), betas.len()));
        }
    }
    PfqParams::new(alphas, betas).map_err(|e| e.to_string())
}

fn parse_z(s: &str) -> std::result::Result<BiComplex, String> {
    s.parse().map_err(|e| format!("--z: {e}"))
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli, out)));
    match result {
        Ok(Ok(code)) => code,
        Ok(Err(Failure(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
        Err(_) => {
            let _ = writeln!(err, "error: internal failure");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Eval(a) => eval(a, cli.format.unwrap_or(Format::Plain), out),
        Command::Classify(a) => classify_cmd(a, cli.format.unwrap_or(Format::Plain), out),
        Command::Verify(a) => verify(a, cli.format.unwrap_or(Format::Plain), out),
        Command::RegionPlot(a) => region(a, cli.format.unwrap_or(Format::Csv), out),
        Command::Coherent(a) => coherent(a, cli.format.unwrap_or(Format::Csv), out),
    }
}

fn check_tol(tol: f64) -> std::result::Result<(), Failure> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Failure(format!("tolerance must lie in (0, 1), got {tol}")))
    }
}

fn write_json(
    out: &mut dyn Write,
    command: &str,
    config: serde_json::Value,
    results: serde_json::Value,
    summary: serde_json::Value,
) -> std::result::Result<(), Failure> {
    let doc = json!({
        "version": REPORT_VERSION,
        "command": command,
        "config": config,
        "results": results,
        "summary": summary,
    });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn csv_rows<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> std::result::Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn params_json(p: &PfqParams) -> serde_json::Value {
    let list = |v: &[BiComplex]| v.iter().map(|x| x.idempotent_string()).collect::<Vec<_>>();
    json!({ "p": p.p(), "q": p.q(), "alphas": list(p.alphas()), "betas": list(p.betas()) })
}

#[derive(Serialize)]
struct EvalRow {
    value: String,
    cartesian: String,
    terms1: usize,
    terms2: usize,
    tail1: f64,
    tail2: f64,
    class: String,
}

fn eval(a: &EvalArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let params = parse_params(&a.params)?;
    let z = parse_z(&a.z)?;
    check_tol(a.tol)?;
    if a.max_terms == 0 {
        return Err(Failure("--max-terms must be at least 1".into()));
    }
    let r = pfq(&params, z, &SeriesConfig { tol: a.tol, max_terms: a.max_terms })?;
    let row = EvalRow {
        value: r.value.idempotent_string(),
        cartesian: r.value.to_string(),
        terms1: r.terms_used[0],
        terms2: r.terms_used[1],
        tail1: r.tail_bound.h1,
        tail2: r.tail_bound.h2,
        class: r.class.to_string(),
    };
    match format {
        Format::Plain => {
            writeln!(out, "{}", row.value)?;
            writeln!(out, "cartesian: {}", row.cartesian)?;
            writeln!(
                out,
                "terms: {} {}; tail: {:e} {:e}; class: {}",
                row.terms1, row.terms2, row.tail1, row.tail2, row.class
            )?;
        }
        Format::Csv => csv_rows(out, &[row])?,
        Format::Json => {
            let config = json!({ "params": params_json(&params), "z": z.idempotent_string(), "tolerance": a.tol, "max_terms": a.max_terms });
            let summary = json!({ "ok": true });
            write_json(out, "eval", config, json!([row]), summary)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ClassRow {
    p: usize,
    q: usize,
    class: String,
    eta1: f64,
    eta2: f64,
    margin: f64,
}

fn classify_cmd(a: &ParamArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let params = parse_params(a)?;
    let c = classify(&params);
    let row = ClassRow {
        p: params.p(),
        q: params.q(),
        class: c.kind.to_string(),
        eta1: c.eta.h1,
        eta2: c.eta.h2,
        margin: c.margin,
    };
    match format {
        Format::Plain => writeln!(out, "{}", row.class)?,
        Format::Csv => csv_rows(out, &[row])?,
        Format::Json => {
            write_json(out, "classify", json!({ "params": params_json(&params) }), json!([row]), json!({ "ok": true }))?
        }
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, format: Format, out: &mut dyn Write) -> Outcome {
    if let Some(t) = a.tol {
        check_tol(t)?;
    }
    if a.samples == Some(0) {
        return Err(Failure("--samples must be at least 1".into()));
    }
    let opts = SuiteOptions { seed: a.seed, samples: a.samples, tol: a.tol };
    let reports = suites::run(&a.id, &opts)?;
    let failed: usize = reports.iter().map(|r| r.failed).sum();
    let total: usize = reports.iter().map(|r| r.samples).sum();
    match format {
        Format::Plain => {
            for r in &reports {
                writeln!(out, "{}", suite_line(r))?;
                for row in r.rows.iter().filter(|x| !x.passed) {
                    let note = if row.note.is_empty() { String::new() } else { format!("; {}", row.note) };
                    writeln!(
                        out,
                        "  failed case {} seed {}: residuals {:e} {:e}{note}",
                        row.case, row.seed, row.residual1, row.residual2
                    )?;
                }
            }
            writeln!(out, "total: {}/{} passed", total - failed, total)?;
        }
        Format::Csv => {
            let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter()).collect();
            csv_rows(out, &rows)?;
        }
        Format::Json => {
            let config = json!({ "id": a.id, "seed": a.seed, "samples": a.samples, "tolerance": a.tol });
            let summary = json!({ "suites": reports.len(), "cases": total, "passed": total - failed, "failed": failed, "ok": failed == 0 });
            write_json(out, "verify", config, serde_json::to_value(&reports)?, summary)?;
        }
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// One-line summary of a suite: id, pass count, worst value, tolerance.
pub fn suite_line(r: &SuiteReport) -> String {
    let status = if r.ok() { "PASS" } else { "FAIL" };
    let metric = serde_json::to_value(r.metric).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let worst = match r.metric {
        Metric::Flag => "pass/fail check".to_string(),
        _ => format!("max {metric} {:.3e} (tol {:e})", r.max_residual, r.tolerance),
    };
    format!("{status} {:<14} {:>5}/{:<5} {worst}  {}", r.id, r.passed, r.samples, r.title)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionPoint {
    pub abs_z1: f64,
    pub abs_z2: f64,
    pub converged: bool,
}

/// Probes `pFq` at `|z_s| e^(i theta)` in each component; a point counts
/// as converged when both component series settle within `budget` terms.
pub fn region_point(params: &PfqParams, r1: f64, r2: f64, theta: f64, budget: usize) -> RegionPoint {
    let ok = |s: u8, r: f64| probe_convergence(&params.component(s), Complex64::from_polar(r, theta), budget);
    RegionPoint { abs_z1: r1, abs_z2: r2, converged: ok(1, r1) && ok(2, r2) }
}

pub fn region_grid(
    params: &PfqParams,
    grid: usize,
    rmax: f64,
    theta: f64,
    budget: usize,
) -> std::result::Result<Vec<RegionPoint>, String> {
    if params.p() != params.q() + 1 {
        return Err(format!("region-plot needs p = q + 1, got {}F{}", params.p(), params.q()));
    }
    if grid < 2 || !(rmax > 0.0 && rmax.is_finite()) || budget == 0 {
        return Err("region-plot needs --grid >= 2, a positive --rmax and --budget >= 1".into());
    }
    let r = |i: usize| rmax * i as f64 / (grid - 1) as f64;
    Ok((0..grid)
        .flat_map(|i| (0..grid).map(move |j| (i, j)))
        .map(|(i, j)| region_point(params, r(i), r(j), theta, budget))
        .collect())
}

fn region(a: &RegionArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let params = parse_params(&a.params)?;
    let points = region_grid(&params, a.grid, a.rmax, a.theta, a.budget)?;
    let converged = points.iter().filter(|p| p.converged).count();
    match format {
        Format::Csv => csv_rows(out, &points)?,
        Format::Plain => {
            for p in &points {
                writeln!(out, "{} {} {}", p.abs_z1, p.abs_z2, u8::from(p.converged))?;
            }
        }
        Format::Json => {
            let config = json!({ "params": params_json(&params), "grid": a.grid, "rmax": a.rmax, "theta": a.theta, "budget": a.budget });
            let summary = json!({ "points": points.len(), "converged": converged });
            write_json(out, "region-plot", config, serde_json::to_value(&points)?, summary)?;
        }
    }
    Ok(EXIT_OK)
}

fn coherent(a: &CoherentArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let params = parse_params(&a.params)?;
    let z = parse_z(&a.z)?;
    let spec = CoherentSpec::new(params, z, a.truncation)?;
    let st = state_coefficients(&spec)?;
    let rows: Vec<LevelRow> = level_rows(&st);
    match format {
        Format::Csv => csv_rows(out, &rows)?,
        Format::Plain => {
            for r in &rows {
                writeln!(out, "{} {} {} {} {} {:e} {:e}", r.n, r.rho1, r.rho2, r.f1, r.f2, r.prob1, r.prob2)?;
            }
        }
        Format::Json => {
            let config =
                json!({ "params": params_json(&spec.params), "z": z.idempotent_string(), "truncation": a.truncation });
            let summary = json!({ "levels": rows.len(), "tail1": st.tail.h1, "tail2": st.tail.h2 });
            write_json(out, "coherent", config, serde_json::to_value(&rows)?, summary)?;
        }
    }
    Ok(EXIT_OK)
}

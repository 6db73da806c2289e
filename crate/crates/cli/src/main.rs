//! `laguerre-cz`: identity checks, standard-estimate sweeps, kernel
//! evaluation and operator application for Laguerre expansions.

mod apply;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use laguerre_cz::harness::{run_sweep, SweepConfig};
use laguerre_cz::kernels::{heat_kernel_closed, heat_kernel_schlafli, heat_kernel_shells, ln_heat_kernel_closed, SchlafliRules};
use laguerre_cz::verify::{run_verify, VerifyOptions, VerifyReport};
use laguerre_cz::{AlphaIndex, Error, PointRd};

#[derive(Parser, Debug)]
#[command(name = "laguerre-cz", version, about = "Laguerre semigroup kernels: checks, sweeps and operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Output file for the machine-readable result.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable format; without it (and without --out) a console
    /// summary is printed.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for every sampled check (overrides the config seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall time in reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity suite.
    Verify(VerifyArgs),
    /// Run the standard-estimate sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the heat kernel in its three representations.
    Kernel(KernelArgs),
    /// Apply an operator to a test function on a grid.
    Apply {
        #[arg(long, value_enum)]
        op: apply::Op,
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_component(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{s:?} is not a number: {e}"))?;
    if !(v.is_finite() && v > -1.0) {
        return Err(format!("alpha components must lie in (-1, inf), got {v}"));
    }
    Ok(v)
}

fn parse_coord(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|e| format!("{s:?} is not a number: {e}"))
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Components of alpha, each in (-1, inf); comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_component, default_value = "-0.75")]
    alpha: Vec<f64>,
    /// Dimension; a single alpha component is repeated to fill it.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, hide = true, default_value_t = 0.0)]
    inject_bessel_fault: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Rep {
    All,
    Closed,
    Spectral,
    Schlafli,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_component, required = true)]
    alpha: Vec<f64>,
    #[arg(long)]
    t: f64,
    #[arg(long, value_delimiter = ',', value_parser = parse_coord, required = true)]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_coord, required = true)]
    y: Vec<f64>,
    #[arg(long, value_enum, default_value = "all")]
    rep: Rep,
    /// Shells of the spectral series.
    #[arg(long, default_value_t = 100)]
    k_max: usize,
    /// Gauss nodes per coordinate for the Schläfli representation.
    #[arg(long, default_value_t = 64)]
    nodes: usize,
}

/// Failure kinds mapped to exit codes.
pub(crate) enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::NoConvergence { .. } | Error::Truncation { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

pub(crate) type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, g),
        Command::Sweep { config } => cmd_sweep(config, g),
        Command::Kernel(a) => cmd_kernel(a, g),
        Command::Apply { op, config } => apply::cmd_apply(*op, config, g.out.as_deref(), g.format),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn machine(g: &Global) -> Option<Format> {
    match (g.format, &g.out) {
        (Some(f), _) => Some(f),
        (None, Some(p)) if p.extension().is_some_and(|e| e == "csv") => Some(Format::Csv),
        (None, Some(_)) => Some(Format::Json),
        (None, None) => None,
    }
}

/// Writes `text` to `out`, or to stdout.
pub(crate) fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())?;
            s.flush()
        }
    }
}

pub(crate) fn to_json(v: &impl Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Check(e.to_string()))
}

pub(crate) fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Check(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Failure::Check(e.to_string()))?).map_err(|e| Failure::Check(e.to_string()))
}

pub(crate) fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn join(v: &[f64]) -> String {
    v.iter().map(|c| sci(*c)).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyOutput<'a> {
    schema_version: u32,
    #[serde(flatten)]
    report: &'a VerifyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
}

fn cmd_verify(a: &VerifyArgs, g: &Global) -> Outcome {
    let comps = match (a.dim, a.alpha.len()) {
        (Some(d), 1) => vec![a.alpha[0]; d],
        (Some(d), n) if d != n => {
            return Err(Failure::Usage(format!("--dim {d} does not match {n} alpha components")));
        }
        _ => a.alpha.clone(),
    };
    if comps.is_empty() || comps.len() > 2 {
        return Err(Failure::Usage(format!("verify supports d = 1 or 2, got {}", comps.len())));
    }
    let mut opts = VerifyOptions::new(AlphaIndex::new(comps)?);
    opts.bessel_fault = a.inject_bessel_fault;
    if let Some(s) = g.seed {
        opts.seed = s;
        opts.pointwise.seed = s;
    }
    let start = Instant::now();
    let report = run_verify(&opts);
    let runtime = g.timings.then(|| start.elapsed().as_secs_f64());
    match machine(g) {
        Some(Format::Json) => emit(
            g.out.as_deref(),
            &to_json(&VerifyOutput {
                schema_version: laguerre_cz::harness::SCHEMA_VERSION,
                report: &report,
                runtime_seconds: runtime,
            })?,
        )?,
        Some(Format::Csv) => emit(
            g.out.as_deref(),
            &csv_string(
                &["name", "passed", "achieved", "tolerance", "samples", "detail"],
                report.checks.iter().map(|c| {
                    vec![
                        c.name.clone(),
                        c.passed.to_string(),
                        sci(c.achieved),
                        sci(c.tolerance),
                        c.samples.to_string(),
                        c.detail.clone(),
                    ]
                }),
            )?,
        )?,
        None => {}
    }
    if machine(g).is_none() || g.out.is_some() {
        for c in &report.checks {
            println!(
                "{} {:<48} {:.6e} (tol {:.6e}, n = {}) {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.achieved,
                c.tolerance,
                c.samples,
                c.detail
            );
        }
        if let Some(t) = runtime {
            println!("runtime {t:.3} s");
        }
    }
    if !report.passed {
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("{}", serde_json::to_string(c).unwrap_or_default());
        }
    }
    Ok(report.passed)
}

// ---------------------------------------------------------------------------

fn cmd_sweep(path: &Path, g: &Global) -> Outcome {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut config = SweepConfig::from_json(&text)?;
    if let Some(s) = g.seed {
        config.seed = s;
    }
    let start = Instant::now();
    let mut report = run_sweep(&config)?;
    if g.timings {
        report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    }
    let json = report.to_json()? + "\n";
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).map_err(|e| Failure::Check(e.to_string()))?;
    match (machine(g), &g.out) {
        // with a file, both formats are written: the other one next to it
        (Some(f), Some(p)) => {
            let (main, other, ext) = if f == Format::Json { (&json, &csv, "csv") } else { (&csv, &json, "json") };
            fs::write(p, main)?;
            fs::write(p.with_extension(ext), other)?;
        }
        (Some(Format::Json), None) => emit(None, &json)?,
        (Some(Format::Csv), None) => emit(None, &csv)?,
        (None, _) => {}
    }
    if machine(g).is_none() || g.out.is_some() {
        for t in &report.tables {
            println!(
                "{} {:<40} alpha={:?} {}",
                if t.stable { "STABLE  " } else { "UNSTABLE" },
                t.family,
                t.alpha,
                t.kinds
                    .iter()
                    .map(|k| format!(
                        "{}={:.6e} (last delta {:+.3})",
                        k.kind.as_str(),
                        k.sup,
                        k.refinement_deltas.last().copied().unwrap_or(0.0)
                    ))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        for f in &report.failures {
            println!("FAILED POINT {} alpha={:?} x={:?} y={:?}: {}", f.family, f.alpha, f.x, f.y, f.message);
        }
    }
    Ok(report.all_stable && report.failures.is_empty())
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct KernelOutput {
    alpha: Vec<f64>,
    t: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    closed: Option<f64>,
    ln_closed: Option<f64>,
    spectral: Option<f64>,
    /// Shell terms of the spectral series, `s = 0..=K`.
    spectral_shells: Option<Vec<f64>>,
    schlafli: Option<f64>,
    /// `(a, b, |a - b| / |b|)`.
    pairwise: Vec<(String, String, f64)>,
}

fn cmd_kernel(a: &KernelArgs, g: &Global) -> Outcome {
    let alpha = AlphaIndex::new(a.alpha.clone())?;
    let x = PointRd::new(a.x.clone())?;
    let y = PointRd::new(a.y.clone())?;
    let want = |r: Rep| a.rep == Rep::All || a.rep == r;
    let mut out = KernelOutput {
        alpha: a.alpha.clone(),
        t: a.t,
        x: a.x.clone(),
        y: a.y.clone(),
        closed: None,
        ln_closed: None,
        spectral: None,
        spectral_shells: None,
        schlafli: None,
        pairwise: vec![],
    };
    if want(Rep::Closed) {
        let l = ln_heat_kernel_closed(&alpha, a.t, &x, &y)?;
        out.ln_closed = Some(l);
        out.closed = Some(heat_kernel_closed(&alpha, a.t, &x, &y)?);
    }
    if want(Rep::Spectral) {
        let shells = heat_kernel_shells(&alpha, a.t, &x, &y, a.k_max)?;
        out.spectral = Some(shells.iter().rev().sum());
        out.spectral_shells = Some(shells);
    }
    if want(Rep::Schlafli) {
        let rules = SchlafliRules::new(&alpha, a.nodes)?;
        out.schlafli = Some(heat_kernel_schlafli(&alpha, a.t, &x, &y, &rules)?);
    }
    let reps = [("closed", out.closed), ("spectral", out.spectral), ("schlafli", out.schlafli)];
    for i in 0..3 {
        for j in i + 1..3 {
            if let (Some(u), Some(v)) = (reps[i].1, reps[j].1) {
                out.pairwise.push((reps[i].0.into(), reps[j].0.into(), (u - v).abs() / v.abs()));
            }
        }
    }
    match machine(g) {
        Some(Format::Json) => emit(g.out.as_deref(), &to_json(&out)?)?,
        Some(Format::Csv) => {
            let mut rows: Vec<Vec<String>> = reps
                .iter()
                .filter_map(|(n, v)| v.map(|v| vec![n.to_string(), sci(v)]))
                .collect();
            if let Some(l) = out.ln_closed {
                rows.push(vec!["ln_closed".into(), sci(l)]);
            }
            emit(g.out.as_deref(), &csv_string(&["representation", "value"], rows)?)?
        }
        None => {}
    }
    if machine(g).is_none() || g.out.is_some() {
        println!("alpha = {alpha}, t = {}, x = {:?}, y = {:?}", a.t, a.x, a.y);
        for (n, v) in reps {
            if let Some(v) = v {
                println!("  {n:<9} {v:.6e}");
            }
        }
        if let Some(l) = out.ln_closed {
            println!("  ln closed {l:.6e}");
        }
        for (p, q, r) in &out.pairwise {
            println!("  |{p} - {q}| / |{q}| = {r:.6e}");
        }
        if let (Some(shells), Some(total)) = (&out.spectral_shells, out.spectral) {
            println!("  leading shells (fraction of the spectral sum):");
            for (s, v) in shells.iter().enumerate().take(4) {
                println!("    s = {s}: {:.6e}", v / total);
            }
            println!("    last shell s = {}: {:.6e}", shells.len() - 1, shells.last().unwrap_or(&0.0) / total);
        }
    }
    Ok(true)
}

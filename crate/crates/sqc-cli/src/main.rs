//! Command-line front end: gallery listing, inequality verification,
//! semicontinuity probes, modulus estimation, and CSV export of function
//! values.
//!
//! Exit codes: 0 all checks passed, 1 violations or mismatches found,
//! 2 bad input, 3 I/O failure.

// NaN parameters must fail validation, hence `!(x > 0.0)` over `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod functions;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use functions::FunctionSpec;
use sqc_lab::gallery::{self, SemicontinuityClass};
use sqc_lab::verify::{self, default_radii, VerifyConfig};
use sqc_lab::{ConvexDomain, Point, Region, RngSeed, SqcFunction, Tolerance};

const SEED_ENV: &str = "SQC_LAB_SEED";

#[derive(Parser)]
#[command(
    name = "sqc-lab",
    version,
    about = "Strongly quasiconvex function gallery and numerical verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the gallery catalogue
    List(ListArgs),
    /// Check the defining inequality on sampled triples
    Verify(VerifyArgs),
    /// Probe semicontinuity at chosen points
    Probe(ProbeArgs),
    /// Estimate the largest admissible modulus
    Modulus(ModulusArgs),
    /// Export function values on a grid as CSV
    Export(ExportArgs),
}

#[derive(clap::Args)]
struct ListArgs {
    /// Output format: text or json
    #[arg(long, default_value = "text")]
    format: String,

    /// Filter: all, discontinuous, continuous, or fixtures
    #[arg(long, default_value = "all")]
    filter: String,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[command(flatten)]
    spec: FunctionSpec,

    /// Modulus to test (defaults to the function's claimed modulus)
    #[arg(long)]
    gamma: Option<f64>,

    /// Number of sampled triples
    #[arg(long, default_value_t = 100_000)]
    count: usize,

    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (0 = all available)
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Absolute comparison slack
    #[arg(long, default_value_t = 1e-9)]
    abs_eps: f64,

    /// Relative comparison slack
    #[arg(long, default_value_t = 1e-9)]
    rel_eps: f64,

    /// Smallest admissible distance between pair members
    #[arg(long, default_value_t = 1e-6)]
    min_pair_distance: f64,

    /// Stress sampling at declared loci: auto or none
    #[arg(long, default_value = "auto")]
    stress: String,

    /// Report file path
    #[arg(long, default_value = "sqc-verify-report.json")]
    out: PathBuf,

    /// Report format: json or csv
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(clap::Args)]
struct ProbeArgs {
    #[command(flatten)]
    spec: FunctionSpec,

    /// Probe location: coordinates like "0.5" or "1,0", or "sphere:K" for K
    /// points on each declared sphere or boundary locus. Repeatable.
    #[arg(long = "at", required = true, allow_hyphen_values = true)]
    at: Vec<String>,

    #[arg(long, default_value_t = 64)]
    samples_per_shell: usize,

    #[arg(long)]
    seed: Option<u64>,

    /// Report file path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format: json or csv
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(clap::Args)]
struct ModulusArgs {
    #[command(flatten)]
    spec: FunctionSpec,

    #[arg(long, default_value_t = 100_000)]
    count: usize,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Report file path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ExportArgs {
    #[command(flatten)]
    spec: FunctionSpec,

    /// Grid resolution: "1000" in 1-D, "200x200" in 2-D
    #[arg(long)]
    grid: String,

    /// Axis range "lo,hi" overriding the domain bounds
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,

    /// CSV file path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Prints a line to stdout, exiting quietly if the pipe is gone.
macro_rules! emit {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// A command failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn bad_input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::List(args) => cmd_list(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Probe(args) => cmd_probe(args),
        Command::Modulus(args) => cmd_modulus(args),
        Command::Export(args) => cmd_export(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<RngSeed, Failure> {
    if let Some(s) = flag {
        return Ok(RngSeed(s));
    }
    if let Ok(text) = std::env::var(SEED_ENV) {
        let parsed = text
            .parse::<u64>()
            .map_err(|_| Failure::bad_input(format!("{SEED_ENV} is not an integer: `{text}`")))?;
        return Ok(RngSeed(parsed));
    }
    Ok(RngSeed(7))
}

fn build_function(spec: &FunctionSpec) -> Result<SqcFunction, Failure> {
    spec.build().map_err(|e| Failure::bad_input(e.to_string()))
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            // verbatim: CSV content carries its own trailing newline
            use std::io::Write;
            if write!(std::io::stdout(), "{content}").is_err() {
                std::process::exit(0);
            }
            if !content.ends_with('\n') {
                emit!();
            }
            Ok(())
        }
    }
}

fn cmd_list(args: ListArgs) -> CmdResult {
    let entries: Vec<_> = gallery::catalogue()
        .into_iter()
        .filter(|e| match args.filter.as_str() {
            "all" => true,
            "discontinuous" => e.discontinuous,
            "continuous" => !e.discontinuous && !e.fixture,
            "fixtures" => e.fixture,
            _ => true,
        })
        .collect();
    if !matches!(
        args.filter.as_str(),
        "all" | "discontinuous" | "continuous" | "fixtures"
    ) {
        return Err(Failure::bad_input(format!(
            "unknown filter `{}`",
            args.filter
        )));
    }
    match args.format.as_str() {
        "json" => emit!("{}", serde_json::to_string_pretty(&entries).unwrap()),
        "text" => {
            for e in entries {
                let kind = if e.fixture {
                    "fixture"
                } else if e.discontinuous {
                    "discontinuous"
                } else {
                    "continuous"
                };
                emit!("{:<26} [{kind}] modulus: {}", e.name, e.default_modulus);
                emit!("    {}", e.summary);
                if !e.discontinuities.is_empty() {
                    emit!("    discontinuities: {}", e.discontinuities);
                }
                for p in e.parameters {
                    emit!("    - {p}");
                }
            }
        }
        other => return Err(Failure::bad_input(format!("unknown format `{other}`"))),
    }
    Ok(0)
}

#[derive(Serialize)]
struct RunEcho<'a> {
    command: &'static str,
    function: &'a FunctionSpec,
    gamma: Option<f64>,
    count: usize,
    seed: u64,
    threads: usize,
    stress: &'a str,
    format: &'a str,
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    if !(100..=100_000_000).contains(&args.count) {
        return Err(Failure::bad_input(format!(
            "count must lie in [100, 100000000], got {}",
            args.count
        )));
    }
    let f = build_function(&args.spec)?;
    let gamma = match args.gamma.or_else(|| f.claimed_modulus()) {
        Some(g) if g > 0.0 => g,
        Some(g) => {
            return Err(Failure::bad_input(format!(
                "gamma must be positive, got {g}"
            )))
        }
        None => {
            return Err(Failure::bad_input(format!(
                "{} claims no modulus; pass --gamma",
                f.label()
            )))
        }
    };
    let seed = resolve_seed(args.seed)?;
    let tolerance = Tolerance::new(args.abs_eps, args.rel_eps, args.min_pair_distance)
        .map_err(|e| Failure::bad_input(e.to_string()))?;
    let stress_sets = match args.stress.as_str() {
        "auto" => verify::stress_sets_for(&f),
        "none" => vec![],
        other => return Err(Failure::bad_input(format!("unknown stress mode `{other}`"))),
    };
    let config = VerifyConfig::new(args.count, seed)
        .with_stress_sets(stress_sets)
        .with_tolerance(tolerance)
        .with_threads(args.threads);
    let report =
        verify::sqc_check(&f, gamma, &config).map_err(|e| Failure::bad_input(e.to_string()))?;

    let run = RunEcho {
        command: "verify",
        function: &args.spec,
        gamma: Some(gamma),
        count: args.count,
        seed: seed.0,
        threads: args.threads,
        stress: &args.stress,
        format: &args.format,
    };
    let content = match args.format.as_str() {
        "json" => serde_json::to_string_pretty(&json!({
            "schema": 1,
            "run": run,
            "report": report,
        }))
        .unwrap(),
        "csv" => report.violations_csv(),
        other => return Err(Failure::bad_input(format!("unknown format `{other}`"))),
    };
    write_output(Some(&args.out), &content)?;
    emit!(
        "function={} gamma={gamma} triples={} violations={} worst_margin={} report={}",
        f.label(),
        report.total_triples,
        report.violation_count,
        if report.worst_margin.is_finite() {
            format!("{:.6e}", report.worst_margin)
        } else {
            "inf".into()
        },
        args.out.display(),
    );
    Ok(if report.passed() { 0 } else { 1 })
}

#[derive(Serialize)]
struct ProbeRow {
    point: Point,
    expected: SemicontinuityClass,
    result: verify::ContinuityProbeResult,
    matched: bool,
}

fn probe_points(f: &SqcFunction, at: &[String], seed: RngSeed) -> Result<Vec<Point>, Failure> {
    let dim = f.domain().dimension();
    let mut rng = seed.rng();
    let mut points = Vec::new();
    for spec in at {
        if let Some(count_text) = spec.strip_prefix("sphere:") {
            let count: usize = count_text
                .parse()
                .map_err(|_| Failure::bad_input(format!("bad sphere count `{count_text}`")))?;
            let spherical: Vec<_> = f
                .discontinuities()
                .iter()
                .filter(|rec| {
                    matches!(
                        rec.locus,
                        gallery::Locus::Sphere { .. } | gallery::Locus::BoundarySubset { .. }
                    )
                })
                .collect();
            if spherical.is_empty() {
                return Err(Failure::bad_input(format!(
                    "{} declares no sphere or boundary locus",
                    f.label()
                )));
            }
            for rec in spherical {
                points.extend(f.locus_points(rec, count, &mut rng));
            }
        } else {
            points.push(
                functions::parse_point(spec, dim).map_err(|e| Failure::bad_input(e.to_string()))?,
            );
        }
    }
    Ok(points)
}

fn cmd_probe(args: ProbeArgs) -> CmdResult {
    let f = build_function(&args.spec)?;
    let seed = resolve_seed(args.seed)?;
    let radii = default_radii();
    let points = probe_points(&f, &args.at, seed)?;
    let mut rows = Vec::with_capacity(points.len());
    let mut all_match = true;
    for p in points {
        let expected = f
            .record_at(&p, 1e-9)
            .map(|rec| rec.classification)
            .unwrap_or(SemicontinuityClass::Continuous);
        let result = verify::continuity_probe(&f, &p, &radii, args.samples_per_shell, seed)
            .map_err(|e| Failure::bad_input(format!("probe at {p}: {e}")))?;
        let matched = result.classification == expected;
        all_match &= matched;
        emit!(
            "probe {p}: f={} liminf={:.6} limsup={:.6} -> {} (declared {expected}){}",
            result.f_value,
            result.liminf_est,
            result.limsup_est,
            result.classification,
            if matched { "" } else { "  MISMATCH" },
        );
        rows.push(ProbeRow {
            point: p,
            expected,
            result,
            matched,
        });
    }
    let content = match args.format.as_str() {
        "json" => serde_json::to_string_pretty(&json!({
            "schema": 1,
            "function": f.label(),
            "seed": seed.0,
            "probes": rows,
        }))
        .unwrap(),
        "csv" => {
            let mut out = String::from(
                "point,f_value,liminf_est,limsup_est,classification,expected,matched\n",
            );
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    row.point
                        .coords()
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    row.result.f_value,
                    row.result.liminf_est,
                    row.result.limsup_est,
                    row.result.classification,
                    row.expected,
                    row.matched,
                ));
            }
            out
        }
        other => return Err(Failure::bad_input(format!("unknown format `{other}`"))),
    };
    write_output(args.out.as_ref(), &content)?;
    Ok(if all_match { 0 } else { 1 })
}

fn cmd_modulus(args: ModulusArgs) -> CmdResult {
    if !(100..=100_000_000).contains(&args.count) {
        return Err(Failure::bad_input(format!(
            "count must lie in [100, 100000000], got {}",
            args.count
        )));
    }
    let f = build_function(&args.spec)?;
    let seed = resolve_seed(args.seed)?;
    let config = VerifyConfig::new(args.count, seed)
        .with_stress_sets(verify::stress_sets_for(&f))
        .with_threads(args.threads);
    let estimate =
        verify::modulus_estimate(&f, &config).map_err(|e| Failure::bad_input(e.to_string()))?;
    emit!(
        "function={} gamma_hat={:.9} samples_used={} samples_skipped={} argmin_t={}",
        f.label(),
        estimate.gamma_hat,
        estimate.samples_used,
        estimate.samples_skipped,
        estimate.argmin_triple.t,
    );
    if f.claimed_modulus().is_none() {
        emit!("note: no claimed modulus; gamma_hat is an empirical estimate only");
    }
    let content = serde_json::to_string_pretty(&json!({
        "schema": 1,
        "function": f.label(),
        "seed": seed.0,
        "count": args.count,
        "claimed_modulus": f.claimed_modulus(),
        "estimate": estimate,
    }))
    .unwrap();
    write_output(args.out.as_ref(), &content)?;
    Ok(0)
}

fn parse_grid(text: &str) -> Result<Vec<usize>, Failure> {
    let parts: Vec<usize> = text
        .split('x')
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Failure::bad_input(format!("bad grid size `{tok}`")))
        })
        .collect::<Result<_, _>>()?;
    if parts.is_empty() || parts.len() > 2 || parts.iter().any(|&n| n < 2) {
        return Err(Failure::bad_input(format!(
            "grid must be N or NxM with sizes >= 2, got `{text}`"
        )));
    }
    if parts.iter().product::<usize>() > 1_000_000 {
        return Err(Failure::bad_input("grid exceeds 1000000 points"));
    }
    Ok(parts)
}

fn axis_bounds(domain: &ConvexDomain, axis: usize) -> (f64, f64) {
    match domain {
        ConvexDomain::Interval { a, b } => (*a, *b),
        ConvexDomain::Box { lo, hi } => (lo[axis], hi[axis]),
        ConvexDomain::ClosedBall { center, radius } => {
            (center[axis] - radius, center[axis] + radius)
        }
        _ => (-2.5, 2.5),
    }
}

fn cmd_export(args: ExportArgs) -> CmdResult {
    let f = build_function(&args.spec)?;
    let dim = f.domain().dimension();
    if dim > 2 {
        return Err(Failure::bad_input(format!(
            "export handles 1-D and 2-D functions; {} lives in dimension {dim}",
            f.label()
        )));
    }
    let grid = parse_grid(&args.grid)?;
    if grid.len() != dim {
        return Err(Failure::bad_input(format!(
            "grid `{}` does not match dimension {dim}",
            args.grid
        )));
    }
    let range_override = match &args.range {
        Some(text) => {
            let p =
                functions::parse_point(text, 2).map_err(|e| Failure::bad_input(e.to_string()))?;
            if p[0] >= p[1] {
                return Err(Failure::bad_input("range must satisfy lo < hi"));
            }
            Some((p[0], p[1]))
        }
        None => None,
    };
    let bounds: Vec<(f64, f64)> = (0..dim)
        .map(|axis| range_override.unwrap_or_else(|| axis_bounds(f.domain(), axis)))
        .collect();

    let mut out = String::new();
    let header = if dim == 1 {
        "x,value,branch,region\n"
    } else {
        "x,y,value,branch,region\n"
    };
    out.push_str(header);
    let mut emit_row = |p: &Point| {
        let (value, branch) = f.evaluate_with_branch(p);
        let region = f
            .domain()
            .classify(p, 1e-9)
            .map(|c| match c.region {
                Region::Interior => "interior",
                Region::Boundary => "boundary",
                Region::Outside => "outside",
            })
            .unwrap_or("outside");
        let coords = p
            .coords()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("{coords},{value},{branch},{region}\n"));
    };
    if dim == 1 {
        let (lo, hi) = bounds[0];
        let n = grid[0];
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            emit_row(&Point::new(vec![x]).unwrap());
        }
    } else {
        let (xlo, xhi) = bounds[0];
        let (ylo, yhi) = bounds[1];
        let (nx, ny) = (grid[0], grid[1]);
        for i in 0..=nx {
            let x = xlo + (xhi - xlo) * i as f64 / nx as f64;
            for j in 0..=ny {
                let y = ylo + (yhi - ylo) * j as f64 / ny as f64;
                emit_row(&Point::new(vec![x, y]).unwrap());
            }
        }
    }
    write_output(args.out.as_ref(), &out)?;
    Ok(0)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use genholo::expr::parse_expr;
use genholo::ops::parse_radius;
use genholo::task::{run, TaskFile};
use genholo_core::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use genholo_core::gcs::GCStructure;
use genholo_core::pbundle::{build_spinor, build_spinor_unchecked, check_total_integrability, fiber_grid};
use genholo_core::poismod::{from_sections, to_generalized, ConnectionMatrix, GHConnection, PoissonBivector};
use genholo_core::serre::{flux, QuadratureSpec};
use serde_json::json;

#[derive(Parser)]
#[command(name = "genholo", version, about = "Exact verification of generalized complex and Poisson module identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a JSON task file.
    Run(RunArgs),
    /// Parse an expression and print its canonical form.
    Eval(EvalArgs),
    /// Sphere-flux quadrature of the local model form.
    #[command(subcommand)]
    Serre(SerreCommand),
    /// Spinor of the projectivized bundle.
    #[command(subcommand)]
    Pbundle(PbundleCommand),
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    /// Worker threads; defaults to GENHOLO_JOBS or the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
    /// Omit per-task timings.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Complex dimension of the chart.
    #[arg(long, default_value_t = 2)]
    chart: usize,
    /// Adjoin the fiber coordinate wvar.
    #[arg(long)]
    fiber: bool,
    expr: String,
}

#[derive(Subcommand)]
enum SerreCommand {
    Flux(FluxArgs),
}

#[derive(Args)]
struct FluxArgs {
    /// Comma-separated exact radii such as 1/2,1,2.
    #[arg(long, default_value = "1/2,1,2")]
    radii: String,
    #[arg(long, default_value_t = 24)]
    eta_order: usize,
    #[arg(long, default_value_t = 48)]
    xi_order: usize,
    /// Polynomial in z1, zb1, z2, zb2.
    #[arg(long, default_value = "1")]
    test_fn: String,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum PbundleCommand {
    Build(BuildArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// One of: zero, sections, non-flat.
    #[arg(long, default_value = "zero")]
    connection: String,
    /// One of: normal-form, complex, symplectic.
    #[arg(long, default_value = "normal-form")]
    structure: String,
    /// Skip the flatness check and build the spinor anyway.
    #[arg(long)]
    unchecked: bool,
}

/// Usage or input errors, reported with exit status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Serre(SerreCommand::Flux(a)) => cmd_flux(a),
        Command::Pbundle(PbundleCommand::Build(a)) => cmd_build(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn jobs(flag: Option<usize>) -> Result<usize, UsageError> {
    if let Some(j) = flag {
        return Ok(j.max(1));
    }
    match std::env::var("GENHOLO_JOBS") {
        Ok(v) => {
            v.trim().parse::<usize>().map(|j| j.max(1)).map_err(|_| UsageError(format!("invalid GENHOLO_JOBS `{v}`")))
        }
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn cmd_run(a: RunArgs) -> Result<bool, UsageError> {
    let file = TaskFile::load(&a.file)?;
    let mut report = run(&file, jobs(a.jobs)?);
    if a.no_timings {
        report = report.without_timings();
    }
    if a.text {
        print!("{}", report.to_text());
    } else {
        println!("{}", report.to_json());
    }
    Ok(report.all_pass())
}

fn cmd_eval(a: EvalArgs) -> Result<bool, UsageError> {
    if a.chart == 0 || a.chart > 4 {
        return Err(UsageError("chart dimension must be between 1 and 4".into()));
    }
    let chart = if a.fiber { Chart::fibered(a.chart) } else { Chart::new(a.chart) };
    let v = parse_expr(&a.expr, chart, &Default::default())?;
    println!("{}: {v}", v.type_name());
    Ok(true)
}

fn cmd_flux(a: FluxArgs) -> Result<bool, UsageError> {
    let radii = a.radii.split(',').map(parse_radius).collect::<Result<Vec<_>, _>>()?;
    let mut spec = QuadratureSpec::new(a.eta_order, a.xi_order, radii)?;
    if let Some(t) = a.tolerance {
        spec = spec.with_tolerance(t);
    }
    let c2 = Chart::new(2);
    let f = genholo::expr::parse_polynomial(&a.test_fn, c2, &Default::default())?;
    let r = match flux(&spec, &f) {
        Ok(r) => r,
        Err(genholo_core::Error::QuadratureDiverged { spread, tolerance }) => {
            eprintln!("quadrature diverged: spread {spread:e} exceeds {tolerance:e}");
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    let rows: Vec<_> = r
        .radii
        .iter()
        .zip(&r.values)
        .map(|(rad, v)| {
            json!({
                "radius": rad,
                "value_re": v.re,
                "value_im": v.im,
                "extrapolated": [r.extrapolated.re, r.extrapolated.im],
                "spread": r.spread,
            })
        })
        .collect();
    println!("{}", serde_json::to_string_pretty(&rows)?);
    Ok(true)
}

fn named_structure(name: &str) -> Result<GCStructure, UsageError> {
    Ok(match name {
        "normal-form" => GCStructure::from_poisson(&PoissonBivector::normal_form())?,
        "complex" => GCStructure::from_complex(2)?,
        "symplectic" => GCStructure::from_symplectic(&GCStructure::standard_omega(2))?,
        other => return Err(UsageError(format!("unknown structure `{other}` (normal-form, complex, symplectic)"))),
    })
}

fn named_connection(name: &str, s: &GCStructure) -> Result<GHConnection, UsageError> {
    let c = s.chart();
    let poly = |idx| Polynomial::var(c, idx);
    Ok(match name {
        "zero" => GHConnection::zero(s, 2),
        "sections" => {
            let p = vec![vec![poly(0), Polynomial::zero(c)], vec![Polynomial::zero(c), Polynomial::one(c)]];
            to_generalized(&from_sections(&p)?.connection, s)?
        }
        "non-flat" => {
            let zero = vec![RationalFn::zero(c); c.nvars()];
            let mut e1 = zero.clone();
            e1[0] = RationalFn::var(c, 2);
            let a = ConnectionMatrix::new(c, vec![vec![e1, zero.clone()], vec![zero.clone(), zero]])?;
            to_generalized(&a, s)?
        }
        other => return Err(UsageError(format!("unknown connection `{other}` (zero, sections, non-flat)"))),
    })
}

fn cmd_build(a: BuildArgs) -> Result<bool, UsageError> {
    let s = named_structure(&a.structure)?;
    let g = named_connection(&a.connection, &s)?;
    let rho = if a.unchecked {
        build_spinor_unchecked(&g, &s)?
    } else {
        match build_spinor(&g, &s) {
            Ok(r) => r,
            Err(e @ genholo_core::Error::GHCheckFail(_)) => {
                println!("{}", json!({ "status": "fail", "message": e.to_string() }));
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        }
    };
    let g = |re, im| GaussianRational::from_parts((re, 1), (im, 1));
    let base = vec![vec![g(0, 0), g(1, 0)], vec![g(1, 0), g(0, 1)], vec![g(2, -1), g(-1, 3)]];
    let out = match check_total_integrability(&rho, &fiber_grid(&base)) {
        Ok(t) => json!({ "status": "pass", "spinor": rho.to_string(), "witness": t.witness.to_string() }),
        Err(e) => json!({ "status": "fail", "spinor": rho.to_string(), "message": e.to_string() }),
    };
    let pass = out["status"] == "pass";
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(pass)
}

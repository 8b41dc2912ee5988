//! `pcpot`: batch front end for the piecewise-constant-potential solvers.
//!
//! Exit status 0 on success, 2 on a config that fails validation (with a
//! JSON report on stderr), 1 on solver or I/O failure.

mod scenario;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pcpot::i2i::InterfaceMap;
use pcpot::registry::{build, Solver};
use pcpot::{Error, SolutionSample};
use scenario::{Invalid, Scenario};

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "PCPOT_THREADS";

const HEADER: &str = "x,t,re_psi,im_psi,abs_psi,err_estimate";

#[derive(Parser)]
#[command(name = "pcpot", version, about = "Schrödinger evolution over piecewise constant potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured solver on grid.x × grid.t.
    Solve { config: PathBuf },
    /// Evaluate two configs on the same grid and report the discrepancy.
    Compare { config_a: PathBuf, config_b: PathBuf },
    /// Leading-order large-time values, on asymptote.gamma × grid.t or on the grid.
    Asymptote { config: PathBuf },
    /// Interface traces ψ(x_j, t), ψ_x(x_j, t) over grid.t, one table per interface.
    InterfaceMap { config: PathBuf },
    /// Print the parsed config in canonical form.
    Echo { config: PathBuf },
}

enum Failure {
    Invalid(Invalid),
    Run(String),
}

impl From<Invalid> for Failure {
    fn from(e: Invalid) -> Self {
        Failure::Invalid(e)
    }
}

/// Errors raised while building a solver are config problems.
fn at_build(e: Error) -> Failure {
    let field = match &e {
        Error::RadiusTooSmall { .. } => "numerics.R",
        Error::InvalidPotential(_) => "potential.levels",
        Error::InvalidInitial(_) => "initial.params",
        Error::Representation(_) => "numerics.representation",
        Error::Config(_) => "solver",
        _ => return Failure::Run(e.to_string()),
    };
    Failure::Invalid(Invalid { field: field.into(), message: e.to_string() })
}

fn run_err(e: impl std::fmt::Display) -> Failure {
    Failure::Run(e.to_string())
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

fn row(s: &SolutionSample) -> String {
    [s.x, s.t, s.psi.re, s.psi.im, s.psi.norm(), s.err].iter().map(|&v| num(v)).collect::<Vec<_>>().join(",")
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(&p, text).map_err(|e| run_err(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(run_err),
    }
}

fn solver_for(sc: &Scenario, name: &str) -> Result<Box<dyn Solver>, Failure> {
    build(name, &sc.spec()?).map_err(at_build)
}

fn named_solver(sc: &Scenario) -> Result<Box<dyn Solver>, Failure> {
    let name = sc.solver.as_deref().ok_or_else(|| Invalid { field: "solver".into(), message: "missing".into() })?;
    solver_for(sc, name)
}

fn table(samples: &[SolutionSample]) -> String {
    let mut s = format!("{HEADER}\n");
    for p in samples {
        writeln!(s, "{}", row(p)).unwrap();
    }
    s
}

fn solve(path: &Path) -> Result<(), Failure> {
    let sc = Scenario::load(path)?;
    let solver = named_solver(&sc)?;
    let samples = solver.evaluate_all(&sc.points()?).map_err(run_err)?;
    emit(sc.output.as_deref().map(|o| sc.resolve(o)), &table(&samples))
}

fn compare(a: &Path, b: &Path) -> Result<(), Failure> {
    let (sa, sb) = (Scenario::load(a)?, Scenario::load(b)?);
    let pts = sa.points()?;
    if sb.points()? != pts {
        return Err(Invalid { field: "grid".into(), message: "both configs must use the same grid.x and grid.t".into() }.into());
    }
    let va = named_solver(&sa)?.evaluate_all(&pts).map_err(run_err)?;
    let vb = named_solver(&sb)?.evaluate_all(&pts).map_err(run_err)?;
    let mut s = format!("{HEADER},re_psi_b,im_psi_b,discrepancy\n");
    let (mut max, mut sq) = (0.0f64, 0.0);
    for (p, q) in va.iter().zip(&vb) {
        let d = (p.psi - q.psi).norm();
        max = max.max(d);
        sq += d * d;
        writeln!(s, "{},{},{},{}", row(p), num(q.psi.re), num(q.psi.im), num(d)).unwrap();
    }
    let rms = (sq / pts.len() as f64).sqrt();
    writeln!(s, "# summary max={} rms={}", num(max), num(rms)).unwrap();
    emit(sa.output.as_deref().map(|o| sa.resolve(o)), &s)
}

fn asymptote(path: &Path) -> Result<(), Failure> {
    let sc = Scenario::load(path)?;
    let solver = solver_for(&sc, "asymptote")?;
    let pts = if sc.gamma.is_empty() {
        sc.points()?
    } else {
        let ts = sc.axis("grid.t")?;
        ts.iter().flat_map(|&t| sc.gamma.iter().map(move |&g| (g * t, t))).collect()
    };
    let samples = solver.evaluate_all(&pts).map_err(|e| match e {
        Error::ForbiddenCone { .. } | Error::Argument(_) => Failure::Invalid(Invalid { field: "asymptote.gamma".into(), message: e.to_string() }),
        e => run_err(e),
    })?;
    emit(sc.output.as_deref().map(|o| sc.resolve(o)), &table(&samples))
}

/// `out.csv` becomes `out_iface1.csv`, `out_iface2.csv`, ...
fn trace_path(base: &Path, j: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_iface{j}.{}", ext.to_string_lossy()),
        None => format!("{stem}_iface{j}"),
    };
    base.with_file_name(name)
}

fn interface_map(path: &Path) -> Result<(), Failure> {
    let sc = Scenario::load(path)?;
    let spec = sc.spec()?;
    let ts = sc.axis("grid.t")?;
    if ts.iter().any(|&t| t <= 0.0) {
        return Err(Invalid { field: "grid.t".into(), message: "the interface map needs t > 0".into() }.into());
    }
    let map = InterfaceMap::new(spec.potential.clone(), spec.initial.clone(), spec.numerics, spec.map).map_err(at_build)?;
    let mut stdout = String::new();
    for j in 1..=spec.potential.n() {
        let trace = map.trace(j, &ts).map_err(run_err)?;
        let mut s = String::from("t,re_psi,im_psi,re_dpsi,im_dpsi,err_estimate\n");
        for p in &trace.samples {
            let cols = [p.t, p.psi.re, p.psi.im, p.dpsi.re, p.dpsi.im, p.err];
            writeln!(s, "{}", cols.iter().map(|&v| num(v)).collect::<Vec<_>>().join(",")).unwrap();
        }
        match &sc.output {
            Some(o) => emit(Some(trace_path(&sc.resolve(o), j)), &s)?,
            None => write!(stdout, "# interface {j} x = {}\n{s}", spec.potential.x(j)).unwrap(),
        }
    }
    if sc.output.is_none() {
        emit(None, &stdout)?;
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Invalid { field: THREADS_VAR.into(), message: format!("{v:?} is not a thread count") })?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(run_err)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Solve { config } => solve(config),
        Command::Compare { config_a, config_b } => compare(config_a, config_b),
        Command::Asymptote { config } => asymptote(config),
        Command::InterfaceMap { config } => interface_map(config),
        Command::Echo { config } => Scenario::load(config).map_err(Failure::from).and_then(|s| emit(None, &s.echo())),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("{}", serde_json::json!({"error": "validation", "field": e.field, "message": e.message}));
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("{}", serde_json::json!({"error": "solver", "message": m}));
            ExitCode::from(1)
        }
    }
}

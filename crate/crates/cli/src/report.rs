//! Command bodies and their CSV or text output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use num_complex::Complex64;
use pds_vqs::measure::{
    estimate_measurements, reduction_stats, singleton_groups, Covariance, Variances,
};
use pds_vqs::moments::{moment_table, PowerCache};
use pds_vqs::optim::{run as optimize, Status, Trajectory};
use pds_vqs::pauli::{power, qwc_groups, PauliSum, PauliTerm};
use pds_vqs::pds::pds_solve;
use pds_vqs::statesim::{apply_circuit, exact_eigensystem, expectation};
use rayon::prelude::*;

use crate::angle::parse_angles;
use crate::config::{CliError, RunArgs, Settings, Source};

pub const SCHEMA_VERSION: u32 = 1;

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Round-trip decimal, switching to exponent form for very small or large magnitudes.
fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && (a < 1e-4 || a >= 1e15) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

fn status_name(status: &Status) -> String {
    match status {
        Status::Converged => "converged".to_string(),
        Status::MaxIters => "max_iters".to_string(),
        Status::Error(e) => format!("error: {e}"),
    }
}

fn status_flag(status: &Status) -> &'static str {
    match status {
        Status::Converged => "converged",
        Status::MaxIters => "max_iters",
        Status::Error(e) if e.is_numerical() => "numerical_error",
        Status::Error(_) => "error",
    }
}

fn exit_for(status: &Status) -> ExitCode {
    match status {
        Status::Converged => ExitCode::SUCCESS,
        _ => ExitCode::from(crate::EXIT_NUMERICAL),
    }
}

pub fn write_trajectory(
    out: impl Write,
    settings: &Settings,
    trajectory: &Trajectory,
) -> Result<(), CliError> {
    let k = settings.functional.order();
    let n = settings.theta0.len();
    let mut out = out;
    writeln!(
        out,
        "# pds-vqs trajectory v{SCHEMA_VERSION} {}",
        settings.describe()
    )?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iter".to_string(), "energy".to_string()];
    header.extend((1..=k).map(|i| format!("root_{i}")));
    header.extend(
        ["expval_H", "deviation", "fidelity", "grad_norm", "metric_cond"].map(String::from),
    );
    header.extend((1..=n).map(|i| format!("theta_{i}")));
    w.write_record(&header)?;
    for r in &trajectory.records {
        let mut row = vec![r.iter.to_string(), num(r.energy)];
        row.extend((0..k).map(|i| opt(r.roots.get(i).copied())));
        row.push(num(r.expval_h));
        row.push(opt(r.deviation));
        row.push(opt(r.fidelity));
        row.push(num(r.grad_norm));
        row.push(num(r.metric_cond));
        row.extend(r.theta.iter().copied().map(num));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn summary(trajectory: &Trajectory) -> String {
    let mut s = format!(
        "status={} iterations={}",
        status_name(&trajectory.status),
        trajectory.records.len().saturating_sub(1)
    );
    if let Some(r) = trajectory.last() {
        s.push_str(&format!(" energy={} expval_H={}", num(r.energy), num(r.expval_h)));
        if let Some(d) = r.deviation {
            s.push_str(&format!(" deviation={}", num(d)));
        }
        if let Some(f) = r.fidelity {
            s.push_str(&format!(" fidelity={}", num(f)));
        }
    }
    s
}

pub fn run(args: RunArgs) -> Result<ExitCode, CliError> {
    let args = args.with_config()?;
    let settings = args.resolve()?;
    let problem = settings.model.problem(Some(settings.theta0.clone()));
    let trajectory = optimize(
        &problem,
        settings.functional,
        settings.metric,
        &settings.options,
    )?;
    write_trajectory(open_output(args.output.as_deref())?, &settings, &trajectory)?;
    eprintln!("{}", summary(&trajectory));
    Ok(exit_for(&trajectory.status))
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Starts per axis, placed at cell centers
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Axis range as "lo,hi"
    #[arg(long, default_value = "-pi,pi", allow_hyphen_values = true)]
    pub range: String,
    /// The two scanned parameters, 1-based
    #[arg(long, default_value = "1,2")]
    pub axes: String,
    /// Energy-surface CSV path
    #[arg(long)]
    pub surface: Option<PathBuf>,
    /// Surface points per axis, endpoints included
    #[arg(long, default_value_t = 41)]
    pub surface_grid: usize,
}

struct Axes {
    a: usize,
    b: usize,
    lo: f64,
    hi: f64,
}

impl ScanArgs {
    fn axes(&self, n_params: usize) -> Result<Axes, CliError> {
        let range = parse_angles(&self.range).map_err(CliError::Usage)?;
        let [lo, hi] = range[..] else {
            return Err(CliError::Usage("--range takes two values".into()));
        };
        if !(hi > lo) {
            return Err(CliError::Usage("--range must be increasing".into()));
        }
        let idx: Vec<usize> = self
            .axes
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("bad --axes '{}'", self.axes)))?;
        let [a, b] = idx[..] else {
            return Err(CliError::Usage("--axes takes two indices".into()));
        };
        if a == b || a == 0 || b == 0 || a > n_params || b > n_params {
            return Err(CliError::Usage(format!(
                "--axes must name two distinct parameters in 1..={n_params}"
            )));
        }
        if self.grid == 0 {
            return Err(CliError::Usage("--grid must be positive".into()));
        }
        Ok(Axes {
            a: a - 1,
            b: b - 1,
            lo,
            hi,
        })
    }
}

pub fn scan(args: ScanArgs) -> Result<ExitCode, CliError> {
    let run_args = args.run.clone().with_config()?;
    let settings = run_args.resolve()?;
    let axes = args.axes(settings.theta0.len())?;
    let n = args.grid;
    let width = (axes.hi - axes.lo) / n as f64;
    let centers: Vec<f64> = (0..n).map(|i| axes.lo + (i as f64 + 0.5) * width).collect();
    let starts: Vec<(f64, f64)> = centers
        .iter()
        .flat_map(|&x| centers.iter().map(move |&y| (x, y)))
        .collect();
    let results: Vec<_> = starts
        .par_iter()
        .map(|&(x, y)| {
            let mut theta = settings.theta0.clone();
            theta[axes.a] = x;
            theta[axes.b] = y;
            let problem = settings.model.problem(Some(theta));
            optimize(&problem, settings.functional, settings.metric, &settings.options)
        })
        .collect();

    let mut out = open_output(run_args.output.as_deref())?;
    writeln!(
        out,
        "# pds-vqs scan v{SCHEMA_VERSION} {} grid={n} axes={},{}",
        settings.describe(),
        axes.a + 1,
        axes.b + 1
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "start_a",
        "start_b",
        "final_energy",
        "final_expval_H",
        "iterations",
        "converged",
        "status",
    ])?;
    let mut converged = 0;
    for ((x, y), result) in starts.iter().zip(&results) {
        let row = match result {
            Ok(t) => {
                converged += usize::from(t.converged());
                let last = t.last();
                [
                    num(*x),
                    num(*y),
                    opt(last.map(|r| r.energy)),
                    opt(last.map(|r| r.expval_h)),
                    t.records.len().saturating_sub(1).to_string(),
                    t.converged().to_string(),
                    status_flag(&t.status).to_string(),
                ]
            }
            Err(e) => [
                num(*x),
                num(*y),
                String::new(),
                String::new(),
                "0".to_string(),
                "false".to_string(),
                if e.is_numerical() { "numerical_error" } else { "error" }.to_string(),
            ],
        };
        w.write_record(&row)?;
    }
    w.flush()?;

    if let Some(path) = &args.surface {
        write_surface(path, &settings, &axes, args.surface_grid)?;
    }
    eprintln!("converged {converged}/{} starts", starts.len());
    Ok(ExitCode::SUCCESS)
}

fn write_surface(path: &Path, settings: &Settings, axes: &Axes, points: usize) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Usage("--surface-grid must be at least 2".into()));
    }
    let k = settings.functional.order();
    let model = &settings.model;
    let cache = PowerCache::new(&model.hamiltonian, 2 * k - 1)?;
    let ticks: Vec<f64> = (0..points)
        .map(|i| axes.lo + (axes.hi - axes.lo) * i as f64 / (points - 1) as f64)
        .collect();
    let grid: Vec<(f64, f64)> = ticks
        .iter()
        .flat_map(|&x| ticks.iter().map(move |&y| (x, y)))
        .collect();
    let rows: Vec<[String; 5]> = grid
        .par_iter()
        .map(|&(x, y)| {
            let mut theta = settings.theta0.clone();
            theta[axes.a] = x;
            theta[axes.b] = y;
            let (energy, expval, flag) = match moment_table(&model.circuit, &theta, &cache, 2 * k - 1) {
                Ok(table) => {
                    let expval = table.values[1];
                    match pds_solve(&table, k, settings.options.pds_regularization) {
                        Ok(r) => (Some(r.energy), Some(expval), "ok".to_string()),
                        Err(e) => (None, Some(expval), surface_flag(&e)),
                    }
                }
                Err(e) => (None, None, surface_flag(&e)),
            };
            [num(x), num(y), opt(energy), opt(expval), flag]
        })
        .collect();
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "# pds-vqs surface v{SCHEMA_VERSION} model={} order={k} axes={},{} points={points}",
        model.name,
        axes.a + 1,
        axes.b + 1
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta_a", "theta_b", "energy", "expval_H", "flag"])?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn surface_flag(e: &pds_vqs::Error) -> String {
    match e {
        pds_vqs::Error::SingularMoments { .. } => "singular",
        pds_vqs::Error::ComplexRoots { .. } => "complex_roots",
        _ => "error",
    }
    .to_string()
}

#[derive(Debug, Clone, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 4)]
    pub max_order: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Emit CSV instead of a table
    #[arg(long)]
    pub csv: bool,
}

pub fn reduce(args: ReduceArgs) -> Result<ExitCode, CliError> {
    let h = hamiltonian(&args.source)?;
    let r = reduction_stats(&h, args.max_order, args.epsilon)?;
    let mut out = open_output(None)?;
    if args.csv {
        writeln!(
            out,
            "# pds-vqs reduce v{SCHEMA_VERSION} terms={} epsilon={} groups={}",
            h.len(),
            r.epsilon,
            r.groups
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["order", "strings", "cumulative", "measurements"])?;
        for (i, ((c, u), m)) in r.counts.iter().zip(&r.cumulative).zip(&r.measurements).enumerate() {
            w.write_record([(i + 1).to_string(), c.to_string(), u.to_string(), num(*m)])?;
        }
        w.flush()?;
    } else {
        writeln!(out, "terms in H: {}", h.len())?;
        writeln!(out, "{:>5} {:>10} {:>10} {:>14}", "order", "strings", "cumulative", "measurements")?;
        for (i, ((c, u), m)) in r.counts.iter().zip(&r.cumulative).zip(&r.measurements).enumerate() {
            writeln!(out, "{:>5} {c:>10} {u:>10} {m:>14.4e}", i + 1)?;
        }
        writeln!(out, "QWC groups through order {}: {}", args.max_order, r.groups)?;
        writeln!(out, "total measurements: {:.4e} (epsilon {})", r.total, r.epsilon)?;
        out.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub source: Source,
    /// Target standard error
    #[arg(long)]
    pub epsilon: f64,
    /// Estimate for H^n
    #[arg(long, default_value_t = 1)]
    pub power: u32,
    /// qwc or none
    #[arg(long, default_value = "qwc")]
    pub grouping: String,
    /// zero or bound
    #[arg(long, default_value = "zero")]
    pub covariance: String,
    /// Take variances from the ansatz state at these angles instead of the worst case
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
}

pub fn estimate(args: EstimateArgs) -> Result<ExitCode, CliError> {
    if args.power == 0 {
        return Err(CliError::Usage("--power must be at least 1".into()));
    }
    let covariance = match args.covariance.as_str() {
        "zero" => Covariance::Zero,
        "bound" => Covariance::WorstCaseBound,
        other => return Err(CliError::Usage(format!("unknown covariance '{other}'"))),
    };
    let h = hamiltonian(&args.source)?;
    let op = power(&h, args.power)?;
    let groups = match args.grouping.as_str() {
        "qwc" => qwc_groups(&op),
        "none" => singleton_groups(&op),
        other => return Err(CliError::Usage(format!("unknown grouping '{other}'"))),
    };
    let variances = match &args.theta {
        None => Variances::WorstCase,
        Some(text) => {
            let model = args.source.load()?;
            let theta = parse_angles(text).map_err(CliError::Usage)?;
            let psi = apply_circuit(&model.circuit, &theta)?;
            let n = op.n_qubits();
            let mut map = BTreeMap::new();
            for s in op.strings() {
                let mut single = PauliSum::new(n);
                single.add_term(PauliTerm::new(n, *s, Complex64::new(1.0, 0.0)))?;
                map.insert(*s, expectation(&psi, &single)?);
            }
            Variances::FromExpectations(map)
        }
    };
    if !(args.epsilon > 0.0) {
        return Err(CliError::Usage("--epsilon must be positive".into()));
    }
    let m = estimate_measurements(&groups, &variances, covariance, args.epsilon)?;
    println!("{m}");
    eprintln!(
        "power={} strings={} groups={} epsilon={}",
        args.power,
        op.len(),
        groups.len(),
        args.epsilon
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Clone, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub source: Source,
}

pub fn eig(args: EigArgs) -> Result<ExitCode, CliError> {
    let h = hamiltonian(&args.source)?;
    let eig = exact_eigensystem(&h)?;
    let line: Vec<String> = eig.eigenvalues.iter().map(|&v| tidy(v)).collect();
    println!("{}", line.join(" "));
    Ok(ExitCode::SUCCESS)
}

fn hamiltonian(source: &Source) -> Result<PauliSum, CliError> {
    source.hamiltonian()
}

/// Shortest decimal within 1e-12, without a negative zero.
fn tidy(v: f64) -> String {
    let rounded = (v * 1e12).round() / 1e12;
    let s = format!("{rounded:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

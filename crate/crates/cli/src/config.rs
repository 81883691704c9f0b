//! Run settings from flags and an optional TOML file; flags win.

use std::path::{Path, PathBuf};

use clap::Args;
use pds_vqs::models::{build_model, load_hamiltonian, ModelBundle, ModelOptions};
use pds_vqs::moments::GradientMethod;
use pds_vqs::pauli::PauliSum;
use pds_vqs::optim::{Functional, MetricKind, RunOptions, Schedule, Shots, DEFAULT_TOL};
use pds_vqs::pds::{Regularization, DEFAULT_EIGEN_SHIFT, DEFAULT_TRUNCATION};
use serde::Deserialize;

use crate::angle::parse_angles;

/// Hamiltonian source shared by every command.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Source {
    /// Built-in model: toy_a, toy_b, h2, heisenberg
    #[arg(long, conflicts_with = "file")]
    pub model: Option<String>,
    /// Hamiltonian text file, one `<coeff> <letters>` term per line
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Hardware-efficient layers used with --file
    #[arg(long)]
    pub layers: Option<usize>,
    /// Heisenberg exchange J
    #[arg(long)]
    pub j: Option<f64>,
    /// Heisenberg field B
    #[arg(long)]
    pub b: Option<f64>,
}

impl Source {
    fn merge(self, file: Source) -> Source {
        // the Hamiltonian source is taken whole from one side
        let (model, path) = if self.model.is_some() || self.file.is_some() {
            (self.model, self.file)
        } else {
            (file.model, file.file)
        };
        Source {
            model,
            file: path,
            layers: self.layers.or(file.layers),
            j: self.j.or(file.j),
            b: self.b.or(file.b),
        }
    }

    /// The Hamiltonian alone, without ansatz or reference spectrum.
    pub fn hamiltonian(&self) -> Result<PauliSum, CliError> {
        match (&self.model, &self.file) {
            (None, Some(path)) => Ok(load_hamiltonian(&read_text(path)?)?),
            _ => Ok(self.load()?.hamiltonian),
        }
    }

    pub fn load(&self) -> Result<ModelBundle, CliError> {
        let mut options = ModelOptions::default();
        if let Some(j) = self.j {
            options.j = j;
        }
        if let Some(b) = self.b {
            options.b = b;
        }
        match (&self.model, &self.file) {
            (Some(name), None) => Ok(build_model(name, options)?),
            (None, Some(path)) => {
                let h = load_hamiltonian(&read_text(path)?)?;
                let name = path
                    .file_stem()
                    .map_or("file".to_string(), |s| s.to_string_lossy().into_owned());
                Ok(ModelBundle::from_hamiltonian(&name, h, self.layers.unwrap_or(2))?)
            }
            (Some(_), Some(_)) => Err(CliError::Usage(
                "give either --model or --file, not both".into(),
            )),
            (None, None) => Err(CliError::Usage("one of --model or --file is required".into())),
        }
    }
}

/// Optimizer flags; a `--config` TOML file may set the same keys.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunArgs {
    /// TOML file with the same keys as the flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// vqe or pds
    #[arg(long)]
    pub functional: Option<String>,
    /// PDS order K
    #[arg(long)]
    pub order: Option<usize>,
    /// gd, ngd or ite
    #[arg(long)]
    pub metric: Option<String>,
    /// Step size; defaults to the model's value
    #[arg(long)]
    pub eta: Option<f64>,
    /// const or inv-iter; defaults to the model's schedule
    #[arg(long)]
    pub schedule: Option<String>,
    /// Comma-separated start angles, e.g. "7pi/32,pi/2,0,0"
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<String>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Gradient-norm convergence threshold
    #[arg(long)]
    pub tol: Option<f64>,
    /// Moment-matrix policy: none, shift[:eps] or truncate[:rel]
    #[arg(long)]
    pub pds_regularization: Option<String>,
    /// Metric inversion policy: none, shift[:eps] or truncate[:rel]
    #[arg(long)]
    pub metric_regularization: Option<String>,
    /// analytic or shift
    #[arg(long)]
    pub gradient: Option<String>,
    /// Shots per measurement group; exact moments when absent
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; stdout when absent
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl RunArgs {
    /// Fill unset flags from `--config`, if given.
    pub fn with_config(self) -> Result<RunArgs, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        Ok(RunArgs {
            config: self.config,
            source: self.source.merge(file.source),
            functional: self.functional.or(file.functional),
            order: self.order.or(file.order),
            metric: self.metric.or(file.metric),
            eta: self.eta.or(file.eta),
            schedule: self.schedule.or(file.schedule),
            theta0: self.theta0.or(file.theta0),
            max_iters: self.max_iters.or(file.max_iters),
            tol: self.tol.or(file.tol),
            pds_regularization: self.pds_regularization.or(file.pds_regularization),
            metric_regularization: self.metric_regularization.or(file.metric_regularization),
            gradient: self.gradient.or(file.gradient),
            shots: self.shots.or(file.shots),
            seed: self.seed.or(file.seed),
            output: self.output.or(file.output),
        })
    }

    pub fn resolve(&self) -> Result<Settings, CliError> {
        let model = self.source.load()?;
        let functional = match self.functional.as_deref().unwrap_or("pds") {
            "vqe" => {
                if self.order.is_some_and(|k| k != 1) {
                    return Err(CliError::Usage("--order applies to the pds functional".into()));
                }
                Functional::Vqe
            }
            "pds" => {
                let k = self.order.unwrap_or(2);
                if k == 0 {
                    return Err(CliError::Usage("--order must be at least 1".into()));
                }
                Functional::Pds(k)
            }
            other => return Err(CliError::Usage(format!("unknown functional '{other}'"))),
        };
        let metric: MetricKind = self
            .metric
            .as_deref()
            .unwrap_or("gd")
            .parse()
            .map_err(|e: pds_vqs::Error| CliError::Usage(e.to_string()))?;
        let eta = self.eta.unwrap_or(model.eta());
        if !(eta > 0.0) {
            return Err(CliError::Usage("--eta must be positive".into()));
        }
        let schedule = match self.schedule.as_deref() {
            None => match model.schedule {
                Schedule::Constant(_) => Schedule::Constant(eta),
                Schedule::InverseIteration(_) => Schedule::InverseIteration(eta),
            },
            Some("const" | "constant") => Schedule::Constant(eta),
            Some("inv-iter" | "inverse") => Schedule::InverseIteration(eta),
            Some(other) => return Err(CliError::Usage(format!("unknown schedule '{other}'"))),
        };
        let theta0 = match &self.theta0 {
            Some(text) => parse_angles(text).map_err(CliError::Usage)?,
            None => model.theta0.clone(),
        };
        if theta0.len() != model.circuit.n_params() {
            return Err(CliError::Usage(format!(
                "--theta0 has {} angles, the ansatz takes {}",
                theta0.len(),
                model.circuit.n_params()
            )));
        }
        let gradient_method = match self.gradient.as_deref().unwrap_or("analytic") {
            "analytic" => GradientMethod::Analytic,
            "shift" => GradientMethod::Shift,
            other => return Err(CliError::Usage(format!("unknown gradient method '{other}'"))),
        };
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol >= 0.0) {
            return Err(CliError::Usage("--tol must be non-negative".into()));
        }
        let defaults = RunOptions::default();
        let options = RunOptions {
            schedule,
            max_iters: self.max_iters.unwrap_or(defaults.max_iters),
            tol,
            pds_regularization: match &self.pds_regularization {
                Some(s) => parse_regularization(s)?,
                None => defaults.pds_regularization,
            },
            metric_regularization: match &self.metric_regularization {
                Some(s) => parse_regularization(s)?,
                None => defaults.metric_regularization,
            },
            gradient_method,
            shots: self.shots.map(|shots| Shots {
                shots,
                seed: self.seed.unwrap_or(0),
            }),
        };
        if self.seed.is_some() && self.shots.is_none() {
            return Err(CliError::Usage("--seed needs --shots".into()));
        }
        Ok(Settings {
            model,
            functional,
            metric,
            theta0,
            options,
        })
    }
}

/// Fully resolved inputs for one optimization.
#[derive(Debug, Clone)]
pub struct Settings {
    pub model: ModelBundle,
    pub functional: Functional,
    pub metric: MetricKind,
    pub theta0: Vec<f64>,
    pub options: RunOptions,
}

impl Settings {
    pub fn describe(&self) -> String {
        let functional = match self.functional {
            Functional::Vqe => "vqe".to_string(),
            Functional::Pds(k) => format!("pds{k}"),
        };
        let schedule = match self.options.schedule {
            Schedule::Constant(eta) => format!("const:{eta}"),
            Schedule::InverseIteration(eta) => format!("inv-iter:{eta}"),
        };
        let mut s = format!(
            "model={} functional={functional} metric={} schedule={schedule} max_iters={} tol={:e}",
            self.model.name,
            self.metric.name(),
            self.options.max_iters,
            self.options.tol
        );
        if let Some(shots) = self.options.shots {
            s.push_str(&format!(" shots={} seed={}", shots.shots, shots.seed));
        }
        s
    }
}

pub fn parse_regularization(text: &str) -> Result<Regularization, CliError> {
    let (kind, value) = match text.split_once(':') {
        Some((k, v)) => {
            let v: f64 = v
                .parse()
                .map_err(|_| CliError::Usage(format!("bad regularization value in '{text}'")))?;
            if !(v > 0.0) {
                return Err(CliError::Usage(format!("regularization value must be positive in '{text}'")));
            }
            (k, Some(v))
        }
        None => (text, None),
    };
    match kind {
        "none" if value.is_none() => Ok(Regularization::None),
        "shift" => Ok(Regularization::EigenShift(value.unwrap_or(DEFAULT_EIGEN_SHIFT))),
        "truncate" => Ok(Regularization::Truncate(value.unwrap_or(DEFAULT_TRUNCATION))),
        _ => Err(CliError::Usage(format!("unknown regularization '{text}'"))),
    }
}

const CONFIG_KEYS: [&str; 19] = [
    "model",
    "file",
    "layers",
    "j",
    "b",
    "functional",
    "order",
    "metric",
    "eta",
    "schedule",
    "theta0",
    "max-iters",
    "tol",
    "pds-regularization",
    "metric-regularization",
    "gradient",
    "shots",
    "seed",
    "output",
];

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_config(path: &Path) -> Result<RunArgs, CliError> {
    let err = |m: String| CliError::Usage(format!("{}: {m}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| err(e.to_string()))?;
    if let Some(key) = table.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(err(format!("unknown key '{key}'")));
    }
    table.try_into().map_err(|e: toml::de::Error| err(e.to_string()))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(pds_vqs::Error),
    Io(std::io::Error),
}

impl From<pds_vqs::Error> for CliError {
    fn from(e: pds_vqs::Error) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularization_forms() {
        assert_eq!(parse_regularization("none").unwrap(), Regularization::None);
        assert_eq!(
            parse_regularization("shift").unwrap(),
            Regularization::EigenShift(DEFAULT_EIGEN_SHIFT)
        );
        assert_eq!(
            parse_regularization("truncate:1e-8").unwrap(),
            Regularization::Truncate(1e-8)
        );
        assert!(parse_regularization("shift:-1").is_err());
        assert!(parse_regularization("none:1").is_err());
        assert!(parse_regularization("svd").is_err());
    }

    #[test]
    fn model_defaults_apply() {
        let args = RunArgs {
            source: Source {
                model: Some("heisenberg".into()),
                ..Source::default()
            },
            ..RunArgs::default()
        };
        let s = args.resolve().unwrap();
        assert_eq!(s.theta0, vec![-3.0]);
        assert_eq!(s.options.schedule, Schedule::InverseIteration(1.0));
        assert_eq!(s.functional, Functional::Pds(2));
    }

    #[test]
    fn flags_override_schedule_kind() {
        let args = RunArgs {
            source: Source {
                model: Some("toy_a".into()),
                ..Source::default()
            },
            schedule: Some("inv-iter".into()),
            eta: Some(0.2),
            ..RunArgs::default()
        };
        assert_eq!(
            args.resolve().unwrap().options.schedule,
            Schedule::InverseIteration(0.2)
        );
    }

    #[test]
    fn theta_length_checked() {
        let args = RunArgs {
            source: Source {
                model: Some("h2".into()),
                ..Source::default()
            },
            theta0: Some("0,0".into()),
            ..RunArgs::default()
        };
        assert!(matches!(args.resolve(), Err(CliError::Usage(_))));
    }
}

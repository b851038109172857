//! Experiment configuration: built-in defaults, merged with an optional JSON
//! file, then with command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use splitstep::models::{Boundary, Completion, GueSpec, IsingSpec, PauliConfig, MAX_ISING_SITES};
use splitstep::stability::{DEFAULT_DENSE_CAP, DEFAULT_EPS_UNIT, DEFAULT_REL_TOL};
use splitstep::{ErrorMetric, SchemeVariant};

use crate::AppError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig2,
    ZmaxGue,
    ZmaxIsing,
    Gamma,
    OrderScan,
    K4Check,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Fig2,
        Experiment::ZmaxGue,
        Experiment::ZmaxIsing,
        Experiment::Gamma,
        Experiment::OrderScan,
        Experiment::K4Check,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::ZmaxGue => "zmax-gue",
            Experiment::ZmaxIsing => "zmax-ising",
            Experiment::Gamma => "gamma",
            Experiment::OrderScan => "order-scan",
            Experiment::K4Check => "k4-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| AppError::Config(format!("unknown experiment {s:?}")))
    }
}

/// Model parameters. Random seeds are not part of the model: they are derived
/// per realization from the master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Gue {
        dim: usize,
    },
    Ising {
        sites: usize,
        j: f64,
        gx: f64,
        gz: f64,
        boundary: Boundary,
    },
    Pauli {
        a: [f64; 3],
        b: [f64; 3],
    },
    PauliProjections {
        alpha: f64,
        beta: f64,
        alpha3: f64,
        beta3: f64,
        completion: Completion,
    },
}

impl ModelConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelConfig::Gue { .. } => "gue",
            ModelConfig::Ising { .. } => "ising",
            ModelConfig::Pauli { .. } => "pauli",
            ModelConfig::PauliProjections { .. } => "pauli-projections",
        }
    }

    pub fn gue(&self, seed: u64) -> Option<GueSpec> {
        match *self {
            ModelConfig::Gue { dim } => Some(GueSpec { dim, seed }),
            _ => None,
        }
    }

    pub fn ising(&self, sites: usize) -> Option<IsingSpec> {
        match *self {
            ModelConfig::Ising { j, gx, gz, boundary, .. } => Some(IsingSpec {
                sites,
                j,
                gx,
                gz,
                boundary,
            }),
            _ => None,
        }
    }

    pub fn pauli(&self) -> Result<Option<PauliConfig>, AppError> {
        Ok(match *self {
            ModelConfig::Pauli { a, b } => Some(PauliConfig::new(a, b)),
            ModelConfig::PauliProjections {
                alpha,
                beta,
                alpha3,
                beta3,
                completion,
            } => Some(
                PauliConfig::from_projections(alpha, beta, alpha3, beta3, completion)
                    .map_err(|e| AppError::Config(e.to_string()))?,
            ),
            _ => None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl ZGrid {
    /// Grid values in increasing order; a single point yields `[min]`.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let t = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(AppError::Config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// `None` writes to standard output.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelConfig,
    /// Sweep values: GUE dimensions for `zmax-gue`, chain lengths for
    /// `zmax-ising`. Unused elsewhere.
    pub sizes: Vec<usize>,
    /// Scheme labels; a trailing `r` selects per-step renormalization.
    pub schemes: Vec<String>,
    /// Error metric for schemes without renormalization (renormalized
    /// variants always use the fidelity deficit).
    pub metric: ErrorMetric,
    pub z_grid: ZGrid,
    pub realizations: usize,
    pub master_seed: u64,
    pub eps_unit: f64,
    pub rel_tol: f64,
    pub output: Output,
    /// Worker threads; `None` uses the environment or all cores.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let log = |min, max, points| ZGrid {
            min,
            max,
            points,
            spacing: Spacing::Log,
        };
        let labels = |l: &[&str]| l.iter().map(|s| s.to_string()).collect();
        let base = ExperimentConfig {
            experiment,
            model: ModelConfig::Gue { dim: 64 },
            sizes: Vec::new(),
            schemes: labels(&["C3"]),
            metric: ErrorMetric::State,
            z_grid: log(1e-3, 1e-1, 7),
            realizations: 1,
            master_seed: 2024,
            eps_unit: DEFAULT_EPS_UNIT,
            rel_tol: DEFAULT_REL_TOL,
            output: Output {
                path: None,
                format: Format::Csv,
            },
            threads: None,
        };
        match experiment {
            Experiment::Fig2 => ExperimentConfig {
                schemes: labels(&["R3", "C3", "C3r", "C4", "C4r"]),
                z_grid: log(1e-2, 2e-1, 9),
                realizations: 100,
                ..base
            },
            Experiment::OrderScan => ExperimentConfig {
                model: ModelConfig::Gue { dim: 16 },
                schemes: labels(&["C3", "C4", "C3r"]),
                metric: ErrorMetric::Operator,
                realizations: 10,
                ..base
            },
            Experiment::ZmaxGue => ExperimentConfig {
                sizes: vec![8, 16, 32, 64, 128],
                realizations: 20,
                ..base
            },
            Experiment::ZmaxIsing => ExperimentConfig {
                model: ModelConfig::Ising {
                    sites: 4,
                    j: 1.0,
                    gx: 0.4,
                    gz: 0.8,
                    boundary: Boundary::Periodic,
                },
                sizes: (4..=10).collect(),
                ..base
            },
            Experiment::Gamma => ExperimentConfig {
                model: ModelConfig::PauliProjections {
                    alpha: 1.0,
                    beta: 1.0,
                    alpha3: 0.1,
                    beta3: 0.1,
                    completion: Completion::Orthogonal,
                },
                z_grid: ZGrid {
                    min: 0.01,
                    max: 3.0,
                    points: 300,
                    spacing: Spacing::Linear,
                },
                ..base
            },
            Experiment::K4Check => ExperimentConfig {
                model: ModelConfig::Gue { dim: 8 },
                z_grid: log(1e-3, 1e-1, 9),
                realizations: 10,
                ..base
            },
        }
    }

    /// Defaults for `experiment`, overlaid with the JSON object `file` (keys
    /// merge recursively; unknown keys are rejected).
    pub fn from_defaults_and_file(experiment: Experiment, file: Option<&str>) -> Result<Self, AppError> {
        let mut value = serde_json::to_value(Self::defaults(experiment)).expect("config serializes");
        if let Some(text) = file {
            let overlay: Value =
                serde_json::from_str(text).map_err(|e| AppError::Config(format!("config file: {e}")))?;
            if !overlay.is_object() {
                return Err(AppError::Config("config file must contain a JSON object".into()));
            }
            if let Some(e) = overlay.get("experiment") {
                if e.as_str() != Some(experiment.as_str()) {
                    return Err(AppError::Config(format!(
                        "config file is for experiment {e}, but {experiment} was requested"
                    )));
                }
            }
            // A different model kind replaces the default model wholesale.
            if let (Some(m), Some(d)) = (overlay.get("model"), value.get("model")) {
                if m.get("kind").is_some() && m.get("kind") != d.get("kind") {
                    value["model"] = Value::Null;
                }
            }
            merge(&mut value, overlay);
        }
        let cfg: Self = serde_json::from_value(value).map_err(|e| AppError::Config(format!("config file: {e}")))?;
        Ok(cfg)
    }

    /// Checks ranges and cross-field constraints.
    pub fn validate(&self) -> Result<(), AppError> {
        let bad = |m: String| Err(AppError::Config(m));
        let g = &self.z_grid;
        if !(g.min > 0.0 && g.min.is_finite()) {
            return bad(format!("z-grid min must be positive, got {}", g.min));
        }
        if g.points == 0 {
            return bad("z-grid needs at least one point".into());
        }
        if g.points > 1 && !(g.max > g.min && g.max.is_finite()) {
            return bad(format!("z-grid max {} must exceed min {}", g.max, g.min));
        }
        if self.realizations == 0 {
            return bad("realizations must be >= 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1".into());
        }
        if !(self.eps_unit > 0.0) {
            return bad("eps_unit must be positive".into());
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return bad("rel_tol must lie in (0, 0.1]".into());
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required".into());
        }
        for s in &self.schemes {
            SchemeVariant::parse(s, 2).map_err(|e| AppError::Config(e.to_string()))?;
        }
        let kind = self.model.kind();
        let want: &[&str] = match self.experiment {
            Experiment::Fig2 | Experiment::OrderScan | Experiment::ZmaxGue => &["gue"],
            Experiment::ZmaxIsing => &["ising"],
            Experiment::Gamma => &["pauli", "pauli-projections"],
            Experiment::K4Check => &["gue", "pauli", "pauli-projections"],
        };
        if !want.contains(&kind) {
            return bad(format!("experiment {} cannot use a {kind} model", self.experiment));
        }
        self.model.pauli()?;
        if let ModelConfig::Gue { dim } = self.model {
            if !(2..=DEFAULT_DENSE_CAP).contains(&dim) {
                return bad(format!("GUE dimension must lie in 2..={DEFAULT_DENSE_CAP}, got {dim}"));
            }
        }
        match self.experiment {
            Experiment::Fig2 => {
                let compared = ["R3", "C3", "C3r", "C4", "C4r"];
                if !self.schemes.iter().any(|s| compared.contains(&s.as_str())) {
                    return bad("fig2 needs at least one of R3, C3, C3r, C4, C4r".into());
                }
            }
            Experiment::ZmaxGue | Experiment::ZmaxIsing => {
                if self.sizes.is_empty() {
                    return bad("sizes must not be empty".into());
                }
                let (lo, hi) = if self.experiment == Experiment::ZmaxGue {
                    (2, DEFAULT_DENSE_CAP)
                } else {
                    (2, MAX_ISING_SITES)
                };
                if let Some(s) = self.sizes.iter().find(|&&s| s < lo || s > hi) {
                    return bad(format!("size {s} outside {lo}..={hi}"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn parsed_schemes(&self) -> Result<Vec<SchemeVariant>, AppError> {
        self.schemes
            .iter()
            .map(|s| SchemeVariant::parse(s, 2).map_err(|e| AppError::Config(e.to_string())))
            .collect()
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

//! Scenario configuration: a partial JSON file, flag overrides and
//! per-scenario defaults resolved into a complete [`ScenarioConfig`].

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use mforce::{DrivingParams, ModelParams};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Equilibrium,
    Dos,
    Relax,
    DrivenDamped,
    DrivenPeriodic,
    WeakLimit,
    PetzDemo,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Equilibrium => "equilibrium",
            Self::Dos => "dos",
            Self::Relax => "relax",
            Self::DrivenDamped => "driven-damped",
            Self::DrivenPeriodic => "driven-periodic",
            Self::WeakLimit => "weak-limit",
            Self::PetzDemo => "petz-demo",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Model parameters given in a config file; missing entries take the
/// scenario default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub omega0: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
}

/// Contents of a JSON config file. Every field is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<ScenarioKind>,
    pub model: Option<ModelConfig>,
    pub driving: Option<DrivingParams>,
    /// Single squeezing parameter; shorthand for `r_list: [r]`.
    pub r: Option<f64>,
    pub r_list: Option<Vec<f64>>,
    pub theta: Option<f64>,
    pub t_max: Option<f64>,
    pub dt_out: Option<f64>,
    pub beta_list: Option<Vec<f64>>,
    pub kappa_list: Option<Vec<f64>>,
    pub zeta_list: Option<Vec<f64>>,
    pub epsilon_reg: Option<f64>,
    pub eps_max: Option<f64>,
    pub output_path: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| CliError::ParseConfig { path: path.into(), source })
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scenario: Option<ScenarioKind>,
    /// Sets `model.kappa` and replaces `kappa_list` with `[kappa]`.
    pub kappa: Option<f64>,
    /// Sets `model.beta` and replaces `beta_list` with `[beta]`.
    pub beta: Option<f64>,
    pub t_max: Option<f64>,
    pub out: Option<PathBuf>,
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub model: ModelParams,
    pub driving: DrivingParams,
    pub r_list: Vec<f64>,
    pub theta: f64,
    pub t_max: f64,
    pub dt_out: f64,
    pub beta_list: Vec<f64>,
    pub kappa_list: Vec<f64>,
    pub zeta_list: Vec<f64>,
    pub epsilon_reg: f64,
    pub eps_max: f64,
    pub output_path: PathBuf,
}

/// A field filled from the scenario defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefaultNote {
    pub field: String,
    pub value: Value,
    /// True when the value is this tool's own choice rather than a
    /// published parameter set.
    pub chosen: bool,
}

struct Defaults {
    model: (ModelParams, bool),
    driving: (DrivingParams, bool),
    r_list: (Vec<f64>, bool),
    t_max: (f64, bool),
    dt_out: (f64, bool),
    beta_list: (Vec<f64>, bool),
    kappa_list: (Vec<f64>, bool),
    zeta_list: (Vec<f64>, bool),
    epsilon_reg: (f64, bool),
    eps_max: (f64, bool),
}

fn params(kappa: f64, gamma: f64, beta: f64) -> ModelParams {
    ModelParams { omega0: 1.0, kappa, gamma, beta, f_sharp_inf: 0.0 }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

impl Defaults {
    fn of(kind: ScenarioKind) -> Self {
        use ScenarioKind::*;
        let relax_model = params(0.25, 0.1, 2.0);
        let drive = DrivingParams::new(0.25, 0.2, 1.0 / 40.0);
        let mut d = Self {
            model: (relax_model, false),
            driving: (DrivingParams::NONE, true),
            r_list: (vec![0.0, 0.5, 1.0], false),
            t_max: (100.0, true),
            dt_out: (0.1, true),
            beta_list: (vec![2.0], false),
            kappa_list: (vec![0.25], false),
            zeta_list: (vec![1.0, 2.0, 4.0, 8.0], false),
            epsilon_reg: (1e-3, false),
            eps_max: (6.0, true),
        };
        match kind {
            Equilibrium => {
                d.model = (params(0.25, 0.1, 1.0), true);
                d.beta_list = (linspace(0.1, 10.0, 100), true);
                d.kappa_list = (vec![0.1, 0.25, 0.5], true);
            }
            Dos => {
                d.model = (params(0.05, 0.1, 1.0), true);
                d.kappa_list = (vec![0.05, 0.5], false);
            }
            Relax => {}
            DrivenDamped | DrivenPeriodic => {
                let eta = if kind == DrivenDamped { drive.eta } else { 0.0 };
                d.driving = (DrivingParams { eta, ..drive }, false);
                d.beta_list = (vec![0.5, 1.0, 2.0], true);
                d.t_max = (200.0, true);
            }
            WeakLimit => {
                d.driving = (DrivingParams { eta: 0.0, ..drive }, true);
                d.r_list = (vec![0.5], true);
            }
            PetzDemo => {
                d.model = (params(0.25, 0.1, 1.0), true);
            }
        }
        d
    }
}

struct Resolver {
    notes: Vec<DefaultNote>,
}

impl Resolver {
    fn pick<T: Serialize + Clone>(&mut self, field: &str, given: Option<T>, default: (T, bool)) -> T {
        given.unwrap_or_else(|| {
            self.notes.push(DefaultNote { field: field.into(), value: json!(default.0), chosen: default.1 });
            default.0
        })
    }
}

/// Resolves a config file and flag overrides into a complete scenario and
/// the list of defaults that were applied.
pub fn resolve(file: ConfigFile, ov: &Overrides) -> Result<(ScenarioConfig, Vec<DefaultNote>)> {
    let scenario = ov
        .scenario
        .or(file.scenario)
        .ok_or_else(|| CliError::Config("no scenario given (use --scenario or the `scenario` field)".into()))?;
    let d = Defaults::of(scenario);
    let mut rs = Resolver { notes: Vec::new() };

    let m = file.model.unwrap_or_default();
    let (base, chosen) = d.model;
    let model = ModelParams {
        omega0: rs.pick("model.omega0", m.omega0, (base.omega0, chosen)),
        kappa: match ov.kappa {
            Some(k) => k,
            None => rs.pick("model.kappa", m.kappa, (base.kappa, chosen)),
        },
        gamma: rs.pick("model.gamma", m.gamma, (base.gamma, chosen)),
        beta: match ov.beta {
            Some(b) => b,
            None => rs.pick("model.beta", m.beta, (base.beta, chosen)),
        },
        f_sharp_inf: 0.0,
    };
    let driving = rs.pick("driving", file.driving, d.driving);
    let r_list = rs.pick("r_list", file.r_list.or(file.r.map(|r| vec![r])), d.r_list);
    let theta = rs.pick("theta", file.theta, (0.0, false));
    let t_max = ov.t_max.unwrap_or_else(|| rs.pick("t_max", file.t_max, d.t_max));
    let dt_out = rs.pick("dt_out", file.dt_out, d.dt_out);
    let beta_list = match ov.beta {
        Some(b) => vec![b],
        None => rs.pick("beta_list", file.beta_list, d.beta_list),
    };
    let kappa_list = match ov.kappa {
        Some(k) => vec![k],
        None => rs.pick("kappa_list", file.kappa_list, d.kappa_list),
    };
    let zeta_list = rs.pick("zeta_list", file.zeta_list, d.zeta_list);
    let epsilon_reg = rs.pick("epsilon_reg", file.epsilon_reg, d.epsilon_reg);
    let eps_max = rs.pick("eps_max", file.eps_max, d.eps_max);
    let output_path =
        ov.out.clone().unwrap_or_else(|| rs.pick("output_path", file.output_path, (PathBuf::from("out"), true)));

    let cfg = ScenarioConfig {
        scenario,
        model,
        driving,
        r_list,
        theta,
        t_max,
        dt_out,
        beta_list,
        kappa_list,
        zeta_list,
        epsilon_reg,
        eps_max,
        output_path,
    };
    cfg.validate()?;
    Ok((cfg, rs.notes))
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.model.validate().map_err(|e| CliError::Config(format!("model: {e}")))?;
        self.driving.validate(&self.model).map_err(|e| CliError::Config(format!("driving: {e}")))?;
        for (name, list) in [
            ("r_list", &self.r_list),
            ("beta_list", &self.beta_list),
            ("kappa_list", &self.kappa_list),
            ("zeta_list", &self.zeta_list),
        ] {
            if list.is_empty() {
                return bad(format!("{name} is empty"));
            }
            if list.iter().any(|v| !v.is_finite()) {
                return bad(format!("{name} contains a non-finite value"));
            }
        }
        if self.beta_list.iter().any(|&b| b <= 0.0) {
            return bad("beta_list entries must be > 0".into());
        }
        if self.kappa_list.iter().any(|&k| !(0.0..self.model.omega0).contains(&k)) {
            return bad("kappa_list entries must satisfy 0 <= kappa < omega0".into());
        }
        if self.zeta_list.iter().any(|&z| z < 1.0) {
            return bad("zeta_list entries must be >= 1".into());
        }
        if self.r_list.iter().any(|&r| r < 0.0) {
            return bad("r_list entries must be >= 0".into());
        }
        if !(self.t_max > 0.0 && self.dt_out > 0.0 && self.dt_out <= self.t_max) {
            return bad(format!(
                "time grid needs 0 < dt_out <= t_max, got dt_out = {}, t_max = {}",
                self.dt_out, self.t_max
            ));
        }
        if !(self.epsilon_reg > 0.0 && self.eps_max > self.epsilon_reg) {
            return bad(format!(
                "energy grid needs 0 < epsilon_reg < eps_max, got {} and {}",
                self.epsilon_reg, self.eps_max
            ));
        }
        if !self.theta.is_finite() {
            return bad("theta must be finite".into());
        }
        Ok(())
    }
}

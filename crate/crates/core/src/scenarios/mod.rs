//! Named experiments with built-in defaults and JSON overrides.

pub mod battery;
pub mod continuous_limit;
pub mod landauer;
pub mod nonmarkov_sweep;
pub mod output;
pub mod thermalization;
pub mod two_qubit;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{AaMode, Backend, CollisionConfig, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, ComplexMatrix};
use crate::qstate::{DensityMatrix, LogBase, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Thermalization,
    NonmarkovSweep,
    Battery,
    TwoQubitLocalGlobal,
    Landauer,
    ContinuousLimit,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Thermalization,
        Scenario::NonmarkovSweep,
        Scenario::Battery,
        Scenario::TwoQubitLocalGlobal,
        Scenario::Landauer,
        Scenario::ContinuousLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Thermalization => "thermalization",
            Scenario::NonmarkovSweep => "nonmarkov_sweep",
            Scenario::Battery => "battery",
            Scenario::TwoQubitLocalGlobal => "two_qubit_local_global",
            Scenario::Landauer => "landauer",
            Scenario::ContinuousLimit => "continuous_limit",
        }
    }

    /// Override keys the scenario reads.
    pub fn allowed_keys(self) -> Vec<&'static str> {
        let mut keys = self.own_keys().to_vec();
        if self != Scenario::ContinuousLimit {
            keys.extend(["backend", "factor_cap", "n_steps"]);
        }
        keys
    }

    fn own_keys(self) -> &'static [&'static str] {
        match self {
            Scenario::Thermalization => &["omega", "beta", "theta", "tau", "initial_bloch"],
            Scenario::NonmarkovSweep => &[
                "omega", "theta", "tau", "p_grid", "aa_mode", "metric", "initial_bloch",
                "erasure_lambda", "grid_resolution",
            ],
            Scenario::Battery => &["omega", "beta", "g", "tau", "interaction", "window", "initial_bloch"],
            Scenario::TwoQubitLocalGlobal => &["omega", "beta", "beta_2", "kappa", "interaction", "g", "tau", "window"],
            Scenario::Landauer => &["omega", "beta", "beta_grid", "theta", "g", "tau", "window", "initial_bloch"],
            Scenario::ContinuousLimit => &["omega", "gamma", "tau_grid", "t_final"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Scenario::ALL.iter().map(|k| k.name()).collect();
            Error::Config(format!("unknown scenario '{s}'; known: {}", known.join(", ")))
        })
    }
}

/// Two-qubit coupling: system–unit in the battery scenario, qubit–qubit in
/// the two-qubit one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    /// `σx⊗σx + σy⊗σy`
    Exchange,
    /// `σx⊗σx − σy⊗σy`
    Battery,
    /// `σx⊗σx`
    Xx,
}

impl InteractionKind {
    pub fn operator(self) -> ComplexMatrix {
        let xx = kron(&pauli::x(), &pauli::x());
        let yy = kron(&pauli::y(), &pauli::y());
        match self {
            InteractionKind::Exchange => &xx + &yy,
            InteractionKind::Battery => &xx - &yy,
            InteractionKind::Xx => xx,
        }
    }
}

/// Config-file overrides; every key is optional and unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aa_mode: Option<AaMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erasure_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_bloch: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<usize>,
}

impl Overrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    /// Names of the keys that are set.
    pub fn keys(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Rejects keys the scenario does not read.
    pub fn check_for(&self, scenario: Scenario) -> Result<()> {
        let allowed = scenario.allowed_keys();
        let stray: Vec<String> = self.keys().into_iter().filter(|k| !allowed.contains(&k.as_str())).collect();
        if stray.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{scenario} does not take {}; it reads {}",
                stray.join(", "),
                allowed.join(", ")
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub log_base: LogBase,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: 0, log_base: LogBase::Two }
    }
}

/// The run whose records are written out.
#[derive(Debug, Clone)]
pub struct Primary {
    pub config: CollisionConfig,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone)]
pub struct Outcome<S> {
    pub summary: S,
    pub primary: Primary,
}

/// A finished scenario with its summary in JSON form.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub seed: u64,
    pub summary: serde_json::Value,
    pub primary: Primary,
}

pub fn run_scenario(scenario: Scenario, o: &Overrides, opts: RunOptions) -> Result<ScenarioRun> {
    o.check_for(scenario)?;
    fn pack<S: Serialize>(scenario: Scenario, seed: u64, out: Outcome<S>) -> Result<ScenarioRun> {
        let summary = serde_json::to_value(&out.summary).map_err(|e| Error::Config(format!("summary: {e}")))?;
        Ok(ScenarioRun { scenario, seed, summary, primary: out.primary })
    }
    let seed = opts.seed;
    match scenario {
        Scenario::Thermalization => pack(scenario, seed, thermalization::run(o, opts)?),
        Scenario::NonmarkovSweep => pack(scenario, seed, nonmarkov_sweep::run(o, opts)?),
        Scenario::Battery => pack(scenario, seed, battery::run(o, opts)?),
        Scenario::TwoQubitLocalGlobal => pack(scenario, seed, two_qubit::run(o, opts)?),
        Scenario::Landauer => pack(scenario, seed, landauer::run(o, opts)?),
        Scenario::ContinuousLimit => pack(scenario, seed, continuous_limit::run(o, opts)?),
    }
}

/// The scenario's primary configuration with defaults and overrides applied.
pub fn primary_config(scenario: Scenario, o: &Overrides, opts: RunOptions) -> Result<CollisionConfig> {
    o.check_for(scenario)?;
    match scenario {
        Scenario::Thermalization => thermalization::config(o, opts),
        Scenario::NonmarkovSweep => nonmarkov_sweep::config(o, opts, AaMode::Coherent, 1.0),
        Scenario::Battery => battery::config(o, opts),
        Scenario::TwoQubitLocalGlobal => two_qubit::config(o, opts),
        Scenario::Landauer => landauer::config(o, opts, o.beta.unwrap_or(landauer::DEFAULT_BETA)),
        Scenario::ContinuousLimit => {
            let p = continuous_limit::Params::resolve(o);
            let tau = p.tau_grid.last().copied().unwrap_or(0.0125);
            continuous_limit::config(&p, tau, opts)
        }
    }
}

fn apply_engine(cfg: &mut CollisionConfig, o: &Overrides, opts: RunOptions) {
    if let Some(b) = o.backend {
        cfg.backend = b;
    }
    if let Some(c) = o.factor_cap {
        cfg.factor_cap = c;
    }
    cfg.rng_seed = opts.seed;
    cfg.log_base = opts.log_base;
}

/// `ω/2·σz`, with `|0⟩` the excited level.
pub fn half_z(omega: f64) -> ComplexMatrix {
    pauli::z().scale_re(omega / 2.0)
}

fn bloch(r: [f64; 3]) -> Result<DensityMatrix> {
    DensityMatrix::from_bloch(r).map_err(|e| Error::Config(format!("initial_bloch: {e}")))
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Config(format!("{name} must be positive, got {x}")))
    }
}

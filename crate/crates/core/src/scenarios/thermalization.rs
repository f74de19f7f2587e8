//! A qubit homogenizing with a stream of thermal units under partial SWAP.

use serde::Serialize;

use super::{apply_engine, bloch, half_z, positive, Outcome, Overrides, Primary, RunOptions};
use crate::engine::{run as run_engine, AncillaStreamSpec, CollisionConfig, Interaction, StreamRole};
use crate::error::Result;
use crate::qstate::{thermal_state, trace_distance};

/// Slack on the monotone-decay check.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub omega: f64,
    pub beta: f64,
    pub theta: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub initial_bloch: [f64; 3],
}

impl Params {
    pub fn resolve(o: &Overrides) -> Self {
        Self {
            omega: o.omega.unwrap_or(1.0),
            beta: o.beta.unwrap_or(1.0),
            theta: o.theta.unwrap_or(0.05 * std::f64::consts::PI),
            tau: o.tau.unwrap_or(1.0),
            n_steps: o.n_steps.unwrap_or(2000),
            initial_bloch: o.initial_bloch.unwrap_or([0.0, 0.0, 1.0]),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub params: Params,
    /// Trace distance to the thermal state after the last collision.
    pub final_distance: f64,
    /// Whether the distance to the thermal state never grew.
    pub monotone: bool,
    pub max_increase: f64,
    /// Distance to the thermal state after each collision, starting with the initial state.
    #[serde(skip)]
    pub distances: Vec<f64>,
}

pub fn config(o: &Overrides, opts: RunOptions) -> Result<CollisionConfig> {
    let p = Params::resolve(o);
    let h = half_z(p.omega);
    let stream = AncillaStreamSpec::thermal(h.clone(), p.beta, StreamRole::Bath, Interaction::PartialSwap { theta: p.theta })?;
    let mut cfg = CollisionConfig::new(h, bloch(p.initial_bloch)?, vec![stream], positive("tau", p.tau)?, p.n_steps);
    apply_engine(&mut cfg, o, opts);
    Ok(cfg)
}

pub fn run(o: &Overrides, opts: RunOptions) -> Result<Outcome<Summary>> {
    let params = Params::resolve(o);
    let cfg = config(o, opts)?;
    let traj = run_engine(&cfg)?;
    let target = thermal_state(&cfg.system_hamiltonian, params.beta)?;
    let snaps = traj.snapshots.as_deref().unwrap_or_default();
    let distances = snaps.iter().map(|s| trace_distance(s, &target)).collect::<Result<Vec<_>>>()?;
    let max_increase = distances.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let summary = Summary {
        params,
        final_distance: distances.last().copied().unwrap_or(f64::NAN),
        monotone: max_increase <= MONOTONE_SLACK,
        max_increase,
        distances,
    };
    Ok(Outcome { summary, primary: Primary { config: cfg, trajectory: traj } })
}

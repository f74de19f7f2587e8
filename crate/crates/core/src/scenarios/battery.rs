//! A qubit charged by thermal units through `σx⊗σx − σy⊗σy`.
//!
//! The coupling only connects `|ee⟩` and `|gg⟩`, so the system's excited
//! population relaxes to the unit's ground population: the steady state is
//! the thermal state at `−β`.

use serde::Serialize;

use super::{apply_engine, bloch, positive, InteractionKind, Outcome, Overrides, Primary, RunOptions};
use crate::engine::{run as run_engine, AncillaStreamSpec, CollisionConfig, Interaction, StreamRole};
use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix};
use crate::qstate::{thermal_state, trace_distance, DensityMatrix};
use crate::thermo::{detailed_balance_report, ergotropy, steady_state_fluxes, DetailedBalance, Fluxes, DEFAULT_WINDOW};

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub omega: f64,
    pub beta: f64,
    pub g: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub interaction: InteractionKind,
    pub window: usize,
    pub initial_bloch: [f64; 3],
}

impl Params {
    pub fn resolve(o: &Overrides) -> Self {
        Self {
            omega: o.omega.unwrap_or(1.0),
            beta: o.beta.unwrap_or(1.0),
            g: o.g.unwrap_or(1.0),
            tau: o.tau.unwrap_or(0.5),
            n_steps: o.n_steps.unwrap_or(300),
            interaction: o.interaction.unwrap_or(InteractionKind::Battery),
            window: o.window.unwrap_or(DEFAULT_WINDOW),
            initial_bloch: o.initial_bloch.unwrap_or([0.0, 0.0, -1.0]),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub params: Params,
    pub excited_population: f64,
    pub ground_population: f64,
    pub distance_to_thermal: f64,
    /// Distance to the thermal state at `−β`.
    pub distance_to_inverted: f64,
    pub population_inverted: bool,
    pub ergotropy: f64,
    pub non_passive: bool,
    pub fluxes: Fluxes,
    pub detailed_balance: DetailedBalance,
}

/// `ωσz`, with `|0⟩` the excited level.
pub fn hamiltonian(omega: f64) -> ComplexMatrix {
    pauli::z().scale_re(omega)
}

/// Thermal state of `ωσz` at `−β`.
pub fn inverted_state(omega: f64, beta: f64) -> Result<DensityMatrix> {
    let th = thermal_state(&hamiltonian(omega), beta)?;
    DensityMatrix::new(ComplexMatrix::from_real_diag(&[th.population(1), th.population(0)]))
}

pub fn config(o: &Overrides, opts: RunOptions) -> Result<CollisionConfig> {
    let p = Params::resolve(o);
    let h = hamiltonian(p.omega);
    let stream = AncillaStreamSpec::thermal(
        h.clone(),
        p.beta,
        StreamRole::Bath,
        Interaction::Hamiltonian { v: p.interaction.operator(), g: p.g },
    )?;
    let mut cfg = CollisionConfig::new(h, bloch(p.initial_bloch)?, vec![stream], positive("tau", p.tau)?, p.n_steps);
    apply_engine(&mut cfg, o, opts);
    Ok(cfg)
}

pub fn run(o: &Overrides, opts: RunOptions) -> Result<Outcome<Summary>> {
    let params = Params::resolve(o);
    let cfg = config(o, opts)?;
    let traj = run_engine(&cfg)?;
    let fluxes = steady_state_fluxes(&traj, params.window);
    if !fluxes.converged {
        return Err(Error::NotConverged { drift: fluxes.drift });
    }
    let last = traj.snapshots.as_ref().and_then(|s| s.last()).ok_or(Error::MissingSnapshots)?;
    let h = &cfg.system_hamiltonian;
    let erg = ergotropy(last, h)?;
    let summary = Summary {
        excited_population: last.population(0),
        ground_population: last.population(1),
        distance_to_thermal: trace_distance(last, &thermal_state(h, params.beta)?)?,
        distance_to_inverted: trace_distance(last, &inverted_state(params.omega, params.beta)?)?,
        population_inverted: last.population(0) > last.population(1),
        ergotropy: erg,
        non_passive: erg > 1e-12,
        fluxes,
        detailed_balance: detailed_balance_report(h, h, &params.interaction.operator(), None)?,
        params,
    };
    Ok(Outcome { summary, primary: Primary { config: cfg, trajectory: traj } })
}

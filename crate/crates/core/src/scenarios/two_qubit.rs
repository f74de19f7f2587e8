//! Two coupled qubits, each exchanging energy with its own thermal stream.
//!
//! Collisions alternate between the streams. Each local exchange conserves
//! the local bare energy but not, in general, the coupling `κ·V_I` between
//! the qubits, so switching work flows in even at equal temperatures. With
//! `V_I = σxσx + σyσy` on resonant qubits the work vanishes identically.

use serde::Serialize;

use super::{apply_engine, half_z, positive, InteractionKind, Outcome, Overrides, Primary, RunOptions};
use crate::engine::{run as run_engine, AncillaStreamSpec, CollisionConfig, Interaction, StreamRole, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{kron, kron_all, pauli, ComplexMatrix};
use crate::qstate::{trace_distance, DensityMatrix};
use crate::thermo::{detailed_balance_report, ThermoLedger, DRIFT_TOL};

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub omega: f64,
    pub beta_1: f64,
    pub beta_2: f64,
    pub kappa: f64,
    pub coupling: InteractionKind,
    pub g: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub window: usize,
}

impl Params {
    pub fn resolve(o: &Overrides) -> Self {
        Self {
            omega: o.omega.unwrap_or(1.0),
            beta_1: o.beta.unwrap_or(0.5),
            beta_2: o.beta_2.unwrap_or(2.0),
            kappa: o.kappa.unwrap_or(0.2),
            coupling: o.interaction.unwrap_or(InteractionKind::Xx),
            g: o.g.unwrap_or(1.0),
            tau: o.tau.unwrap_or(0.3),
            n_steps: o.n_steps.unwrap_or(3000),
            window: o.window.unwrap_or(100),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub params: Params,
    /// Mean heat into the first stream per collision with it.
    pub heat_into_1: f64,
    pub heat_into_2: f64,
    /// Mean switching work per two-collision cycle.
    pub work_per_cycle: f64,
    /// `(Q₂ − Q₁)/2` per cycle: heat carried from stream 1 to stream 2.
    pub current: f64,
    /// The current never runs from the colder stream to the hotter one, and
    /// vanishes at equal temperatures.
    pub current_direction_ok: bool,
    pub max_first_law_residual: f64,
    pub cumulative_sigma: f64,
    pub local_detailed_balance: f64,
    pub global_detailed_balance: f64,
    pub drift: f64,
}

/// `σx⊗σx + σy⊗σy` between system qubit `qubit` and the unit, on
/// `qubit 0 ⊗ qubit 1 ⊗ unit`.
fn exchange_on(qubit: usize) -> ComplexMatrix {
    let id = pauli::id();
    let term = |p: &ComplexMatrix| if qubit == 0 { kron_all([p, &id, p]) } else { kron_all([&id, p, p]) };
    &term(&pauli::x()) + &term(&pauli::y())
}

/// `ω/2 (σz⊗1 + 1⊗σz) + κ·V_I`.
pub fn system_hamiltonian(omega: f64, kappa: f64, coupling: InteractionKind) -> ComplexMatrix {
    let h = half_z(omega);
    let id = pauli::id();
    &(&kron(&h, &id) + &kron(&id, &h)) + &coupling.operator().scale_re(kappa)
}

pub fn config(o: &Overrides, opts: RunOptions) -> Result<CollisionConfig> {
    let p = Params::resolve(o);
    let he = half_z(p.omega);
    let streams = [(0, p.beta_1), (1, p.beta_2)]
        .into_iter()
        .map(|(q, beta)| {
            AncillaStreamSpec::thermal(he.clone(), beta, StreamRole::Bath, Interaction::Hamiltonian { v: exchange_on(q), g: p.g })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cfg = CollisionConfig::new(
        system_hamiltonian(p.omega, p.kappa, p.coupling),
        DensityMatrix::maximally_mixed(4),
        streams,
        positive("tau", p.tau)?,
        p.n_steps,
    );
    apply_engine(&mut cfg, o, opts);
    Ok(cfg)
}

/// Mean heat into each stream and work per cycle over the `window`
/// collisions ending at `end`.
fn window_means(traj: &Trajectory, end: usize, window: usize) -> (f64, f64, f64) {
    let recs = &traj.records[end - window..end];
    let cycles = window as f64 / 2.0;
    let q = |s: usize| recs.iter().filter(|r| r.stream == s).map(|r| r.heat).sum::<f64>() / cycles;
    (q(0), q(1), recs.iter().map(|r| r.work).sum::<f64>() / cycles)
}

pub fn run(o: &Overrides, opts: RunOptions) -> Result<Outcome<Summary>> {
    let params = Params::resolve(o);
    if params.window == 0 || !params.window.is_multiple_of(2) {
        return Err(Error::Config(format!("window must be a positive even number, got {}", params.window)));
    }
    let cfg = config(o, opts)?;
    let traj = run_engine(&cfg)?;
    let n = traj.records.len();
    if n < 2 * params.window {
        return Err(Error::Config(format!("{n} steps cannot fill two windows of {}", params.window)));
    }
    let (q1, q2, w) = window_means(&traj, n, params.window);
    let (q1p, q2p, wp) = window_means(&traj, n - params.window, params.window);
    let snaps = traj.snapshots.as_ref().ok_or(Error::MissingSnapshots)?;
    let state_drift = trace_distance(&snaps[n], &snaps[n - 2])?;
    let drift = [(q1 - q1p).abs(), (q2 - q2p).abs(), (w - wp).abs(), state_drift].into_iter().fold(0.0, f64::max);
    if !(drift < DRIFT_TOL) {
        return Err(Error::NotConverged { drift });
    }

    let ledger = ThermoLedger::from_trajectory(&traj, &cfg)?;
    let current = (q2 - q1) / 2.0;
    let direction = params.beta_2 - params.beta_1;
    let current_direction_ok = if direction == 0.0 { current.abs() < DRIFT_TOL } else { current * direction.signum() > -DRIFT_TOL };

    let he = half_z(params.omega);
    let local_v = &kron(&pauli::x(), &pauli::x()) + &kron(&pauli::y(), &pauli::y());
    let global_v = exchange_on(0);
    let db = detailed_balance_report(&he, &he, &local_v, Some((&cfg.system_hamiltonian, &global_v)))?;

    let summary = Summary {
        heat_into_1: q1,
        heat_into_2: q2,
        work_per_cycle: w,
        current,
        current_direction_ok,
        max_first_law_residual: ledger.steps.iter().map(|e| e.first_law_residual().abs()).fold(0.0, f64::max),
        cumulative_sigma: ledger.totals().sigma,
        local_detailed_balance: db.local,
        global_detailed_balance: db.global.unwrap_or(0.0),
        drift,
        params,
    };
    Ok(Outcome { summary, primary: Primary { config: cfg, trajectory: traj } })
}

//! Erasure of maximally mixed resource units paid for by heat into a bath.
//!
//! Collisions alternate between a resource unit (partial SWAP) and a bath
//! unit (`σx⊗σx` coupling). At the steady state the bath receives at least
//! the entropy removed from the resource units.

use rayon::prelude::*;
use serde::Serialize;

use super::{apply_engine, bloch, half_z, positive, Outcome, Overrides, Primary, RunOptions};
use crate::engine::{run as run_engine, AncillaStreamSpec, CollisionConfig, Interaction, StreamRole};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli};
use crate::qstate::DensityMatrix;
use crate::thermo::{landauer_report, LandauerReport, DEFAULT_WINDOW};

pub const DEFAULT_BETA: f64 = 1.0;
/// Tolerance on the steady-state identity.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub omega: f64,
    pub beta: f64,
    pub beta_grid: Vec<f64>,
    pub theta: f64,
    pub g: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub window: usize,
    pub initial_bloch: [f64; 3],
}

impl Params {
    pub fn resolve(o: &Overrides) -> Self {
        Self {
            omega: o.omega.unwrap_or(1.0),
            beta: o.beta.unwrap_or(DEFAULT_BETA),
            beta_grid: o.beta_grid.clone().unwrap_or_else(|| vec![0.1, 0.5, 1.0, 2.0]),
            theta: o.theta.unwrap_or(std::f64::consts::FRAC_PI_4),
            g: o.g.unwrap_or(1.0),
            tau: o.tau.unwrap_or(0.5),
            n_steps: o.n_steps.unwrap_or(1000),
            window: o.window.unwrap_or(DEFAULT_WINDOW),
            initial_bloch: o.initial_bloch.unwrap_or([0.0, 0.0, 0.0]),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaPoint {
    pub beta: f64,
    pub report: LandauerReport,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub params: Params,
    pub report: LandauerReport,
    pub sweep: Vec<BetaPoint>,
    pub all_bounds_hold: bool,
    pub max_abs_residual: f64,
}

pub fn config(o: &Overrides, opts: RunOptions, beta: f64) -> Result<CollisionConfig> {
    let p = Params::resolve(o);
    let h = half_z(p.omega);
    let resource = AncillaStreamSpec::resource(
        h.clone(),
        DensityMatrix::maximally_mixed(2),
        Interaction::PartialSwap { theta: p.theta },
    );
    let bath = AncillaStreamSpec::thermal(
        h.clone(),
        beta,
        StreamRole::Bath,
        Interaction::Hamiltonian { v: kron(&pauli::x(), &pauli::x()), g: p.g },
    )?;
    let mut cfg = CollisionConfig::new(h, bloch(p.initial_bloch)?, vec![resource, bath], positive("tau", p.tau)?, p.n_steps);
    apply_engine(&mut cfg, o, opts);
    Ok(cfg)
}

fn point(o: &Overrides, opts: RunOptions, beta: f64, window: usize) -> Result<(CollisionConfig, crate::engine::Trajectory, LandauerReport)> {
    let cfg = config(o, opts, beta)?;
    let traj = run_engine(&cfg)?;
    let report = landauer_report(&traj, &cfg, window)?;
    Ok((cfg, traj, report))
}

pub fn run(o: &Overrides, opts: RunOptions) -> Result<Outcome<Summary>> {
    let params = Params::resolve(o);
    if params.beta_grid.is_empty() {
        return Err(Error::Config("beta_grid must not be empty".into()));
    }
    let (cfg, traj, report) = point(o, opts, params.beta, params.window)?;
    let sweep = params
        .beta_grid
        .par_iter()
        .map(|&beta| {
            let (_, _, report) = point(o, opts, beta, params.window)?;
            Ok(BetaPoint { beta, report, bound_holds: report.bound_holds(IDENTITY_TOL) })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs_residual = sweep.iter().map(|p| p.report.residual.abs()).fold(report.residual.abs(), f64::max);
    let summary = Summary {
        all_bounds_hold: sweep.iter().all(|p| p.bound_holds),
        max_abs_residual,
        report,
        sweep,
        params,
    };
    Ok(Outcome { summary, primary: Primary { config: cfg, trajectory: traj } })
}

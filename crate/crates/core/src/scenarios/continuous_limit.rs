//! Approach to exponential decay as `τ → 0` with `θ² = γτ`.
//!
//! An excited qubit meets ground-state units under partial SWAP; its
//! excited population after `n` collisions is `cos^{2n}θ`, which tends to
//! `exp(−γ t)` at fixed `t = nτ`.

use rayon::prelude::*;
use serde::Serialize;

use super::{half_z, positive, Outcome, Overrides, Primary, RunOptions};
use crate::engine::{run as run_engine, AncillaStreamSpec, CollisionConfig, Interaction, Trajectory};
use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub omega: f64,
    pub gamma: f64,
    pub tau_grid: Vec<f64>,
    pub t_final: f64,
}

impl Params {
    pub fn resolve(o: &Overrides) -> Self {
        Self {
            omega: o.omega.unwrap_or(1.0),
            gamma: o.gamma.unwrap_or(1.0),
            tau_grid: o.tau_grid.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.025, 0.0125]),
            t_final: o.t_final.unwrap_or(5.0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauPoint {
    pub tau: f64,
    pub n_steps: usize,
    /// Largest `|P(nτ) − exp(−Γ nτ)|` over the run.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub params: Params,
    /// Decay rate fitted on the finest `τ`.
    pub fitted_rate: f64,
    pub points: Vec<TauPoint>,
    pub strictly_decreasing: bool,
}

pub fn config(p: &Params, tau: f64, opts: RunOptions) -> Result<CollisionConfig> {
    let tau = positive("tau", tau)?;
    if !(p.gamma >= 0.0 && p.gamma.is_finite()) {
        return Err(Error::Config(format!("gamma must be non-negative, got {}", p.gamma)));
    }
    let n_steps = (positive("t_final", p.t_final)? / tau).round() as usize;
    let h = half_z(p.omega);
    let stream = AncillaStreamSpec::resource(
        h.clone(),
        DensityMatrix::basis(2, 1)?,
        Interaction::PartialSwap { theta: (p.gamma * tau).sqrt() },
    );
    let mut cfg = CollisionConfig::new(h, DensityMatrix::basis(2, 0)?, vec![stream], tau, n_steps.max(1));
    cfg.rng_seed = opts.seed;
    cfg.log_base = opts.log_base;
    Ok(cfg)
}

fn excited_populations(traj: &Trajectory) -> Result<Vec<f64>> {
    let s = traj.snapshots.as_ref().ok_or(Error::MissingSnapshots)?;
    Ok(s.iter().map(|r| r.population(0)).collect())
}

/// Least-squares slope of `ln P` against `t`, through the origin.
fn fit_rate(pops: &[f64], tau: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (n, &p) in pops.iter().enumerate() {
        if p > 0.0 {
            let t = n as f64 * tau;
            num += t * p.ln();
            den += t * t;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        -num / den
    }
}

pub fn run(o: &Overrides, opts: RunOptions) -> Result<Outcome<Summary>> {
    let params = Params::resolve(o);
    if params.tau_grid.len() < 2 {
        return Err(Error::Config("tau_grid needs at least two values".into()));
    }
    let runs = params
        .tau_grid
        .par_iter()
        .map(|&tau| {
            let cfg = config(&params, tau, opts)?;
            let traj = run_engine(&cfg)?;
            Ok((cfg, traj))
        })
        .collect::<Result<Vec<_>>>()?;

    let finest = params
        .tau_grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("grid is not empty");
    let rate = fit_rate(&excited_populations(&runs[finest].1)?, params.tau_grid[finest]);

    let points = runs
        .iter()
        .zip(&params.tau_grid)
        .map(|((cfg, traj), &tau)| {
            let pops = excited_populations(traj)?;
            let max_deviation = pops
                .iter()
                .enumerate()
                .map(|(n, p)| (p - (-rate * n as f64 * tau).exp()).abs())
                .fold(0.0, f64::max);
            Ok(TauPoint { tau, n_steps: cfg.n_steps, max_deviation })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = points.windows(2).all(|w| w[1].max_deviation < w[0].max_deviation);
    let (cfg, traj) = runs.into_iter().nth(finest).expect("finest run exists");
    let summary = Summary { params, fitted_rate: rate, points, strictly_decreasing };
    Ok(Outcome { summary, primary: Primary { config: cfg, trajectory: traj } })
}

//! Revivals of distinguishability when consecutive units collide with each
//! other through a stochastic SWAP.

use rayon::prelude::*;
use serde::Serialize;

use super::{apply_engine, bloch, half_z, positive, Outcome, Overrides, Primary, RunOptions};
use crate::engine::{run_paired, AaMode, AncillaStreamSpec, CollisionConfig, Interaction};
use crate::error::{Error, Result};
use crate::nonmarkov::{blp_measure, blp_optimize_pairs, distinguishability_series, BlochPair, BoundAnalysis, BoundReport, REVIVAL_THRESHOLD};
use crate::qstate::{DensityMatrix, Metric};

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub omega: f64,
    pub theta: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub p_grid: Vec<f64>,
    pub modes: Vec<AaMode>,
    pub metric: Metric,
    pub initial_bloch: [f64; 3],
    pub erasure_lambda: f64,
    pub grid_resolution: Option<usize>,
}

impl Params {
    pub fn resolve(o: &Overrides) -> Self {
        Self {
            omega: o.omega.unwrap_or(1.0),
            theta: o.theta.unwrap_or(std::f64::consts::FRAC_PI_6),
            tau: o.tau.unwrap_or(0.5),
            n_steps: o.n_steps.unwrap_or(8),
            p_grid: o.p_grid.clone().unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]),
            modes: match o.aa_mode {
                Some(m) => vec![m],
                None => vec![AaMode::Coherent, AaMode::Incoherent],
            },
            metric: o.metric.unwrap_or(Metric::Trace),
            initial_bloch: o.initial_bloch.unwrap_or([0.0, 0.0, 1.0]),
            erasure_lambda: o.erasure_lambda.unwrap_or(1.0),
            grid_resolution: o.grid_resolution,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub mode: AaMode,
    pub blp: f64,
    /// First step at which the pair distance grows.
    pub first_revival: Option<usize>,
    /// Bound at the largest revival; needs the full backend to fit.
    pub bound: Option<BoundReport>,
    /// Smallest slack over every `(s, t)`.
    pub min_slack: Option<f64>,
    pub optimized_pair: Option<BlochPair>,
    pub optimized_blp: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub params: Params,
    pub rows: Vec<SweepRow>,
}

pub fn config(o: &Overrides, opts: RunOptions, mode: AaMode, p: f64) -> Result<CollisionConfig> {
    let prm = Params::resolve(o);
    let h = half_z(prm.omega);
    let stream = AncillaStreamSpec::resource(h.clone(), DensityMatrix::basis(2, 0)?, Interaction::PartialSwap { theta: prm.theta });
    let mut cfg = CollisionConfig::new(h, bloch(prm.initial_bloch)?, vec![stream], positive("tau", prm.tau)?, prm.n_steps);
    cfg.aa_mode = mode;
    cfg.aa_swap_prob = p;
    cfg.erasure_lambda = prm.erasure_lambda;
    cfg.metric = prm.metric;
    apply_engine(&mut cfg, o, opts);
    Ok(cfg)
}

fn pair(r: [f64; 3]) -> Result<(DensityMatrix, DensityMatrix)> {
    BlochPair { r }.states().map_err(|e| Error::Config(format!("initial_bloch: {e}")))
}

fn sweep_row(o: &Overrides, opts: RunOptions, prm: &Params, mode: AaMode, p: f64) -> Result<SweepRow> {
    let cfg = config(o, opts, mode, p)?;
    let (a, b) = pair(prm.initial_bloch)?;
    let (ta, tb) = run_paired(&cfg, &a, &b)?;
    let series = distinguishability_series(&ta, &tb, prm.metric)?;
    let first_revival = series.values.windows(2).position(|w| w[1] - w[0] > REVIVAL_THRESHOLD).map(|k| k + 1);

    let (mut bound, mut min_slack) = (None, None);
    if cfg.full_backend_factors() <= cfg.factor_cap && cfg.erasure_lambda == 1.0 {
        let analysis = BoundAnalysis::new(&cfg, &a, &b)?;
        min_slack = analysis.all_reports().iter().map(|r| r.slack).reduce(f64::min);
        bound = analysis.dominant_revival().map(|(s, t)| analysis.report(s, t)).transpose()?;
    }
    let (optimized_pair, optimized_blp) = match prm.grid_resolution {
        Some(res) => {
            let (best, v) = blp_optimize_pairs(&cfg, prm.metric, res)?;
            (Some(best), Some(v))
        }
        None => (None, None),
    };
    Ok(SweepRow { p, mode, blp: blp_measure(&series), first_revival, bound, min_slack, optimized_pair, optimized_blp })
}

pub fn run(o: &Overrides, opts: RunOptions) -> Result<Outcome<Summary>> {
    let prm = Params::resolve(o);
    if prm.p_grid.is_empty() {
        return Err(Error::Config("p_grid must not be empty".into()));
    }
    if prm.modes.contains(&AaMode::Off) {
        return Err(Error::Config("aa_mode must be coherent or incoherent for this scenario".into()));
    }
    let cells: Vec<(AaMode, f64)> = prm.modes.iter().flat_map(|&m| prm.p_grid.iter().map(move |&p| (m, p))).collect();
    let rows = cells
        .par_iter()
        .map(|&(m, p)| sweep_row(o, opts, &prm, m, p))
        .collect::<Result<Vec<_>>>()?;

    let p_max = prm.p_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cfg = config(o, opts, prm.modes[0], p_max)?;
    let (a, b) = pair(prm.initial_bloch)?;
    let (ta, _) = run_paired(&cfg, &a, &b)?;
    Ok(Outcome { summary: Summary { params: prm, rows }, primary: Primary { config: cfg, trajectory: ta } })
}

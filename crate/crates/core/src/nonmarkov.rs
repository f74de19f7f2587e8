//! Distinguishability of paired trajectories, revival measures and the
//! environment/correlation bound on revivals.
//!
//! A revival between collision indices `s < t` obeys
//!
//! ```text
//! D_S(t) − D_S(s) ≤ D(ρ_E(s), σ_E(s)) + D(ρ_SE(s), ρ_S(s)⊗ρ_E(s)) + D(σ_SE(s), σ_S(s)⊗σ_E(s))
//! ```
//!
//! for any metric that is contractive under channels and stable under
//! tensoring with a common state. The environment `E` is every unit that has
//! collided by step `s`.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{joint_factorization, run_paired, run_with_joint_history, CollisionConfig, Trajectory};
use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Metric};

/// Increments at or below this are treated as rounding noise.
pub const REVIVAL_THRESHOLD: f64 = 1e-10;
/// Default Bloch-grid resolution for pair optimization.
pub const DEFAULT_GRID: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistinguishabilitySeries {
    pub metric: Metric,
    /// Entry `n` is the distance after `n` collisions.
    pub values: Vec<f64>,
}

pub fn distinguishability_series(a: &Trajectory, b: &Trajectory, metric: Metric) -> Result<DistinguishabilitySeries> {
    let sa = a.snapshots.as_ref().ok_or(Error::MissingSnapshots)?;
    let sb = b.snapshots.as_ref().ok_or(Error::MissingSnapshots)?;
    if sa.len() != sb.len() {
        return Err(Error::Dimension(format!("paired trajectories have {} and {} snapshots", sa.len(), sb.len())));
    }
    let values = sa.iter().zip(sb).map(|(x, y)| metric.distance(x, y)).collect::<Result<_>>()?;
    Ok(DistinguishabilitySeries { metric, values })
}

/// Sum of the positive increments of the series.
pub fn blp_measure(series: &DistinguishabilitySeries) -> f64 {
    series
        .values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > REVIVAL_THRESHOLD)
        .fold(0.0, |acc, d| acc + d)
}

/// Antipodal pure qubit states `±r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochPair {
    pub r: [f64; 3],
}

impl BlochPair {
    pub fn states(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        let [x, y, z] = self.r;
        Ok((DensityMatrix::from_bloch([x, y, z])?, DensityMatrix::from_bloch([-x, -y, -z])?))
    }
}

/// Upper-hemisphere grid, uniform in `cos θ` and `φ`: `res` polar rows and
/// `2·res` azimuths, the pole taken once.
pub fn bloch_grid(res: usize) -> Vec<BlochPair> {
    let mut out = Vec::new();
    for i in 0..res {
        let c = 1.0 - i as f64 / res as f64;
        let s = (1.0 - c * c).max(0.0).sqrt();
        let n_phi = if i == 0 { 1 } else { 2 * res };
        for j in 0..n_phi {
            let phi = std::f64::consts::PI * j as f64 / res as f64;
            out.push(BlochPair { r: [s * phi.cos(), s * phi.sin(), c] });
        }
    }
    out
}

/// Distinguishability series of one pair under `cfg`.
pub fn pair_series(cfg: &CollisionConfig, pair: &BlochPair, metric: Metric) -> Result<DistinguishabilitySeries> {
    let (a, b) = pair.states()?;
    let (ta, tb) = run_paired(cfg, &a, &b)?;
    distinguishability_series(&ta, &tb, metric)
}

/// Largest revival measure over antipodal pure pairs on the Bloch grid.
/// Ties go to the first grid point.
pub fn blp_optimize_pairs(cfg: &CollisionConfig, metric: Metric, grid_resolution: usize) -> Result<(BlochPair, f64)> {
    if cfg.system_dim() != 2 {
        return Err(Error::Unsupported(format!(
            "pair optimization needs a qubit system, got dimension {}",
            cfg.system_dim()
        )));
    }
    if grid_resolution == 0 {
        return Err(Error::Config("grid resolution must be at least 1".into()));
    }
    let grid = bloch_grid(grid_resolution);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|p| pair_series(cfg, p, metric).map(|s| blp_measure(&s)))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = k;
        }
    }
    Ok((grid[best], values[best]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub s: usize,
    pub t: usize,
    pub lhs: f64,
    pub rhs_env: f64,
    pub rhs_corr_rho: f64,
    pub rhs_corr_sigma: f64,
    pub slack: f64,
}

/// The three right-hand terms at one step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Precursors {
    pub env: f64,
    pub corr_rho: f64,
    pub corr_sigma: f64,
}

/// Paired full-state runs reduced to the per-step quantities the bound
/// needs.
#[derive(Debug, Clone)]
pub struct BoundAnalysis {
    pub metric: Metric,
    /// System distance after `n` collisions.
    pub system: Vec<f64>,
    pub precursors: Vec<Precursors>,
}

impl BoundAnalysis {
    pub fn new(cfg: &CollisionConfig, init_a: &DensityMatrix, init_b: &DensityMatrix) -> Result<Self> {
        let mut ca = cfg.clone();
        ca.system_init = init_a.clone();
        ca.keep_snapshots = true;
        let mut cb = ca.clone();
        cb.system_init = init_b.clone();
        let (ha, hb) = rayon::join(|| run_with_joint_history(&ca), || run_with_joint_history(&cb));
        let ((_, ja), (_, jb)) = (ha?, hb?);
        let metric = cfg.metric;
        let rows: Vec<(f64, Precursors)> = ja
            .par_iter()
            .zip(jb.par_iter())
            .enumerate()
            .map(|(s, (ra, rb))| step_terms(cfg, s, ra, rb, metric))
            .collect::<Result<_>>()?;
        let (system, precursors) = rows.into_iter().unzip();
        Ok(Self { metric, system, precursors })
    }

    pub fn n_steps(&self) -> usize {
        self.system.len() - 1
    }

    pub fn report(&self, s: usize, t: usize) -> Result<BoundReport> {
        if t < s {
            return Err(Error::Config(format!("bound needs t >= s, got s = {s}, t = {t}")));
        }
        if t > self.n_steps() {
            return Err(Error::Config(format!("step {t} beyond the {} simulated", self.n_steps())));
        }
        let lhs = self.system[t] - self.system[s];
        let p = self.precursors[s];
        Ok(BoundReport {
            s,
            t,
            lhs,
            rhs_env: p.env,
            rhs_corr_rho: p.corr_rho,
            rhs_corr_sigma: p.corr_sigma,
            slack: p.env + p.corr_rho + p.corr_sigma - lhs,
        })
    }

    /// Reports for every `s ≤ t`.
    pub fn all_reports(&self) -> Vec<BoundReport> {
        let n = self.n_steps();
        (0..=n)
            .flat_map(|s| (s..=n).map(move |t| (s, t)))
            .map(|(s, t)| self.report(s, t).expect("indices in range"))
            .collect()
    }

    /// The `(s, t)` with the largest increase of the system distance, if any
    /// increase exceeds the revival threshold.
    pub fn dominant_revival(&self) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for s in 0..self.system.len() {
            for t in s + 1..self.system.len() {
                let d = self.system[t] - self.system[s];
                if d > REVIVAL_THRESHOLD && best.is_none_or(|(_, b)| d > b) {
                    best = Some(((s, t), d));
                }
            }
        }
        best.map(|(st, _)| st)
    }
}

fn step_terms(
    cfg: &CollisionConfig,
    s: usize,
    ra: &DensityMatrix,
    rb: &DensityMatrix,
    metric: Metric,
) -> Result<(f64, Precursors)> {
    if s == 0 {
        return Ok((metric.distance(ra, rb)?, Precursors::default()));
    }
    let f = joint_factorization(cfg, s)?;
    let env: Vec<usize> = (1..f.len()).collect();
    let (sa, ea) = (ra.partial_trace(&f, &[0])?, ra.partial_trace(&f, &env)?);
    let (sb, eb) = (rb.partial_trace(&f, &[0])?, rb.partial_trace(&f, &env)?);
    let p = Precursors {
        env: metric.distance(&ea, &eb)?,
        corr_rho: metric.distance(ra, &sa.kron(&ea))?,
        corr_sigma: metric.distance(rb, &sb.kron(&eb))?,
    };
    Ok((metric.distance(&sa, &sb)?, p))
}

pub fn revival_bound_report(
    cfg: &CollisionConfig,
    init_a: &DensityMatrix,
    init_b: &DensityMatrix,
    s: usize,
    t: usize,
) -> Result<BoundReport> {
    if t < s {
        return Err(Error::Config(format!("bound needs t >= s, got s = {s}, t = {t}")));
    }
    BoundAnalysis::new(cfg, init_a, init_b)?.report(s, t)
}

/// The right-hand terms at every step, starting with step 0.
pub fn precursor_series(cfg: &CollisionConfig, init_a: &DensityMatrix, init_b: &DensityMatrix) -> Result<Vec<Precursors>> {
    Ok(BoundAnalysis::new(cfg, init_a, init_b)?.precursors)
}

#[cfg(test)]
mod tests;

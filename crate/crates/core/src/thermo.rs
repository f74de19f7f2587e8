//! Heat, switching work and entropy production per collision.
//!
//! Conventions: `Q > 0` is energy that entered the colliding unit, `W > 0` is
//! work injected into system plus unit by switching the coupling on and off,
//! so that `ΔE_S = W − Q`.
//!
//! Entropy production depends on the role of the stream. For a resource
//! stream, `Σ = ΔS_S + ΔS_E`; for a bath stream, `Σ = ΔS_S + β·Q`, the unit
//! being a heat sink at inverse temperature `β`. With an uncorrelated input
//! these give `Σ = I(S:E)` and `Σ = I(S:E) + S(ρ'_E ‖ ρ_E)` respectively.

use serde::Serialize;

use crate::engine::{CollisionConfig, CollisionRecord, StreamRole, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{commutator_norm, kron, ComplexMatrix, HilbertFactorization};
use crate::qstate::{trace_distance, DensityMatrix, LogBase};

/// Tolerance of the per-step ledger identities.
pub const LEDGER_TOL: f64 = 1e-9;
/// Default steady-state window, in collisions.
pub const DEFAULT_WINDOW: usize = 50;
/// Drift below which a window counts as stationary.
pub const DRIFT_TOL: f64 = 1e-8;

/// Energy that entered the colliding unit, the last factor of `f`.
pub fn heat_to_ancilla(
    before: &DensityMatrix,
    after: &DensityMatrix,
    f: &HilbertFactorization,
    h_anc: &ComplexMatrix,
) -> Result<f64> {
    same_space(before, after, f)?;
    let e = f.len() - 1;
    let rb = before.partial_trace(f, &[e])?;
    let ra = after.partial_trace(f, &[e])?;
    check_op(h_anc, rb.dim())?;
    Ok(ra.energy(h_anc) - rb.energy(h_anc))
}

/// Change of `⟨H_S + H_E⟩` over the collision, on the system (factor 0) and
/// the colliding unit (last factor).
pub fn switching_work(
    before: &DensityMatrix,
    after: &DensityMatrix,
    f: &HilbertFactorization,
    h_s: &ComplexMatrix,
    h_anc: &ComplexMatrix,
) -> Result<f64> {
    same_space(before, after, f)?;
    let pair = [0, f.len() - 1];
    let rb = before.partial_trace(f, &pair)?;
    let ra = after.partial_trace(f, &pair)?;
    check_op(h_s, f.dims()[0])?;
    check_op(h_anc, f.dims()[pair[1]])?;
    let h0 = &kron(h_s, &ComplexMatrix::identity(h_anc.rows()))
        + &kron(&ComplexMatrix::identity(h_s.rows()), h_anc);
    Ok(ra.energy(&h0) - rb.energy(&h0))
}

fn same_space(a: &DensityMatrix, b: &DensityMatrix, f: &HilbertFactorization) -> Result<()> {
    if f.len() < 2 || a.dim() != f.total_dim() || b.dim() != f.total_dim() {
        return Err(Error::Dimension(format!(
            "states of dimension {} and {} on factorization {:?}",
            a.dim(),
            b.dim(),
            f.dims()
        )));
    }
    Ok(())
}

fn check_op(h: &ComplexMatrix, dim: usize) -> Result<()> {
    if !h.is_square() || h.rows() != dim {
        return Err(Error::Dimension(format!("operator is {}x{}, factor has dimension {dim}", h.rows(), h.cols())));
    }
    Ok(())
}

/// What the departing unit contributes to the entropy balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exchange {
    /// Entropy change of a resource unit.
    Resource { d_s_anc: f64 },
    /// Heat dumped into a bath unit at inverse temperature `beta`.
    Bath { beta: f64, heat: f64 },
}

/// Entropy production of one collision; `d_s_sys` and `d_s_anc` in `base`.
pub fn entropy_production(d_s_sys: f64, exchange: Exchange, base: LogBase) -> f64 {
    match exchange {
        Exchange::Resource { d_s_anc } => d_s_sys + d_s_anc,
        Exchange::Bath { beta, heat } => d_s_sys + base.from_nats(beta * heat),
    }
}

fn record_exchange(rec: &CollisionRecord, cfg: &CollisionConfig) -> Result<Exchange> {
    match rec.role {
        StreamRole::Resource => Ok(Exchange::Resource { d_s_anc: rec.d_s_anc() }),
        StreamRole::Bath => {
            let beta = cfg.streams[rec.stream]
                .beta
                .ok_or_else(|| Error::Config(format!("bath stream {} has no temperature", rec.stream)))?;
            Ok(Exchange::Bath { beta, heat: rec.heat })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LedgerEntry {
    pub q_resource: f64,
    pub q_bath: f64,
    pub w_switch: f64,
    pub d_e_s: f64,
    pub d_s_s: f64,
    pub d_s_anc: f64,
    pub i_se: f64,
    pub sigma: f64,
    /// Zero for resource collisions.
    pub d_env_relent: f64,
}

impl LedgerEntry {
    pub fn q_total(&self) -> f64 {
        self.q_resource + self.q_bath
    }

    /// `ΔE_S − (W − Q)`.
    pub fn first_law_residual(&self) -> f64 {
        self.d_e_s - (self.w_switch - self.q_total())
    }

    fn accumulate(&mut self, e: &LedgerEntry) {
        self.q_resource += e.q_resource;
        self.q_bath += e.q_bath;
        self.w_switch += e.w_switch;
        self.d_e_s += e.d_e_s;
        self.d_s_s += e.d_s_s;
        self.d_s_anc += e.d_s_anc;
        self.i_se += e.i_se;
        self.sigma += e.sigma;
        self.d_env_relent += e.d_env_relent;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermoLedger {
    pub steps: Vec<LedgerEntry>,
    /// Running sums; `cumulative[k]` covers steps `0..=k`.
    pub cumulative: Vec<LedgerEntry>,
    /// Whether the step is a bath collision with an uncorrelated input, where
    /// `Σ = I + D` holds exactly.
    exact_bath: Vec<bool>,
}

impl ThermoLedger {
    /// Builds the ledger. `ΔE_S` comes from the system snapshots when the
    /// trajectory kept them, so the first law compares two independent
    /// routes.
    pub fn from_trajectory(traj: &Trajectory, cfg: &CollisionConfig) -> Result<Self> {
        let base = cfg.log_base;
        let mut steps = Vec::with_capacity(traj.records.len());
        let mut exact_bath = Vec::with_capacity(traj.records.len());
        for (k, rec) in traj.records.iter().enumerate() {
            let d_e_s = match &traj.snapshots {
                Some(s) if s.len() > k + 1 => {
                    s[k + 1].energy(&cfg.system_hamiltonian) - s[k].energy(&cfg.system_hamiltonian)
                }
                _ => rec.d_e_sys(),
            };
            let (q_resource, q_bath) = match rec.role {
                StreamRole::Resource => (rec.heat, 0.0),
                StreamRole::Bath => (0.0, rec.heat),
            };
            steps.push(LedgerEntry {
                q_resource,
                q_bath,
                w_switch: rec.work,
                d_e_s,
                d_s_s: rec.d_s_sys(),
                d_s_anc: rec.d_s_anc(),
                i_se: rec.mutual_info,
                sigma: entropy_production(rec.d_s_sys(), record_exchange(rec, cfg)?, base),
                d_env_relent: rec.relent_anc.unwrap_or(0.0),
            });
            exact_bath.push(rec.role == StreamRole::Bath && !cfg.has_memory());
        }
        let mut acc = LedgerEntry::default();
        let cumulative = steps
            .iter()
            .map(|e| {
                acc.accumulate(e);
                acc
            })
            .collect();
        Ok(Self { steps, cumulative, exact_bath })
    }

    pub fn totals(&self) -> LedgerEntry {
        self.cumulative.last().copied().unwrap_or_default()
    }

    /// Checks the first law per step and cumulatively, the chain
    /// `Σ ≥ I ≥ 0`, and `Σ = I + D` where it is exact.
    pub fn check(&self) -> Result<()> {
        let fail = |k: usize, what: String| Err(Error::Ledger { step: k + 1, what });
        for (k, e) in self.steps.iter().enumerate() {
            let r = e.first_law_residual();
            if r.abs() >= LEDGER_TOL {
                return fail(k, format!("first-law residual {r:e}"));
            }
            if e.i_se < -LEDGER_TOL {
                return fail(k, format!("negative mutual information {:e}", e.i_se));
            }
            if e.sigma < e.i_se - LEDGER_TOL {
                return fail(k, format!("entropy production {:e} below mutual information {:e}", e.sigma, e.i_se));
            }
            if self.exact_bath[k] {
                let gap = e.sigma - e.i_se - e.d_env_relent;
                if gap.abs() >= LEDGER_TOL {
                    return fail(k, format!("Σ − I − D = {gap:e}"));
                }
            }
        }
        let n = self.steps.len();
        let r = self.totals().first_law_residual();
        if r.abs() >= LEDGER_TOL * n.max(1) as f64 {
            return fail(n.saturating_sub(1), format!("cumulative first-law residual {r:e}"));
        }
        Ok(())
    }
}

/// Per-collision averages over a stationary window.
///
/// Resource units act as the information reservoir and bath units as the heat
/// sink. Over a whole number of stream cycles the entropy balance reads
/// `β·Q_bath − erased = I + D + residual`, with the residual equal to minus
/// the system's entropy drift, which vanishes at the steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauerReport {
    /// Mean `β·Q` over bath collisions, per collision.
    pub beta_q: f64,
    /// Mean entropy removed from resource units, per collision.
    pub erased_entropy: f64,
    pub mutual_info: f64,
    pub relent: f64,
    pub residual: f64,
    /// Largest trace distance between system states one stream cycle apart
    /// inside the window.
    pub drift: f64,
    pub window: usize,
}

impl LandauerReport {
    /// `β·Q ≥ erased` up to `tol`.
    pub fn bound_holds(&self, tol: f64) -> bool {
        self.beta_q >= self.erased_entropy - tol
    }
}

pub fn landauer_report(traj: &Trajectory, cfg: &CollisionConfig, window: usize) -> Result<LandauerReport> {
    let period = cfg.streams.len();
    if window == 0 || !window.is_multiple_of(period) {
        return Err(Error::Config(format!(
            "window {window} must be a positive multiple of the stream cycle {period}"
        )));
    }
    let n = traj.records.len();
    if n < window + period {
        return Err(Error::Config(format!("trajectory of {n} steps is shorter than window {window} plus one cycle")));
    }
    let snaps = traj.snapshots.as_ref().ok_or(Error::MissingSnapshots)?;
    let mut drift: f64 = 0.0;
    for k in n + 1 - window..=n {
        drift = drift.max(trace_distance(&snaps[k], &snaps[k - period])?);
    }
    if !(drift < DRIFT_TOL) {
        return Err(Error::NotConverged { drift });
    }

    let base = cfg.log_base;
    let (mut beta_q, mut erased, mut info, mut relent) = (0.0, 0.0, 0.0, 0.0);
    for rec in &traj.records[n - window..] {
        info += rec.mutual_info;
        match record_exchange(rec, cfg)? {
            Exchange::Resource { d_s_anc } => erased -= d_s_anc,
            Exchange::Bath { beta, heat } => {
                beta_q += base.from_nats(beta * heat);
                relent += rec.relent_anc.unwrap_or(0.0);
            }
        }
    }
    let w = window as f64;
    let (beta_q, erased, info, relent) = (beta_q / w, erased / w, info / w, relent / w);
    Ok(LandauerReport {
        beta_q,
        erased_entropy: erased,
        mutual_info: info,
        relent,
        residual: beta_q - erased - info - relent,
        drift,
        window,
    })
}

/// Commutator norms (largest entry modulus) testing the detailed-balance
/// conditions of an interaction `v` on `system ⊗ unit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetailedBalance {
    /// `‖[H_S + H_E, V]‖`; zero means no switching work.
    pub local: f64,
    /// `‖[H_S − H_E, V]‖`.
    pub inverted: f64,
    /// `‖[H_glob + H_E, V_glob]‖` for a composite system.
    pub global: Option<f64>,
}

/// `global` carries the full composite-system Hamiltonian and the
/// interaction embedded on `composite ⊗ unit`.
pub fn detailed_balance_report(
    h_s: &ComplexMatrix,
    h_anc: &ComplexMatrix,
    v: &ComplexMatrix,
    global: Option<(&ComplexMatrix, &ComplexMatrix)>,
) -> Result<DetailedBalance> {
    let is = ComplexMatrix::identity(h_s.rows());
    let ie = ComplexMatrix::identity(h_anc.rows());
    let hs = kron(h_s, &ie);
    let he = kron(&is, h_anc);
    let local = commutator_norm(&(&hs + &he), v)?;
    let inverted = commutator_norm(&(&hs - &he), v)?;
    let global = match global {
        Some((hg, vg)) => {
            let h = &kron(hg, &ie) + &kron(&ComplexMatrix::identity(hg.rows()), h_anc);
            Some(commutator_norm(&h, vg)?)
        }
        None => None,
    };
    Ok(DetailedBalance { local, inverted, global })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fluxes {
    /// Mean heat into units per collision over the last window.
    pub q_rate: f64,
    /// Mean switching work per collision over the last window.
    pub w_rate: f64,
    /// Largest change of either rate against the preceding window.
    pub drift: f64,
    pub converged: bool,
}

/// Heat and work rates over the last `window` collisions. Needs two full
/// windows to judge convergence.
pub fn steady_state_fluxes(traj: &Trajectory, window: usize) -> Fluxes {
    let recs = &traj.records;
    let n = recs.len();
    let w = window.clamp(1, n.max(1));
    let mean = |rs: &[CollisionRecord]| {
        let k = rs.len().max(1) as f64;
        (
            rs.iter().map(|r| r.heat).sum::<f64>() / k,
            rs.iter().map(|r| r.work).sum::<f64>() / k,
        )
    };
    let (q_rate, w_rate) = mean(&recs[n.saturating_sub(w)..]);
    if window == 0 || n < 2 * window {
        return Fluxes { q_rate, w_rate, drift: f64::INFINITY, converged: false };
    }
    let (q0, w0) = mean(&recs[n - 2 * window..n - window]);
    let drift = (q_rate - q0).abs().max((w_rate - w0).abs());
    Fluxes { q_rate, w_rate, drift, converged: drift < DRIFT_TOL }
}

/// Largest energy extractable from `rho` by a unitary: `Tr[Hρ]` minus the
/// energy of the passive state with the same spectrum.
pub fn ergotropy(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    check_op(h, rho.dim())?;
    let mut pops = rho.eigenvalues();
    pops.sort_by(|a, b| b.total_cmp(a));
    let levels = crate::linalg::herm_eigvals(h)?;
    let passive: f64 = pops.iter().zip(&levels).map(|(p, e)| p * e).sum();
    Ok(rho.energy(h) - passive)
}

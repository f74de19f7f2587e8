//! The collision-model stepper.
//!
//! Each step runs, in order:
//!
//! 1. append a fresh unit of the next stream in its initial state,
//! 2. when memory is on, collide the carried unit with the fresh one
//!    (stochastic SWAP),
//! 3. collide the system with the fresh unit,
//! 4. partially erase system–environment correlations with `λ`,
//! 5. trace out the carried unit and carry the fresh one (memory on), or
//!    trace out the fresh unit (memory off).
//!
//! Two backends implement this. The windowed backend keeps only the live
//! window (system plus at most two units). The full backend keeps the whole
//! joint state of the system and every unit that has collided, and serves as
//! an oracle for the windowed one and as the source of joint states for the
//! revival bound.

mod channels;
mod config;

pub use channels::{
    apply_aa_collision, collision_unitary, erase_correlations, partial_swap_unitary,
    SystemChannel,
};
pub use config::{
    AaMode, AncillaStreamSpec, Backend, CollisionConfig, Interaction, StreamRole,
    DEFAULT_FACTOR_CAP,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{apply_local_unitary, ComplexMatrix, HilbertFactorization};
use crate::qstate::{
    mutual_information, relative_entropy, von_neumann_entropy, DensityMatrix,
};
use crate::thermo::{heat_to_ancilla, switching_work};
use channels::aa_collision_with_coin;

/// Eigenvalues of an intermediate state below this abort the run.
pub const INTEGRITY_FLOOR: f64 = -1e-8;

/// Per-collision ledger entry.
///
/// Energies are those of the system and of the colliding unit across the
/// system–unit collision. Entropies follow the exchange partition of the
/// step: without memory the system side is the system and the departing unit
/// is the one it just met; with ancilla–ancilla memory the system side is the
/// system together with the unit it carries forward, and the departing unit
/// is the one that leaves the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionRecord {
    /// 1-based collision index.
    pub step: usize,
    pub stream: usize,
    pub role: StreamRole,
    pub e_sys_before: f64,
    pub e_sys_after: f64,
    pub e_anc_before: f64,
    pub e_anc_after: f64,
    /// Energy that entered the colliding unit.
    pub heat: f64,
    /// Energy injected by switching the interaction on and off.
    pub work: f64,
    pub s_sys_before: f64,
    pub s_sys_after: f64,
    pub s_anc_before: f64,
    pub s_anc_after: f64,
    /// Mutual information between the two sides right after the collision.
    pub mutual_info: f64,
    /// `S(ρ'_E ‖ ρ_E)` against the unit's initial state, for bath units.
    pub relent_anc: Option<f64>,
    pub d_pair: Option<f64>,
}

impl CollisionRecord {
    pub fn d_e_sys(&self) -> f64 {
        self.e_sys_after - self.e_sys_before
    }

    pub fn d_s_sys(&self) -> f64 {
        self.s_sys_after - self.s_sys_before
    }

    pub fn d_s_anc(&self) -> f64 {
        self.s_anc_after - self.s_anc_before
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<CollisionRecord>,
    /// System state before the first step and after every step.
    pub snapshots: Option<Vec<DensityMatrix>>,
    /// Joint state after the last step (full backend only).
    pub final_joint: Option<DensityMatrix>,
}

/// States of the live window around one collision, all on the same window
/// factorization `[system, (carried), fresh]`.
struct StepStates<'a> {
    start: &'a DensityMatrix,
    fresh: &'a DensityMatrix,
    before: DensityMatrix,
    collided: DensityMatrix,
    end: DensityMatrix,
    dims: HilbertFactorization,
    carried: bool,
}

/// A validated configuration with its collision unitaries precomputed.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: CollisionConfig,
    unitaries: Vec<ComplexMatrix>,
}

impl Engine {
    pub fn new(cfg: CollisionConfig) -> Result<Self> {
        cfg.validate()?;
        let unitaries = (0..cfg.streams.len())
            .map(|k| collision_unitary(&cfg, k))
            .collect::<Result<_>>()?;
        Ok(Self { cfg, unitaries })
    }

    pub fn config(&self) -> &CollisionConfig {
        &self.cfg
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.rng_seed)
    }

    fn coin<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        // one coin per step in incoherent mode, used or not
        self.cfg.aa_mode == AaMode::Incoherent && rng.random::<f64>() < self.cfg.aa_swap_prob
    }

    /// Advances the live window by one collision. `state` is the system
    /// alone, or the system and its carried unit when memory is on.
    pub fn step_windowed<R: Rng + ?Sized>(
        &self,
        state: &DensityMatrix,
        step: usize,
        rng: &mut R,
    ) -> Result<(DensityMatrix, CollisionRecord)> {
        let cfg = &self.cfg;
        let ds = cfg.system_dim();
        let stream = cfg.stream_at(step);
        let spec = &cfg.streams[stream];
        let carried = state.dim() != ds;
        if carried && (!cfg.has_memory() || state.dim() != ds * spec.dim) {
            return Err(Error::Dimension(format!(
                "window state has dimension {}, expected {ds} or {} with memory",
                state.dim(),
                ds * spec.dim
            )));
        }
        let coin = self.coin(rng);

        let dims = if carried {
            HilbertFactorization::new(vec![ds, spec.dim, spec.dim])?
        } else {
            HilbertFactorization::new(vec![ds, spec.dim])?
        };
        let fresh = dims.len() - 1;
        let mut before = state.kron(&spec.init_state);
        if carried {
            before = aa_collision_with_coin(&before, &dims, (1, 2), cfg.aa_swap_prob, cfg.aa_mode, coin)?;
        }
        let collided = DensityMatrix::new_unchecked(apply_local_unitary(
            before.matrix(),
            &dims,
            &[0, fresh],
            &self.unitaries[stream],
        )?);
        let mut end = erase_correlations(&collided, &dims, cfg.erasure_lambda)?;
        end.sanitize();
        check_integrity(&end, step)?;

        let next = if cfg.has_memory() {
            end.partial_trace(&dims, &[0, fresh])?
        } else {
            end.partial_trace(&dims, &[0])?
        };
        let states = StepStates {
            start: state,
            fresh: &spec.init_state,
            before,
            collided,
            end,
            dims,
            carried,
        };
        let record = self.record(step, stream, &states)?;
        Ok((next, record))
    }

    fn record(&self, step: usize, stream: usize, st: &StepStates<'_>) -> Result<CollisionRecord> {
        let cfg = &self.cfg;
        let base = cfg.log_base;
        let spec = &cfg.streams[stream];
        let f = &st.dims;
        let fresh = f.len() - 1;
        let entropy = |rho: &DensityMatrix| von_neumann_entropy(rho, base);

        let sys_before = st.before.partial_trace(f, &[0])?;
        let sys_after = st.collided.partial_trace(f, &[0])?;
        let anc_before = st.before.partial_trace(f, &[fresh])?;
        let anc_after = st.collided.partial_trace(f, &[fresh])?;
        let heat = heat_to_ancilla(&st.before, &st.collided, f, &spec.hamiltonian)?;
        let work = switching_work(&st.before, &st.collided, f, &cfg.system_hamiltonian, &spec.hamiltonian)?;
        let s_fresh = entropy(st.fresh);

        let (s_sys_before, s_sys_after, s_anc_after, mutual_info) = if !cfg.has_memory() {
            let departing = st.end.partial_trace(f, &[fresh])?;
            (
                entropy(st.start),
                entropy(&st.end.partial_trace(f, &[0])?),
                entropy(&departing),
                mutual_information(&st.collided, f, &[0], base)?,
            )
        } else if st.carried {
            (
                entropy(st.start),
                entropy(&st.end.partial_trace(f, &[0, fresh])?),
                entropy(&st.end.partial_trace(f, &[1])?),
                mutual_information(&st.collided, f, &[0, fresh], base)?,
            )
        } else {
            // first step with memory: an idle unit in the initial state stands
            // in for the carried one and leaves untouched
            (entropy(st.start) + s_fresh, entropy(&st.end), s_fresh, 0.0)
        };

        let relent_anc = match spec.role {
            StreamRole::Bath => {
                let departing = st.end.partial_trace(f, &[fresh])?;
                Some(relative_entropy(&departing, st.fresh, base)?.value())
            }
            StreamRole::Resource => None,
        };

        Ok(CollisionRecord {
            step,
            stream,
            role: spec.role,
            e_sys_before: sys_before.energy(&cfg.system_hamiltonian),
            e_sys_after: sys_after.energy(&cfg.system_hamiltonian),
            e_anc_before: anc_before.energy(&spec.hamiltonian),
            e_anc_after: anc_after.energy(&spec.hamiltonian),
            heat,
            work,
            s_sys_before,
            s_sys_after,
            s_anc_before: s_fresh,
            s_anc_after,
            mutual_info,
            relent_anc,
            d_pair: None,
        })
    }

    /// Runs the configured number of steps on the configured backend.
    pub fn run(&self) -> Result<Trajectory> {
        match self.cfg.backend {
            Backend::Windowed => self.run_windowed(),
            Backend::Full => Ok(self.run_full(false)?.0),
        }
    }

    fn run_windowed(&self) -> Result<Trajectory> {
        let cfg = &self.cfg;
        let mut rng = self.rng();
        let mut state = cfg.system_init.clone();
        let mut records = Vec::with_capacity(cfg.n_steps);
        let mut snapshots = cfg.keep_snapshots.then(|| vec![cfg.system_init.clone()]);
        let sys_dims = HilbertFactorization::new(vec![cfg.system_dim(), cfg.streams[0].dim])?;
        for step in 1..=cfg.n_steps {
            let (next, record) = self.step_windowed(&state, step, &mut rng)?;
            state = next;
            records.push(record);
            if let Some(s) = snapshots.as_mut() {
                if state.dim() == cfg.system_dim() {
                    s.push(state.clone());
                } else {
                    s.push(state.partial_trace(&sys_dims, &[0])?);
                }
            }
        }
        Ok(Trajectory {
            records,
            snapshots,
            final_joint: None,
        })
    }

    /// Full-state evolution. With `history`, also returns the joint state
    /// before the first step and after every step.
    fn run_full(&self, history: bool) -> Result<(Trajectory, Option<Vec<DensityMatrix>>)> {
        let cfg = &self.cfg;
        if cfg.full_backend_factors() > cfg.factor_cap {
            return Err(Error::CapExceeded {
                factors: cfg.full_backend_factors(),
                dim: cfg.full_backend_dim(),
                cap: cfg.factor_cap,
            });
        }
        let mut rng = self.rng();
        let mut state = cfg.system_init.clone();
        let mut dims = vec![cfg.system_dim()];
        let mut records = Vec::with_capacity(cfg.n_steps);
        let mut snapshots = cfg.keep_snapshots.then(|| vec![cfg.system_init.clone()]);
        let mut joints = history.then(|| vec![state.clone()]);

        for step in 1..=cfg.n_steps {
            let stream = cfg.stream_at(step);
            let spec = &cfg.streams[stream];
            let coin = self.coin(&mut rng);
            let old_f = HilbertFactorization::new(dims.clone())?;
            let prev = (cfg.has_memory() && dims.len() > 1).then_some(dims.len() - 1);
            let start = match prev {
                Some(p) => state.partial_trace(&old_f, &[0, p])?,
                None if dims.len() > 1 => state.partial_trace(&old_f, &[0])?,
                None => state.clone(),
            };

            dims.push(spec.dim);
            let f = HilbertFactorization::new(dims.clone())?;
            let last = dims.len() - 1;
            let mut before = state.kron(&spec.init_state);
            if let Some(p) = prev {
                before = aa_collision_with_coin(&before, &f, (p, last), cfg.aa_swap_prob, cfg.aa_mode, coin)?;
            }
            let collided = DensityMatrix::new_unchecked(apply_local_unitary(
                before.matrix(),
                &f,
                &[0, last],
                &self.unitaries[stream],
            )?);
            let mut end = erase_correlations(&collided, &f, cfg.erasure_lambda)?;
            end.sanitize();

            let window: Vec<usize> = match prev {
                Some(p) => vec![0, p, last],
                None => vec![0, last],
            };
            let wdims = f.restrict(&window)?;
            let states = StepStates {
                start: &start,
                fresh: &spec.init_state,
                before: before.partial_trace(&f, &window)?,
                collided: collided.partial_trace(&f, &window)?,
                end: end.partial_trace(&f, &window)?,
                dims: wdims,
                carried: prev.is_some(),
            };
            check_integrity(&states.end, step)?;
            records.push(self.record(step, stream, &states)?);

            state = end;
            if let Some(s) = snapshots.as_mut() {
                s.push(state.partial_trace(&f, &[0])?);
            }
            if let Some(j) = joints.as_mut() {
                j.push(state.clone());
            }
        }
        Ok((
            Trajectory {
                records,
                snapshots,
                final_joint: Some(state),
            },
            joints,
        ))
    }
}

fn check_integrity(rho: &DensityMatrix, step: usize) -> Result<()> {
    let min = rho.eigenvalues().first().copied().unwrap_or(0.0);
    if min < INTEGRITY_FLOOR || !min.is_finite() {
        return Err(Error::Integrity { step, min_eig: min });
    }
    Ok(())
}

/// Single windowed step from a bare configuration.
pub fn step_windowed<R: Rng + ?Sized>(
    state: &DensityMatrix,
    cfg: &CollisionConfig,
    step: usize,
    rng: &mut R,
) -> Result<(DensityMatrix, CollisionRecord)> {
    Engine::new(cfg.clone())?.step_windowed(state, step, rng)
}

pub fn run(cfg: &CollisionConfig) -> Result<Trajectory> {
    Engine::new(cfg.clone())?.run()
}

/// Full-backend run that also returns the joint state before the first step
/// and after each step; entry `s` lives on `[system, unit 1, …, unit s]`.
pub fn run_with_joint_history(cfg: &CollisionConfig) -> Result<(Trajectory, Vec<DensityMatrix>)> {
    let mut cfg = cfg.clone();
    cfg.backend = Backend::Full;
    let (traj, joints) = Engine::new(cfg)?.run_full(true)?;
    Ok((traj, joints.unwrap_or_default()))
}

/// Factorization of the `s`-th joint state of a full-backend history.
pub fn joint_factorization(cfg: &CollisionConfig, s: usize) -> Result<HilbertFactorization> {
    let mut dims = vec![cfg.system_dim()];
    dims.extend((1..=s).map(|k| cfg.streams[cfg.stream_at(k)].dim));
    HilbertFactorization::new(dims)
}

/// Runs the same channel realization (shared seed) from two initial system
/// states and fills `d_pair` in both trajectories.
pub fn run_paired(
    cfg: &CollisionConfig,
    init_a: &DensityMatrix,
    init_b: &DensityMatrix,
) -> Result<(Trajectory, Trajectory)> {
    let mut ca = cfg.clone();
    ca.system_init = init_a.clone();
    ca.keep_snapshots = true;
    let mut cb = ca.clone();
    cb.system_init = init_b.clone();
    let (ta, tb) = rayon::join(|| run(&ca), || run(&cb));
    let (mut ta, mut tb) = (ta?, tb?);
    fill_pair_distance(&mut ta, &mut tb, cfg)?;
    Ok((ta, tb))
}

pub(crate) fn fill_pair_distance(ta: &mut Trajectory, tb: &mut Trajectory, cfg: &CollisionConfig) -> Result<()> {
    let sa = ta.snapshots.as_ref().ok_or(Error::MissingSnapshots)?;
    let sb = tb.snapshots.as_ref().ok_or(Error::MissingSnapshots)?;
    let d: Vec<f64> = sa
        .iter()
        .zip(sb)
        .skip(1)
        .map(|(a, b)| cfg.metric.distance(a, b))
        .collect::<Result<_>>()?;
    for (k, dk) in d.into_iter().enumerate() {
        ta.records[k].d_pair = Some(dk);
        tb.records[k].d_pair = Some(dk);
    }
    Ok(())
}

#[cfg(test)]
mod tests;

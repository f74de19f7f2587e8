use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, TOL_HERM};
use crate::qstate::{thermal_state, trace_distance, DensityMatrix, LogBase, Metric};

/// Default limit on Hilbert factors (system + ancillas) in the full backend.
pub const DEFAULT_FACTOR_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamRole {
    /// Units whose entropy change enters the entropy balance directly.
    Resource,
    /// Thermal units acting as a heat bath: they enter the balance through
    /// `β·Q`.
    Bath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AaMode {
    #[default]
    Off,
    Coherent,
    Incoherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Windowed,
    Full,
}

/// How the system couples to a unit during one collision.
#[derive(Debug, Clone, PartialEq)]
pub enum Interaction {
    /// Total collision Hamiltonian `H_S + H_E + g·V`.
    Hamiltonian { v: ComplexMatrix, g: f64 },
    /// Free evolution followed by `exp(iθ·SWAP)`; equal to the Hamiltonian
    /// route with `V = -SWAP`, `g = θ/τ` whenever SWAP commutes with the
    /// bare Hamiltonian.
    PartialSwap { theta: f64 },
}

#[derive(Debug, Clone)]
pub struct AncillaStreamSpec {
    pub dim: usize,
    pub hamiltonian: ComplexMatrix,
    pub init_state: DensityMatrix,
    pub role: StreamRole,
    /// Present iff `init_state` is the thermal state of `hamiltonian`.
    pub beta: Option<f64>,
    pub interaction: Interaction,
}

impl AncillaStreamSpec {
    /// Stream of units prepared in `thermal_state(hamiltonian, beta)`.
    pub fn thermal(
        hamiltonian: ComplexMatrix,
        beta: f64,
        role: StreamRole,
        interaction: Interaction,
    ) -> Result<Self> {
        let init_state = thermal_state(&hamiltonian, beta)?;
        Ok(Self {
            dim: hamiltonian.rows(),
            hamiltonian,
            init_state,
            role,
            beta: Some(beta),
            interaction,
        })
    }

    /// Resource stream of units in an arbitrary state.
    pub fn resource(
        hamiltonian: ComplexMatrix,
        init_state: DensityMatrix,
        interaction: Interaction,
    ) -> Self {
        Self {
            dim: hamiltonian.rows(),
            hamiltonian,
            init_state,
            role: StreamRole::Resource,
            beta: None,
            interaction,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CollisionConfig {
    pub system_hamiltonian: ComplexMatrix,
    pub system_init: DensityMatrix,
    /// Streams are visited round-robin, one collision per step.
    pub streams: Vec<AncillaStreamSpec>,
    pub tau: f64,
    pub n_steps: usize,
    pub aa_swap_prob: f64,
    pub aa_mode: AaMode,
    pub erasure_lambda: f64,
    pub rng_seed: u64,
    pub backend: Backend,
    pub factor_cap: usize,
    pub log_base: LogBase,
    /// Metric for paired-trajectory distinguishability.
    pub metric: Metric,
    pub keep_snapshots: bool,
}

impl CollisionConfig {
    /// Single-stream configuration with memoryless defaults.
    pub fn new(
        system_hamiltonian: ComplexMatrix,
        system_init: DensityMatrix,
        streams: Vec<AncillaStreamSpec>,
        tau: f64,
        n_steps: usize,
    ) -> Self {
        Self {
            system_hamiltonian,
            system_init,
            streams,
            tau,
            n_steps,
            aa_swap_prob: 0.0,
            aa_mode: AaMode::Off,
            erasure_lambda: 1.0,
            rng_seed: 0,
            backend: Backend::Windowed,
            factor_cap: DEFAULT_FACTOR_CAP,
            log_base: LogBase::Two,
            metric: Metric::Trace,
            keep_snapshots: true,
        }
    }

    pub fn system_dim(&self) -> usize {
        self.system_hamiltonian.rows()
    }

    /// True when ancillas carry memory from one collision to the next.
    pub fn has_memory(&self) -> bool {
        self.aa_mode != AaMode::Off
    }

    /// Stream visited at 1-based step `step`.
    pub fn stream_at(&self, step: usize) -> usize {
        (step - 1) % self.streams.len()
    }

    pub fn full_backend_factors(&self) -> usize {
        1 + self.n_steps
    }

    pub fn full_backend_dim(&self) -> usize {
        (1..=self.n_steps)
            .map(|s| self.streams[self.stream_at(s)].dim)
            .fold(self.system_dim(), |acc, d| acc.saturating_mul(d))
    }

    pub fn validate(&self) -> Result<()> {
        let ds = self.system_dim();
        hermitian("system Hamiltonian", &self.system_hamiltonian)?;
        if ds < 2 {
            return Err(Error::Config("system dimension must be at least 2".into()));
        }
        if self.system_init.dim() != ds {
            return Err(Error::Config(format!(
                "initial system state has dimension {}, Hamiltonian {ds}",
                self.system_init.dim()
            )));
        }
        if self.streams.is_empty() {
            return Err(Error::Config("at least one ancilla stream is required".into()));
        }
        for (k, s) in self.streams.iter().enumerate() {
            validate_stream(k, s, ds)?;
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("collision time must be > 0, got {}", self.tau)));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.aa_swap_prob) {
            return Err(Error::Config(format!(
                "AA swap probability must lie in [0, 1], got {}",
                self.aa_swap_prob
            )));
        }
        if !(0.0..=1.0).contains(&self.erasure_lambda) {
            return Err(Error::Config(format!(
                "erasure lambda must lie in [0, 1], got {}",
                self.erasure_lambda
            )));
        }
        if self.has_memory() {
            if self.streams.len() != 1 {
                return Err(Error::Config(
                    "ancilla-ancilla collisions need exactly one ancilla stream".into(),
                ));
            }
            if self.streams[0].role == StreamRole::Bath {
                return Err(Error::Config(
                    "bath units must arrive uncorrelated; use a resource stream with ancilla-ancilla collisions".into(),
                ));
            }
        }
        if self.backend == Backend::Full && self.full_backend_factors() > self.factor_cap {
            return Err(Error::CapExceeded {
                factors: self.full_backend_factors(),
                dim: self.full_backend_dim(),
                cap: self.factor_cap,
            });
        }
        Ok(())
    }
}

fn hermitian(what: &str, m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Config(format!("{what} must be square")));
    }
    let dev = m.hermiticity_defect();
    if dev > TOL_HERM {
        return Err(Error::Config(format!("{what} is not Hermitian (defect {dev:e})")));
    }
    Ok(())
}

fn validate_stream(k: usize, s: &AncillaStreamSpec, ds: usize) -> Result<()> {
    hermitian(&format!("stream {k} Hamiltonian"), &s.hamiltonian)?;
    if s.dim < 2 || s.hamiltonian.rows() != s.dim || s.init_state.dim() != s.dim {
        return Err(Error::Config(format!(
            "stream {k}: dim {}, Hamiltonian {}x{}, initial state {}",
            s.dim,
            s.hamiltonian.rows(),
            s.hamiltonian.cols(),
            s.init_state.dim()
        )));
    }
    match s.beta {
        Some(beta) => {
            let th = thermal_state(&s.hamiltonian, beta)?;
            let d = trace_distance(&th, &s.init_state)?;
            if d > 1e-10 {
                return Err(Error::Config(format!(
                    "stream {k}: initial state is {d:e} away from the thermal state at beta {beta}"
                )));
            }
        }
        None if s.role == StreamRole::Bath => {
            return Err(Error::Config(format!("stream {k}: bath streams need a temperature")));
        }
        None => {}
    }
    match &s.interaction {
        Interaction::Hamiltonian { v, g } => {
            hermitian(&format!("stream {k} interaction"), v)?;
            if v.rows() != ds * s.dim {
                return Err(Error::Config(format!(
                    "stream {k}: interaction is {}x{}, expected {n}x{n}",
                    v.rows(),
                    v.cols(),
                    n = ds * s.dim
                )));
            }
            if !g.is_finite() {
                return Err(Error::Config(format!("stream {k}: coupling must be finite")));
            }
        }
        Interaction::PartialSwap { theta } => {
            if s.dim != ds {
                return Err(Error::Config(format!(
                    "stream {k}: partial SWAP needs equal dimensions (system {ds}, ancilla {})",
                    s.dim
                )));
            }
            if !theta.is_finite() {
                return Err(Error::Config(format!("stream {k}: swap angle must be finite")));
            }
        }
    }
    Ok(())
}

//! Collision unitaries and the auxiliary maps applied between collisions.

use rand::Rng;

use super::config::{AaMode, CollisionConfig, Interaction};
use crate::error::{Error, Result};
use crate::linalg::{
    apply_local_unitary, kron, partial_trace, pauli, unitary_from_hamiltonian, ComplexMatrix,
    HilbertFactorization, C64,
};
use crate::qstate::DensityMatrix;

/// `cos θ · 1 + i sin θ · SWAP` on `dim ⊗ dim`, i.e. `exp(iθ·SWAP)`.
pub fn partial_swap_unitary(dim: usize, theta: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(dim * dim).scale_re(theta.cos());
    let sw = pauli::swap(dim).scale(C64::new(0.0, theta.sin()));
    &id + &sw
}

/// Unitary for one collision between the system and a unit of `stream`,
/// acting on `system ⊗ ancilla`.
pub fn collision_unitary(cfg: &CollisionConfig, stream: usize) -> Result<ComplexMatrix> {
    let s = cfg
        .streams
        .get(stream)
        .ok_or_else(|| Error::Config(format!("no stream {stream}")))?;
    let ds = cfg.system_dim();
    let h0 = &kron(&cfg.system_hamiltonian, &ComplexMatrix::identity(s.dim))
        + &kron(&ComplexMatrix::identity(ds), &s.hamiltonian);
    match &s.interaction {
        Interaction::Hamiltonian { v, g } => {
            if v.rows() != ds * s.dim || !v.is_square() {
                return Err(Error::Dimension(format!(
                    "interaction is {}x{}, system ⊗ ancilla is {}",
                    v.rows(),
                    v.cols(),
                    ds * s.dim
                )));
            }
            unitary_from_hamiltonian(&(&h0 + &v.scale_re(*g)), cfg.tau)
        }
        Interaction::PartialSwap { theta } => {
            if s.dim != ds {
                return Err(Error::Dimension("partial SWAP needs equal dimensions".into()));
            }
            let free = unitary_from_hamiltonian(&h0, cfg.tau)?;
            Ok(&free * &partial_swap_unitary(ds, *theta))
        }
    }
}

/// `λ·ρ + (1−λ)·ρ_S ⊗ ρ_rest`, with factor 0 as the system and every other
/// factor in the rest.
pub fn erase_correlations(
    joint: &DensityMatrix,
    f: &HilbertFactorization,
    lambda: f64,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Config(format!("erasure lambda must lie in [0, 1], got {lambda}")));
    }
    if lambda == 1.0 || f.len() < 2 {
        return Ok(joint.clone());
    }
    let rest: Vec<usize> = (1..f.len()).collect();
    let rs = partial_trace(joint.matrix(), f, &[0])?;
    let rr = partial_trace(joint.matrix(), f, &rest)?;
    let product = kron(&rs, &rr);
    Ok(DensityMatrix::new_unchecked(
        &joint.matrix().scale_re(lambda) + &product.scale_re(1.0 - lambda),
    ))
}

/// Stochastic SWAP between the ancilla factors `pair`.
///
/// Incoherent mode flips one coin from `rng` and applies the SWAP with
/// probability `p`; coherent mode applies `p·SρS + (1−p)·ρ`.
pub fn apply_aa_collision<R: Rng + ?Sized>(
    joint: &DensityMatrix,
    f: &HilbertFactorization,
    pair: (usize, usize),
    p: f64,
    mode: AaMode,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let coin = match mode {
        AaMode::Incoherent => rng.random::<f64>() < p,
        _ => false,
    };
    aa_collision_with_coin(joint, f, pair, p, mode, coin)
}

pub(crate) fn aa_collision_with_coin(
    joint: &DensityMatrix,
    f: &HilbertFactorization,
    (a, b): (usize, usize),
    p: f64,
    mode: AaMode,
    coin: bool,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("swap probability must lie in [0, 1], got {p}")));
    }
    let dims = f.dims();
    if a == b || a == 0 || b == 0 || a >= dims.len() || b >= dims.len() || dims[a] != dims[b] {
        return Err(Error::Dimension(format!(
            "ancilla pair ({a}, {b}) is not two equal-dimension ancilla factors of {dims:?}"
        )));
    }
    let sw = pauli::swap(dims[a]);
    let swapped = || apply_local_unitary(joint.matrix(), f, &[a, b], &sw);
    let out = match mode {
        AaMode::Off => return Ok(joint.clone()),
        AaMode::Incoherent if coin => swapped()?,
        AaMode::Incoherent => return Ok(joint.clone()),
        AaMode::Coherent if p == 0.0 => return Ok(joint.clone()),
        AaMode::Coherent if p == 1.0 => swapped()?,
        AaMode::Coherent => &swapped()?.scale_re(p) + &joint.matrix().scale_re(1.0 - p),
    };
    Ok(DensityMatrix::new_unchecked(out))
}

/// The memoryless single-collision channel `ρ ↦ Tr_E U(ρ ⊗ ξ)U†` for one
/// stream.
#[derive(Debug, Clone)]
pub struct SystemChannel {
    unitary: ComplexMatrix,
    ancilla: DensityMatrix,
    factors: HilbertFactorization,
}

impl SystemChannel {
    pub fn new(cfg: &CollisionConfig, stream: usize) -> Result<Self> {
        let unitary = collision_unitary(cfg, stream)?;
        let s = &cfg.streams[stream];
        Ok(Self {
            unitary,
            ancilla: s.init_state.clone(),
            factors: HilbertFactorization::new(vec![cfg.system_dim(), s.dim])?,
        })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = rho.kron(&self.ancilla);
        let out = apply_local_unitary(joint.matrix(), &self.factors, &[0, 1], &self.unitary)?;
        Ok(DensityMatrix::new_unchecked(partial_trace(&out, &self.factors, &[0])?))
    }
}

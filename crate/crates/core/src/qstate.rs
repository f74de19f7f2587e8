//! Density matrices, entropies and distinguishability metrics.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, herm_eigvals, kron, partial_trace, ComplexMatrix, HilbertFactorization, C64, TOL_HERM,
};

/// Eigenvalues in `[-EIG_CLAMP, 0)` are treated as rounding noise and set to zero.
pub const EIG_CLAMP: f64 = 1e-10;
/// Eigenvalues of the reference state below this are outside its support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Weight of the first argument on the reference's null space that counts
/// as a support violation.
const SUPPORT_WEIGHT: f64 = 1e-10;
/// Divergences (nats) at or below this are indistinguishable from rounding.
const JS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    /// Converts a quantity measured in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Two => nats / LN_2,
            LogBase::E => nats,
        }
    }

    pub fn ln_unit(self) -> f64 {
        match self {
            LogBase::Two => LN_2,
            LogBase::E => 1.0,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogBase::Two => f.write_str("2"),
            LogBase::E => f.write_str("e"),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(format!("log base must be 2 or e, got {other:?}")),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
///
/// Validation happens once, in [`DensityMatrix::new`]. States produced by
/// the engine's inner loops skip it; build with the `strict` feature to
/// revalidate those as well.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermiticity_defect();
        if dev > TOL_HERM {
            return Err(Error::InvalidState(format!("not Hermitian (defect {dev:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = herm_eigvals(&matrix)?.first().copied().unwrap_or(0.0);
        if min < -EIG_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        if cfg!(feature = "strict") {
            return Self::new(matrix).expect("strict validation of an internal state");
        }
        Self { matrix }
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector must be nonzero and finite".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::new_unchecked(ComplexMatrix::outer(&v, &v)))
    }

    /// Computational basis projector `|k><k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidState(format!("basis index {k} >= dimension {dim}")));
        }
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Ok(Self::new_unchecked(ComplexMatrix::from_real_diag(&diag)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
    }

    /// Qubit state `(1 + r·σ)/2`; requires `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + 1e-12 || !len.is_finite() {
            return Err(Error::InvalidState(format!("Bloch vector length {len} > 1")));
        }
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new((1.0 + r[2]) / 2.0, 0.0), C64::new(r[0] / 2.0, -r[1] / 2.0)],
            vec![C64::new(r[0] / 2.0, r[1] / 2.0), C64::new((1.0 - r[2]) / 2.0, 0.0)],
        ])?;
        Ok(Self::new_unchecked(m))
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let m = &self.matrix;
        Some([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eigvals(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    pub fn energy(&self, h: &ComplexMatrix) -> f64 {
        h.expectation(&self.matrix)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::new_unchecked(kron(&self.matrix, &other.matrix))
    }

    pub fn partial_trace(&self, f: &HilbertFactorization, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(Self::new_unchecked(partial_trace(&self.matrix, f, keep)?))
    }

    /// `w·a + (1-w)·b`.
    pub fn mix(a: &DensityMatrix, b: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        same_dim(a, b)?;
        Ok(Self::new_unchecked(&a.matrix.scale_re(w) + &b.matrix.scale_re(1.0 - w)))
    }

    /// Hermitizes and renormalizes the trace in place.
    pub(crate) fn sanitize(&mut self) {
        let h = self.matrix.hermitian_part();
        let tr = h.trace().re;
        self.matrix = h.scale_re(1.0 / tr);
    }
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "states of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `exp(-βh) / Tr exp(-βh)`, shifted by the smallest eigenvalue so large β
/// cannot overflow.
pub fn thermal_state(h: &ComplexMatrix, beta: f64) -> Result<DensityMatrix> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Config(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    let eig = herm_eig(h)?;
    let e0 = eig.values[0];
    let weights: Vec<f64> = eig.values.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let n = weights.len();
    let v = &eig.vectors;
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * v[(j, k)].conj() * (weights[k] / z))
            .sum()
    });
    Ok(DensityMatrix::new_unchecked(m.hermitian_part()))
}

/// Entropy of a spectrum, in nats, with `0 log 0 = 0`.
fn spectrum_entropy_nats(eigs: &[f64]) -> f64 {
    eigs.iter()
        .map(|&l| if l > 0.0 { -l * l.ln() } else { 0.0 })
        .sum()
}

fn entropy_nats(rho: &DensityMatrix) -> f64 {
    spectrum_entropy_nats(&rho.eigenvalues())
}

pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    base.from_nats(entropy_nats(rho))
}

pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let diff = &rho.matrix - &sigma.matrix;
    let eigs = herm_eigvals(&diff.hermitian_part())?;
    Ok(0.5 * eigs.iter().map(|l| l.abs()).sum::<f64>())
}

/// Quantum relative entropy; a support violation is reported separately
/// from a finite value rather than as a silent infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelativeEntropy {
    Finite(f64),
    SupportViolation,
}

impl RelativeEntropy {
    /// Numeric value, `+∞` for a support violation.
    pub fn value(self) -> f64 {
        match self {
            RelativeEntropy::Finite(v) => v,
            RelativeEntropy::SupportViolation => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RelativeEntropy::Finite(_))
    }
}

/// `S(ρ‖σ) = Tr ρ(log ρ − log σ)`.
pub fn relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    base: LogBase,
) -> Result<RelativeEntropy> {
    same_dim(rho, sigma)?;
    let er = herm_eigvals(&rho.matrix)?;
    let es = herm_eig(&sigma.matrix)?;
    let n = rho.dim();
    let w = &es.vectors;
    let mut cross = 0.0;
    for k in 0..n {
        // weight of ρ along σ's k-th eigenvector
        let mut weight = C64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..n {
                row += rho.matrix[(i, j)] * w[(j, k)];
            }
            weight += w[(i, k)].conj() * row;
        }
        let mu = es.values[k];
        if mu < SUPPORT_CUTOFF {
            if weight.re > SUPPORT_WEIGHT {
                return Ok(RelativeEntropy::SupportViolation);
            }
            continue;
        }
        cross += weight.re * mu.ln();
    }
    let neg_entropy = -spectrum_entropy_nats(&er);
    let d = (neg_entropy - cross).max(0.0);
    Ok(RelativeEntropy::Finite(base.from_nats(d)))
}

/// Square root of the quantum Jensen-Shannon divergence, in bits, so the
/// value lies in `[0, 1]`.
///
/// `S(ρ‖m) + S(σ‖m) = 2 S(m) − S(ρ) − S(σ)` for `m = (ρ+σ)/2`, so only the
/// three spectra are needed.
pub fn js_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let mid = (&rho.matrix + &sigma.matrix).scale_re(0.5);
    let sm = spectrum_entropy_nats(&herm_eigvals(&mid)?);
    let divergence = sm - 0.5 * (entropy_nats(rho) + entropy_nats(sigma));
    // entropies carry ~1e-16 rounding each; the square root would blow that
    // up to ~1e-8 for (nearly) identical arguments
    if divergence <= JS_FLOOR {
        return Ok(0.0);
    }
    Ok((divergence / LN_2).sqrt())
}

/// `S(ρ_A) + S(ρ_B) − S(ρ_AB)` for the cut `A = cut`, `B` = remaining factors.
pub fn mutual_information(
    rho_ab: &DensityMatrix,
    f: &HilbertFactorization,
    cut: &[usize],
    base: LogBase,
) -> Result<f64> {
    let (a, b) = bipartition(f, cut)?;
    let ra = rho_ab.partial_trace(f, &a)?;
    let rb = rho_ab.partial_trace(f, &b)?;
    let i = entropy_nats(&ra) + entropy_nats(&rb) - entropy_nats(rho_ab);
    Ok(base.from_nats(i))
}

/// Splits the factor indices into `cut` and its complement; both must be
/// nonempty.
pub(crate) fn bipartition(f: &HilbertFactorization, cut: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut a = cut.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.iter().any(|&k| k >= f.len()) {
        return Err(Error::Dimension(format!("cut {cut:?} out of range for {} factors", f.len())));
    }
    let b: Vec<usize> = (0..f.len()).filter(|k| !a.contains(k)).collect();
    if a.is_empty() || b.is_empty() {
        return Err(Error::Dimension(format!("cut {cut:?} is not a proper bipartition")));
    }
    Ok((a, b))
}

/// Distinguishability quantifier used along paired trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Trace,
    JensenShannon,
}

impl Metric {
    pub fn distance(self, a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
        match self {
            Metric::Trace => trace_distance(a, b),
            Metric::JensenShannon => js_distance(a, b),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::{pauli, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_state(rng: &mut impl Rng, n: usize) -> DensityMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.scale_re(1.0 / tr).hermitian_part()).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.5, -0.5])).is_err());
        let nh = ComplexMatrix::from_rows(&[vec![C64::new(0.5, 0.0), ONE], vec![ZERO, C64::new(0.5, 0.0)]]).unwrap();
        assert!(DensityMatrix::new(nh).is_err());
        assert!(DensityMatrix::from_bloch([0.0, 0.0, 1.1]).is_err());
        let r = [0.3, -0.2, 0.5];
        let b = DensityMatrix::from_bloch(r).unwrap().bloch().unwrap();
        for k in 0..3 {
            assert!((b[k] - r[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn thermal_state_examples() {
        let th = thermal_state(&pauli::z(), 0.0).unwrap();
        assert!(th.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);

        // e^{∓1} / (e^{-1} + e^{1})
        let th = thermal_state(&pauli::z(), 1.0).unwrap();
        let p_up = (-1f64).exp() / ((-1f64).exp() + 1f64.exp());
        assert!((th.population(0) - p_up).abs() < 1e-14);
        assert!((th.population(0) - 0.119_202_922_022_117_6).abs() < 1e-12);
        assert!((th.population(1) - 0.880_797_077_977_882_4).abs() < 1e-12);

        let th = thermal_state(&pauli::z(), 50.0).unwrap();
        assert!(th.matrix().max_abs_diff(&ComplexMatrix::from_real_diag(&[0.0, 1.0])) < 1e-10);

        assert!(thermal_state(&pauli::z(), -1.0).is_err());
        assert!(thermal_state(&pauli::z(), f64::NAN).is_err());
    }

    #[test]
    fn thermal_state_commutes_with_hamiltonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 5] {
            let h = random_state(&mut rng, n).into_matrix().scale_re(4.0);
            let th = thermal_state(&h, 0.8).unwrap();
            let c = crate::linalg::commutator_norm(th.matrix(), &h).unwrap();
            assert!(c < 1e-10);
        }
    }

    #[test]
    fn trace_distance_examples() {
        let z0 = DensityMatrix::basis(2, 0).unwrap();
        let z1 = DensityMatrix::basis(2, 1).unwrap();
        assert_eq!(trace_distance(&z0, &z0).unwrap(), 0.0);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        let a = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.75, 0.25])).unwrap();
        let mm = DensityMatrix::maximally_mixed(2);
        assert!((trace_distance(&a, &mm).unwrap() - 0.25).abs() < 1e-15);
        assert!(trace_distance(&a, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = random_state(&mut rng, 3);
        assert!(relative_entropy(&r, &r, LogBase::E).unwrap().value().abs() < 1e-10);

        let z0 = DensityMatrix::basis(2, 0).unwrap();
        let z1 = DensityMatrix::basis(2, 1).unwrap();
        let mm = DensityMatrix::maximally_mixed(2);
        let d = relative_entropy(&z0, &mm, LogBase::E).unwrap().value();
        assert!((d - LN_2).abs() < 1e-14);
        let d = relative_entropy(&z0, &mm, LogBase::Two).unwrap().value();
        assert!((d - 1.0).abs() < 1e-14);
        let v = relative_entropy(&z0, &z1, LogBase::E).unwrap();
        assert_eq!(v, RelativeEntropy::SupportViolation);
        assert_eq!(v.value(), f64::INFINITY);
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&DensityMatrix::basis(3, 1).unwrap(), LogBase::E).abs() < 1e-14);
        let mm = DensityMatrix::maximally_mixed(2);
        assert!((von_neumann_entropy(&mm, LogBase::E) - LN_2).abs() < 1e-14);
        assert!((von_neumann_entropy(&mm, LogBase::Two) - 1.0).abs() < 1e-14);

        let th = thermal_state(&pauli::z(), 1.0).unwrap();
        let p = 0.880_797_077_977_882_4_f64;
        let binary = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        assert!((von_neumann_entropy(&th, LogBase::E) - binary).abs() < 1e-12);
    }

    /// Relative-entropy route: `(1/√2)·[S(ρ‖m) + S(σ‖m)]^{1/2}` in bits.
    fn js_via_relative_entropy(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        let m = DensityMatrix::mix(a, b, 0.5).unwrap();
        let s1 = relative_entropy(a, &m, LogBase::Two).unwrap().value();
        let s2 = relative_entropy(b, &m, LogBase::Two).unwrap().value();
        ((s1 + s2) / 2.0).sqrt()
    }

    #[test]
    fn js_distance_examples() {
        let z0 = DensityMatrix::basis(2, 0).unwrap();
        let z1 = DensityMatrix::basis(2, 1).unwrap();
        assert_eq!(js_distance(&z0, &z0).unwrap(), 0.0);
        assert!((js_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-14);
        assert!((js_via_relative_entropy(&z0, &z1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn js_distance_matches_relative_entropy_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [2, 3, 4] {
            for _ in 0..20 {
                let a = random_state(&mut rng, n);
                let b = random_state(&mut rng, n);
                let fast = js_distance(&a, &b).unwrap();
                let slow = js_via_relative_entropy(&a, &b);
                assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
                assert!((0.0..=1.0 + 1e-12).contains(&fast));
            }
        }
    }

    #[test]
    fn metrics_triangle_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let a = random_state(&mut rng, 2);
            let b = random_state(&mut rng, 2);
            let c = random_state(&mut rng, 2);
            for m in [Metric::Trace, Metric::JensenShannon] {
                let ab = m.distance(&a, &b).unwrap();
                let bc = m.distance(&b, &c).unwrap();
                let ac = m.distance(&a, &c).unwrap();
                assert!(ac <= ab + bc + 1e-10, "{m:?}");
                assert!((ab - m.distance(&b, &a).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mutual_information_examples() {
        let f = HilbertFactorization::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let prod = random_state(&mut rng, 2).kron(&random_state(&mut rng, 2));
        assert!(mutual_information(&prod, &f, &[0], LogBase::E).unwrap().abs() < 1e-10);

        let s = 1.0 / 2f64.sqrt();
        let bell = DensityMatrix::pure(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
        let i = mutual_information(&bell, &f, &[0], LogBase::E).unwrap();
        assert!((i - 2.0 * LN_2).abs() < 1e-12);
        assert!(mutual_information(&bell, &f, &[0, 1], LogBase::E).is_err());
        assert!(mutual_information(&bell, &f, &[], LogBase::E).is_err());
    }

    #[test]
    fn mutual_information_after_partial_swap_matches_entropy_arithmetic() {
        // partial SWAP at θ = π/4 on |0><0| ⊗ thermal(σz, 1), built by hand
        let theta = std::f64::consts::FRAC_PI_4;
        let u = &ComplexMatrix::identity(4).scale_re(theta.cos())
            + &pauli::swap(2).scale(C64::new(0.0, theta.sin()));
        let rho = DensityMatrix::basis(2, 0).unwrap().kron(&thermal_state(&pauli::z(), 1.0).unwrap());
        let out = DensityMatrix::new((&(&u * rho.matrix()) * &u.adjoint()).hermitian_part()).unwrap();
        let f = HilbertFactorization::new(vec![2, 2]).unwrap();

        // independent entropies from explicit 2x2 blocks
        let m = out.matrix();
        let ra = ComplexMatrix::from_fn(2, 2, |i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)]);
        let rb = ComplexMatrix::from_fn(2, 2, |i, j| m[(i, j)] + m[(2 + i, 2 + j)]);
        let h2 = |x: &ComplexMatrix| {
            let tr = x.trace().re;
            let det = (x[(0, 0)] * x[(1, 1)] - x[(0, 1)] * x[(1, 0)]).re;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            [tr / 2.0 + disc, tr / 2.0 - disc]
                .iter()
                .map(|&l: &f64| if l > 0.0 { -l * l.ln() } else { 0.0 })
                .sum::<f64>()
        };
        // joint is unitarily related to the product input
        let joint = entropy_nats(&rho);
        let oracle = h2(&ra) + h2(&rb) - joint;
        let i = mutual_information(&out, &f, &[0], LogBase::E).unwrap();
        assert!((i - oracle).abs() < 1e-10, "{i} vs {oracle}");
        assert!(i > 1e-3);
    }

    #[test]
    fn mutual_information_local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let f = HilbertFactorization::new(vec![2, 3]).unwrap();
        for _ in 0..10 {
            let rho = random_state(&mut rng, 6);
            let ha = random_state(&mut rng, 2).into_matrix();
            let hb = random_state(&mut rng, 3).into_matrix();
            let u = kron(
                &crate::linalg::unitary_from_hamiltonian(&ha, 2.0).unwrap(),
                &crate::linalg::unitary_from_hamiltonian(&hb, 1.3).unwrap(),
            );
            let out = DensityMatrix::new((&(&u * rho.matrix()) * &u.adjoint()).hermitian_part()).unwrap();
            let i0 = mutual_information(&rho, &f, &[0], LogBase::Two).unwrap();
            let i1 = mutual_information(&out, &f, &[0], LogBase::Two).unwrap();
            assert!((i0 - i1).abs() < 1e-9);
        }
    }
}

#![allow(dead_code)]

use cmsim::linalg::{ComplexMatrix, C64};
use cmsim::qstate::DensityMatrix;
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).hermitian_part()
}

/// `AA†/Tr` for a Ginibre `A`; full rank almost surely.
pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> DensityMatrix {
    let a = random_matrix(rng, n);
    let m = &a * &a.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.scale_re(1.0 / t)).expect("Ginibre state is valid")
}

/// Pure state from a random unit vector.
pub fn random_pure<R: Rng>(rng: &mut R, n: usize) -> DensityMatrix {
    let v: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
    DensityMatrix::pure(&v).expect("unit vector")
}

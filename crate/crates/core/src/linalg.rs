//! Dense complex matrix kernel.
//!
//! Everything in the simulator is a small dense operator: system plus a
//! handful of ancilla factors, never more than about a thousand dimensions.
//! Storage is row-major. Multi-factor spaces are ordered with factor 0 as
//! the system and later ancillas following it, and `kron` composes left to
//! right in that order.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute, max-entry tolerance for Hermiticity checks.
pub const TOL_HERM: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails when the entry count
    /// does not match or any entry is non-finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Dimension("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Outer product |a><b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|h - h^dagger|`; zero for exactly Hermitian input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Real expectation value `Tr[self · rho]` for Hermitian `self`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        assert_eq!(self.rows, rho.cols);
        assert_eq!(self.cols, rho.rows);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * rho[(k, i)];
            }
        }
        acc.re
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertFactorization {
    dims: Vec<usize>,
}

impl HilbertFactorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension("factorization needs at least one factor".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Dimension(format!("subsystem dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Factorization with `dim` appended as the last factor.
    pub fn with_factor(&self, dim: usize) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.push(dim);
        Self::new(dims)
    }

    /// The factorization restricted to `keep` (sorted ascending).
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let keep = normalize_subset(keep, self.len())?;
        Self::new(keep.iter().map(|&k| self.dims[k]).collect())
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total_dim() {
            return Err(Error::Dimension(format!(
                "operator is {}x{}, factorization {:?} needs {}",
                m.rows(),
                m.cols(),
                self.dims,
                self.total_dim()
            )));
        }
        Ok(())
    }

    /// Splits every flat index into (index over `sel`, index over the rest)
    /// and groups flat indices by the rest index: `groups[rest][local]`.
    fn groups(&self, sel: &[usize]) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let rest: Vec<usize> = (0..n).filter(|k| !sel.contains(k)).collect();
        let local_dim: usize = sel.iter().map(|&k| self.dims[k]).product();
        let rest_dim: usize = rest.iter().map(|&k| self.dims[k]).product();

        let mut groups = vec![vec![0usize; local_dim]; rest_dim];
        for (r, group) in groups.iter_mut().enumerate() {
            let mut base = 0;
            let mut rem = r;
            for &k in rest.iter().rev() {
                base += (rem % self.dims[k]) * strides[k];
                rem /= self.dims[k];
            }
            for (l, slot) in group.iter_mut().enumerate() {
                let mut idx = base;
                let mut rem = l;
                for &k in sel.iter().rev() {
                    idx += (rem % self.dims[k]) * strides[k];
                    rem /= self.dims[k];
                }
                *slot = idx;
            }
        }
        groups
    }
}

fn normalize_subset(sel: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = sel.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return Err(Error::Dimension("subsystem selection is empty".into()));
    }
    if let Some(&k) = v.iter().find(|&&k| k >= n) {
        return Err(Error::Dimension(format!("subsystem index {k} out of range (n = {n})")));
    }
    Ok(v)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n, p, q) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                let row = (i * p + k) * (n * q) + j * q;
                for l in 0..q {
                    out.data[row + l] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, composed left to right.
pub fn kron_all<'a>(ms: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    ms.into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| kron(&acc, m))
}

/// Traces out every factor not listed in `keep`. The kept factors stay in
/// ascending order.
pub fn partial_trace(
    m: &ComplexMatrix,
    f: &HilbertFactorization,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    f.check(m)?;
    let keep = normalize_subset(keep, f.len())?;
    let groups = f.groups(&keep);
    let kd = groups[0].len();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for g in &groups {
        for (a, &i) in g.iter().enumerate() {
            let row = i * m.cols;
            for (b, &j) in g.iter().enumerate() {
                out.data[a * kd + b] += m.data[row + j];
            }
        }
    }
    Ok(out)
}

/// Conjugates `rho` by a unitary acting on the listed factors only:
/// `rho -> (u ⊗ 1) rho (u ⊗ 1)^dagger`, with `u` expressed in the order
/// the factors are listed.
pub fn apply_local_unitary(
    rho: &ComplexMatrix,
    f: &HilbertFactorization,
    factors: &[usize],
    u: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    f.check(rho)?;
    let local_dim: usize = factors.iter().map(|&k| f.dims.get(k).copied().unwrap_or(0)).product();
    let mut seen = factors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != factors.len() || factors.iter().any(|&k| k >= f.len()) {
        return Err(Error::Dimension(format!("bad factor list {factors:?}")));
    }
    if !u.is_square() || u.rows != local_dim {
        return Err(Error::Dimension(format!(
            "local operator is {}x{}, factors {factors:?} span {local_dim}",
            u.rows, u.cols
        )));
    }
    let groups = f.groups(factors);
    let n = rho.rows;
    let mut tmp = rho.clone();
    let mut buf = vec![ZERO; local_dim];

    // left multiplication acts on row indices
    for j in 0..n {
        for g in &groups {
            for (l, &i) in g.iter().enumerate() {
                buf[l] = rho.data[i * n + j];
            }
            for (l, &i) in g.iter().enumerate() {
                let mut acc = ZERO;
                for (m, &b) in buf.iter().enumerate() {
                    acc += u.data[l * local_dim + m] * b;
                }
                tmp.data[i * n + j] = acc;
            }
        }
    }
    // right multiplication by u^dagger acts on column indices
    let mut out = tmp.clone();
    for i in 0..n {
        let row = i * n;
        for g in &groups {
            for (l, &j) in g.iter().enumerate() {
                buf[l] = tmp.data[row + j];
            }
            for (l, &j) in g.iter().enumerate() {
                let mut acc = ZERO;
                for (m, &b) in buf.iter().enumerate() {
                    acc += b * u.data[l * local_dim + m].conj();
                }
                out.data[row + j] = acc;
            }
        }
    }
    Ok(out)
}

/// Result of a Hermitian eigendecomposition: `h = V diag(values) V^dagger`.
#[derive(Debug, Clone)]
pub struct HermEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: ComplexMatrix,
}

impl HermEigen {
    /// `V diag(f(λ)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum()
        })
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let dev = h.hermiticity_defect();
    if dev > TOL_HERM {
        return Err(Error::NotHermitian { max_dev: dev });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEigen> {
    check_hermitian(h)?;
    let eig = h.hermitian_part().to_nalgebra().symmetric_eigen();
    if eig.eigenvalues.iter().any(|l| !l.is_finite())
        || eig.eigenvectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Ok(herm_eig_real(h));
    }
    let mut order: Vec<usize> = (0..h.rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let vectors = ComplexMatrix::from_fn(h.rows, h.rows, |i, j| vecs[(i, order[j])]);
    Ok(HermEigen { values, vectors })
}

/// Eigenvalues only (ascending); cheaper than [`herm_eig`].
pub fn herm_eigvals(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut vals: Vec<f64> = h
        .hermitian_part()
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    if vals.iter().any(|l| !l.is_finite()) {
        return Ok(herm_eig_real(h).values);
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// `[[A, −B], [B, A]]` for `h = A + iB`.
fn real_embedding(h: &ComplexMatrix) -> DMatrix<f64> {
    let n = h.rows;
    let h = h.hermitian_part();
    DMatrix::from_fn(2 * n, 2 * n, |i, k| {
        let z = h[(i % n, k % n)];
        match (i < n, k < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

// The complex solver occasionally returns NaN on sparse, highly degenerate
// inputs; the real embedding does not. Each eigenvalue of `h` appears twice,
// with real eigenvectors `(x; y)` and `(−y; x)` that map to `x + iy` and a
// phase multiple of it. Pivoted complex Gram-Schmidt keeps `n` of the `2n`.
fn herm_eig_real(h: &ComplexMatrix) -> HermEigen {
    let n = h.rows;
    let eig = real_embedding(h).symmetric_eigen();
    let mut cand: Vec<(f64, Vec<C64>)> = (0..2 * n)
        .map(|k| {
            let col = eig.eigenvectors.column(k);
            (eig.eigenvalues[k], (0..n).map(|i| C64::new(col[i], col[i + n])).collect())
        })
        .collect();

    let mut picked: Vec<(f64, Vec<C64>)> = Vec::with_capacity(n);
    while picked.len() < n {
        let norm2 = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let best = (0..cand.len())
            .max_by(|&a, &b| norm2(&cand[a].1).total_cmp(&norm2(&cand[b].1)))
            .expect("candidates remain while fewer than n are picked");
        let (value, mut q) = cand.swap_remove(best);
        let norm = norm2(&q).sqrt();
        q.iter_mut().for_each(|z| *z /= norm);
        for (_, c) in cand.iter_mut() {
            let ip: C64 = q.iter().zip(c.iter()).map(|(x, y)| x.conj() * y).sum();
            for (ci, qi) in c.iter_mut().zip(&q) {
                *ci -= ip * qi;
            }
        }
        picked.push((value, q));
    }
    picked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values = picked.iter().map(|p| p.0).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| picked[j].1[i]);
    HermEigen { values, vectors }
}

/// `exp(-i h t)` through the eigendecomposition of `h`.
pub fn unitary_from_hamiltonian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::Config(format!("evolution time must be finite, got {t}")));
    }
    let eig = herm_eig(h)?;
    Ok(eig.map(|l| C64::from_polar(1.0, -l * t)))
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::Dimension(format!(
            "commutator of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(&(a * b) - &(b * a))
}

/// Max-entry norm of `ab - ba`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(commutator(a, b)?.max_abs())
}

/// Pauli matrices and a few fixed two-qubit operators.
pub mod pauli {
    use super::{ComplexMatrix, C64, I, ONE, ZERO};

    pub fn id() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO })
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        })
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    /// SWAP on `d ⊗ d`.
    pub fn swap(d: usize) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                s[(a * d + b, b * d + a)] = C64::new(1.0, 0.0);
            }
        }
        s
    }
}

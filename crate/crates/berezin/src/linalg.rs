//! Dense complex matrices and state vectors on a finite-dimensional Hilbert space.
//!
//! Everything downstream (ladder operators, quantization maps, measures) is
//! carried by [`ComplexMatrix`], a row-major square matrix over `Complex64`,
//! and [`Ket`], a complex column vector. Values are immutable after
//! construction; all operations return fresh values.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("rows do not form a square matrix")]
    NotSquare,

    #[error("matrix entries must be finite")]
    NonFiniteEntry,
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from nested rows; every row must have the same length as the
    /// number of rows and every entry must be finite.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(LinalgError::NotSquare);
        }
        let entries: Vec<C64> = rows.iter().flatten().copied().collect();
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LinalgError::NonFiniteEntry);
        }
        Ok(Self { dim, entries })
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Conjugate transpose A†.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&e| c * e).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in mul");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Commutator [A, B] = AB − BA.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        assert_eq!(self.dim, ket.dim(), "dimension mismatch in apply");
        let amps = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self[(i, j)] * ket.amplitude(j))
                    .sum()
            })
            .collect();
        Ket::from_amplitudes(amps)
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        assert_eq!(a.dim(), b.dim(), "dimension mismatch in outer");
        Self::from_fn(a.dim(), |i, j| a.amplitude(i) * b.amplitude(j).conj())
    }

    /// Leading k×k sub-matrix; identities broken only by truncation hold
    /// exactly on such blocks.
    pub fn leading_block(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.dim, "invalid block size");
        Self::from_fn(k, |i, j| self[(i, j)])
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation of A from A†.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermiticity test with a tolerance relative to the entry scale.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    /// Ascending real spectrum of a Hermitian matrix.
    ///
    /// Rejects inputs whose hermiticity defect exceeds `tol` (relative to the
    /// entry scale).
    pub fn hermitian_eigenvalues(&self, tol: f64) -> Result<Vec<f64>, LinalgError> {
        let defect = self.hermiticity_defect();
        if defect > tol * self.max_abs().max(1.0) {
            return Err(LinalgError::NotHermitian { defect, tol });
        }
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| self[(i, j)]);
        let eig = m.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        Ok(vals)
    }

    /// Operator norm: the largest singular value, computed as
    /// √λ_max(A†A). Valid for any square matrix.
    pub fn spectral_norm(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        let vals = gram
            .hermitian_eigenvalues(1e-8)
            .expect("A†A is Hermitian by construction");
        vals.last().map(|v| v.max(0.0).sqrt()).unwrap_or(0.0)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        assert!(!amplitudes.is_empty(), "ket dimension must be positive");
        Self { amplitudes }
    }

    /// Basis vector |n⟩ in dimension `dim`.
    pub fn basis(dim: usize, n: usize) -> Self {
        assert!(n < dim, "basis index out of range");
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[n] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes[n]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Inner product ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in inner");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|&a| c * a).collect(),
        }
    }

    pub fn sub(&self, other: &Ket) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in sub");
        Self {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Projector |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(self, self)
    }
}

/// Matrix exponential by scaling and squaring with a Taylor core.
///
/// The argument is scaled by 2^−s until its max-column norm is below 1/2,
/// the series is summed to machine precision, and the result squared s
/// times.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let d = a.dim();
    // max column sum norm
    let mut norm1 = 0.0f64;
    for j in 0..d {
        let col: f64 = (0..d).map(|i| a[(i, j)].norm()).sum();
        norm1 = norm1.max(col);
    }
    let s = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(C64::new(0.5f64.powi(s as i32), 0.0));

    let mut result = ComplexMatrix::identity(d);
    let mut term = ComplexMatrix::identity(d);
    for k in 1..=40 {
        term = term.mul(&scaled).scale(C64::new(1.0 / k as f64, 0.0));
        result = result.add(&term);
        if term.max_abs() < 1e-300 || term.max_abs() < 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..s {
        result = result.mul(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_is_involutive() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64, (j as f64) - 1.0));
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn trace_is_cyclic() {
        let a = ComplexMatrix::from_fn(4, |i, j| c((i * j) as f64, i as f64 - j as f64));
        let b = ComplexMatrix::from_fn(4, |i, j| c(1.0 / (1 + i + j) as f64, 0.3 * j as f64));
        let ab = a.mul(&b).trace();
        let ba = b.mul(&a).trace();
        assert!((ab - ba).norm() < 1e-12 * ab.norm().max(1.0));
    }

    #[test]
    fn trace_of_adjoint_is_conjugate() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64 + 0.5, j as f64 - 0.25));
        let t = a.trace();
        let t_adj = a.adjoint().trace();
        assert!((t_adj - t.conj()).norm() < 1e-14);
    }

    #[test]
    fn projector_of_normalized_ket_has_unit_trace() {
        let raw = Ket::from_amplitudes(vec![c(1.0, 1.0), c(0.5, -2.0), c(0.0, 0.25)]);
        let psi = raw.scale(c(1.0 / raw.norm(), 0.0));
        let p = psi.projector();
        assert!((p.trace() - c(1.0, 0.0)).norm() < 1e-14);
        // projectors are idempotent
        assert!(p.mul(&p).max_abs_diff(&p) < 1e-14);
    }

    #[test]
    fn identity_spectrum_is_all_ones() {
        let vals = ComplexMatrix::identity(3).hermitian_eigenvalues(1e-10).unwrap();
        for v in vals {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            a.hermitian_eigenvalues(1e-10),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(4);
        assert!(expm(&z).max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);
    }

    #[test]
    fn expm_matches_diagonal_exponential() {
        let a = ComplexMatrix::diagonal(&[c(0.3, 0.0), c(-1.2, 0.0), c(0.0, 2.0)]);
        let e = expm(&a);
        let expected = ComplexMatrix::diagonal(&[
            c(0.3, 0.0).exp(),
            c(-1.2, 0.0).exp(),
            c(0.0, 2.0).exp(),
        ]);
        assert!(e.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-3.0, 0.0), c(0.0, 2.0)]);
        assert!((a.spectral_norm() - 3.0).abs() < 1e-10);
    }
}

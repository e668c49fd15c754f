//! Dense complex linear algebra shared by every other module: the matrix
//! carrier, operator norms, Hermitian spectra, span computations and the
//! tolerance policy.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix with finite entries and at least one row and column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "{}x{} matrix has an empty dimension",
                m.nrows(),
                m.ncols()
            )));
        }
        if let Some((idx, _)) = m
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at flat index {idx}"
            )));
        }
        Ok(ComplexMatrix(m))
    }

    /// Wraps a matrix produced by arithmetic on valid matrices.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        debug_assert!(m.nrows() > 0 && m.ncols() > 0);
        ComplexMatrix(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::wrap(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(DMatrix::identity(n, n))
    }

    /// The matrix unit `E_{ij}` (zero-based indices).
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(rows, cols);
        m[(i, j)] = ONE;
        Self::wrap(m)
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::wrap(DMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO }))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::wrap(&self.0 * c)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Trace inner product `tr(other* self)`.
    pub fn inner(&self, other: &ComplexMatrix) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| b.conj() * a)
            .sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.0 - self.0.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &ComplexMatrix) -> f64 {
        (self - other).frobenius_norm()
    }

    /// Column-major entries.
    pub fn to_vec(&self) -> Vec<C64> {
        self.0.iter().copied().collect()
    }

    pub fn from_vec(rows: usize, cols: usize, data: &[C64]) -> Self {
        Self::wrap(DMatrix::from_column_slice(rows, cols, data))
    }

    pub fn view(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::wrap(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    pub fn set_view(&mut self, r0: usize, c0: usize, m: &ComplexMatrix) {
        self.0
            .view_mut((r0, c0), (m.rows(), m.cols()))
            .copy_from(&m.0);
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(parts: &[&ComplexMatrix]) -> Self {
        let rows: usize = parts.iter().map(|m| m.rows()).sum();
        let cols: usize = parts.iter().map(|m| m.cols()).sum();
        let mut out = Self::zeros(rows.max(1), cols.max(1));
        let (mut r, mut c) = (0, 0);
        for m in parts {
            out.set_view(r, c, m);
            r += m.rows();
            c += m.cols();
        }
        out
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self::wrap(self.0.kronecker(&other.0))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.0.shape())?;
        for i in 0..self.rows() {
            write!(f, "\n  [")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            write!(f, " ]")?;
        }
        Ok(())
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::wrap(-&self.0)
    }
}

/// Numerical thresholds shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Entrywise equality threshold.
    pub eps_eq: f64,
    /// Norm comparison threshold; also the relative rank threshold for spans.
    pub eps_norm: f64,
    /// Eigenvalue slack when testing positive semidefiniteness.
    pub eps_psd: f64,
    pub optimizer_restarts: usize,
    pub rng_seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_eq: 1e-10,
            eps_norm: 1e-7,
            eps_psd: 1e-9,
            optimizer_restarts: 64,
            rng_seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn with_seed(seed: u64) -> Self {
        ToleranceConfig {
            rng_seed: seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_eq = self.eps_eq > 0.0 && self.eps_eq <= self.eps_norm;
        if !ok_eq || !(self.eps_norm < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "need 0 < eps_eq <= eps_norm < 1, got eps_eq={} eps_norm={}",
                self.eps_eq, self.eps_norm
            )));
        }
        if !(self.eps_psd > 0.0 && self.eps_psd < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "eps_psd must lie in (0,1), got {}",
                self.eps_psd
            )));
        }
        if self.optimizer_restarts == 0 {
            return Err(Error::InvalidTolerance(
                "optimizer_restarts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.0.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix("non-finite entry".into()))
    }
}

/// Largest singular value.
pub fn op_norm(m: &ComplexMatrix) -> Result<f64> {
    check_finite(m)?;
    Ok(spectral_norm(m.as_dmatrix()))
}

/// Operator norm of a raw matrix, computed from the Gram matrix of the
/// smaller side. Assumes finite entries.
pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    top.max(0.0).sqrt()
}

/// Top singular triple `(sigma, left, right)` with `m * right = sigma * left`.
/// Taken from the Hermitian eigendecomposition of `m* m`; the SVD routine
/// is occasionally off in the sixth digit on larger complex inputs, which
/// the gap optimizer would exploit.
pub(crate) fn top_singular_triple(m: &DMatrix<C64>) -> (f64, Vec<C64>, Vec<C64>) {
    let gram = m.adjoint() * m;
    let (values, vectors) = herm_decomposition(&gram);
    let top = values.len() - 1;
    let sigma = values[top].max(0.0).sqrt();
    let right: Vec<C64> = vectors.column(top).iter().copied().collect();
    let image = m * vectors.column(top);
    let left: Vec<C64> = if sigma > 0.0 {
        image.iter().map(|z| z / sigma).collect()
    } else {
        let mut e = vec![ZERO; m.nrows()];
        e[0] = ONE;
        e
    };
    (sigma, left, right)
}

/// Ascending eigenvalues of a Hermitian matrix, multiplicity counted.
pub fn herm_eigs(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    check_finite(m)?;
    let defect = m.hermitian_defect();
    if defect > tol.eps_eq * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let h = hermitian_part(m.as_dmatrix());
    let mut eigs: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    // stable sort keeps ties in solver order
    eigs.sort_by(|a, b| a.total_cmp(b));
    Ok(eigs)
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigen-decomposition of the Hermitian part of `m`, ascending.
pub(crate) fn herm_decomposition(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Orthonormal basis, under the trace inner product, of the span of `vectors`.
pub fn span_basis(vectors: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<Vec<ComplexMatrix>> {
    let first = vectors.first().ok_or(Error::EmptyInput)?;
    let (rows, cols) = (first.rows(), first.cols());
    let mut span = SpanBuilder::new(tol.eps_norm);
    for v in vectors {
        if (v.rows(), v.cols()) != (rows, cols) {
            return Err(Error::ShapeMismatch(format!(
                "expected {rows}x{cols}, got {}x{}",
                v.rows(),
                v.cols()
            )));
        }
        check_finite(v)?;
        span.try_push(&v.to_vec());
    }
    Ok(span
        .basis()
        .iter()
        .map(|b| ComplexMatrix::from_vec(rows, cols, b))
        .collect())
}

/// Outcome of adding a vector to a [`SpanBuilder`].
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Coefficients of the projection onto the existing basis.
    pub coeffs: Vec<C64>,
    pub residual: Vec<C64>,
    pub residual_norm: f64,
}

/// Incrementally maintained orthonormal basis in `C^N` (two-pass
/// classical Gram-Schmidt).
#[derive(Debug, Clone)]
pub struct SpanBuilder {
    basis: Vec<Vec<C64>>,
    rank_tol: f64,
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    // <a, b> = sum conj(b) a, matching the trace inner product
    a.iter().zip(b).map(|(x, y)| y.conj() * x).sum()
}

pub(crate) fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl SpanBuilder {
    pub fn new(rank_tol: f64) -> Self {
        SpanBuilder {
            basis: Vec::new(),
            rank_tol,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn reduce(&self, v: &[C64]) -> Reduction {
        let mut residual = v.to_vec();
        let mut coeffs = vec![ZERO; self.basis.len()];
        for _pass in 0..2 {
            for (k, b) in self.basis.iter().enumerate() {
                let c = dot(&residual, b);
                coeffs[k] += c;
                for (r, bi) in residual.iter_mut().zip(b) {
                    *r -= c * bi;
                }
            }
        }
        let residual_norm = vec_norm(&residual);
        Reduction {
            coeffs,
            residual,
            residual_norm,
        }
    }

    fn is_dependent(&self, v_norm: f64, residual_norm: f64) -> bool {
        residual_norm <= self.rank_tol * v_norm.max(1.0)
    }

    pub fn contains(&self, v: &[C64]) -> bool {
        let r = self.reduce(v);
        self.is_dependent(vec_norm(v), r.residual_norm)
    }

    /// Adds `v` if it is independent of the current span; returns the
    /// reduction when a new basis vector was created.
    pub fn try_push(&mut self, v: &[C64]) -> Option<Reduction> {
        let r = self.reduce(v);
        if self.is_dependent(vec_norm(v), r.residual_norm) {
            return None;
        }
        let inv = 1.0 / r.residual_norm;
        self.basis.push(r.residual.iter().map(|z| z * inv).collect());
        Some(r)
    }
}

/// Orthonormal basis of the numerical null space of a Hermitian positive
/// semidefinite matrix (eigenvalues at most `tol * max(1, lambda_max)`).
pub(crate) fn psd_null_space(g: &DMatrix<C64>, tol: f64) -> Vec<Vec<C64>> {
    let (values, vectors) = herm_decomposition(g);
    let scale = values.iter().copied().fold(1.0f64, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= tol * scale)
        .map(|(i, _)| vectors.column(i).iter().copied().collect())
        .collect()
}

/// Unitary factor of the polar decomposition, if `t` is well conditioned.
pub(crate) fn unitary_polar(t: &DMatrix<C64>, min_singular: f64) -> Option<DMatrix<C64>> {
    let svd = t.clone().svd(true, true);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if !(smin > min_singular * smax.max(1e-300)) {
        return None;
    }
    let u = svd.u?;
    let vt = svd.v_t?;
    Some(u * vt)
}

pub(crate) fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub(crate) fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..len).map(|_| random_complex(rng)).collect();
    let n = vec_norm(&v).max(1e-300);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// Haar-ish random unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| random_complex(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                ONE
            }
        })
        .collect();
    ComplexMatrix::wrap(DMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(op_norm(&ComplexMatrix::zeros(2, 4)).unwrap(), 0.0);
        let e12 = ComplexMatrix::unit(2, 2, 0, 1);
        assert!((op_norm(&e12).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_rejects_nan() {
        assert!(ComplexMatrix::from_real_rows(&[vec![f64::NAN]]).is_err());
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, C64::new(f64::INFINITY, 0.0));
        assert!(matches!(op_norm(&m), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn herm_eigs_examples() {
        let tol = ToleranceConfig::default();
        let d = ComplexMatrix::diag(&[c(1.0), c(0.0)]);
        assert_eq!(herm_eigs(&d, &tol).unwrap(), vec![0.0, 1.0]);
        let e12 = ComplexMatrix::unit(2, 2, 0, 1);
        assert!(matches!(herm_eigs(&e12, &tol), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn span_basis_examples() {
        let tol = ToleranceConfig::default();
        let e = |i, j| ComplexMatrix::unit(2, 2, i, j);
        assert_eq!(span_basis(&[e(0, 0), e(0, 0)], &tol).unwrap().len(), 1);
        let id = ComplexMatrix::identity(2);
        assert_eq!(span_basis(&[e(0, 0), e(1, 1), id], &tol).unwrap().len(), 2);
        let mixed = &e(0, 1) + &e(1, 0).scale(I);
        assert_eq!(span_basis(&[e(0, 1), e(1, 0), mixed], &tol).unwrap().len(), 2);
        assert!(matches!(span_basis(&[], &tol), Err(Error::EmptyInput)));
    }

    #[test]
    fn span_basis_is_orthonormal() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vs: Vec<ComplexMatrix> = (0..5)
            .map(|_| ComplexMatrix::from_fn(2, 3, |_, _| random_complex(&mut rng)).unwrap())
            .collect();
        let b = span_basis(&vs, &tol).unwrap();
        assert_eq!(b.len(), 5);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let expected = if i == j { ONE } else { ZERO };
                assert!((x.inner(y) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let bad = ToleranceConfig {
            eps_eq: 1e-6,
            eps_norm: 1e-8,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ToleranceConfig {
            optimizer_restarts: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 4);
        let prod = &u.adjoint() * &u;
        assert!(prod.dist(&ComplexMatrix::identity(4)) < 1e-12);
    }
}

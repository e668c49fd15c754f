//! Maximality through the unique extension property: a representation `ρ`
//! of `A` is maximal exactly when it has a unique unital completely positive
//! extension to `C*(A)` and that extension is a *-homomorphism.
//!
//! Extensions are parametrized by their Choi matrices, one Hermitian block
//! `H_j` of size `m_j d` per summand `M_{m_j}` of `C*(A)`, with
//! `Φ(E_kl^{(j)}) = H_j[k, l]` (the `(k, l)` block of size `d`). The
//! constraints `Φ|_A = ρ` cut out an affine subspace; the extensions are its
//! positive semidefinite points.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{as_elements, check_square, rep_basis};
use crate::covers::fit_star_hom;
use crate::error::{Error, Result};
use crate::fdca::{decompose_star_algebra, BlockElement, StarHomData, StarSubalgebra};
use crate::matcore::{herm_decomposition, spectral_norm, ComplexMatrix, SpanBuilder, ToleranceConfig, C64, ZERO};
use crate::opalg::OperatorAlgebra;

const PROJECTION_ROUNDS: usize = 2000;
const CERTIFICATE_ROUNDS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaximalityStatus {
    Maximal,
    NotMaximal,
    Unknown,
}

impl std::fmt::Display for MaximalityStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MaximalityStatus::Maximal => "maximal",
            MaximalityStatus::NotMaximal => "not_maximal",
            MaximalityStatus::Unknown => "unknown",
        })
    }
}

/// A representation `π` of `A` on `C^K` and an isometry `V: C^d -> C^K`
/// with `V* π(·) V = ρ` whose range does not reduce `π(A)`.
#[derive(Debug, Clone)]
pub struct DilationCertificate {
    pub generator_images: Vec<ComplexMatrix>,
    pub isometry: ComplexMatrix,
    pub compression_error: f64,
    /// `max_g max(||(1 - VV*) π(g) V||, ||(1 - VV*) π(g)* V||)`.
    pub reducing_defect: f64,
}

#[derive(Debug, Clone)]
pub struct MaximalityVerdict {
    pub status: MaximalityStatus,
    pub certificate: Option<DilationCertificate>,
    pub evidence: String,
    /// Dimension of the affine family of self-adjoint extensions.
    pub free_parameters: usize,
}

/// Real coordinates of block-diagonal Hermitian matrices, isometric for the
/// Frobenius norm: diagonal entries, then `√2 Re`, `√2 Im` of each upper
/// off-diagonal entry.
struct Layout {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    len: usize,
}

impl Layout {
    fn new(sizes: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut len = 0;
        for &n in &sizes {
            offsets.push(len);
            len += n * n;
        }
        Layout { sizes, offsets, len }
    }

    /// Nonzero entries `(row, col, value)` of the unit for coordinate `i`
    /// of block `j`.
    fn entries(n: usize, i: usize) -> Vec<(usize, usize, C64)> {
        if i < n {
            return vec![(i, i, C64::new(1.0, 0.0))];
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = (i - n) / 2;
        let (mut r, mut rest) = (0, pair);
        while rest >= n - 1 - r {
            rest -= n - 1 - r;
            r += 1;
        }
        let c = r + 1 + rest;
        if (i - n) % 2 == 0 {
            vec![(r, c, C64::new(h, 0.0)), (c, r, C64::new(h, 0.0))]
        } else {
            vec![(r, c, C64::new(0.0, h)), (c, r, C64::new(0.0, -h))]
        }
    }

    fn to_blocks(&self, x: &DVector<f64>) -> Vec<DMatrix<C64>> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        self.sizes
            .iter()
            .zip(&self.offsets)
            .map(|(&n, &o)| {
                let mut m = DMatrix::from_element(n, n, ZERO);
                for i in 0..n {
                    m[(i, i)] = C64::new(x[o + i], 0.0);
                }
                let mut k = o + n;
                for r in 0..n {
                    for c in r + 1..n {
                        let v = C64::new(x[k], x[k + 1]) * h;
                        m[(r, c)] = v;
                        m[(c, r)] = v.conj();
                        k += 2;
                    }
                }
                m
            })
            .collect()
    }

    fn from_blocks(&self, blocks: &[DMatrix<C64>]) -> DVector<f64> {
        let s = std::f64::consts::SQRT_2;
        let mut x = DVector::zeros(self.len);
        for ((&n, &o), m) in self.sizes.iter().zip(&self.offsets).zip(blocks) {
            for i in 0..n {
                x[o + i] = m[(i, i)].re;
            }
            let mut k = o + n;
            for r in 0..n {
                for c in r + 1..n {
                    let v = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
                    x[k] = v.re * s;
                    x[k + 1] = v.im * s;
                    k += 2;
                }
            }
        }
        x
    }
}

/// Thin solver for `L x = b`: least-norm solution plus an orthonormal basis
/// of the null space.
struct LinearSolve {
    particular: DVector<f64>,
    null: Vec<DVector<f64>>,
    residual: f64,
}

fn solve(l: &DMatrix<f64>, b: &DVector<f64>) -> LinearSolve {
    let cols = l.ncols();
    let rows = l.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (l.nrows(), cols)).copy_from(l);
    let mut rhs = DVector::zeros(rows);
    rhs.rows_mut(0, b.len()).copy_from(b);
    let svd = padded.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = 1e-9 * smax.max(1.0);
    let mut particular = DVector::zeros(cols);
    let mut null = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let v = vt.row(i).transpose();
        if s > thr {
            particular += v * (u.column(i).dot(&rhs) / s);
        } else {
            null.push(v);
        }
    }
    let residual = (&padded * &particular - &rhs).norm();
    LinearSolve {
        particular,
        null,
        residual,
    }
}

struct Problem {
    d: usize,
    star: StarSubalgebra,
    layout: Layout,
    /// Abstract coordinates of A's generators in `C*(A)`.
    abstract_gens: Vec<BlockElement>,
    particular: DVector<f64>,
    null: Vec<DVector<f64>>,
    scale: f64,
}

impl Problem {
    fn build(a: &OperatorAlgebra, rep: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<Self> {
        let d = check_square(rep)?;
        let rho = rep_basis(a, rep, tol)?;
        let star = decompose_star_algebra(a.ambient(), a.generators(), tol)?;
        let shape = star.shape().clone();
        let layout = Layout::new(shape.sizes().iter().map(|m| m * d).collect());
        let abstract_basis = a
            .basis()
            .iter()
            .map(|x| star.to_abstract(x))
            .collect::<Result<Vec<_>>>()?;
        let abstract_gens = a
            .generators()
            .iter()
            .map(|x| star.to_abstract(x))
            .collect::<Result<Vec<_>>>()?;

        // equation (basis element e, row p, col q), real and imaginary part
        let eqs = a.dim() * d * d;
        let mut l = DMatrix::zeros(2 * eqs, layout.len);
        for (j, (&n, &o)) in layout.sizes.iter().zip(&layout.offsets).enumerate() {
            for i in 0..n * n {
                for (r, c, val) in Layout::entries(n, i) {
                    let (k, p) = (r / d, r % d);
                    let (kk, q) = (c / d, c % d);
                    for (e, x) in abstract_basis.iter().enumerate() {
                        let coef = x.block(j).get(k, kk) * val;
                        let row = (e * d + p) * d + q;
                        l[(2 * row, o + i)] += coef.re;
                        l[(2 * row + 1, o + i)] += coef.im;
                    }
                }
            }
        }
        let mut b = DVector::zeros(2 * eqs);
        for (e, m) in rho.iter().enumerate() {
            for p in 0..d {
                for q in 0..d {
                    let row = (e * d + p) * d + q;
                    b[2 * row] = m.get(p, q).re;
                    b[2 * row + 1] = m.get(p, q).im;
                }
            }
        }
        let sol = solve(&l, &b);
        let scale = b.norm().max(1.0);
        if sol.residual > tol.eps_norm * scale {
            return Err(Error::NotContractive(format!(
                "no self-adjoint linear extension to the generated C*-algebra (residual {:.3e})",
                sol.residual
            )));
        }
        Ok(Problem {
            d,
            star,
            layout,
            abstract_gens,
            particular: sol.particular,
            null: sol.null,
            scale,
        })
    }

    fn choi_of_hom(&self, h: &StarHomData) -> Result<DVector<f64>> {
        let shape = self.star.shape();
        let d = self.d;
        let blocks = shape
            .sizes()
            .iter()
            .enumerate()
            .map(|(j, &m)| {
                let mut out = DMatrix::from_element(m * d, m * d, ZERO);
                for k in 0..m {
                    for l in 0..m {
                        let img = h.apply(&BlockElement::matrix_unit(shape, j, k, l))?;
                        out.view_mut((k * d, l * d), (d, d)).copy_from(img.block(0).as_dmatrix());
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.layout.from_blocks(&blocks))
    }

    fn min_eigenvalue(&self, x: &DVector<f64>) -> f64 {
        self.layout
            .to_blocks(x)
            .iter()
            .map(|m| herm_decomposition(m).0[0])
            .fold(f64::INFINITY, f64::min)
    }

    fn project_psd(&self, x: &DVector<f64>) -> DVector<f64> {
        let blocks: Vec<DMatrix<C64>> = self
            .layout
            .to_blocks(x)
            .iter()
            .map(|m| {
                let (vals, vecs) = herm_decomposition(m);
                let clipped = DMatrix::from_diagonal(&DVector::from_iterator(
                    vals.len(),
                    vals.iter().map(|&v| C64::new(v.max(0.0), 0.0)),
                ));
                &vecs * clipped * vecs.adjoint()
            })
            .collect();
        self.layout.from_blocks(&blocks)
    }

    fn project_affine(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = self.particular.clone();
        for n in &self.null {
            y += n * n.dot(x);
        }
        y
    }

    fn is_feasible(&self, x: &DVector<f64>, tol: &ToleranceConfig) -> bool {
        self.min_eigenvalue(x) >= -tol.eps_psd * self.scale.max(x.norm())
    }

    /// Alternating projections between the constraint plane and the
    /// positive semidefinite cone.
    fn feasible_from(&self, start: &DVector<f64>, rounds: usize, tol: &ToleranceConfig) -> Option<DVector<f64>> {
        let mut x = self.project_affine(start);
        for _ in 0..rounds {
            if self.is_feasible(&x, tol) {
                return Some(x);
            }
            x = self.project_affine(&self.project_psd(&x));
        }
        self.is_feasible(&x, tol).then_some(x)
    }

    /// Stinespring dilation of the extension with Choi coordinates `x`.
    fn certificate(&self, a: &OperatorAlgebra, rep: &[ComplexMatrix], x: &DVector<f64>, tol: &ToleranceConfig) -> Result<DilationCertificate> {
        let d = self.d;
        let sizes = self.star.shape().sizes();
        let mut columns: Vec<DMatrix<C64>> = Vec::new();
        let mut copies: Vec<usize> = Vec::new();
        for (j, h) in self.layout.to_blocks(x).iter().enumerate() {
            let m = sizes[j];
            let (vals, vecs) = herm_decomposition(h);
            let top = vals.iter().copied().fold(0.0, f64::max);
            for (r, &lambda) in vals.iter().enumerate() {
                if lambda <= 1e-9 * top.max(1.0) {
                    continue;
                }
                let w = vecs.column(r);
                // row k of the Kraus operator is sqrt(lambda) w_k^*
                let kraus = DMatrix::from_fn(m, d, |k, p| w[k * d + p].conj() * lambda.sqrt());
                columns.push(kraus);
                copies.push(j);
            }
        }
        let big: usize = copies.iter().map(|&j| sizes[j]).sum();
        let mut v = DMatrix::from_element(big, d, ZERO);
        let mut row = 0;
        for k in &columns {
            v.view_mut((row, 0), (k.nrows(), d)).copy_from(k);
            row += k.nrows();
        }
        let generator_images: Vec<ComplexMatrix> = self
            .abstract_gens
            .iter()
            .map(|g| {
                let parts: Vec<&ComplexMatrix> = copies.iter().map(|&j| g.block(j)).collect();
                ComplexMatrix::direct_sum(&parts)
            })
            .collect();
        a.extend_hom(&as_elements(big, &generator_images)?, tol)?;
        let v = ComplexMatrix::new(v)?;
        let vs = v.adjoint();
        let mut compression_error = (&(&vs * &v) - &ComplexMatrix::identity(d)).max_abs();
        let off = &ComplexMatrix::identity(big) - &(&v * &vs);
        let mut reducing_defect: f64 = 0.0;
        for (g, r) in generator_images.iter().zip(rep) {
            compression_error = compression_error.max((&(&(&vs * g) * &v) - r).max_abs());
            let out = spectral_norm((&(&off * g) * &v).as_dmatrix());
            let back = spectral_norm((&(&off * &g.adjoint()) * &v).as_dmatrix());
            reducing_defect = reducing_defect.max(out).max(back);
        }
        Ok(DilationCertificate {
            generator_images,
            isometry: v,
            compression_error,
            reducing_defect,
        })
    }

    fn accept(&self, c: &DilationCertificate, tol: &ToleranceConfig) -> bool {
        let bound = tol.eps_norm * 100.0 * self.scale;
        c.isometry.rows() > self.d && c.compression_error <= bound && c.reducing_defect > bound
    }

    fn matrices(&self, t: &[f64]) -> DVector<f64> {
        let mut x = DVector::zeros(self.layout.len);
        for (n, &c) in self.null.iter().zip(t) {
            x += n * c;
        }
        x
    }
}

fn not_maximal(
    p: &Problem,
    a: &OperatorAlgebra,
    rep: &[ComplexMatrix],
    x: &DVector<f64>,
    evidence: String,
    tol: &ToleranceConfig,
) -> Result<MaximalityVerdict> {
    let c = p.certificate(a, rep, x, tol)?;
    let free_parameters = p.null.len();
    if p.accept(&c, tol) {
        Ok(MaximalityVerdict {
            status: MaximalityStatus::NotMaximal,
            certificate: Some(c),
            evidence,
            free_parameters,
        })
    } else {
        Ok(MaximalityVerdict {
            status: MaximalityStatus::Unknown,
            certificate: None,
            evidence: format!(
                "{evidence}; extracted dilation failed verification (compression error {:.3e}, reducing defect {:.3e})",
                c.compression_error, c.reducing_defect
            ),
            free_parameters,
        })
    }
}

/// Orthonormal bases of the range and kernel of each Choi block of `x`.
fn range_split(p: &Problem, x: &DVector<f64>) -> (Vec<DMatrix<C64>>, f64) {
    let mut kernels = Vec::new();
    let mut smallest_positive = f64::INFINITY;
    for h in p.layout.to_blocks(x) {
        let (vals, vecs) = herm_decomposition(&h);
        let top = vals.iter().copied().fold(0.0, f64::max).max(1.0);
        let ker: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= 1e-8 * top).collect();
        for (i, &v) in vals.iter().enumerate() {
            if !ker.contains(&i) {
                smallest_positive = smallest_positive.min(v);
            }
        }
        kernels.push(DMatrix::from_fn(h.nrows(), ker.len(), |r, c| vecs[(r, ker[c])]));
    }
    (kernels, smallest_positive)
}

/// Null directions supported on the range of the *-homomorphism's Choi
/// matrix: each one moves to a second extension.
fn range_supported_direction(p: &Problem, kernels: &[DMatrix<C64>]) -> Option<DVector<f64>> {
    let free = p.null.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let blocks: Vec<Vec<DMatrix<C64>>> = p.null.iter().map(|n| p.layout.to_blocks(n)).collect();
    for (j, b) in kernels.iter().enumerate() {
        for r in 0..b.ncols() {
            for c in 0..b.nrows() {
                let entry: Vec<C64> = blocks
                    .iter()
                    .map(|nb| (b.column(r).adjoint() * nb[j].column(c))[(0, 0)])
                    .collect();
                rows.push(entry.iter().map(|z| z.re).collect());
                rows.push(entry.iter().map(|z| z.im).collect());
            }
        }
    }
    let m = DMatrix::from_fn(rows.len(), free, |i, k| rows[i][k]);
    let sol = solve(&m, &DVector::zeros(rows.len()));
    let t = sol.null.first()?;
    let x = p.matrices(t.as_slice());
    let n = x.norm();
    Some(x / n)
}

/// A positive semidefinite `Y`, orthogonal to every null direction, that
/// vanishes on the range of the *-homomorphism's Choi matrix and is
/// positive definite on its kernel. Any extension `C` then has
/// `<Y, C> = 0` and hence range inside that of the *-homomorphism.
fn separating_functional(p: &Problem, kernels: &[DMatrix<C64>], tol: &ToleranceConfig) -> bool {
    let compressed = |x: &DVector<f64>| -> Vec<DMatrix<C64>> {
        p.layout
            .to_blocks(x)
            .iter()
            .zip(kernels)
            .map(|(h, b)| b.adjoint() * h * b)
            .collect()
    };
    let flatten = |blocks: &[DMatrix<C64>]| -> Vec<C64> { blocks.iter().flat_map(|m| m.iter().copied()).collect() };
    let mut span = SpanBuilder::new(tol.eps_norm);
    for n in &p.null {
        span.try_push(&flatten(&compressed(n)));
    }
    if kernels.iter().all(|b| b.ncols() == 0) {
        return true;
    }
    let mut z: Vec<DMatrix<C64>> = kernels
        .iter()
        .map(|b| DMatrix::identity(b.ncols(), b.ncols()))
        .collect();
    for _ in 0..CERTIFICATE_ROUNDS {
        let r = span.reduce(&flatten(&z));
        let mut k = 0;
        for m in z.iter_mut() {
            for e in m.iter_mut() {
                *e = r.residual[k];
                k += 1;
            }
        }
        let mut smallest = f64::INFINITY;
        let mut largest: f64 = 0.0;
        for m in z.iter_mut() {
            if m.nrows() == 0 {
                continue;
            }
            let h = (m.clone() + m.adjoint()) * C64::new(0.5, 0.0);
            let (vals, vecs) = herm_decomposition(&h);
            smallest = smallest.min(vals[0]);
            largest = largest.max(vals[vals.len() - 1]);
            let lifted = DMatrix::from_diagonal(&DVector::from_iterator(
                vals.len(),
                vals.iter().map(|&v| C64::new(v.max(1.0), 0.0)),
            ));
            *m = &vecs * lifted * vecs.adjoint();
        }
        if smallest > 1e-6 * largest.max(1.0) {
            return true;
        }
    }
    false
}

/// Tests whether the representation with generator images `rep` is
/// maximal, i.e. whether every dilation of it splits off as a reducing
/// summand.
pub fn is_maximal(a: &OperatorAlgebra, rep: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<MaximalityVerdict> {
    tol.validate()?;
    let p = Problem::build(a, rep, tol)?;
    let free = p.null.len();
    let hom = fit_star_hom(
        p.star.shape(),
        &p.abstract_gens,
        &crate::fdca::BlockShape::new(vec![p.d])?,
        &as_elements(p.d, rep)?,
        tol,
    )?;
    let verdict = |status, evidence: &str| MaximalityVerdict {
        status,
        certificate: None,
        evidence: evidence.to_string(),
        free_parameters: free,
    };

    let Some(h) = hom else {
        // no *-homomorphism extension: any UCP extension yields a dilation
        let x = match free {
            0 => Some(p.particular.clone()).filter(|x| p.is_feasible(x, tol)),
            _ => p.feasible_from(&p.particular, PROJECTION_ROUNDS, tol),
        };
        return match x {
            Some(x) => not_maximal(&p, a, rep, &x, "no *-homomorphism extension; Stinespring dilation of a UCP extension".into(), tol),
            None if free == 0 => Err(Error::NotContractive(
                "the only self-adjoint extension is not completely positive".into(),
            )),
            None => Ok(verdict(MaximalityStatus::Unknown, "no *-homomorphism extension and no UCP extension located")),
        };
    };
    let xh = p.choi_of_hom(&h)?;
    if free == 0 {
        let gap = (&xh - &p.particular).norm();
        return Ok(if gap <= tol.eps_norm * p.scale {
            verdict(MaximalityStatus::Maximal, "the extension is uniquely determined and is a *-homomorphism")
        } else {
            verdict(MaximalityStatus::Unknown, "determined extension disagrees with the *-homomorphism")
        });
    }

    let (kernels, smallest_positive) = range_split(&p, &xh);
    if let Some(dir) = range_supported_direction(&p, &kernels) {
        let x = &xh + dir * (0.5 * smallest_positive);
        if p.is_feasible(&x, tol) {
            return not_maximal(&p, a, rep, &x, "second UCP extension along a range-supported direction".into(), tol);
        }
    }
    if separating_functional(&p, &kernels, tol) {
        return Ok(verdict(
            MaximalityStatus::Maximal,
            "a positive functional vanishing exactly on the *-homomorphism separates all other extensions",
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(tol.rng_seed ^ 0x0ae0_0000);
    let radius = xh.norm().max(1.0);
    for _ in 0..2 * tol.optimizer_restarts {
        let t: Vec<f64> = (0..free).map(|_| StandardNormal.sample(&mut rng)).collect();
        let dir = p.matrices(&t);
        let start = &xh + dir * (radius / t.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300));
        if let Some(x) = p.feasible_from(&start, 100, tol) {
            if (&x - &xh).norm() > tol.eps_norm * 100.0 * p.scale {
                return not_maximal(&p, a, rep, &x, "random functional search found a second UCP extension".into(), tol);
            }
        }
    }
    Ok(verdict(
        MaximalityStatus::Unknown,
        "no second extension found and no separating functional certified",
    ))
}

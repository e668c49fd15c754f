//! Matrix levels `M_k(A)` and the gap optimizer behind every complete
//! isometry / contractivity check.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::OperatorAlgebra;
use crate::error::{Error, Result};
use crate::fdca::BlockElement;
use crate::matcore::{random_unit_vector, spectral_norm, top_singular_triple, ToleranceConfig, C64, ZERO};

/// A `k x k` matrix over an operator algebra, stored as basis coefficients:
/// entry `(p, q)` is `sum_l coeffs[(p*k + q)*dim + l] basis[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelElement {
    level: usize,
    dim: usize,
    coeffs: Vec<C64>,
}

impl LevelElement {
    pub fn from_coefficients(level: usize, dim: usize, coeffs: Vec<C64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::ShapeMismatch("matrix level must be at least 1".into()));
        }
        if coeffs.len() != level * level * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for level {level} over a {dim}-dimensional algebra",
                coeffs.len()
            )));
        }
        Ok(LevelElement { level, dim, coeffs })
    }

    /// Builds the coefficient array from a square array of algebra elements.
    pub fn from_elements(a: &OperatorAlgebra, entries: &[Vec<BlockElement>], tol: &ToleranceConfig) -> Result<Self> {
        let k = entries.len();
        if k == 0 || entries.iter().any(|row| row.len() != k) {
            return Err(Error::ShapeMismatch("level entries must form a nonempty square".into()));
        }
        let mut coeffs = Vec::with_capacity(k * k * a.dim());
        for row in entries {
            for x in row {
                coeffs.extend(a.coordinates(x, tol)?);
            }
        }
        Self::from_coefficients(k, a.dim(), coeffs)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }
}

/// Norm of `u` realized in `M_k(ambient)`: the largest block norm.
pub fn level_norm(a: &OperatorAlgebra, u: &LevelElement) -> Result<f64> {
    if u.dim != a.dim() {
        return Err(Error::ShapeMismatch(format!(
            "coefficients for a {}-dimensional algebra, got {}",
            u.dim,
            a.dim()
        )));
    }
    let families = BlockFamily::from_images(a.basis());
    Ok(families
        .iter()
        .map(|f| spectral_norm(&f.assemble(&u.coeffs, u.level)))
        .fold(0.0, f64::max))
}

/// Images of the basis elements inside one matrix block.
#[derive(Debug, Clone)]
pub(crate) struct BlockFamily {
    n: usize,
    mats: Vec<DMatrix<C64>>,
}

impl BlockFamily {
    /// One family per block of the images' common shape.
    pub(crate) fn from_images(images: &[BlockElement]) -> Vec<BlockFamily> {
        let shape = images[0].shape();
        (0..shape.num_blocks())
            .map(|i| BlockFamily {
                n: shape.size(i),
                mats: images.iter().map(|x| x.block(i).as_dmatrix().clone()).collect(),
            })
            .collect()
    }

    pub(crate) fn from_matrices(n: usize, mats: Vec<DMatrix<C64>>) -> BlockFamily {
        BlockFamily { n, mats }
    }

    /// Same block size and entrywise equal basis images.
    pub(crate) fn same_as(&self, other: &BlockFamily, eps: f64) -> bool {
        self.n == other.n
            && self.mats.len() == other.mats.len()
            && self
                .mats
                .iter()
                .zip(&other.mats)
                .all(|(a, b)| a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= eps))
    }

    pub(crate) fn assemble(&self, u: &[C64], k: usize) -> DMatrix<C64> {
        let n = self.n;
        let d = self.mats.len();
        let mut out = DMatrix::zeros(k * n, k * n);
        for p in 0..k {
            for q in 0..k {
                let mut view = out.view_mut((p * n, q * n), (n, n));
                for (l, m) in self.mats.iter().enumerate() {
                    let c = u[(p * k + q) * d + l];
                    if c != ZERO {
                        view += m * c;
                    }
                }
            }
        }
        out
    }

    /// Norm and ascent direction `conj(x_p* M_l y_q)` for the top singular pair.
    fn norm_and_gradient(&self, u: &[C64], k: usize) -> (f64, Vec<C64>) {
        let m = self.assemble(u, k);
        let (sigma, x, y) = top_singular_triple(&m);
        let n = self.n;
        let d = self.mats.len();
        let mut g = vec![ZERO; k * k * d];
        for p in 0..k {
            for q in 0..k {
                let xp = &x[p * n..(p + 1) * n];
                let yq = &y[q * n..(q + 1) * n];
                for (l, mat) in self.mats.iter().enumerate() {
                    let mut s = ZERO;
                    for r in 0..n {
                        let mut row = ZERO;
                        for c in 0..n {
                            row += mat[(r, c)] * yq[c];
                        }
                        s += xp[r].conj() * row;
                    }
                    g[(p * k + q) * d + l] = s.conj();
                }
            }
        }
        (sigma, g)
    }
}

/// Maximizes `max_plus ||·|| - max_minus ||·||` over the unit sphere of
/// `M_k(A)` coefficients.
pub(crate) struct GapProblem<'a> {
    pub plus: Vec<&'a BlockFamily>,
    pub minus: Vec<&'a BlockFamily>,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct GapPoint {
    pub gap: f64,
    pub plus_norm: f64,
    pub minus_norm: f64,
    pub coeffs: Vec<C64>,
}

fn side(families: &[&BlockFamily], u: &[C64], k: usize) -> (f64, Option<Vec<C64>>) {
    let mut best = (0.0, None);
    for f in families {
        let (s, g) = f.norm_and_gradient(u, k);
        if best.1.is_none() || s > best.0 {
            best = (s, Some(g));
        }
    }
    best
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

impl GapProblem<'_> {
    fn value_and_gradient(&self, u: &[C64], k: usize) -> (GapPoint, Vec<C64>) {
        let (pn, pg) = side(&self.plus, u, k);
        let (mn, mg) = side(&self.minus, u, k);
        let mut g = pg.unwrap_or_else(|| vec![ZERO; u.len()]);
        if let Some(mg) = mg {
            for (a, b) in g.iter_mut().zip(mg) {
                *a -= b;
            }
        }
        let point = GapPoint {
            gap: pn - mn,
            plus_norm: pn,
            minus_norm: mn,
            coeffs: u.to_vec(),
        };
        (point, g)
    }

    /// Projected gradient ascent with step adaptation from `start`.
    pub(crate) fn ascend(&self, start: Vec<C64>, k: usize, iterations: usize) -> GapPoint {
        let mut u = start;
        normalize(&mut u);
        let (mut best, mut g) = self.value_and_gradient(&u, k);
        let mut step = 0.5;
        for _ in 0..iterations {
            // tangent component of the ascent direction
            let radial: f64 = g.iter().zip(&u).map(|(a, b)| (b.conj() * a).re).sum();
            let mut dir: Vec<C64> = g.iter().zip(&u).map(|(a, b)| a - b * radial).collect();
            let dn = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if dn < 1e-12 {
                break;
            }
            dir.iter_mut().for_each(|z| *z /= dn);
            let mut improved = false;
            while step > 1e-7 {
                let mut cand: Vec<C64> = u.iter().zip(&dir).map(|(a, b)| a + b * step).collect();
                normalize(&mut cand);
                let (p, cg) = self.value_and_gradient(&cand, k);
                if p.gap > best.gap {
                    u = cand;
                    best = p;
                    g = cg;
                    step = (step * 1.5).min(1.0);
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best
    }

    /// Best point over seeded random restarts; stops early once the gap
    /// exceeds `stop_above`.
    pub(crate) fn search(&self, k: usize, restarts: usize, seed: u64, iterations: usize, stop_above: f64) -> GapPoint {
        let len = k * k * self.dim;
        let mut best: Option<GapPoint> = None;
        for r in 0..restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let start = random_unit_vector(&mut rng, len);
            let p = self.ascend(start, k, iterations);
            if best.as_ref().is_none_or(|b| p.gap > b.gap) {
                best = Some(p);
            }
            if best.as_ref().is_some_and(|b| b.gap > stop_above) {
                break;
            }
        }
        best.expect("at least one restart")
    }
}

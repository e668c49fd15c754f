//! Dilations of representations: the Sarason-block twist family, corner
//! compressions, δ-curves, the maximality test and the corner-scaling
//! semi-Dirichlet probe.
//!
//! A representation of an [`OperatorAlgebra`] on `C^d` is given by the
//! `d x d` images of its generators.

mod maximal;
mod semidirichlet;

pub use maximal::{is_maximal, DilationCertificate, MaximalityStatus, MaximalityVerdict};
pub use semidirichlet::{corner_example, corner_scaled, semidirichlet_scaling_probe, ScalingReport};

use crate::error::{Error, Result};
use crate::fdca::{BlockElement, BlockShape};
use crate::matcore::{op_norm, ComplexMatrix, ToleranceConfig, C64, ONE};
use crate::opalg::{BlockFamily, GapProblem, OperatorAlgebra, ASCENT_ITERATIONS};
use crate::word::Word;

/// Highest matrix level at which twisted representations are tested for
/// complete contractivity.
pub const CONTRACTIVITY_LEVEL_CAP: usize = 4;

pub(crate) fn as_elements(d: usize, mats: &[ComplexMatrix]) -> Result<Vec<BlockElement>> {
    let sh = BlockShape::new(vec![d])?;
    mats.iter().map(|m| BlockElement::new(&sh, vec![m.clone()])).collect()
}

pub(crate) fn check_square(mats: &[ComplexMatrix]) -> Result<usize> {
    let d = mats.first().ok_or(Error::EmptyInput)?.rows();
    for m in mats {
        if m.rows() != d || m.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "representation images must all be {d}x{d}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(d)
}

/// Basis images of the unital homomorphism with the given generator images.
pub(crate) fn rep_basis(a: &OperatorAlgebra, gens: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<Vec<ComplexMatrix>> {
    let d = check_square(gens)?;
    let images = a.extend_hom(&as_elements(d, gens)?, tol)?;
    Ok(images.into_iter().map(|x| x.block(0).clone()).collect())
}

/// A dilation `σ` of a representation `π`, upper triangular with respect to
/// `C^N = H_1 ⊕ H ⊕ H_2`:
///
/// ```text
/// σ = [[π_1, σ_12, σ_13],
///      [0,   π,    σ_23],
///      [0,   0,    π_3 ]]
/// ```
#[derive(Debug, Clone)]
pub struct TwistFamily {
    algebra: OperatorAlgebra,
    dims: (usize, usize, usize),
    generators: Vec<ComplexMatrix>,
    basis: Vec<ComplexMatrix>,
}

/// `twist(z)` together with the results of its checks.
#[derive(Debug, Clone)]
pub struct TwistedRep {
    pub z: C64,
    pub generator_images: Vec<ComplexMatrix>,
    pub basis_images: Vec<ComplexMatrix>,
    /// Largest sampled `||σ_z(u)|| - ||u||` over levels `1..=levels_checked`.
    pub contractivity_gap: f64,
    pub levels_checked: usize,
}

impl TwistFamily {
    pub fn new(
        algebra: &OperatorAlgebra,
        sigma: Vec<ComplexMatrix>,
        dims: (usize, usize, usize),
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        tol.validate()?;
        let n = check_square(&sigma)?;
        if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 || dims.0 + dims.1 + dims.2 != n {
            return Err(Error::ShapeMismatch(format!(
                "block dimensions {dims:?} do not split a {n}-dimensional space into three nonzero parts"
            )));
        }
        let basis = rep_basis(algebra, &sigma, tol)?;
        let family = TwistFamily {
            algebra: algebra.clone(),
            dims,
            generators: sigma,
            basis,
        };
        let scale = family.basis.iter().map(|m| m.max_abs()).fold(1.0, f64::max);
        let offsets = family.offsets();
        let mut defect: f64 = 0.0;
        for m in &family.basis {
            for r in 1..3 {
                for c in 0..r {
                    defect = defect.max(family.block_of(m, r, c, &offsets).max_abs());
                }
            }
        }
        if defect > tol.eps_eq * scale {
            return Err(Error::NotUpperTriangular(defect));
        }
        Ok(family)
    }

    fn offsets(&self) -> [(usize, usize); 3] {
        let (a, b, c) = self.dims;
        [(0, a), (a, b), (a + b, c)]
    }

    fn block_of(&self, m: &ComplexMatrix, r: usize, c: usize, offsets: &[(usize, usize); 3]) -> ComplexMatrix {
        let (r0, rn) = offsets[r];
        let (c0, cn) = offsets[c];
        m.view(r0, c0, rn, cn)
    }

    pub fn algebra(&self) -> &OperatorAlgebra {
        &self.algebra
    }

    /// `(dim H_1, dim H, dim H_2)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.0 + self.dims.1 + self.dims.2
    }

    pub fn sigma_generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// Basis images of the `(r, c)` Sarason block, `0 <= r, c < 3`.
    pub fn block(&self, r: usize, c: usize) -> Vec<ComplexMatrix> {
        let offsets = self.offsets();
        self.basis.iter().map(|m| self.block_of(m, r, c, &offsets)).collect()
    }

    /// Basis images of the compressed representation `π`.
    pub fn base_rep(&self) -> Vec<ComplexMatrix> {
        self.block(1, 1)
    }

    fn scaled(&self, m: &ComplexMatrix, z: C64) -> ComplexMatrix {
        let offsets = self.offsets();
        let mut out = m.clone();
        for (r, c, f) in [(0, 1, z), (1, 2, z), (0, 2, z * z)] {
            let b = self.block_of(m, r, c, &offsets).scale(f);
            out.set_view(offsets[r].0, offsets[c].0, &b);
        }
        out
    }

    /// Generator images of `σ_z` without any verification.
    pub fn evaluate(&self, z: C64) -> Vec<ComplexMatrix> {
        self.generators.iter().map(|m| self.scaled(m, z)).collect()
    }

    /// Basis images of `σ_z` without any verification.
    pub fn evaluate_basis(&self, z: C64) -> Vec<ComplexMatrix> {
        self.basis.iter().map(|m| self.scaled(m, z)).collect()
    }

    /// `σ_z`, checked to be a unital homomorphism compressing to `π` and
    /// completely contractive on sampled levels `k <= 4`.
    pub fn twist(&self, z: C64, tol: &ToleranceConfig) -> Result<TwistedRep> {
        if z.norm() > 1.0 + tol.eps_eq {
            return Err(Error::OutsideDisk(z.norm()));
        }
        let generator_images = self.evaluate(z);
        let basis_images = rep_basis(&self.algebra, &generator_images, tol)?;
        let offsets = self.offsets();
        for (x, p) in basis_images.iter().zip(self.base_rep()) {
            let d = self.block_of(x, 1, 1, &offsets).dist(&p);
            if d > tol.eps_eq * p.max_abs().max(1.0) {
                return Err(Error::NotHomomorphism(format!(
                    "middle compression differs from the base representation by {d:.3e}"
                )));
            }
        }
        let n = self.total_dim();
        let plus = BlockFamily::from_matrices(n, basis_images.iter().map(|m| m.as_dmatrix().clone()).collect());
        let minus = BlockFamily::from_images(self.algebra.basis());
        let problem = GapProblem {
            plus: vec![&plus],
            minus: minus.iter().collect(),
            dim: self.algebra.dim(),
        };
        let restarts = (tol.optimizer_restarts / 8).max(4);
        let mut gap = f64::NEG_INFINITY;
        for k in 1..=CONTRACTIVITY_LEVEL_CAP {
            let seed = tol.rng_seed ^ 0x7715_7000 ^ ((k as u64) << 40);
            let p = problem.search(k, restarts, seed, ASCENT_ITERATIONS, tol.eps_norm);
            gap = gap.max(p.gap);
            if p.gap > tol.eps_norm {
                return Err(Error::NotContractive(format!(
                    "twist at z = {z} expands a level-{k} element by {:.3e}",
                    p.gap
                )));
            }
        }
        Ok(TwistedRep {
            z,
            generator_images,
            basis_images,
            contractivity_gap: gap,
            levels_checked: CONTRACTIVITY_LEVEL_CAP,
        })
    }
}

/// The corner `P_H φ(·)|_H` of a representation.
#[derive(Debug, Clone)]
pub struct Compression {
    pub generator_images: Vec<ComplexMatrix>,
    pub basis_images: Vec<ComplexMatrix>,
    /// The corner is multiplicative, so the representation dilates it.
    pub is_dilation: bool,
}

/// Compresses the representation with generator images `rep` to the range
/// of the isometry `v`.
pub fn compress(a: &OperatorAlgebra, rep: &[ComplexMatrix], v: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Compression> {
    let d = check_square(rep)?;
    if v.rows() != d || v.cols() == 0 || v.cols() > d {
        return Err(Error::ShapeMismatch(format!(
            "embedding is {}x{} for a representation on C^{d}",
            v.rows(),
            v.cols()
        )));
    }
    let defect = (&(&v.adjoint() * v) - &ComplexMatrix::identity(v.cols())).max_abs();
    if defect > tol.eps_eq * (v.cols() as f64) * 10.0 {
        return Err(Error::NotIsometry(defect));
    }
    let full = rep_basis(a, rep, tol)?;
    let corner = |m: &ComplexMatrix| &(&v.adjoint() * m) * v;
    let generator_images: Vec<ComplexMatrix> = rep.iter().map(corner).collect();
    let basis_images = full.iter().map(corner).collect();
    let is_dilation = a
        .extend_hom(&as_elements(v.cols(), &generator_images)?, tol)
        .is_ok();
    Ok(Compression {
        generator_images,
        basis_images,
        is_dilation,
    })
}

/// Samples `z ↦ ||σ_z(x)||` where `x` is a word in the generators and their
/// adjoints, evaluated on the twisted generator images.
pub fn delta_curve(f: &TwistFamily, x: &Word, grid: &[C64], tol: &ToleranceConfig) -> Result<Vec<(C64, f64)>> {
    let sh = BlockShape::new(vec![f.total_dim()])?;
    grid.iter()
        .map(|&z| {
            if z.norm() > 1.0 + tol.eps_eq {
                return Err(Error::OutsideDisk(z.norm()));
            }
            let images = as_elements(f.total_dim(), &f.evaluate(z))?;
            let y = x.evaluate(&sh, &images)?;
            Ok((z, op_norm(y.block(0))?))
        })
        .collect()
}

/// The `T_2` dilation used throughout: on `C^4 = Ce_1 ⊕ span{e_2, e_3} ⊕ Ce_4`,
///
/// ```text
/// σ([[a, b], [0, c]]) = [[a, 0, b√(1-t), -b√t],
///                        [0, a, b√t,     b√(1-t)],
///                        [0, 0, c,       0],
///                        [0, 0, 0,       c]]
/// ```
///
/// which compresses to `[[a, b√t], [0, c]]` on the middle block.
pub fn t2_sarason_family(t: f64, tol: &ToleranceConfig) -> Result<TwistFamily> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ShapeMismatch(format!("mixing parameter {t} outside [0, 1]")));
    }
    let a = crate::catalog::t2_in_m2(tol)?;
    let (p, q) = ((1.0 - t).sqrt(), t.sqrt());
    let image = |x: &ComplexMatrix| {
        let (a, b, c) = (x.get(0, 0), x.get(0, 1), x.get(1, 1));
        let z = C64::new(0.0, 0.0);
        ComplexMatrix::from_rows(&[
            vec![a, z, b * p, -b * q],
            vec![z, a, b * q, b * p],
            vec![z, z, c, z],
            vec![z, z, z, c],
        ])
    };
    let sigma = crate::catalog::t2_generators()
        .iter()
        .map(image)
        .collect::<Result<Vec<_>>>()?;
    TwistFamily::new(&a, sigma, (1, 2, 1), tol)
}

/// `g* g + g g* - 1` for the off-diagonal generator of `T_2`: zero under
/// the untwisted dilation, norm one under `σ_0`.
pub fn t2_defect_word() -> Word {
    Word::parse("g1* g1 + g1 g1* - 1").expect("well-formed")
}

/// `points` equally spaced real values from 0 to 1.
pub fn unit_grid(points: usize) -> Vec<C64> {
    let last = points.saturating_sub(1).max(1) as f64;
    (0..points).map(|i| ONE * (i as f64 / last)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::t2_in_m2;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn endpoints_of_the_twist() {
        let f = t2_sarason_family(0.5, &tol()).unwrap();
        let one = f.twist(ONE, &tol()).unwrap();
        for (x, y) in one.generator_images.iter().zip(f.sigma_generators()) {
            assert_eq!(x, y);
        }
        let zero = f.twist(C64::new(0.0, 0.0), &tol()).unwrap();
        let off = f.offsets();
        for x in &zero.basis_images {
            for (r, c) in [(0, 1), (0, 2), (1, 2)] {
                assert_eq!(f.block_of(x, r, c, &off).max_abs(), 0.0);
            }
        }
        assert!(zero.contractivity_gap <= tol().eps_norm);
    }

    #[test]
    fn twist_outside_disk_is_rejected() {
        let f = t2_sarason_family(0.5, &tol()).unwrap();
        assert!(matches!(f.twist(C64::new(1.1, 0.0), &tol()), Err(Error::OutsideDisk(_))));
    }

    #[test]
    fn lower_blocks_are_rejected() {
        // lower triangular 2x2 matrices acting by x ↦ x ⊕ x_22
        let m2 = BlockShape::new(vec![2]).unwrap();
        let lower: Vec<ComplexMatrix> = crate::catalog::t2_generators().iter().map(|g| g.adjoint()).collect();
        let b = crate::opalg::generate_algebra(&m2, &as_elements(2, &lower).unwrap(), &tol()).unwrap();
        let sigma: Vec<ComplexMatrix> = lower
            .iter()
            .map(|g| ComplexMatrix::direct_sum(&[g, &ComplexMatrix::diag(&[g.get(1, 1)])]))
            .collect();
        assert!(matches!(
            TwistFamily::new(&b, sigma, (1, 1, 1), &tol()),
            Err(Error::NotUpperTriangular(_))
        ));
        let a = t2_in_m2(&tol()).unwrap();
        assert!(matches!(
            TwistFamily::new(&a, crate::catalog::t2_generators(), (2, 0, 0), &tol()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn nilpotent_corner_compresses_to_zero() {
        let m2 = BlockShape::new(vec![2]).unwrap();
        let a = crate::opalg::generate_algebra(&m2, &[BlockElement::matrix_unit(&m2, 0, 0, 1)], &tol()).unwrap();
        let rep = vec![ComplexMatrix::unit(2, 2, 0, 1)];
        let e1 = ComplexMatrix::unit(2, 1, 0, 0);
        let c = compress(&a, &rep, &e1, &tol()).unwrap();
        assert_eq!(c.generator_images[0].max_abs(), 0.0);
        assert!(c.is_dilation);

        let full = compress(&a, &rep, &ComplexMatrix::identity(2), &tol()).unwrap();
        assert_eq!(full.generator_images, rep);
        assert!(full.is_dilation);

        let bad = ComplexMatrix::unit(2, 1, 0, 0).scale(C64::new(2.0, 0.0));
        assert!(matches!(compress(&a, &rep, &bad, &tol()), Err(Error::NotIsometry(_))));
    }

    #[test]
    fn t2_corner_of_m2_is_not_a_dilation() {
        // compressing T_2 to e_1 + e_2 is not multiplicative
        let a = t2_in_m2(&tol()).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let v = ComplexMatrix::from_real_rows(&[vec![h], vec![h]]).unwrap();
        let c = compress(&a, &crate::catalog::t2_generators(), &v, &tol()).unwrap();
        assert!(!c.is_dilation);
    }

    #[test]
    fn delta_curve_endpoints() {
        let f = t2_sarason_family(0.5, &tol()).unwrap();
        let grid = unit_grid(3);
        let curve = delta_curve(&f, &t2_defect_word(), &grid, &tol()).unwrap();
        assert!((curve[0].1 - 1.0).abs() < 1e-12);
        assert!(curve[2].1 < 1e-12);
        let unit = delta_curve(&f, &Word::parse("1").unwrap(), &grid, &tol()).unwrap();
        assert!(unit.iter().all(|(_, d)| (d - 1.0).abs() < 1e-12));
    }
}

//! Unital operator algebras inside a block algebra: basis generation,
//! matrix-level norms, boundary and Shilov ideals, the C*-envelope and the
//! (semi-)Dirichlet property.

mod boundary;
mod dirichlet;
mod level;

use crate::error::{Error, Result};
use crate::fdca::{BlockElement, BlockShape};
use crate::matcore::{SpanBuilder, ToleranceConfig, C64, ONE};

pub(crate) use boundary::ASCENT_ITERATIONS;
pub use boundary::{envelope, is_boundary_ideal, shilov_ideal, BoundaryVerdict, Witness};
pub use dirichlet::{is_dirichlet, is_semi_dirichlet, star_closure_dim};
pub use level::{level_norm, LevelElement};
pub(crate) use level::{BlockFamily, GapProblem};

/// How a basis element was produced during generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Unit,
    /// `generator[g] * basis[k]`
    Product { generator: usize, basis: usize },
}

/// `basis[i] = (raw - sum_l coeffs[l] basis[l]) / norm`.
#[derive(Debug, Clone)]
struct Recipe {
    origin: Origin,
    coeffs: Vec<C64>,
    norm: f64,
}

/// A unital subalgebra of a block algebra, stored through an orthonormal
/// basis closed under multiplication.
#[derive(Debug, Clone)]
pub struct OperatorAlgebra {
    ambient: BlockShape,
    generators: Vec<BlockElement>,
    basis: Vec<BlockElement>,
    recipes: Vec<Recipe>,
    /// `basis[a] * basis[b] = sum_c products[a][b][c] basis[c]`
    products: Vec<Vec<Vec<C64>>>,
}

/// Generates the unital algebra of `gens` inside `ambient`.
pub fn generate_algebra(
    ambient: &BlockShape,
    gens: &[BlockElement],
    tol: &ToleranceConfig,
) -> Result<OperatorAlgebra> {
    OperatorAlgebra::generate(ambient, gens, tol)
}

impl OperatorAlgebra {
    pub fn generate(ambient: &BlockShape, gens: &[BlockElement], tol: &ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        if gens.is_empty() {
            return Err(Error::EmptyInput);
        }
        for g in gens {
            if g.shape() != ambient {
                return Err(Error::ShapeMismatch(format!(
                    "generator in {} for ambient {ambient}",
                    g.shape()
                )));
            }
        }
        let full = ambient.algebra_dim();
        let mut span = SpanBuilder::new(tol.eps_norm);
        let mut basis = Vec::new();
        let mut recipes = Vec::new();
        let unit = BlockElement::identity(ambient);
        let r = span.try_push(&unit.to_vec()).expect("unit is nonzero");
        basis.push(BlockElement::from_vec(ambient, span.basis().last().unwrap()));
        recipes.push(Recipe {
            origin: Origin::Unit,
            coeffs: r.coeffs,
            norm: r.residual_norm,
        });
        let mut next = 0;
        while next < basis.len() && basis.len() < full {
            let b = basis[next].clone();
            for (gi, g) in gens.iter().enumerate() {
                let w = g.mul(&b);
                if let Some(r) = span.try_push(&w.to_vec()) {
                    basis.push(BlockElement::from_vec(ambient, span.basis().last().unwrap()));
                    recipes.push(Recipe {
                        origin: Origin::Product {
                            generator: gi,
                            basis: next,
                        },
                        coeffs: r.coeffs,
                        norm: r.residual_norm,
                    });
                    if basis.len() == full {
                        break;
                    }
                }
            }
            next += 1;
        }
        let products = structure_constants(&basis);
        let alg = OperatorAlgebra {
            ambient: ambient.clone(),
            generators: gens.to_vec(),
            basis,
            recipes,
            products,
        };
        alg.check_closure(tol)?;
        Ok(alg)
    }

    fn check_closure(&self, tol: &ToleranceConfig) -> Result<()> {
        for (a, x) in self.basis.iter().enumerate() {
            for (b, y) in self.basis.iter().enumerate() {
                let xy = x.mul(y);
                let back = self.element(&self.products[a][b]);
                let residual = xy.sub(&back).frobenius_norm();
                if residual > tol.eps_norm * xy.frobenius_norm().max(1.0) {
                    return Err(Error::NotInSpan { residual });
                }
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> &BlockShape {
        &self.ambient
    }

    pub fn generators(&self) -> &[BlockElement] {
        &self.generators
    }

    pub fn basis(&self) -> &[BlockElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<C64>>] {
        &self.products
    }

    /// `sum_l coeffs[l] basis[l]`.
    pub fn element(&self, coeffs: &[C64]) -> BlockElement {
        assert_eq!(coeffs.len(), self.dim());
        let terms: Vec<(C64, &BlockElement)> = coeffs.iter().copied().zip(&self.basis).collect();
        BlockElement::combination(&self.ambient, &terms)
    }

    /// Basis coordinates of `x`, which must lie in the algebra.
    pub fn coordinates(&self, x: &BlockElement, tol: &ToleranceConfig) -> Result<Vec<C64>> {
        x.check_shape(&self.basis[0])?;
        let coeffs: Vec<C64> = self.basis.iter().map(|b| x.inner(b)).collect();
        let residual = x.sub(&self.element(&coeffs)).frobenius_norm();
        if residual > tol.eps_norm * x.frobenius_norm().max(1.0) {
            return Err(Error::NotInSpan { residual });
        }
        Ok(coeffs)
    }

    pub fn contains(&self, x: &BlockElement, tol: &ToleranceConfig) -> bool {
        self.coordinates(x, tol).is_ok()
    }

    /// Whether the basis span is closed under the adjoint.
    pub fn is_self_adjoint(&self, tol: &ToleranceConfig) -> bool {
        self.basis.iter().all(|b| self.contains(&b.adjoint(), tol))
    }

    /// Extends an assignment of generator images to the whole basis by
    /// replaying the generation recipes. The images live in any block
    /// algebra; multiplicativity is not checked here.
    pub fn replay(&self, gen_images: &[BlockElement]) -> Result<Vec<BlockElement>> {
        if gen_images.len() != self.generators.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} generator images for {} generators",
                gen_images.len(),
                self.generators.len()
            )));
        }
        let target = gen_images[0].shape().clone();
        for g in gen_images {
            g.check_shape(&gen_images[0])?;
        }
        let mut images: Vec<BlockElement> = Vec::with_capacity(self.dim());
        for r in &self.recipes {
            let raw = match r.origin {
                Origin::Unit => BlockElement::identity(&target),
                Origin::Product { generator, basis } => gen_images[generator].mul(&images[basis]),
            };
            let mut terms: Vec<(C64, &BlockElement)> = vec![(ONE, &raw)];
            terms.extend(r.coeffs.iter().map(|c| -c).zip(images.iter()));
            let y = BlockElement::combination(&target, &terms).scale(C64::new(1.0 / r.norm, 0.0));
            images.push(y);
        }
        Ok(images)
    }

    /// Basis images of the unital homomorphism determined by `gen_images`,
    /// after checking that it is well defined and multiplicative.
    pub fn extend_hom(&self, gen_images: &[BlockElement], tol: &ToleranceConfig) -> Result<Vec<BlockElement>> {
        let images = self.replay(gen_images)?;
        self.check_hom(&images, gen_images, tol)?;
        Ok(images)
    }

    fn check_hom(&self, images: &[BlockElement], gen_images: &[BlockElement], tol: &ToleranceConfig) -> Result<()> {
        let target = images[0].shape().clone();
        let scale = images.iter().map(|x| x.max_abs()).fold(1.0, f64::max);
        let bound = tol.eps_norm * scale * scale;
        // generators themselves must be reproduced by their coordinates
        for (g, img) in self.generators.iter().zip(gen_images) {
            let coeffs = self.coordinates(g, tol)?;
            let terms: Vec<(C64, &BlockElement)> = coeffs.into_iter().zip(images.iter()).collect();
            let d = BlockElement::combination(&target, &terms).max_abs_diff(img);
            if d > bound {
                return Err(Error::NotHomomorphism(format!(
                    "generator image inconsistent with linear relations (defect {d:.3e})"
                )));
            }
        }
        let one = self.coordinates(&BlockElement::identity(&self.ambient), tol)?;
        let terms: Vec<(C64, &BlockElement)> = one.into_iter().zip(images.iter()).collect();
        let d = BlockElement::combination(&target, &terms).max_abs_diff(&BlockElement::identity(&target));
        if d > bound {
            return Err(Error::NotHomomorphism(format!("not unital (defect {d:.3e})")));
        }
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                let lhs = images[a].mul(&images[b]);
                let terms: Vec<(C64, &BlockElement)> =
                    self.products[a][b].iter().copied().zip(images.iter()).collect();
                let rhs = BlockElement::combination(&target, &terms);
                let d = lhs.max_abs_diff(&rhs);
                if d > bound {
                    return Err(Error::NotHomomorphism(format!(
                        "basis product ({a},{b}) not preserved (defect {d:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Same algebra re-expressed through an injective change of ambient,
    /// e.g. the abstract coordinates of a decomposed *-algebra.
    pub fn transport(&self, f: impl Fn(&BlockElement) -> Result<BlockElement>, tol: &ToleranceConfig) -> Result<Self> {
        let gens = self.generators.iter().map(&f).collect::<Result<Vec<_>>>()?;
        let ambient = gens[0].shape().clone();
        Self::generate(&ambient, &gens, tol)
    }
}

fn structure_constants(basis: &[BlockElement]) -> Vec<Vec<Vec<C64>>> {
    basis
        .iter()
        .map(|x| {
            basis
                .iter()
                .map(|y| {
                    let xy = x.mul(y);
                    basis.iter().map(|b| xy.inner(b)).collect()
                })
                .collect()
        })
        .collect()
}

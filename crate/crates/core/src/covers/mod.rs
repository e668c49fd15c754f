//! C*-covers of a fixed operator algebra: verification, the cover order,
//! joins, spectral fingerprints, the Shilov extension `A + I` with the maps
//! between the two cover lattices, and the algebraic model `{(a+i, a+j)}`.
//!
//! All covers are finite-dimensional, so the lattices handled here are the
//! sub-lattices of quotient covers of a fixed ambient algebra.

mod cmax;
mod extension;
mod morphism;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fdca::{decompose_star_algebra, generates_block_algebra, star_span, BlockElement, BlockShape, QuotientMap, StarHomData};
use crate::matcore::{herm_eigs, ToleranceConfig, C64};
use crate::opalg::{BlockFamily, GapProblem, OperatorAlgebra};
use crate::word::{default_fingerprint_words, Word};

pub use cmax::{cmax_plus_model, CmaxModel};
pub use extension::{extend_by_shilov, map_n, map_q, map_r, verify_lattice, LatticeReport, ShilovExtension};
pub use morphism::{find_morphism, fit_star_hom};

/// Highest matrix level at which [`Cover::new`] searches for norm defects.
pub const ISOMETRY_LEVEL_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverRole {
    Ambient,
    Envelope,
    Quotient,
    Join,
    Induced,
    Custom,
}

impl fmt::Display for CoverRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CoverRole::Ambient => "ambient",
            CoverRole::Envelope => "envelope",
            CoverRole::Quotient => "quotient",
            CoverRole::Join => "join",
            CoverRole::Induced => "induced",
            CoverRole::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A completely isometric unital representation of `base` whose image
/// generates the block algebra `target`.
#[derive(Debug, Clone)]
pub struct Cover {
    base: Arc<OperatorAlgebra>,
    target: BlockShape,
    gen_images: Vec<BlockElement>,
    images: Vec<BlockElement>,
    role: CoverRole,
}

fn covered(xs: &[BlockFamily], ys: &[BlockFamily], eps: f64) -> bool {
    xs.iter().all(|x| ys.iter().any(|y| x.same_as(y, eps)))
}

pub(crate) fn same_base(a: &OperatorAlgebra, b: &OperatorAlgebra) -> bool {
    std::ptr::eq(a, b) || (a.ambient() == b.ambient() && a.generators() == b.generators())
}

impl Cover {
    /// Verifies multiplicativity, generation and complete isometry (levels up
    /// to [`ISOMETRY_LEVEL_CAP`]).
    pub fn new(base: Arc<OperatorAlgebra>, gen_images: Vec<BlockElement>, role: CoverRole, tol: &ToleranceConfig) -> Result<Cover> {
        let cover = Self::trusted(base, gen_images, role, tol)?;
        if !generates_block_algebra(&cover.target, &cover.gen_images, tol)? {
            let generated = star_span(&cover.target, &cover.gen_images, tol)?.len();
            return Err(Error::NotCover(format!(
                "images generate a {generated}-dimensional subalgebra of {}",
                cover.target
            )));
        }
        cover.check_isometry(tol)?;
        Ok(cover)
    }

    /// Checks only that the generator images define a unital homomorphism.
    pub(crate) fn trusted(base: Arc<OperatorAlgebra>, gen_images: Vec<BlockElement>, role: CoverRole, tol: &ToleranceConfig) -> Result<Cover> {
        let images = base
            .extend_hom(&gen_images, tol)
            .map_err(|e| Error::NotCover(e.to_string()))?;
        let target = gen_images[0].shape().clone();
        Ok(Cover {
            base,
            target,
            gen_images,
            images,
            role,
        })
    }

    /// Restricts images living in some block algebra to the C*-algebra they
    /// generate. Returns the cover and the embedding of its target.
    pub(crate) fn generated(
        base: Arc<OperatorAlgebra>,
        gen_images: Vec<BlockElement>,
        role: CoverRole,
        tol: &ToleranceConfig,
    ) -> Result<(Cover, StarHomData)> {
        let shape = gen_images[0].shape().clone();
        let sub = decompose_star_algebra(&shape, &gen_images, tol)?;
        let gens = if sub.is_full() {
            gen_images
        } else {
            gen_images.iter().map(|g| sub.to_abstract(g)).collect::<Result<Vec<_>>>()?
        };
        let cover = Self::trusted(base, gens, role, tol)?;
        Ok((cover, sub.embedding().clone()))
    }

    /// The identity representation onto the C*-algebra generated by `base`
    /// inside its ambient.
    pub fn ambient(base: Arc<OperatorAlgebra>, tol: &ToleranceConfig) -> Result<Cover> {
        let gens = base.generators().to_vec();
        Ok(Self::generated(base, gens, CoverRole::Ambient, tol)?.0)
    }

    fn check_isometry(&self, tol: &ToleranceConfig) -> Result<()> {
        let base_fams = BlockFamily::from_images(self.base.basis());
        let image_fams = BlockFamily::from_images(&self.images);
        let level_cap = self
            .base
            .ambient()
            .total_dim()
            .min(self.target.total_dim())
            .min(ISOMETRY_LEVEL_CAP);
        let restarts = (tol.optimizer_restarts / 4).max(8);
        let directions = [
            (GapProblem { plus: base_fams.iter().collect(), minus: image_fams.iter().collect(), dim: self.base.dim() }, "shrinks"),
            (GapProblem { plus: image_fams.iter().collect(), minus: base_fams.iter().collect(), dim: self.base.dim() }, "expands"),
        ];
        // a direction whose every plus family has a verbatim copy on the
        // minus side has gap at most zero at every level
        let skip = [covered(&base_fams, &image_fams, tol.eps_eq), covered(&image_fams, &base_fams, tol.eps_eq)];
        for level in 1..=level_cap {
            for (d, (problem, what)) in directions.iter().enumerate() {
                if skip[d] {
                    continue;
                }
                let seed = tol.rng_seed ^ 0xc0de_0000 ^ ((level * 2 + d) as u64);
                let best = problem.search(level, restarts, seed, crate::opalg::ASCENT_ITERATIONS, tol.eps_norm);
                if best.gap > tol.eps_norm {
                    return Err(Error::NotCover(format!(
                        "representation {what} a level-{level} norm by {:.3e}",
                        best.gap
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<OperatorAlgebra> {
        &self.base
    }

    pub fn target(&self) -> &BlockShape {
        &self.target
    }

    pub fn role(&self) -> CoverRole {
        self.role
    }

    pub fn generator_images(&self) -> &[BlockElement] {
        &self.gen_images
    }

    /// Images of the base's orthonormal basis.
    pub fn basis_images(&self) -> &[BlockElement] {
        &self.images
    }

    /// Image of the element with basis coordinates `coeffs`.
    pub fn image_of_coeffs(&self, coeffs: &[C64]) -> BlockElement {
        let terms: Vec<(C64, &BlockElement)> = coeffs.iter().copied().zip(&self.images).collect();
        BlockElement::combination(&self.target, &terms)
    }

    /// Image of an element of the base algebra.
    pub fn image(&self, x: &BlockElement, tol: &ToleranceConfig) -> Result<BlockElement> {
        Ok(self.image_of_coeffs(&self.base.coordinates(x, tol)?))
    }

    /// The represented algebra as a subalgebra of the target.
    pub fn image_algebra(&self, tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
        OperatorAlgebra::generate(&self.target, &self.gen_images, tol)
    }

    /// Composes the representation with a quotient of the target.
    pub fn quotient(&self, q: &QuotientMap, tol: &ToleranceConfig) -> Result<Cover> {
        let gens = self.gen_images.iter().map(|g| q.apply(g)).collect::<Result<Vec<_>>>()?;
        Self::trusted(self.base.clone(), gens, CoverRole::Quotient, tol)
    }

    /// Whether `apply_hom(h) ∘ self = other` on generators, within `eps_eq`
    /// relative to the image size.
    pub fn intertwines(&self, h: &StarHomData, other: &Cover, tol: &ToleranceConfig) -> bool {
        if h.source() != &self.target || h.target() != &other.target {
            return false;
        }
        self.gen_images.iter().zip(&other.gen_images).all(|(x, y)| {
            h.apply(x)
                .is_ok_and(|hx| hx.max_abs_diff(y) <= tol.eps_eq * y.max_abs().max(1.0))
        })
    }
}

/// Eigenvalues of a Hermitian word evaluated in the cover, merged when
/// closer than `eps_eq`.
pub fn spectral_fingerprint(c: &Cover, word: &Word, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let x = word.evaluate(&c.target, &c.gen_images)?;
    let mut eigs = Vec::new();
    for b in x.blocks() {
        eigs.extend(herm_eigs(b, tol)?);
    }
    eigs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for e in eigs {
        match out.last() {
            Some(&last) if (e - last).abs() <= tol.eps_eq * last.abs().max(1.0) => {}
            _ => out.push(e),
        }
    }
    Ok(out)
}

/// Every point of `small` lies within `slack` of `large`.
fn spectrum_contained(small: &[f64], large: &[f64], slack: f64) -> Option<f64> {
    small
        .iter()
        .copied()
        .find(|s| !large.iter().any(|l| (s - l).abs() <= slack))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equivalent,
    FirstDominates,
    SecondDominates,
    Incomparable,
    Unknown,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::Equivalent => "equivalent",
            Relation::FirstDominates => "first_dominates",
            Relation::SecondDominates => "second_dominates",
            Relation::Incomparable => "incomparable",
            Relation::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// A spectral value of the codomain missing from the domain, which rules
/// out any morphism between the two covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction {
    pub word: String,
    pub missing_value: f64,
}

#[derive(Debug, Clone)]
pub struct CoverOrder {
    pub relation: Relation,
    /// Morphism `c1.target -> c2.target` when one exists.
    pub forward: Option<StarHomData>,
    /// Morphism `c2.target -> c1.target` when one exists.
    pub backward: Option<StarHomData>,
    pub forward_obstruction: Option<Obstruction>,
    pub backward_obstruction: Option<Obstruction>,
}

fn obstruction(from: &Cover, to: &Cover, words: &[Word], tol: &ToleranceConfig) -> Result<Option<Obstruction>> {
    for w in words {
        let big = spectral_fingerprint(from, w, tol)?;
        let small = spectral_fingerprint(to, w, tol)?;
        if let Some(v) = spectrum_contained(&small, &big, tol.eps_norm) {
            return Ok(Some(Obstruction {
                word: w.text().to_string(),
                missing_value: v,
            }));
        }
    }
    Ok(None)
}

/// Determines the order relation between two covers of the same algebra,
/// using the generator words `g*g` and `gg*` as obstructions.
pub fn compare(c1: &Cover, c2: &Cover, tol: &ToleranceConfig) -> Result<CoverOrder> {
    let words = default_fingerprint_words(c1.base.generators().len());
    compare_with_words(c1, c2, &words, tol)
}

/// [`compare`] with caller-supplied Hermitian obstruction words.
pub fn compare_with_words(c1: &Cover, c2: &Cover, words: &[Word], tol: &ToleranceConfig) -> Result<CoverOrder> {
    if !same_base(&c1.base, &c2.base) {
        return Err(Error::BaseMismatch);
    }
    let forward_obstruction = obstruction(c1, c2, words, tol)?;
    let backward_obstruction = obstruction(c2, c1, words, tol)?;
    let forward = match forward_obstruction {
        None => find_morphism(c1, c2, tol)?,
        Some(_) => None,
    };
    let backward = match backward_obstruction {
        None => find_morphism(c2, c1, tol)?,
        Some(_) => None,
    };
    let relation = match (&forward, &backward) {
        (Some(_), Some(_)) => Relation::Equivalent,
        (Some(_), None) => Relation::FirstDominates,
        (None, Some(_)) => Relation::SecondDominates,
        (None, None) if forward_obstruction.is_some() && backward_obstruction.is_some() => Relation::Incomparable,
        (None, None) => Relation::Unknown,
    };
    Ok(CoverOrder {
        relation,
        forward,
        backward,
        forward_obstruction,
        backward_obstruction,
    })
}

/// The direct sum of two covers, cut down to the C*-algebra it generates.
pub fn join(c1: &Cover, c2: &Cover, tol: &ToleranceConfig) -> Result<Cover> {
    Ok(join_with_certificates(c1, c2, tol)?.0)
}

/// [`join`] together with the block projections onto each summand, which
/// certify that the join dominates both inputs.
pub fn join_with_certificates(c1: &Cover, c2: &Cover, tol: &ToleranceConfig) -> Result<(Cover, StarHomData, StarHomData)> {
    if !same_base(&c1.base, &c2.base) {
        return Err(Error::BaseMismatch);
    }
    let gens: Vec<BlockElement> = c1
        .gen_images
        .iter()
        .zip(&c2.gen_images)
        .map(|(x, y)| x.direct_sum(y))
        .collect();
    let sum_shape = gens[0].shape().clone();
    let (cover, embedding) = Cover::generated(c1.base.clone(), gens, CoverRole::Join, tol)?;
    let m1 = c1.target.num_blocks();
    let m2 = c2.target.num_blocks();
    let first = QuotientMap::new(&crate::fdca::Ideal::new(&sum_shape, m1..m1 + m2)?)?;
    let second = QuotientMap::new(&crate::fdca::Ideal::new(&sum_shape, 0..m1)?)?;
    let to_first = embedding.then(&first.as_hom())?;
    let to_second = embedding.then(&second.as_hom())?;
    if !cover.intertwines(&to_first, c1, tol) || !cover.intertwines(&to_second, c2, tol) {
        return Err(Error::NotHomomorphism("join projections fail to intertwine".into()));
    }
    Ok((cover, to_first, to_second))
}

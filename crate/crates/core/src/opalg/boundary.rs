use std::sync::Arc;

use super::level::{BlockFamily, GapProblem};
use super::OperatorAlgebra;
use crate::covers::{Cover, CoverRole};
use crate::error::{Error, Result};
use crate::fdca::{enumerate_ideals, Ideal, QuotientMap};
use crate::matcore::{ToleranceConfig, C64};

pub(crate) const ASCENT_ITERATIONS: usize = 80;

/// A matrix-level element whose norm drops under the quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub level: usize,
    /// Coefficients in the layout of [`super::LevelElement`].
    pub coeffs: Vec<C64>,
    pub kept_norm: f64,
    pub deleted_norm: f64,
}

impl Witness {
    pub fn margin(&self) -> f64 {
        self.deleted_norm - self.kept_norm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVerdict {
    pub is_boundary: bool,
    pub witness: Option<Witness>,
    /// Largest observed `||u_deleted|| - ||u_kept||` on the unit sphere.
    pub margin: f64,
    /// Highest matrix level examined.
    pub levels_checked: usize,
}

fn level_seed(tol: &ToleranceConfig, ideal: &Ideal, level: usize) -> u64 {
    let mask: u64 = ideal.members().iter().map(|&i| 1u64 << (i % 64)).sum();
    tol.rng_seed ^ mask.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ ((level as u64) << 48)
}

/// Decides whether deleting the blocks of `ideal` is completely isometric on
/// `a`. Levels up to the total deleted dimension are searched, which
/// suffices because completely bounded norms of maps into `M_K` are attained
/// at level `K`.
pub fn is_boundary_ideal(a: &OperatorAlgebra, ideal: &Ideal, tol: &ToleranceConfig) -> Result<BoundaryVerdict> {
    if ideal.shape() != a.ambient() {
        return Err(Error::ShapeMismatch(format!(
            "ideal over {} for algebra in {}",
            ideal.shape(),
            a.ambient()
        )));
    }
    if ideal.is_empty() {
        return Ok(BoundaryVerdict {
            is_boundary: true,
            witness: None,
            margin: 0.0,
            levels_checked: 0,
        });
    }
    let unit = a.coordinates(&crate::fdca::BlockElement::identity(a.ambient()), tol)?;
    if ideal.is_full() {
        // the quotient is zero, so the unit loses its norm
        let n = unit.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        return Ok(BoundaryVerdict {
            is_boundary: false,
            witness: Some(Witness {
                level: 1,
                coeffs: unit.iter().map(|z| z / n).collect(),
                kept_norm: 0.0,
                deleted_norm: 1.0 / n,
            }),
            margin: 1.0 / n,
            levels_checked: 1,
        });
    }
    let families = BlockFamily::from_images(a.basis());
    let problem = GapProblem {
        plus: ideal.members().iter().map(|&i| &families[i]).collect(),
        minus: ideal.complement().into_iter().map(|i| &families[i]).collect(),
        dim: a.dim(),
    };
    let max_level = ideal.deleted_dim();
    let mut margin = f64::NEG_INFINITY;
    for level in 1..=max_level {
        let best = problem.search(
            level,
            tol.optimizer_restarts,
            level_seed(tol, ideal, level),
            ASCENT_ITERATIONS,
            tol.eps_norm,
        );
        margin = margin.max(best.gap);
        if best.gap > tol.eps_norm {
            return Ok(BoundaryVerdict {
                is_boundary: false,
                witness: Some(Witness {
                    level,
                    coeffs: best.coeffs,
                    kept_norm: best.minus_norm,
                    deleted_norm: best.plus_norm,
                }),
                margin: best.gap,
                levels_checked: level,
            });
        }
    }
    Ok(BoundaryVerdict {
        is_boundary: true,
        witness: None,
        margin,
        levels_checked: max_level,
    })
}

/// Largest ideal of the ambient whose deletion is completely isometric on `a`.
///
/// The union of boundary singletons is tried first and re-verified; if the
/// union fails (e.g. two blocks that each duplicate the other), every ideal is
/// checked and the largest boundary ideal, first in enumeration order, wins.
pub fn shilov_ideal(a: &OperatorAlgebra, tol: &ToleranceConfig) -> Result<Ideal> {
    let shape = a.ambient();
    let mut union = Ideal::zero(shape);
    for i in 0..shape.num_blocks() {
        let single = Ideal::new(shape, [i])?;
        if is_boundary_ideal(a, &single, tol)?.is_boundary {
            union = union.union(&single);
        }
    }
    if is_boundary_ideal(a, &union, tol)?.is_boundary {
        return Ok(union);
    }
    log::warn!("union {union} of boundary blocks fails re-verification; searching all ideals");
    let mut best: Option<Ideal> = None;
    for ideal in enumerate_ideals(shape)? {
        if best.as_ref().is_some_and(|b| b.len() >= ideal.len()) {
            continue;
        }
        if is_boundary_ideal(a, &ideal, tol)?.is_boundary {
            best = Some(ideal);
        }
    }
    best.ok_or_else(|| Error::ShilovInconsistent("not even the zero ideal verified".into()))
}

/// The C*-envelope: the generated C*-algebra of `a` modulo its Shilov ideal.
pub fn envelope(a: &OperatorAlgebra, tol: &ToleranceConfig) -> Result<Cover> {
    let base = Arc::new(a.clone());
    let ambient = Cover::ambient(base.clone(), tol)?;
    let image = ambient.image_algebra(tol)?;
    let shilov = shilov_ideal(&image, tol)?;
    let q = QuotientMap::new(&shilov)
        .map_err(|_| Error::ShilovInconsistent("Shilov ideal covers every block".into()))?;
    let gens = ambient
        .generator_images()
        .iter()
        .map(|g| q.apply(g))
        .collect::<Result<Vec<_>>>()?;
    let env = Cover::trusted(base, gens, CoverRole::Envelope, tol)?;
    let residual = shilov_ideal(&env.image_algebra(tol)?, tol)?;
    if !residual.is_empty() {
        return Err(Error::ShilovInconsistent(format!(
            "envelope still has boundary ideal {residual}"
        )));
    }
    Ok(env)
}

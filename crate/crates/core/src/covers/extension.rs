use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{compare, join, same_base, Cover, CoverRole, Relation};
use crate::error::{Error, Result};
use crate::fdca::{enumerate_ideals, BlockElement, Ideal, QuotientMap};
use crate::matcore::{ToleranceConfig, C64, ZERO};
use crate::opalg::{is_boundary_ideal, shilov_ideal, OperatorAlgebra};

/// The algebra `A + I` obtained by adjoining the Shilov ideal `I` of the
/// ambient, with the homomorphism `p: A + I -> A` killing `I`.
#[derive(Debug, Clone)]
pub struct ShilovExtension {
    a: Arc<OperatorAlgebra>,
    ideal: Ideal,
    api: Arc<OperatorAlgebra>,
    /// Row `k`: coordinates in `A`'s basis of `p(api.basis[k])`.
    projection: Vec<Vec<C64>>,
}

impl ShilovExtension {
    pub fn algebra(&self) -> &Arc<OperatorAlgebra> {
        &self.a
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    /// The extended algebra `A + I`.
    pub fn extended(&self) -> &Arc<OperatorAlgebra> {
        &self.api
    }

    /// Coordinates in `A`'s basis of `p(x)` for `x` in `A + I`.
    pub fn project(&self, x: &BlockElement, tol: &ToleranceConfig) -> Result<Vec<C64>> {
        let c = self.api.coordinates(x, tol)?;
        let mut out = vec![ZERO; self.a.dim()];
        for (ck, row) in c.iter().zip(&self.projection) {
            for (o, r) in out.iter_mut().zip(row) {
                *o += ck * r;
            }
        }
        Ok(out)
    }
}

fn kept_vec(x: &BlockElement, kept: &[usize]) -> Vec<C64> {
    x.restrict(kept).to_vec()
}

/// Builds `A + I` for the Shilov ideal `I` of `a` and verifies that the sum
/// is direct, that `p` is a homomorphism fixing `A` and killing `I`, and
/// that `A + I` has no nonzero boundary ideal.
pub fn extend_by_shilov(a: &OperatorAlgebra, tol: &ToleranceConfig) -> Result<ShilovExtension> {
    let ideal = shilov_ideal(a, tol)?;
    let shape = a.ambient().clone();
    let mut gens = a.generators().to_vec();
    for &i in ideal.members() {
        let n = shape.size(i);
        for r in 0..n {
            for c in 0..n {
                gens.push(BlockElement::matrix_unit(&shape, i, r, c));
            }
        }
    }
    let api = if ideal.is_empty() {
        a.clone()
    } else {
        OperatorAlgebra::generate(&shape, &gens, tol)?
    };
    let ideal_dim: usize = ideal.members().iter().map(|&i| shape.size(i).pow(2)).sum();
    if api.dim() != a.dim() + ideal_dim {
        return Err(Error::ShilovInconsistent(format!(
            "A + I has dimension {} but A and I have {} and {ideal_dim}",
            api.dim(),
            a.dim()
        )));
    }

    // p(x) is the element of A agreeing with x off the ideal
    let kept = ideal.complement();
    let a_kept: Vec<Vec<C64>> = a.basis().iter().map(|b| kept_vec(b, &kept)).collect();
    let d = a.dim();
    let gram = DMatrix::from_fn(d, d, |r, c| {
        a_kept[c].iter().zip(&a_kept[r]).map(|(x, y)| y.conj() * x).sum::<C64>()
    });
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::ShilovInconsistent("quotient is not injective on A".into()))?;
    let mut projection = Vec::with_capacity(api.dim());
    for x in api.basis() {
        let xv = kept_vec(x, &kept);
        let rhs = DVector::from_fn(d, |r, _| xv.iter().zip(&a_kept[r]).map(|(x, y)| y.conj() * x).sum::<C64>());
        let coeffs: Vec<C64> = chol.solve(&rhs).iter().copied().collect();
        let residual = a.element(&coeffs).restrict(&kept).sub(&x.restrict(&kept)).frobenius_norm();
        if residual > tol.eps_norm {
            return Err(Error::NotInSpan { residual });
        }
        projection.push(coeffs);
    }
    let ext = ShilovExtension {
        a: Arc::new(a.clone()),
        ideal,
        api: Arc::new(api),
        projection,
    };
    ext.verify(tol)?;
    Ok(ext)
}

impl ShilovExtension {
    fn verify(&self, tol: &ToleranceConfig) -> Result<()> {
        let fail = |m: String| Err(Error::ShilovInconsistent(m));
        let p_elem = |x: &BlockElement| -> Result<BlockElement> { Ok(self.a.element(&self.project(x, tol)?)) };
        for b in self.a.basis() {
            if p_elem(b)?.max_abs_diff(b) > tol.eps_norm {
                return fail("p does not fix A".into());
            }
        }
        let shape = self.a.ambient();
        for &i in self.ideal.members() {
            let e = BlockElement::block_unit(shape, i);
            if p_elem(&e)?.max_abs() > tol.eps_norm {
                return fail("p does not vanish on I".into());
            }
        }
        for x in self.api.basis() {
            for y in self.api.basis() {
                let lhs = p_elem(&x.mul(y))?;
                let rhs = p_elem(x)?.mul(&p_elem(y)?);
                if lhs.max_abs_diff(&rhs) > tol.eps_norm {
                    return fail("p is not multiplicative".into());
                }
            }
        }
        let residual = shilov_ideal(&self.api, tol)?;
        if !residual.is_empty() {
            return fail(format!("A + I still has boundary ideal {residual}"));
        }
        if !self.a.is_self_adjoint(tol) && self.api.is_self_adjoint(tol) {
            return fail("A + I became self-adjoint".into());
        }
        Ok(())
    }
}

/// `Q`: a cover `(D, η)` of `A + I` goes to `D / <η(I)>` with `η|_A`.
pub fn map_q(ext: &ShilovExtension, d: &Cover, tol: &ToleranceConfig) -> Result<Cover> {
    if !same_base(d.base(), &ext.api) {
        return Err(Error::BaseMismatch);
    }
    let shape = ext.a.ambient();
    let target = d.target();
    let mut e_i = BlockElement::zeros(shape);
    for &i in ext.ideal.members() {
        e_i = e_i.add(&BlockElement::block_unit(shape, i));
    }
    let image = d.image(&e_i, tol)?;
    let mut j_members = Vec::new();
    for (k, blk) in image.blocks().iter().enumerate() {
        let n = target.size(k);
        let one = crate::matcore::ComplexMatrix::identity(n);
        if blk.dist(&one) <= tol.eps_norm * (n as f64) {
            j_members.push(k);
        } else if blk.max_abs() > tol.eps_norm {
            return Err(Error::ImageNotIdeal(format!(
                "image of the ideal's unit is not central in target block {}",
                k + 1
            )));
        }
    }
    let j = Ideal::new(target, j_members)?;
    let j_dim: usize = j.members().iter().map(|&k| target.size(k).pow(2)).sum();
    let i_dim: usize = ext.ideal.members().iter().map(|&i| shape.size(i).pow(2)).sum();
    if j_dim != i_dim {
        return Err(Error::ImageNotIdeal(format!(
            "ideal of dimension {i_dim} maps onto blocks of dimension {j_dim}"
        )));
    }
    let q = QuotientMap::new(&j)?;
    let gens = ext
        .a
        .generators()
        .iter()
        .map(|g| q.apply(&d.image(g, tol)?))
        .collect::<Result<Vec<_>>>()?;
    Cover::new(ext.a.clone(), gens, CoverRole::Quotient, tol)
}

/// `N`: a cover `(C, ι)` of `A` goes to the cover of `A + I` generated by
/// `(ι ∘ p) ⊕ id`.
pub fn map_n(ext: &ShilovExtension, c: &Cover, tol: &ToleranceConfig) -> Result<Cover> {
    if !same_base(c.base(), &ext.a) {
        return Err(Error::BaseMismatch);
    }
    let amb = Cover::ambient(ext.api.clone(), tol)?;
    let gens = ext
        .api
        .generators()
        .iter()
        .map(|x| Ok(c.image_of_coeffs(&ext.project(x, tol)?).direct_sum(&amb.image(x, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover::generated(ext.api.clone(), gens, CoverRole::Induced, tol)?.0)
}

/// `R`: restriction of a cover of `A + I` to `A`.
pub fn map_r(ext: &ShilovExtension, d: &Cover, tol: &ToleranceConfig) -> Result<Cover> {
    if !same_base(d.base(), &ext.api) {
        return Err(Error::BaseMismatch);
    }
    let gens = ext
        .a
        .generators()
        .iter()
        .map(|g| d.image(g, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover::generated(ext.a.clone(), gens, CoverRole::Induced, tol)?.0)
}

/// Outcome of one lattice identity on one cover.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCheck {
    pub name: String,
    pub relation: Relation,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct LatticeReport {
    pub shilov: Ideal,
    pub extension_dim: usize,
    /// Boundary ideals of the ambient cover of `A`.
    pub a_ideals: Vec<Ideal>,
    /// Boundary ideals of the ambient cover of `A + I`.
    pub api_ideals: Vec<Ideal>,
    pub checks: Vec<LatticeCheck>,
}

impl LatticeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn quotient_covers(amb: &Cover, tol: &ToleranceConfig) -> Result<Vec<(Ideal, Cover)>> {
    let image = amb.image_algebra(tol)?;
    let mut out = Vec::new();
    for s in enumerate_ideals(amb.target())? {
        if s.is_full() || !is_boundary_ideal(&image, &s, tol)?.is_boundary {
            continue;
        }
        let cover = if s.is_empty() {
            amb.clone()
        } else {
            amb.quotient(&QuotientMap::new(&s)?, tol)?
        };
        out.push((s, cover));
    }
    Ok(out)
}

/// Runs the lattice identities on every quotient cover of the ambient covers
/// of `A` and `A + I`: `QN = id`, `NQ = id`, `RN = join with the ambient`,
/// `R >= Q`, and order preservation of `N`.
pub fn verify_lattice(a: &OperatorAlgebra, tol: &ToleranceConfig) -> Result<LatticeReport> {
    let ext = extend_by_shilov(a, tol)?;
    let amb_a = Cover::ambient(ext.a.clone(), tol)?;
    let amb_api = Cover::ambient(ext.api.clone(), tol)?;
    let a_covers = quotient_covers(&amb_a, tol)?;
    let api_covers = quotient_covers(&amb_api, tol)?;
    let mut checks = Vec::new();
    let mut record = |name: String, rel: Relation, ok: &[Relation]| {
        checks.push(LatticeCheck {
            pass: ok.contains(&rel),
            name,
            relation: rel,
        });
    };
    let mut n_images = Vec::new();
    for (s, c) in &a_covers {
        let n = map_n(&ext, c, tol)?;
        let qn = map_q(&ext, &n, tol)?;
        record(format!("QN = id on A-cover {s}"), compare(&qn, c, tol)?.relation, &[Relation::Equivalent]);
        let rn = map_r(&ext, &n, tol)?;
        let jn = join(c, &amb_a, tol)?;
        record(format!("RN = join with ambient on A-cover {s}"), compare(&rn, &jn, tol)?.relation, &[Relation::Equivalent]);
        n_images.push(n);
    }
    for (x, (s1, c1)) in a_covers.iter().enumerate() {
        for (y, (s2, c2)) in a_covers.iter().enumerate() {
            if x == y {
                continue;
            }
            if compare(c1, c2, tol)?.relation == Relation::FirstDominates {
                let rel = compare(&n_images[x], &n_images[y], tol)?.relation;
                record(
                    format!("N preserves order {s1} >= {s2}"),
                    rel,
                    &[Relation::FirstDominates, Relation::Equivalent],
                );
            }
        }
    }
    for (s, d) in &api_covers {
        let q = map_q(&ext, d, tol)?;
        let nq = map_n(&ext, &q, tol)?;
        record(format!("NQ = id on (A+I)-cover {s}"), compare(&nq, d, tol)?.relation, &[Relation::Equivalent]);
        let r = map_r(&ext, d, tol)?;
        record(
            format!("R >= Q on (A+I)-cover {s}"),
            compare(&r, &q, tol)?.relation,
            &[Relation::FirstDominates, Relation::Equivalent],
        );
    }
    Ok(LatticeReport {
        shilov: ext.ideal.clone(),
        extension_dim: ext.api.dim(),
        a_ideals: a_covers.into_iter().map(|(s, _)| s).collect(),
        api_ideals: api_covers.into_iter().map(|(s, _)| s).collect(),
        checks,
    })
}

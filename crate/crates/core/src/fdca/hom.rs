use std::fmt;

use super::{BlockElement, BlockShape};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, ToleranceConfig};

/// A unital *-homomorphism in standard form. Target block `i` receives
/// `U_i (x_1^{(μ_i1)} ⊕ x_2^{(μ_i2)} ⊕ ...) U_i*`, where `x_j^{(μ)}` is `μ`
/// consecutive copies of source block `j`.
#[derive(Clone, PartialEq)]
pub struct StarHomData {
    source: BlockShape,
    target: BlockShape,
    multiplicity: Vec<Vec<usize>>,
    conjugators: Vec<ComplexMatrix>,
}

impl fmt::Debug for StarHomData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StarHomData")
            .field("source", &self.source.sizes())
            .field("target", &self.target.sizes())
            .field("multiplicity", &self.multiplicity)
            .finish_non_exhaustive()
    }
}

impl StarHomData {
    pub fn new(
        source: BlockShape,
        target: BlockShape,
        multiplicity: Vec<Vec<usize>>,
        conjugators: Vec<ComplexMatrix>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if multiplicity.len() != target.num_blocks()
            || multiplicity.iter().any(|row| row.len() != source.num_blocks())
        {
            return Err(Error::InvalidHom(format!(
                "multiplicity matrix must be {}x{}",
                target.num_blocks(),
                source.num_blocks()
            )));
        }
        for (i, row) in multiplicity.iter().enumerate() {
            let filled: usize = row.iter().zip(source.sizes()).map(|(m, n)| m * n).sum();
            if filled != target.size(i) {
                return Err(Error::InvalidHom(format!(
                    "target block {} has size {} but multiplicities fill {filled}",
                    i + 1,
                    target.size(i)
                )));
            }
        }
        if conjugators.len() != target.num_blocks() {
            return Err(Error::InvalidHom("one conjugator per target block required".into()));
        }
        for (i, u) in conjugators.iter().enumerate() {
            let n = target.size(i);
            if u.rows() != n || u.cols() != n {
                return Err(Error::InvalidHom(format!("conjugator {} has wrong size", i + 1)));
            }
            let defect = (&u.adjoint() * u).dist(&ComplexMatrix::identity(n));
            if defect > tol.eps_eq * (n as f64).sqrt().max(1.0) * 10.0 {
                return Err(Error::InvalidHom(format!(
                    "conjugator {} is not unitary (defect {defect:.3e})",
                    i + 1
                )));
            }
        }
        Ok(Self::from_parts_unchecked(source, target, multiplicity, conjugators))
    }

    pub(crate) fn from_parts_unchecked(
        source: BlockShape,
        target: BlockShape,
        multiplicity: Vec<Vec<usize>>,
        conjugators: Vec<ComplexMatrix>,
    ) -> Self {
        StarHomData {
            source,
            target,
            multiplicity,
            conjugators,
        }
    }

    pub fn identity(shape: &BlockShape) -> Self {
        let m = shape.num_blocks();
        StarHomData {
            source: shape.clone(),
            target: shape.clone(),
            multiplicity: (0..m).map(|i| (0..m).map(|j| usize::from(i == j)).collect()).collect(),
            conjugators: shape.sizes().iter().map(|&n| ComplexMatrix::identity(n)).collect(),
        }
    }

    pub fn source(&self) -> &BlockShape {
        &self.source
    }

    pub fn target(&self) -> &BlockShape {
        &self.target
    }

    pub fn multiplicity(&self) -> &[Vec<usize>] {
        &self.multiplicity
    }

    pub fn conjugators(&self) -> &[ComplexMatrix] {
        &self.conjugators
    }

    /// Injective iff every source block appears in some target block.
    pub fn is_injective(&self) -> bool {
        (0..self.source.num_blocks()).all(|j| self.multiplicity.iter().any(|row| row[j] > 0))
    }

    /// The standard-form diagonal of target block `i` before conjugation.
    fn stacked(&self, i: usize, x: &BlockElement) -> ComplexMatrix {
        let mut parts = Vec::new();
        for (j, &mu) in self.multiplicity[i].iter().enumerate() {
            for _ in 0..mu {
                parts.push(x.block(j));
            }
        }
        ComplexMatrix::direct_sum(&parts)
    }

    pub fn apply(&self, x: &BlockElement) -> Result<BlockElement> {
        if x.shape() != &self.source {
            return Err(Error::ShapeMismatch(format!(
                "homomorphism expects {}, got {}",
                self.source,
                x.shape()
            )));
        }
        let blocks = (0..self.target.num_blocks())
            .map(|i| {
                let u = &self.conjugators[i];
                &(u * &self.stacked(i, x)) * &u.adjoint()
            })
            .collect();
        BlockElement::new(&self.target, blocks)
    }

    /// Recovers `x` from `apply(x)` for an injective homomorphism, reading each
    /// source block from its first copy.
    pub fn pull_back(&self, y: &BlockElement) -> Result<BlockElement> {
        if y.shape() != &self.target {
            return Err(Error::ShapeMismatch(format!(
                "pull-back expects {}, got {}",
                self.target,
                y.shape()
            )));
        }
        let mut blocks = Vec::with_capacity(self.source.num_blocks());
        for j in 0..self.source.num_blocks() {
            let i = (0..self.target.num_blocks())
                .find(|&i| self.multiplicity[i][j] > 0)
                .ok_or_else(|| Error::InvalidHom(format!("source block {} is killed", j + 1)))?;
            let u = &self.conjugators[i];
            let inner = &(&u.adjoint() * y.block(i)) * u;
            let offset: usize = (0..j).map(|k| self.multiplicity[i][k] * self.source.size(k)).sum();
            let n = self.source.size(j);
            blocks.push(inner.view(offset, offset, n, n));
        }
        BlockElement::new(&self.source, blocks)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &StarHomData) -> Result<StarHomData> {
        if next.source != self.target {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.source, self.target, next.source, next.target
            )));
        }
        let ns = self.source.num_blocks();
        let mut multiplicity = Vec::with_capacity(next.target.num_blocks());
        let mut conjugators = Vec::with_capacity(next.target.num_blocks());
        for i in 0..next.target.num_blocks() {
            // Diagonal layout of next's block i after substituting self:
            // a sequence of source-block labels, each followed by its size.
            let mut labels = Vec::new();
            let mut inner_parts = Vec::new();
            for (k, &mu) in next.multiplicity[i].iter().enumerate() {
                for _ in 0..mu {
                    inner_parts.push(&self.conjugators[k]);
                    for (j, &nu) in self.multiplicity[k].iter().enumerate() {
                        labels.extend(std::iter::repeat_n(j, nu));
                    }
                }
            }
            let row: Vec<usize> = (0..ns).map(|j| labels.iter().filter(|&&l| l == j).count()).collect();
            let n = next.target.size(i);
            // current position of each standard-order position
            let mut starts = Vec::with_capacity(labels.len());
            let mut at = 0;
            for &l in &labels {
                starts.push(at);
                at += self.source.size(l);
            }
            let mut order: Vec<usize> = (0..labels.len()).collect();
            order.sort_by_key(|&p| labels[p]);
            let mut perm = ComplexMatrix::zeros(n, n);
            let mut std_at = 0;
            for &p in &order {
                for r in 0..self.source.size(labels[p]) {
                    perm.set(starts[p] + r, std_at + r, crate::matcore::ONE);
                }
                std_at += self.source.size(labels[p]);
            }
            let inner = if inner_parts.is_empty() {
                ComplexMatrix::identity(n)
            } else {
                ComplexMatrix::direct_sum(&inner_parts)
            };
            conjugators.push(&(&next.conjugators[i] * &inner) * &perm);
            multiplicity.push(row);
        }
        Ok(StarHomData {
            source: self.source.clone(),
            target: next.target.clone(),
            multiplicity,
            conjugators,
        })
    }
}

//! Finite-dimensional C*-algebras `M_{n_1} ⊕ ... ⊕ M_{n_m}`: shapes,
//! elements, ideals (block subsets), quotients and *-homomorphisms.

mod decompose;
mod hom;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::matcore::{spectral_norm, ComplexMatrix, C64, ZERO};

pub use decompose::{decompose_star_algebra, generates_block_algebra, star_span, StarSubalgebra};
pub use hom::StarHomData;

/// Block sizes `[n_1, ..., n_m]` of a direct sum of full matrix algebras.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockShape {
    sizes: Vec<usize>,
}

impl BlockShape {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::EmptyInput);
        }
        if sizes.contains(&0) {
            return Err(Error::ShapeMismatch(format!("zero block size in {sizes:?}")));
        }
        Ok(BlockShape { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, block: usize) -> usize {
        self.sizes[block]
    }

    /// Dimension of the Hilbert space the algebra acts on.
    pub fn total_dim(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Complex dimension of the algebra, `sum n_i^2`.
    pub fn algebra_dim(&self) -> usize {
        self.sizes.iter().map(|n| n * n).sum()
    }

    pub fn concat(&self, other: &BlockShape) -> BlockShape {
        let mut sizes = self.sizes.clone();
        sizes.extend_from_slice(&other.sizes);
        BlockShape { sizes }
    }

    /// Shape left after deleting the blocks of `ideal`, with the original
    /// indices of the surviving blocks.
    pub fn remove(&self, ideal: &Ideal) -> Result<(BlockShape, Vec<usize>)> {
        let kept = ideal.complement();
        if kept.is_empty() {
            return Err(Error::EmptyQuotient);
        }
        let sizes = kept.iter().map(|&i| self.sizes[i]).collect();
        Ok((BlockShape { sizes }, kept))
    }

    /// Offset of each block on the concatenated diagonal.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.sizes
            .iter()
            .map(|n| {
                let o = acc;
                acc += n;
                o
            })
            .collect()
    }
}

impl fmt::Display for BlockShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sizes
            .iter()
            .map(|&n| if n == 1 { "C".to_string() } else { format!("M{n}") })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// An element of a block algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockElement {
    shape: BlockShape,
    blocks: Vec<ComplexMatrix>,
}

impl BlockElement {
    pub fn new(shape: &BlockShape, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks supplied for shape {shape}",
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(shape.sizes()).enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "block {} is {}x{}, expected {n}x{n}",
                    i + 1,
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(BlockElement {
            shape: shape.clone(),
            blocks,
        })
    }

    /// Infers the shape from square blocks.
    pub fn from_blocks(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let sizes = blocks.iter().map(|b| b.rows()).collect();
        let shape = BlockShape::new(sizes)?;
        Self::new(&shape, blocks)
    }

    pub fn zeros(shape: &BlockShape) -> Self {
        BlockElement {
            shape: shape.clone(),
            blocks: shape.sizes().iter().map(|&n| ComplexMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn identity(shape: &BlockShape) -> Self {
        Self::scalar(shape, C64::new(1.0, 0.0))
    }

    pub fn scalar(shape: &BlockShape, c: C64) -> Self {
        BlockElement {
            shape: shape.clone(),
            blocks: shape
                .sizes()
                .iter()
                .map(|&n| ComplexMatrix::identity(n).scale(c))
                .collect(),
        }
    }

    /// `E_{ij}` inside block `block` (all indices zero-based).
    pub fn matrix_unit(shape: &BlockShape, block: usize, i: usize, j: usize) -> Self {
        let mut x = Self::zeros(shape);
        let n = shape.size(block);
        x.blocks[block] = ComplexMatrix::unit(n, n, i, j);
        x
    }

    /// Unit of block `block`, zero elsewhere.
    pub fn block_unit(shape: &BlockShape, block: usize) -> Self {
        let mut x = Self::zeros(shape);
        x.blocks[block] = ComplexMatrix::identity(shape.size(block));
        x
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &ComplexMatrix {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<ComplexMatrix> {
        self.blocks
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> Self {
        assert_eq!(self.shape, other.shape, "block shapes differ");
        BlockElement {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Product; panics when shapes differ (use [`Self::try_mul`] for input data).
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.mul(other))
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{} versus {}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: C64) -> Self {
        BlockElement {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        BlockElement {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// C*-norm: the largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| spectral_norm(b.as_dmatrix()))
            .fold(0.0, f64::max)
    }

    /// Trace inner product `tr(other* self)` summed over blocks.
    pub fn inner(&self, other: &Self) -> C64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(|b| b.max_abs()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Coordinates in the concatenated column-major layout.
    pub fn to_vec(&self) -> Vec<C64> {
        self.blocks.iter().flat_map(|b| b.to_vec()).collect()
    }

    pub fn from_vec(shape: &BlockShape, data: &[C64]) -> Self {
        assert_eq!(data.len(), shape.algebra_dim());
        let mut blocks = Vec::with_capacity(shape.num_blocks());
        let mut at = 0;
        for &n in shape.sizes() {
            blocks.push(ComplexMatrix::from_vec(n, n, &data[at..at + n * n]));
            at += n * n;
        }
        BlockElement {
            shape: shape.clone(),
            blocks,
        }
    }

    /// Linear combination `sum c_k x_k`; all terms share `shape`.
    pub fn combination(shape: &BlockShape, terms: &[(C64, &BlockElement)]) -> Self {
        let mut data = vec![ZERO; shape.algebra_dim()];
        for (c, x) in terms {
            for (d, v) in data.iter_mut().zip(x.to_vec()) {
                *d += c * v;
            }
        }
        Self::from_vec(shape, &data)
    }

    /// Keeps the listed blocks, in the given order.
    pub fn restrict(&self, kept: &[usize]) -> Self {
        let sizes = kept.iter().map(|&i| self.shape.size(i)).collect();
        BlockElement {
            shape: BlockShape { sizes },
            blocks: kept.iter().map(|&i| self.blocks[i].clone()).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        BlockElement {
            shape: self.shape.concat(&other.shape),
            blocks,
        }
    }

    /// The element as one block-diagonal matrix.
    pub fn to_dense(&self) -> ComplexMatrix {
        let parts: Vec<&ComplexMatrix> = self.blocks.iter().collect();
        ComplexMatrix::direct_sum(&parts)
    }
}

/// A two-sided ideal, i.e. a set of blocks. Indices are zero-based in the API
/// and printed one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    shape: BlockShape,
    members: BTreeSet<usize>,
}

impl Ideal {
    pub fn new(shape: &BlockShape, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i >= shape.num_blocks()) {
            return Err(Error::ShapeMismatch(format!(
                "block {} does not exist in {shape}",
                bad + 1
            )));
        }
        Ok(Ideal {
            shape: shape.clone(),
            members,
        })
    }

    /// Builds an ideal from one-based block numbers.
    pub fn from_one_based(shape: &BlockShape, members: &[usize]) -> Result<Self> {
        if members.contains(&0) {
            return Err(Error::ShapeMismatch("block numbers start at 1".into()));
        }
        Self::new(shape, members.iter().map(|i| i - 1))
    }

    pub fn zero(shape: &BlockShape) -> Self {
        Ideal {
            shape: shape.clone(),
            members: BTreeSet::new(),
        }
    }

    pub fn full(shape: &BlockShape) -> Self {
        Ideal {
            shape: shape.clone(),
            members: (0..shape.num_blocks()).collect(),
        }
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, block: usize) -> bool {
        self.members.contains(&block)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.shape.num_blocks()
    }

    /// Blocks outside the ideal, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.shape.num_blocks())
            .filter(|i| !self.members.contains(i))
            .collect()
    }

    pub fn union(&self, other: &Ideal) -> Ideal {
        Ideal {
            shape: self.shape.clone(),
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Hilbert-space dimension carried by the deleted blocks.
    pub fn deleted_dim(&self) -> usize {
        self.members.iter().map(|&i| self.shape.size(i)).sum()
    }

    /// One-based block numbers.
    pub fn one_based(&self) -> Vec<usize> {
        self.members.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The quotient map by an ideal, realized as block deletion.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientMap {
    ideal: Ideal,
    target: BlockShape,
    kept: Vec<usize>,
}

impl QuotientMap {
    pub fn new(ideal: &Ideal) -> Result<Self> {
        let (target, kept) = ideal.shape().remove(ideal)?;
        Ok(QuotientMap {
            ideal: ideal.clone(),
            target,
            kept,
        })
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn target(&self) -> &BlockShape {
        &self.target
    }

    /// Original indices of the surviving blocks.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn apply(&self, x: &BlockElement) -> Result<BlockElement> {
        if x.shape() != self.ideal.shape() {
            return Err(Error::ShapeMismatch(format!(
                "element of {} given to quotient of {}",
                x.shape(),
                self.ideal.shape()
            )));
        }
        Ok(x.restrict(&self.kept))
    }

    /// The quotient map as *-homomorphism data.
    pub fn as_hom(&self) -> StarHomData {
        let source = self.ideal.shape();
        let multiplicity = self
            .kept
            .iter()
            .map(|&k| (0..source.num_blocks()).map(|j| usize::from(j == k)).collect())
            .collect();
        StarHomData::from_parts_unchecked(
            source.clone(),
            self.target.clone(),
            multiplicity,
            self.target.sizes().iter().map(|&n| ComplexMatrix::identity(n)).collect(),
        )
    }
}

/// Image of `x` in the quotient by `ideal`.
pub fn quotient(x: &BlockElement, ideal: &Ideal) -> Result<BlockElement> {
    QuotientMap::new(ideal)?.apply(x)
}

/// All `2^m` ideals ordered by cardinality, then lexicographically.
pub fn enumerate_ideals(shape: &BlockShape) -> Result<Vec<Ideal>> {
    let m = shape.num_blocks();
    if m > 20 {
        return Err(Error::TooManyBlocks(m));
    }
    let mut sets: Vec<Vec<usize>> = (0u32..(1 << m))
        .map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(sets
        .into_iter()
        .map(|s| Ideal {
            shape: shape.clone(),
            members: s.into_iter().collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn shape(s: &[usize]) -> BlockShape {
        BlockShape::new(s.to_vec()).unwrap()
    }

    #[test]
    fn quotient_deletes_blocks() {
        let sh = shape(&[1, 2]);
        let x = BlockElement::new(
            &sh,
            vec![ComplexMatrix::diag(&[c(3.0)]), ComplexMatrix::unit(2, 2, 0, 1)],
        )
        .unwrap();
        let q = quotient(&x, &Ideal::from_one_based(&sh, &[1]).unwrap()).unwrap();
        assert_eq!(q.blocks(), &[ComplexMatrix::unit(2, 2, 0, 1)]);
        assert_eq!(quotient(&x, &Ideal::zero(&sh)).unwrap(), x);
        assert!(matches!(
            quotient(&x, &Ideal::full(&sh)),
            Err(Error::EmptyQuotient)
        ));
    }

    #[test]
    fn quotient_contracts() {
        let sh = shape(&[1, 2]);
        let x = BlockElement::new(
            &sh,
            vec![ComplexMatrix::diag(&[c(0.5)]), ComplexMatrix::diag(&[c(0.5), c(-2.0)])],
        )
        .unwrap();
        let q = quotient(&x, &Ideal::from_one_based(&sh, &[2]).unwrap()).unwrap();
        assert!((q.norm() - 0.5).abs() < 1e-14);
        assert!(q.norm() <= x.norm());
    }

    #[test]
    fn ideal_enumeration_order() {
        let render = |s: &[usize]| -> Vec<String> {
            enumerate_ideals(&shape(s))
                .unwrap()
                .iter()
                .map(|i| i.to_string())
                .collect()
        };
        assert_eq!(render(&[1]), vec!["{}", "{1}"]);
        assert_eq!(render(&[1, 2]), vec!["{}", "{1}", "{2}", "{1,2}"]);
        assert_eq!(render(&[1, 2, 2]).len(), 8);
        assert_eq!(
            render(&[1, 1, 1]),
            vec!["{}", "{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]
        );
        assert!(matches!(
            enumerate_ideals(&shape(&[1; 21])),
            Err(Error::TooManyBlocks(21))
        ));
    }

    #[test]
    fn element_shape_validation() {
        let sh = shape(&[1, 2]);
        let bad = BlockElement::new(&sh, vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)]);
        assert!(matches!(bad, Err(Error::ShapeMismatch(_))));
        assert!(BlockShape::new(vec![]).is_err());
        assert!(BlockShape::new(vec![2, 0]).is_err());
    }

    #[test]
    fn vec_roundtrip() {
        let sh = shape(&[1, 2]);
        let x = BlockElement::matrix_unit(&sh, 1, 0, 1).add(&BlockElement::identity(&sh));
        assert_eq!(BlockElement::from_vec(&sh, &x.to_vec()), x);
    }
}

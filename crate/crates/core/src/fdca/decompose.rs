//! Generated *-subalgebras of a block algebra and their Wedderburn
//! decomposition into full matrix summands.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{BlockElement, BlockShape, StarHomData};
use crate::error::{Error, Result};
use crate::matcore::{herm_decomposition, ComplexMatrix, SpanBuilder, ToleranceConfig, C64};

/// A *-subalgebra `B` of a block algebra together with an isomorphism
/// `⊕ M_{m_j} -> B` in standard form.
#[derive(Debug, Clone)]
pub struct StarSubalgebra {
    ambient: BlockShape,
    basis: Vec<BlockElement>,
    embedding: StarHomData,
}

impl StarSubalgebra {
    pub fn ambient(&self) -> &BlockShape {
        &self.ambient
    }

    /// Abstract block shape `[m_1, ..., m_r]` of the subalgebra.
    pub fn shape(&self) -> &BlockShape {
        self.embedding.source()
    }

    /// Orthonormal basis (trace inner product) of the subalgebra.
    pub fn basis(&self) -> &[BlockElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Injective map from the abstract shape onto the subalgebra.
    pub fn embedding(&self) -> &StarHomData {
        &self.embedding
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient.algebra_dim()
    }

    /// Abstract coordinates of an element of the subalgebra.
    pub fn to_abstract(&self, y: &BlockElement) -> Result<BlockElement> {
        self.embedding.pull_back(y)
    }
}

fn span_of(elements: &[BlockElement], tol: &ToleranceConfig) -> SpanBuilder {
    let mut span = SpanBuilder::new(tol.eps_norm);
    for e in elements {
        span.try_push(&e.to_vec());
    }
    span
}

/// Orthonormal basis of the unital *-algebra generated by `gens`.
pub fn star_span(
    ambient: &BlockShape,
    gens: &[BlockElement],
    tol: &ToleranceConfig,
) -> Result<Vec<BlockElement>> {
    for g in gens {
        if g.shape() != ambient {
            return Err(Error::ShapeMismatch(format!(
                "generator in {} for ambient {ambient}",
                g.shape()
            )));
        }
    }
    let letters: Vec<BlockElement> = gens
        .iter()
        .flat_map(|g| [g.clone(), g.adjoint()])
        .collect();
    let full = ambient.algebra_dim();
    let mut span = SpanBuilder::new(tol.eps_norm);
    let mut elements = vec![BlockElement::identity(ambient)];
    span.try_push(&elements[0].to_vec());
    let mut next = 0;
    // left multiplication by generators and adjoints from the unit reaches every word
    while next < elements.len() && span.len() < full {
        let b = elements[next].clone();
        next += 1;
        for l in &letters {
            let w = l.mul(&b);
            if span.try_push(&w.to_vec()).is_some() {
                elements.push(w);
                if span.len() == full {
                    break;
                }
            }
        }
    }
    Ok(span
        .basis()
        .iter()
        .map(|v| BlockElement::from_vec(ambient, v))
        .collect())
}

/// Dimension of `{T : x_k T = T y_k for all k}`, `T` of size `p x q`.
fn intertwiner_dim(xs: &[DMatrix<C64>], ys: &[DMatrix<C64>], p: usize, q: usize, tol: &ToleranceConfig) -> usize {
    let mut gram = DMatrix::<C64>::zeros(p * q, p * q);
    let mut scale = 1.0f64;
    for (x, y) in xs.iter().zip(ys) {
        // vec(xT - Ty) = (I_q ⊗ x - y^T ⊗ I_p) vec(T)
        let k = DMatrix::<C64>::identity(q, q).kronecker(x) - y.transpose().kronecker(&DMatrix::identity(p, p));
        gram += k.adjoint() * &k;
        scale = scale.max(x.camax()).max(y.camax());
    }
    let mut values: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    // relative rank threshold on the singular values of the stacked system
    let top = values.last().copied().unwrap_or(0.0).max(scale * scale);
    let thr = tol.eps_norm * tol.eps_norm * top;
    values.iter().filter(|&&v| v <= thr).count()
}

/// Whether `gens` generate all of `ambient` as a unital *-algebra: every
/// block restriction is irreducible and restrictions to different blocks are
/// inequivalent.
pub fn generates_block_algebra(ambient: &BlockShape, gens: &[BlockElement], tol: &ToleranceConfig) -> Result<bool> {
    if gens.iter().any(|g| g.shape() != ambient) {
        return Err(Error::ShapeMismatch(format!("generators must live in {ambient}")));
    }
    let letters: Vec<Vec<DMatrix<C64>>> = (0..ambient.num_blocks())
        .map(|i| {
            gens.iter()
                .flat_map(|g| [g.block(i).as_dmatrix().clone(), g.block(i).as_dmatrix().adjoint()])
                .collect()
        })
        .collect();
    for (i, li) in letters.iter().enumerate() {
        if intertwiner_dim(li, li, ambient.size(i), ambient.size(i), tol) != 1 {
            return Ok(false);
        }
        for (j, lj) in letters.iter().enumerate().skip(i + 1) {
            if ambient.size(i) == ambient.size(j) && intertwiner_dim(li, lj, ambient.size(i), ambient.size(j), tol) != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Generates the unital *-algebra of `gens` and decomposes it.
pub fn decompose_star_algebra(
    ambient: &BlockShape,
    gens: &[BlockElement],
    tol: &ToleranceConfig,
) -> Result<StarSubalgebra> {
    let basis = star_span(ambient, gens, tol)?;
    decompose_basis(ambient, basis, tol)
}

pub(crate) fn decompose_basis(
    ambient: &BlockShape,
    basis: Vec<BlockElement>,
    tol: &ToleranceConfig,
) -> Result<StarSubalgebra> {
    if basis.len() == ambient.algebra_dim() {
        return Ok(StarSubalgebra {
            ambient: ambient.clone(),
            basis,
            embedding: StarHomData::identity(ambient),
        });
    }
    let span = span_of(&basis, tol);
    let mut last_err = String::new();
    for attempt in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(tol.rng_seed ^ 0xdec0_0000 ^ attempt);
        match try_decompose(ambient, &basis, &span, &mut rng) {
            Ok(embedding) => {
                return Ok(StarSubalgebra {
                    ambient: ambient.clone(),
                    basis,
                    embedding,
                })
            }
            Err(e) => {
                log::debug!("decomposition attempt {attempt} failed: {e}");
                last_err = e;
            }
        }
    }
    Err(Error::Decomposition(last_err))
}

struct Eigvec {
    value: f64,
    block: usize,
    vector: Vec<C64>,
}

fn projection(ambient: &BlockShape, members: &[&Eigvec]) -> BlockElement {
    let blocks = ambient
        .sizes()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut p = DMatrix::<C64>::zeros(n, n);
            for e in members.iter().filter(|e| e.block == i) {
                for r in 0..n {
                    for c in 0..n {
                        p[(r, c)] += e.vector[r] * e.vector[c].conj();
                    }
                }
            }
            ComplexMatrix::wrap(p)
        })
        .collect();
    BlockElement::new(ambient, blocks).expect("sizes follow ambient")
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

fn try_decompose(
    ambient: &BlockShape,
    basis: &[BlockElement],
    span: &SpanBuilder,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<StarHomData, String> {
    const SAME: f64 = 1e-8;
    const SEPARATED: f64 = 1e-5;
    const CHECK: f64 = 1e-7;

    // a generic self-adjoint element separates the minimal projections
    let mut h = BlockElement::zeros(ambient);
    for b in basis {
        let r: f64 = rng.sample(StandardNormal);
        h = h.add(&b.add(&b.adjoint()).scale(C64::new(r, 0.0)));
    }
    let hn = h.norm();
    if hn == 0.0 {
        return Err("zero random element".into());
    }
    h = h.scale(C64::new(1.0 / hn, 0.0));

    let mut eigs = Vec::new();
    for (i, blk) in h.blocks().iter().enumerate() {
        let (values, vectors) = herm_decomposition(blk.as_dmatrix());
        for (c, v) in values.into_iter().enumerate() {
            eigs.push(Eigvec {
                value: v,
                block: i,
                vector: vectors.column(c).iter().copied().collect(),
            });
        }
    }
    eigs.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.block.cmp(&b.block)));
    let mut clusters: Vec<Vec<&Eigvec>> = Vec::new();
    for e in &eigs {
        match clusters.last_mut() {
            Some(cl) if e.value - cl.last().unwrap().value <= SAME => cl.push(e),
            Some(cl) if e.value - cl.last().unwrap().value < SEPARATED => {
                return Err("eigenvalue gap too small to cluster".into())
            }
            _ => clusters.push(vec![e]),
        }
    }

    let projs: Vec<BlockElement> = clusters.iter().map(|c| projection(ambient, c)).collect();
    for p in &projs {
        if !span.contains(&p.to_vec()) {
            return Err("spectral projection outside the algebra".into());
        }
        let trace = p.to_dense().trace().re;
        for b in basis {
            let pbp = p.mul(b).mul(p);
            let c = pbp.to_dense().trace() / trace;
            if pbp.sub(&p.scale(c)).max_abs() > CHECK {
                return Err("spectral projection is not minimal".into());
            }
        }
    }

    let k = projs.len();
    let mut parent: Vec<usize> = (0..k).collect();
    let mut links = vec![vec![None::<(usize, f64)>; k]; k];
    for a in 0..k {
        for c in 0..k {
            if a == c {
                continue;
            }
            for (bi, b) in basis.iter().enumerate() {
                let w = projs[a].mul(b).mul(&projs[c]).frobenius_norm();
                if w > CHECK && links[a][c].is_none_or(|(_, best)| w > best) {
                    links[a][c] = Some((bi, w));
                }
            }
            if links[a][c].is_some() {
                let (ra, rc) = (find(&mut parent, a), find(&mut parent, c));
                parent[ra] = rc;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<usize> = Vec::new();
    for a in 0..k {
        let r = find(&mut parent, a);
        match root_of.iter().position(|&x| x == r) {
            Some(g) => groups[g].push(a),
            None => {
                root_of.push(r);
                groups.push(vec![a]);
            }
        }
    }

    let offsets = ambient.offsets();
    struct Summand {
        size: usize,
        mult: Vec<usize>,
        // per ambient block: columns in copy-major order
        columns: Vec<Vec<Vec<C64>>>,
        key: (usize, usize),
    }
    let mut summands = Vec::new();
    for g in &groups {
        let first = g[0];
        let mult: Vec<usize> = (0..ambient.num_blocks())
            .map(|i| clusters[first].iter().filter(|e| e.block == i).count())
            .collect();
        for &q in g {
            let m: Vec<usize> = (0..ambient.num_blocks())
                .map(|i| clusters[q].iter().filter(|e| e.block == i).count())
                .collect();
            if m != mult {
                return Err("inconsistent ranks inside a summand".into());
            }
        }
        // e_{q1} = P_q b P_1 normalized so that e_{q1}* e_{q1} = P_1
        let mut units = Vec::with_capacity(g.len());
        for &q in g {
            if q == first {
                units.push(projs[first].clone());
                continue;
            }
            let (bi, _) = links[q][first].ok_or("summand matrix unit missing")?;
            let w = projs[q].mul(&basis[bi]).mul(&projs[first]);
            let p1_trace = projs[first].to_dense().trace().re;
            let s = (w.adjoint().mul(&w).to_dense().trace().re / p1_trace).sqrt();
            units.push(w.scale(C64::new(1.0 / s, 0.0)));
        }
        let mut columns = vec![Vec::new(); ambient.num_blocks()];
        let mut key = (usize::MAX, usize::MAX);
        for (i, cols) in columns.iter_mut().enumerate() {
            for v in clusters[first].iter().filter(|e| e.block == i) {
                for e in &units {
                    let col = e.block(i).as_dmatrix() * DMatrix::from_column_slice(v.vector.len(), 1, &v.vector);
                    cols.push(col.iter().copied().collect());
                }
            }
            if key.0 == usize::MAX && mult[i] > 0 {
                let mut unit_diag = vec![0.0; ambient.size(i)];
                for e in &units {
                    let d = e.mul(&e.adjoint());
                    for (r, x) in unit_diag.iter_mut().enumerate() {
                        *x += d.block(i).get(r, r).re;
                    }
                }
                let row = unit_diag.iter().position(|&x| x > 1e-6).unwrap_or(0);
                key = (i, offsets[i] + row);
            }
        }
        summands.push(Summand {
            size: g.len(),
            mult,
            columns,
            key,
        });
    }
    summands.sort_by_key(|s| s.key);

    let source = BlockShape::new(summands.iter().map(|s| s.size).collect()).map_err(|e| e.to_string())?;
    let dim: usize = source.algebra_dim();
    if dim != basis.len() {
        return Err(format!("summand dimensions {dim} != algebra dimension {}", basis.len()));
    }
    let multiplicity: Vec<Vec<usize>> = (0..ambient.num_blocks())
        .map(|i| summands.iter().map(|s| s.mult[i]).collect())
        .collect();
    let conjugators: Vec<ComplexMatrix> = (0..ambient.num_blocks())
        .map(|i| {
            let n = ambient.size(i);
            let cols: Vec<&Vec<C64>> = summands.iter().flat_map(|s| s.columns[i].iter()).collect();
            if cols.len() != n {
                return Err(format!("ambient block {} is not filled", i + 1));
            }
            Ok(ComplexMatrix::wrap(DMatrix::from_fn(n, n, |r, c| cols[c][r])))
        })
        .collect::<std::result::Result<_, String>>()?;
    let tol = ToleranceConfig {
        eps_eq: 1e-8,
        eps_norm: 1e-7,
        ..Default::default()
    };
    let embedding = StarHomData::new(source, ambient.clone(), multiplicity, conjugators, &tol)
        .map_err(|e| e.to_string())?;
    for b in basis {
        let back = embedding.pull_back(b).map_err(|e| e.to_string())?;
        let again = embedding.apply(&back).map_err(|e| e.to_string())?;
        if again.max_abs_diff(b) > CHECK {
            return Err("embedding does not reproduce the algebra".into());
        }
    }
    Ok(embedding)
}

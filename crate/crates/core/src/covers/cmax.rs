use super::{extend_by_shilov, Cover, CoverRole, ShilovExtension};
use crate::error::{Error, Result};
use crate::fdca::{BlockElement, BlockShape, Ideal, StarHomData};
use crate::matcore::{ComplexMatrix, ToleranceConfig};
use crate::opalg::{is_boundary_ideal, shilov_ideal, BoundaryVerdict};

/// The algebra `𝒜 = {(a+i, a+j)}` inside `T ⊕ T` with the embedding
/// `j(a+i) = (a+i, a)` of `A + I`.
#[derive(Debug, Clone)]
pub struct CmaxModel {
    /// Abstract shape of `𝒜`: the blocks of `T`, then second copies of the
    /// ideal's blocks.
    pub shape: BlockShape,
    /// `𝒜 -> T ⊕ T`.
    pub embedding: StarHomData,
    /// `j` as a verified cover of `A + I` with target `𝒜`.
    pub cover: Cover,
    pub extension: ShilovExtension,
    /// The ideal `0 ⊕ I` of `𝒜`.
    pub second_copy: Ideal,
    pub second_copy_verdict: BoundaryVerdict,
    /// Shilov ideal of `j(A + I)` inside `𝒜`.
    pub shilov: Ideal,
}

/// Builds the model for a cover `ambient_a` of `A` whose Shilov ideal in
/// its target is `ideal`.
pub fn cmax_plus_model(ambient_a: &Cover, ideal: &Ideal, tol: &ToleranceConfig) -> Result<CmaxModel> {
    let t = ambient_a.target();
    if ideal.shape() != t {
        return Err(Error::ShapeMismatch(format!("ideal over {} for target {t}", ideal.shape())));
    }
    let image = ambient_a.image_algebra(tol)?;
    let shilov = shilov_ideal(&image, tol)?;
    if &shilov != ideal {
        return Err(Error::NotShilov(format!("{ideal} given, Shilov ideal is {shilov}")));
    }
    let extension = extend_by_shilov(&image, tol)?;
    let m = t.num_blocks();
    let members: Vec<usize> = ideal.members().iter().copied().collect();
    let mut sizes = t.sizes().to_vec();
    sizes.extend(members.iter().map(|&k| t.size(k)));
    let shape = BlockShape::new(sizes)?;

    let cols = m + members.len();
    let mut multiplicity = vec![vec![0; cols]; 2 * m];
    for k in 0..m {
        multiplicity[k][k] = 1;
        let second = members.iter().position(|&x| x == k).map_or(k, |p| m + p);
        multiplicity[m + k][second] = 1;
    }
    let doubled = t.concat(t);
    let embedding = StarHomData::new(
        shape.clone(),
        doubled.clone(),
        multiplicity,
        doubled.sizes().iter().map(|&n| ComplexMatrix::identity(n)).collect(),
        tol,
    )?;

    let api = extension.extended().clone();
    let gens = api
        .generators()
        .iter()
        .map(|x| {
            let p = image.element(&extension.project(x, tol)?);
            let mut blocks: Vec<ComplexMatrix> = x.blocks().to_vec();
            blocks.extend(members.iter().map(|&k| p.block(k).clone()));
            BlockElement::new(&shape, blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    let cover = Cover::new(api, gens, CoverRole::Custom, tol)?;
    let second_copy = Ideal::new(&shape, m..cols)?;
    let model_algebra = cover.image_algebra(tol)?;
    let second_copy_verdict = is_boundary_ideal(&model_algebra, &second_copy, tol)?;
    let shilov = shilov_ideal(&model_algebra, tol)?;
    Ok(CmaxModel {
        shape,
        embedding,
        cover,
        extension,
        second_copy,
        second_copy_verdict,
        shilov,
    })
}

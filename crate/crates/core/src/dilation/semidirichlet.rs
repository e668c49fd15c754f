//! Halving the corner of an upper triangular extension and comparing the
//! semi-Dirichlet property before and after.

use super::{as_elements, check_square, rep_basis};
use crate::error::{Error, Result};
use crate::fdca::{BlockElement, BlockShape};
use crate::matcore::{ComplexMatrix, ToleranceConfig, C64};
use crate::opalg::{generate_algebra, is_semi_dirichlet, OperatorAlgebra};

/// Semi-Dirichlet status of `Φ`, of `Φ'` (corner halved) and of `Φ ⊕ Φ'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub split: usize,
    pub corner_norm: f64,
    pub original: bool,
    pub scaled: bool,
    pub joint: bool,
    /// Status of the image of `Φ_s` (corner multiplied by `s`).
    pub family: Vec<(f64, bool)>,
}

impl ScalingReport {
    pub fn at_least_one_fails(&self) -> bool {
        !(self.original && self.scaled)
    }
}

/// Multiplies the `(1, 2)` corner, rows `0..split` and columns `split..`,
/// by `s`.
pub fn corner_scaled(images: &[ComplexMatrix], split: usize, s: f64) -> Vec<ComplexMatrix> {
    images
        .iter()
        .map(|m| {
            let mut out = m.clone();
            let c = m.view(0, split, split, m.cols() - split).scale(C64::new(s, 0.0));
            out.set_view(0, split, &c);
            out
        })
        .collect()
}

fn image_is_semi_dirichlet(shape: &BlockShape, gens: Vec<BlockElement>, tol: &ToleranceConfig) -> Result<bool> {
    let image = generate_algebra(shape, &gens, tol)?;
    Ok(is_semi_dirichlet(&image, tol))
}

fn status(images: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<bool> {
    let d = images[0].rows();
    image_is_semi_dirichlet(&BlockShape::new(vec![d])?, as_elements(d, images)?, tol)
}

/// Runs the corner-halving experiment on the representation with generator
/// images `phi`, upper triangular for `C^d = C^split ⊕ C^(d - split)`.
pub fn semidirichlet_scaling_probe(
    a: &OperatorAlgebra,
    phi: &[ComplexMatrix],
    split: usize,
    tol: &ToleranceConfig,
) -> Result<ScalingReport> {
    tol.validate()?;
    let d = check_square(phi)?;
    if split == 0 || split >= d {
        return Err(Error::ShapeMismatch(format!("split {split} does not cut C^{d} into two parts")));
    }
    let basis = rep_basis(a, phi, tol)?;
    let scale = basis.iter().map(|m| m.max_abs()).fold(1.0, f64::max);
    let lower = basis
        .iter()
        .map(|m| m.view(split, 0, d - split, split).max_abs())
        .fold(0.0, f64::max);
    if lower > tol.eps_eq * scale {
        return Err(Error::NotUpperTriangular(lower));
    }
    let corner_norm = basis
        .iter()
        .map(|m| m.view(0, split, split, d - split).max_abs())
        .fold(0.0, f64::max);
    if corner_norm <= tol.eps_eq * scale {
        return Err(Error::TrivialCorner);
    }
    let halved = corner_scaled(phi, split, 0.5);
    let original = status(phi, tol)?;
    let scaled = status(&halved, tol)?;
    let sum_shape = BlockShape::new(vec![d, d])?;
    let sums = phi
        .iter()
        .zip(&halved)
        .map(|(x, y)| BlockElement::new(&sum_shape, vec![x.clone(), y.clone()]))
        .collect::<Result<Vec<_>>>()?;
    let joint = image_is_semi_dirichlet(&sum_shape, sums, tol)?;
    let family = [1.0, 0.5]
        .into_iter()
        .map(|s| Ok((s, status(&corner_scaled(phi, split, s), tol)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingReport {
        split,
        corner_norm,
        original,
        scaled,
        joint,
        family,
    })
}

/// `T_2` acting on `C^4` by `[[a, b], [0, c]] ↦ aP + bX + c(1 - P)` with
/// `P` the projection onto the first two coordinates and `X = [[0, R], [0, 0]]`
/// for a rotation `R` by 45 degrees; upper triangular for the split after
/// the first coordinate.
pub fn corner_example(tol: &ToleranceConfig) -> Result<(OperatorAlgebra, Vec<ComplexMatrix>, usize)> {
    let a = crate::catalog::t2_in_m2(tol)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let p = ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
    let q = &ComplexMatrix::identity(4) - &p;
    let mut x = ComplexMatrix::zeros(4, 4);
    x.set_view(0, 2, &ComplexMatrix::from_real_rows(&[vec![h, h], vec![-h, h]])?);
    let phi = crate::catalog::t2_generators()
        .iter()
        .map(|g| &(&p.scale(g.get(0, 0)) + &x.scale(g.get(0, 1))) + &q.scale(g.get(1, 1)))
        .collect();
    Ok((a, phi, 1))
}

//! Ready-made algebras and matrices used by the scenarios, tests and
//! benchmarks.

use std::sync::Arc;

use crate::covers::{Cover, CoverRole};
use crate::error::Result;
use crate::fdca::{BlockElement, BlockShape};
use crate::matcore::{ComplexMatrix, ToleranceConfig, C64};
use crate::opalg::{generate_algebra, OperatorAlgebra};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Generators `E11, E12, E22` of the upper triangular 2x2 matrices.
pub fn t2_generators() -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::unit(2, 2, 0, 0),
        ComplexMatrix::unit(2, 2, 0, 1),
        ComplexMatrix::unit(2, 2, 1, 1),
    ]
}

/// `T_2` inside `M_2`.
pub fn t2_in_m2(tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    let sh = BlockShape::new(vec![2])?;
    let gens = t2_generators()
        .into_iter()
        .map(|g| BlockElement::new(&sh, vec![g]))
        .collect::<Result<Vec<_>>>()?;
    generate_algebra(&sh, &gens, tol)
}

/// `T_2` embedded in `C ⊕ M_2` by `x ↦ (x_11, x)`.
pub fn pi_oplus_id_t2(tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    let sh = BlockShape::new(vec![1, 2])?;
    let gens = t2_generators()
        .into_iter()
        .map(|g| BlockElement::new(&sh, vec![ComplexMatrix::diag(&[g.get(0, 0)]), g]))
        .collect::<Result<Vec<_>>>()?;
    generate_algebra(&sh, &gens, tol)
}

/// The scalars embedded diagonally in `C ⊕ C`.
pub fn scalars_in_cc(tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    let sh = BlockShape::new(vec![1, 1])?;
    generate_algebra(&sh, &[BlockElement::identity(&sh)], tol)
}

/// The full matrix algebra `M_n`, generated by its matrix units.
pub fn full_matrix_algebra(n: usize, tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    let sh = BlockShape::new(vec![n])?;
    let gens: Vec<BlockElement> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| BlockElement::matrix_unit(&sh, 0, i, j))
        .collect();
    generate_algebra(&sh, &gens, tol)
}

/// The `n x n` forward shift `S e_k = e_{k+1}`.
pub fn shift(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        s.set(k + 1, k, c(1.0));
    }
    s
}

/// `V_z = [[S, z(I - S S*)], [0, S*]]` of size `2n`, a finite model of the
/// Toeplitz-type dilations.
pub fn toeplitz_block(n: usize, z: C64) -> ComplexMatrix {
    let s = shift(n);
    let defect = &ComplexMatrix::identity(n) - &(&s * &s.adjoint());
    let mut v = ComplexMatrix::zeros(2 * n, 2 * n);
    v.set_view(0, 0, &s);
    v.set_view(0, n, &defect.scale(z));
    v.set_view(n, n, &s.adjoint());
    v
}

/// The algebra generated by `V_1` inside `M_{2n}`.
pub fn toeplitz_base(n: usize, tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    let sh = BlockShape::new(vec![2 * n])?;
    let v1 = BlockElement::new(&sh, vec![toeplitz_block(n, c(1.0))])?;
    generate_algebra(&sh, &[v1], tol)
}

/// The cover `V_1 ↦ V_z ⊕ V_1` of [`toeplitz_base`]; completely isometric
/// for `|z| <= 1` because the `V_1` summand is kept.
pub fn toeplitz_cover(base: &Arc<OperatorAlgebra>, n: usize, z: C64, tol: &ToleranceConfig) -> Result<Cover> {
    let sh = BlockShape::new(vec![2 * n, 2 * n])?;
    let img = BlockElement::new(&sh, vec![toeplitz_block(n, z), toeplitz_block(n, c(1.0))])?;
    Cover::new(base.clone(), vec![img], CoverRole::Custom, tol)
}

/// `T_2`-corner of the twisted family: `A_s = [[s√(1-t), -s²√t], [√t, s√(1-t)]]`.
pub fn twisted_corner(s: f64, t: f64) -> ComplexMatrix {
    let (a, b) = ((1.0 - t).sqrt(), t.sqrt());
    ComplexMatrix::from_real_rows(&[vec![s * a, -s * s * b], vec![b, s * a]]).expect("finite entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::herm_eigs;

    #[test]
    fn corner_spectrum_endpoints() {
        let tol = ToleranceConfig::default();
        let a = twisted_corner(1.0, 1.0);
        assert_eq!(herm_eigs(&(&a.adjoint() * &a), &tol).unwrap(), vec![1.0, 1.0]);
        let a = twisted_corner(0.5, 1.0);
        let e = herm_eigs(&(&a.adjoint() * &a), &tol).unwrap();
        assert!((e[0] - 0.0625).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn toeplitz_gram_spectrum() {
        let tol = ToleranceConfig::default();
        let v = toeplitz_block(8, c(0.5));
        let mut e = herm_eigs(&(&v.adjoint() * &v), &tol).unwrap();
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert_eq!(e.len(), 3);
        assert!(e[0].abs() < 1e-12 && (e[1] - 0.25).abs() < 1e-12 && (e[2] - 1.0).abs() < 1e-12);
    }
}

use cstarlab::catalog::{full_matrix_algebra, pi_oplus_id_t2, scalars_in_cc, t2_in_m2};
use cstarlab::fdca::{BlockElement, BlockShape, Ideal};
use cstarlab::matcore::ComplexMatrix;
use cstarlab::opalg::{
    envelope, generate_algebra, is_boundary_ideal, is_dirichlet, is_semi_dirichlet, shilov_ideal,
};
use cstarlab::ToleranceConfig;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn compressed_t2_has_scalar_block_as_shilov_ideal() {
    let a = pi_oplus_id_t2(&tol()).unwrap();
    let sh = a.ambient().clone();
    let first = Ideal::from_one_based(&sh, &[1]).unwrap();
    assert!(is_boundary_ideal(&a, &first, &tol()).unwrap().is_boundary);

    let second = Ideal::from_one_based(&sh, &[2]).unwrap();
    let v = is_boundary_ideal(&a, &second, &tol()).unwrap();
    assert!(!v.is_boundary);
    let w = v.witness.unwrap();
    assert_eq!(w.level, 1);
    assert!(w.margin() > 0.5, "kept {} deleted {}", w.kept_norm, w.deleted_norm);

    assert!(is_boundary_ideal(&a, &Ideal::zero(&sh), &tol()).unwrap().is_boundary);
    assert_eq!(shilov_ideal(&a, &tol()).unwrap(), first);
    let env = envelope(&a, &tol()).unwrap();
    assert_eq!(env.target().sizes(), &[2]);
}

#[test]
fn envelope_of_t2_is_m2() {
    let a = t2_in_m2(&tol()).unwrap();
    assert!(shilov_ideal(&a, &tol()).unwrap().is_empty());
    let env = envelope(&a, &tol()).unwrap();
    assert_eq!(env.target().sizes(), &[2]);
    for (g, img) in a.generators().iter().zip(env.generator_images()) {
        assert!(g.max_abs_diff(img) < 1e-12);
    }
}

#[test]
fn self_adjoint_algebra_is_its_own_envelope() {
    let a = full_matrix_algebra(3, &tol()).unwrap();
    assert_eq!(a.dim(), 9);
    assert!(shilov_ideal(&a, &tol()).unwrap().is_empty());
    assert!(is_semi_dirichlet(&a, &tol()));
    assert!(is_dirichlet(&a, &tol()));
}

#[test]
fn diagonal_scalars_keep_one_block() {
    let a = scalars_in_cc(&tol()).unwrap();
    let sh = a.ambient().clone();
    let shilov = shilov_ideal(&a, &tol()).unwrap();
    assert_eq!(shilov, Ideal::from_one_based(&sh, &[1]).unwrap());
    let env = envelope(&a, &tol()).unwrap();
    assert_eq!(env.target().sizes(), &[1]);
}

#[test]
fn dirichlet_examples() {
    let t = tol();
    let t2 = t2_in_m2(&t).unwrap();
    assert!(is_semi_dirichlet(&t2, &t));
    assert!(is_dirichlet(&t2, &t));
    // A + A* = {(x, [[x, y], [w, z]])} has dimension 4 while C ⊕ M2 has 5
    let a = pi_oplus_id_t2(&t).unwrap();
    assert_eq!(cstarlab::opalg::star_closure_dim(&a, &t), 4);
    assert!(!is_dirichlet(&a, &t));

    let m3 = BlockShape::new(vec![3]).unwrap();
    let shift = BlockElement::matrix_unit(&m3, 0, 0, 1).add(&BlockElement::matrix_unit(&m3, 0, 1, 2));
    // E12 + E23 generates span{1, S, S^2}; S*S is not in A + A*
    let a = generate_algebra(&m3, &[shift], &t).unwrap();
    assert!(!is_semi_dirichlet(&a, &t));

    let e13 = BlockElement::matrix_unit(&m3, 0, 0, 2);
    let a = generate_algebra(&m3, &[e13], &t).unwrap();
    assert_eq!(a.dim(), 2);
    assert!(!is_dirichlet(&a, &t));
}

#[test]
fn rotated_copies_are_each_boundary_but_not_jointly() {
    // x ↦ (x, U x U*): deleting either copy is isometric, deleting both is not
    let t = tol();
    let sh = BlockShape::new(vec![2, 2]).unwrap();
    let (cs, sn) = (0.6f64, 0.8f64);
    let u = ComplexMatrix::from_real_rows(&[vec![cs, -sn], vec![sn, cs]]).unwrap();
    let gens: Vec<BlockElement> = cstarlab::catalog::t2_generators()
        .into_iter()
        .map(|g| BlockElement::new(&sh, vec![g.clone(), &(&u * &g) * &u.adjoint()]).unwrap())
        .collect();
    let a = generate_algebra(&sh, &gens, &t).unwrap();
    for block in [1, 2] {
        let v = is_boundary_ideal(&a, &Ideal::from_one_based(&sh, &[block]).unwrap(), &t).unwrap();
        assert!(v.is_boundary);
        assert!(v.margin < 1e-9);
    }
    assert!(!is_boundary_ideal(&a, &Ideal::full(&sh), &t).unwrap().is_boundary);
    assert_eq!(shilov_ideal(&a, &t).unwrap(), Ideal::from_one_based(&sh, &[1]).unwrap());
    assert_eq!(envelope(&a, &t).unwrap().target().sizes(), &[2]);
}

#[test]
fn only_the_redundant_scalar_block_is_boundary() {
    // x ↦ (x_11, x ⊕ x_11) in C ⊕ M3
    let t = tol();
    let sh = BlockShape::new(vec![1, 3]).unwrap();
    let gens: Vec<BlockElement> = cstarlab::catalog::t2_generators()
        .into_iter()
        .map(|g| {
            let big = ComplexMatrix::direct_sum(&[&g, &ComplexMatrix::diag(&[g.get(0, 0)])]);
            BlockElement::new(&sh, vec![ComplexMatrix::diag(&[g.get(0, 0)]), big]).unwrap()
        })
        .collect();
    let a = generate_algebra(&sh, &gens, &t).unwrap();
    assert!(is_boundary_ideal(&a, &Ideal::from_one_based(&sh, &[1]).unwrap(), &t).unwrap().is_boundary);
    let v = is_boundary_ideal(&a, &Ideal::from_one_based(&sh, &[2]).unwrap(), &t).unwrap();
    assert!(!v.is_boundary);
    assert!(v.witness.unwrap().margin() > 1e-3);
}

use cstarlab::dilation::t2_sarason_family;
use cstarlab::fdca::{enumerate_ideals, BlockElement, BlockShape, StarHomData};
use cstarlab::matcore::{herm_eigs, op_norm, random_unitary, span_basis, ComplexMatrix, ToleranceConfig, C64};
use cstarlab::opalg::{generate_algebra, is_boundary_ideal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| ComplexMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1)).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|m| (&m + &m.adjoint()).scale(C64::new(0.5, 0.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn op_norm_is_unitarily_invariant(m in (1usize..5).prop_flat_map(matrix), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, m.rows());
        let v = random_unitary(&mut rng, m.cols());
        let moved = &(&u * &m) * &v;
        let (a, b) = (op_norm(&m).unwrap(), op_norm(&moved).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn op_norm_matches_self_adjoint_dilation(m in (1usize..5).prop_flat_map(matrix)) {
        let n = m.rows();
        let mut d = ComplexMatrix::zeros(2 * n, 2 * n);
        d.set_view(0, n, &m);
        d.set_view(n, 0, &m.adjoint());
        let eigs = herm_eigs(&d, &tol()).unwrap();
        let top = eigs.iter().map(|e| e.abs()).fold(0.0, f64::max);
        prop_assert!((op_norm(&m).unwrap() - top).abs() <= 1e-10 * top.max(1.0));
    }

    #[test]
    fn eigenvalues_of_direct_sum_merge(a in (1usize..4).prop_flat_map(hermitian), b in (1usize..4).prop_flat_map(hermitian)) {
        let mut merged = herm_eigs(&a, &tol()).unwrap();
        merged.extend(herm_eigs(&b, &tol()).unwrap());
        merged.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let direct = herm_eigs(&ComplexMatrix::direct_sum(&[&a, &b]), &tol()).unwrap();
        prop_assert_eq!(direct.len(), merged.len());
        for (x, y) in direct.iter().zip(&merged) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn span_basis_is_idempotent(vs in prop::collection::vec(matrix(2), 1..6), dup in 0usize..6) {
        let mut vs = vs;
        // a repeated combination must not enlarge the span
        let extra = &vs[dup % vs.len()] + &vs[0].scale(C64::new(2.0, -1.0));
        vs.push(extra);
        let once = span_basis(&vs, &tol()).unwrap();
        let twice = span_basis(&once, &tol()).unwrap();
        prop_assert_eq!(once.len(), twice.len());
        prop_assert!(once.len() <= 4);
        for (x, y) in once.iter().zip(&twice) {
            prop_assert!(x.dist(y) <= 1e-9);
        }
    }

    #[test]
    fn star_homomorphisms_respect_products_and_adjoints(
        mult in prop::collection::vec(0usize..3, 2),
        x in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
        y in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
        seed in any::<u64>(),
    ) {
        // the scalar summand must appear for the map to be injective
        prop_assume!(mult[0] > 0);
        let source = BlockShape::new(vec![1, 2]).unwrap();
        let n = mult[0] + 2 * mult[1];
        let target = BlockShape::new(vec![n, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = StarHomData::new(
            source.clone(),
            target,
            vec![mult.clone(), vec![0, 1]],
            vec![random_unitary(&mut rng, n), random_unitary(&mut rng, 2)],
            &tol(),
        )
        .unwrap();
        let element = |v: &[(f64, f64)]| {
            BlockElement::from_vec(&source, &v.iter().map(|&(re, im)| C64::new(re, im)).collect::<Vec<_>>())
        };
        let (a, b) = (element(&x), element(&y));
        let (ha, hb) = (h.apply(&a).unwrap(), h.apply(&b).unwrap());
        prop_assert!(h.apply(&a.mul(&b)).unwrap().max_abs_diff(&ha.mul(&hb)) <= 1e-10);
        prop_assert!(h.apply(&a.adjoint()).unwrap().max_abs_diff(&ha.adjoint()) <= 1e-10);
        prop_assert!(h.pull_back(&ha).unwrap().max_abs_diff(&a) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn boundary_ideals_are_closed_under_subsets(seed in any::<u64>(), far in any::<bool>()) {
        // x ↦ (φ(x), UxU*, x) for T_2 with φ either the corner character or
        // a point evaluation far outside the spectrum
        let t = ToleranceConfig::with_seed(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, 2);
        let sh = BlockShape::new(vec![1, 2, 2]).unwrap();
        let gens: Vec<BlockElement> = cstarlab::catalog::t2_generators()
            .into_iter()
            .map(|g| {
                let scalar = if far { g.get(0, 0) * 2.0 - g.get(1, 1) } else { g.get(0, 0) };
                BlockElement::new(&sh, vec![ComplexMatrix::diag(&[scalar]), &(&u * &g) * &u.adjoint(), g]).unwrap()
            })
            .collect();
        let a = generate_algebra(&sh, &gens, &t).unwrap();
        let ideals = enumerate_ideals(&sh).unwrap();
        let verdicts: Vec<bool> = ideals
            .iter()
            .map(|i| is_boundary_ideal(&a, i, &t).unwrap().is_boundary)
            .collect();
        for (i, small) in ideals.iter().enumerate() {
            for (j, big) in ideals.iter().enumerate() {
                if small.is_subset(big) && verdicts[j] {
                    prop_assert!(verdicts[i], "{} boundary but {} not", big, small);
                }
            }
        }
    }

    #[test]
    fn twists_on_a_circle_are_unitarily_equivalent(theta in 0.0f64..6.28, phi in 0.0f64..6.28, r in 0.0f64..1.0, t in 0.0f64..1.0) {
        let f = t2_sarason_family(t, &tol()).unwrap();
        let z = C64::from_polar(r, theta);
        let w = C64::from_polar(r, phi);
        let ratio = if r > 0.0 { z / w } else { C64::new(1.0, 0.0) };
        let one = C64::new(1.0, 0.0);
        // e_1 ⊕ (e_2, e_3) ⊕ e_4
        let d = ComplexMatrix::diag(&[one, ratio, ratio, ratio * ratio]);
        for (x, y) in f.evaluate(z).iter().zip(f.evaluate(w)) {
            let moved = &(&d * x) * &d.adjoint();
            prop_assert!(moved.dist(&y) <= 1e-12);
        }
        let tw = f.twist(z, &tol()).unwrap();
        for (x, p) in tw.basis_images.iter().zip(f.base_rep()) {
            prop_assert_eq!(x.view(1, 1, 2, 2), p);
        }
    }
}

use cstarlab::catalog::{full_matrix_algebra, t2_generators, t2_in_m2, twisted_corner};
use cstarlab::dilation::{
    compress, corner_example, delta_curve, is_maximal, semidirichlet_scaling_probe, t2_defect_word, t2_sarason_family,
    unit_grid, MaximalityStatus,
};
use cstarlab::matcore::{herm_eigs, ComplexMatrix, ToleranceConfig, C64};
use cstarlab::word::Word;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn defect_curve_passes_every_intermediate_value() {
    // at mixing 0 the curve is 1 - s^2, whose slope never exceeds 2
    let f = t2_sarason_family(0.0, &tol()).unwrap();
    let curve = delta_curve(&f, &t2_defect_word(), &unit_grid(1001), &tol()).unwrap();
    assert!((curve[0].1 - 1.0).abs() < 1e-12);
    assert!(curve[1000].1 < 1e-12);
    for target in [0.25, 0.5, 0.75] {
        let closest = curve.iter().map(|(_, d)| (d - target).abs()).fold(f64::INFINITY, f64::min);
        assert!(closest < 1e-3, "{target} missed by {closest}");
    }
}

#[test]
fn delta_curves_obey_the_triangle_bound() {
    let f = t2_sarason_family(0.3, &tol()).unwrap();
    let grid: Vec<C64> = (0..24).map(|k| C64::from_polar(0.1 + 0.9 * (k as f64 / 23.0), 0.7 * k as f64)).collect();
    let y = Word::parse("g1* g1 + g1 g1* - 1").unwrap();
    let v = Word::parse("g1* g1 + g1 g1* - 0.9").unwrap();
    let diff = Word::parse("0.1").unwrap();
    let dy = delta_curve(&f, &y, &grid, &tol()).unwrap();
    let dv = delta_curve(&f, &v, &grid, &tol()).unwrap();
    let gap = delta_curve(&f, &diff, &grid, &tol())
        .unwrap()
        .iter()
        .map(|p| p.1)
        .fold(0.0, f64::max);
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let lhs = (dy[i].1 - dy[j].1).abs();
            let rhs = 2.0 * gap + (dv[i].1 - dv[j].1).abs();
            assert!(lhs <= rhs + 1e-12);
        }
    }
}

#[test]
fn twist_is_multiplicative_on_disk_and_circle() {
    let f = t2_sarason_family(0.5, &tol()).unwrap();
    let mut grid: Vec<C64> = unit_grid(11);
    grid.extend((0..8).map(|k| C64::from_polar(1.0, std::f64::consts::PI * k as f64 / 4.0)));
    for z in grid {
        let tw = f.twist(z, &tol()).unwrap();
        assert!(tw.contractivity_gap <= tol().eps_norm);
    }
}

#[test]
fn compressing_a_twist_recovers_the_base() {
    let f = t2_sarason_family(0.4, &tol()).unwrap();
    let a = t2_in_m2(&tol()).unwrap();
    let middle = ComplexMatrix::from_fn(4, 2, |r, c| C64::new(if r == c + 1 { 1.0 } else { 0.0 }, 0.0)).unwrap();
    let c = compress(&a, &f.evaluate(C64::new(0.0, 0.6)), &middle, &tol()).unwrap();
    assert!(c.is_dilation);
    for (x, p) in c.basis_images.iter().zip(f.base_rep()) {
        assert!(x.dist(&p) < 1e-14);
    }
}

#[test]
fn corner_spectra_form_a_decreasing_chain() {
    let ss = [0.0, 0.3, 0.6, 0.9, 1.0];
    let mut ranges = Vec::new();
    for &s in &ss {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=100 {
            let a = twisted_corner(s, i as f64 / 100.0);
            let e = herm_eigs(&(&a.adjoint() * &a), &tol()).unwrap();
            lo = lo.min(e[0]);
            hi = hi.max(e[1]);
            assert!(e[0] >= s.powi(4) - 1e-8 && e[1] <= 1.0 + 1e-8);
        }
        ranges.push((lo, hi));
    }
    for w in ranges.windows(2) {
        assert!(w[0].0 <= w[1].0 + 1e-12);
    }
}

#[test]
fn maximality_examples() {
    let m3 = full_matrix_algebra(3, &tol()).unwrap();
    let id: Vec<ComplexMatrix> = m3.generators().iter().map(|g| g.block(0).clone()).collect();
    assert_eq!(is_maximal(&m3, &id, &tol()).unwrap().status, MaximalityStatus::Maximal);

    let t2 = t2_in_m2(&tol()).unwrap();
    assert_eq!(is_maximal(&t2, &t2_generators(), &tol()).unwrap().status, MaximalityStatus::Maximal);
    let corner: Vec<ComplexMatrix> = t2_generators().iter().map(|g| g.view(0, 0, 1, 1)).collect();
    let v = is_maximal(&t2, &corner, &tol()).unwrap();
    assert_eq!(v.status, MaximalityStatus::NotMaximal);
    let cert = v.certificate.unwrap();
    // the certificate's compression reproduces the corner
    let c = compress(&t2, &cert.generator_images, &cert.isometry, &tol()).unwrap();
    for (x, y) in c.generator_images.iter().zip(&corner) {
        assert!(x.dist(y) < 1e-9);
    }
}

#[test]
fn halving_the_curated_corner_breaks_semi_dirichlet() {
    let (a, phi, split) = corner_example(&tol()).unwrap();
    let r = semidirichlet_scaling_probe(&a, &phi, split, &tol()).unwrap();
    assert!(r.at_least_one_fails());
    assert!(!r.joint);
}

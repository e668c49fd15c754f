use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cstarlab::catalog::{pi_oplus_id_t2, toeplitz_base, toeplitz_cover};
use cstarlab::dilation::{delta_curve, t2_defect_word, t2_sarason_family, unit_grid};
use cstarlab::fdca::{decompose_star_algebra, Ideal};
use cstarlab::matcore::{op_norm, ToleranceConfig, C64};
use cstarlab::opalg::is_boundary_ideal;
use cstarlab_bench::{random_matrix, repeated_t2};

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("op_norm");
    for n in [4, 16, 64] {
        let m = random_matrix(n as u64, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| op_norm(black_box(m))));
    }
    g.finish();
}

fn boundary(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let a = pi_oplus_id_t2(&tol).unwrap();
    let scalar = Ideal::from_one_based(a.ambient(), &[1]).unwrap();
    let matrix = Ideal::from_one_based(a.ambient(), &[2]).unwrap();
    c.bench_function("boundary/scalar_block", |b| b.iter(|| is_boundary_ideal(&a, &scalar, &tol).unwrap()));
    c.bench_function("boundary/matrix_block", |b| b.iter(|| is_boundary_ideal(&a, &matrix, &tol).unwrap()));
}

fn decomposition(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let mut g = c.benchmark_group("decompose");
    for copies in [2, 4] {
        let (shape, gens) = repeated_t2(copies);
        g.bench_with_input(BenchmarkId::from_parameter(copies), &(shape, gens), |b, (s, gs)| {
            b.iter(|| decompose_star_algebra(s, gs, &tol).unwrap())
        });
    }
    g.finish();
}

fn covers(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let base = Arc::new(toeplitz_base(8, &tol).unwrap());
    c.bench_function("toeplitz_cover/n8", |b| {
        b.iter(|| toeplitz_cover(&base, 8, C64::new(0.6, 0.0), &tol).unwrap())
    });
}

fn twists(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let f = t2_sarason_family(0.5, &tol).unwrap();
    let grid = unit_grid(101);
    let word = t2_defect_word();
    c.bench_function("twist/delta_curve_101", |b| b.iter(|| delta_curve(&f, &word, &grid, &tol).unwrap()));
    c.bench_function("twist/contractivity_check", |b| {
        b.iter(|| f.twist(C64::new(0.3, 0.4), &tol).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = norms, boundary, decomposition, covers, twists
}
criterion_main!(benches);

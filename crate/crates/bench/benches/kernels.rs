use cohesive_bench::{dense_scalar, lie_fixture, singular_matrix};
use cohesive_core::acceptance::{run_criteria, SuiteConfig};
use cohesive_core::functors::{pairing_table, pairing_table_torus};
use cohesive_core::hom::hom_complex;
use cohesive_core::linalg::rank_kernel_image;
use cohesive_core::models::{nc_dualizing_data, nc_torus_dga, LieAlgebraData, NcTorusData};
use cohesive_core::transfer::{cohesify, transfer_scenarios};
use cohesive_core::{CohesiveModule, Flavor};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_rational::BigRational;
use std::hint::black_box;
use std::sync::Arc;

fn scalars(c: &mut Criterion) {
    let mut g = c.benchmark_group("cyclotomic");
    for n in [3u32, 12, 24] {
        let (a, b) = (dense_scalar(n, 1), dense_scalar(n, -2));
        g.bench_with_input(BenchmarkId::new("mul", n), &n, |bch, _| bch.iter(|| black_box(&a) * black_box(&b)));
        g.bench_with_input(BenchmarkId::new("inverse", n), &n, |bch, _| bch.iter(|| black_box(&a).inverse()));
    }
    g.finish();
}

fn linear_algebra(c: &mut Criterion) {
    let mut g = c.benchmark_group("rank_kernel_image");
    for n in [8usize, 16, 32] {
        let m = singular_matrix(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |bch, m| bch.iter(|| rank_kernel_image(black_box(m))));
    }
    g.finish();
}

fn hom_and_duality(c: &mut Criterion) {
    let (d, o) = lie_fixture(&LieAlgebraData::sl2());
    c.bench_function("sl2 hom cohomology", |b| b.iter(|| hom_complex(&o, &o).unwrap().cohomology_dims().unwrap()));
    c.bench_function("sl2 pairing table", |b| b.iter(|| pairing_table(&d, &o, &o).unwrap()));

    let data = NcTorusData::rank_two(BigRational::new(1.into(), 3.into()), true);
    let a = Arc::new(nc_torus_dga(&data, Flavor::Dolbeault, None).unwrap());
    let nd = nc_dualizing_data(&a).unwrap();
    let t = Arc::new(CohesiveModule::rank_one("O", a, 0));
    let mut g = c.benchmark_group("torus pairing");
    for r in [1i64, 2, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| b.iter(|| pairing_table_torus(&nd, &t, &t, r).unwrap()));
    }
    g.finish();
}

fn transfer(c: &mut Criterion) {
    for s in transfer_scenarios() {
        c.bench_function(&format!("cohesify {}", s.name), |b| b.iter(|| cohesify(&s.x, &s.e0, &s.map0).unwrap()));
    }
}

fn acceptance(c: &mut Criterion) {
    let mut g = c.benchmark_group("acceptance");
    g.sample_size(10);
    g.bench_function("criteria 1-6", |b| b.iter(|| run_criteria(&SuiteConfig::default())));
    g.finish();
}

criterion_group!(benches, scalars, linear_algebra, hom_and_duality, transfer, acceptance);
criterion_main!(benches);

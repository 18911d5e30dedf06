use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use finsler_bench::{base_point, bench_metrics};
use finsler_core::connection::{christoffel_s, spray_s};
use finsler_core::curvature::jacobi_operator_spray;
use finsler_core::geodesic::integrate_geodesic;
use finsler_core::jacobi::conjugate_points;
use finsler_core::jets::{lift, Dir};
use finsler_core::ode::OdeOptions;

fn bench_lifts(c: &mut Criterion) {
    let metrics = bench_metrics();
    let (x, v) = base_point();
    let mut group = c.benchmark_group("jet_lift_order3");
    for m in &metrics {
        group.bench_function(m.name(), |b| {
            b.iter(|| {
                lift(
                    m.lagrangian(),
                    black_box(&x[..]),
                    black_box(&v[..]),
                    &[Dir::V(0), Dir::V(1), Dir::X(0)],
                    3,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_connection(c: &mut Criterion) {
    let metrics = bench_metrics();
    let (x, v) = base_point();
    let mut group = c.benchmark_group("connection");
    for m in &metrics {
        group.bench_function(format!("{}_spray", m.name()), |b| {
            b.iter(|| spray_s::<f64>(m, black_box(&x), black_box(&v)).unwrap())
        });
        group.bench_function(format!("{}_christoffel", m.name()), |b| {
            b.iter(|| christoffel_s::<f64>(m, black_box(&x), black_box(&v)).unwrap())
        });
        group.bench_function(format!("{}_jacobi_operator", m.name()), |b| {
            b.iter(|| jacobi_operator_spray(m, black_box(&x), black_box(&v)).unwrap())
        });
    }
    group.finish();
}

fn bench_geodesics(c: &mut Criterion) {
    let metrics = bench_metrics();
    let (x, v) = base_point();
    let opts = OdeOptions::default();
    let mut group = c.benchmark_group("geodesic");
    group.sample_size(20);
    for m in &metrics {
        group.bench_function(format!("{}_unit_run", m.name()), |b| {
            b.iter(|| integrate_geodesic(m, black_box(&x), black_box(&v), [0.0, 1.0], &opts).unwrap())
        });
    }
    group.finish();
}

fn bench_conjugate_sweep(c: &mut Criterion) {
    let m = finsler_core::catalog::build("sphere", &serde_json::Value::Null).unwrap();
    let opts = OdeOptions::default();
    let geo = integrate_geodesic(
        &m,
        &[std::f64::consts::FRAC_PI_2, 0.0],
        &[0.0, 1.0],
        [0.0, 3.5],
        &opts,
    )
    .unwrap();
    let mut group = c.benchmark_group("jacobi");
    group.sample_size(10);
    group.bench_function("sphere_conjugate_sweep", |b| {
        b.iter(|| conjugate_points(&m, &geo, &opts).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_lifts,
    bench_connection,
    bench_geodesics,
    bench_conjugate_sweep
);
criterion_main!(benches);

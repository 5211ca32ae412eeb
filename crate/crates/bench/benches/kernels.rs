use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

use transeig_core::parametrix::parametrix_tables;
use transeig_core::radialode::{regular_solution, RadialProfile};
use transeig_core::rootfinder::{wronskian, DiskProblem};
use transeig_core::specialfn::bessel_j_pair;

fn tables(c: &mut Criterion) {
    c.bench_function("parametrix_tables s=3", |b| b.iter(|| parametrix_tables(black_box(3)).unwrap()));
}

fn bessel(c: &mut Criterion) {
    let x = Complex64::new(37.5, 4.0);
    c.bench_function("bessel_j_pair m=20 |x|~38", |b| b.iter(|| bessel_j_pair(black_box(20), black_box(x)).unwrap()));
}

fn ode(c: &mut Criterion) {
    let p = RadialProfile::new(1.0, vec![2.0, -0.5]).unwrap();
    let mut g = c.benchmark_group("regular_solution");
    for (m, l) in [(0u32, Complex64::new(10.0, 1.0)), (30, Complex64::new(60.0, -3.0))] {
        g.bench_function(format!("m={m} lambda={l}"), |b| b.iter(|| regular_solution(&p, black_box(m), black_box(l)).unwrap()));
    }
    g.finish();
}

fn wronskian_eval(c: &mut Criterion) {
    let p = DiskProblem::new(RadialProfile::constant(1.0, 2.0).unwrap(), RadialProfile::constant(1.0, 1.0).unwrap())
        .unwrap();
    let l = Complex64::new(40.0, 0.8);
    c.bench_function("wronskian m=10 (2,1) lambda=40+0.8i", |b| b.iter(|| wronskian(&p, black_box(10), black_box(l)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = tables, bessel, ode, wronskian_eval
}
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use charp_bench::{flat_connection, flat_connection_1d, plain_ring};
use charp_core::arith::{ModPoly, Monomial};
use charp_core::connections::{flat_sections, taylor_stratification};
use charp_core::frobenius::{standard_theta, theta_coalgebra_check};
use charp_core::DiffOp;

fn operators(c: &mut Criterion) {
    let r = plain_ring(5, 1);
    let x = ModPoly::var(&r, 0);
    let a = DiffOp::scalar(x.pow(3).add(&x), Monomial::from_vec(vec![2]));
    let b = DiffOp::scalar(x.pow(2), Monomial::from_vec(vec![3]));
    c.bench_function("op_mul p=5", |bench| bench.iter(|| black_box(&a).op_mul(black_box(&b)).unwrap()));
    let d = DiffOp::scalar(x.clone(), Monomial::from_vec(vec![1]));
    c.bench_function("(x d)^5 p=5", |bench| bench.iter(|| black_box(&d).pow(5).unwrap()));
}

fn connections(c: &mut Criterion) {
    for p in [3u64, 5] {
        let conn = flat_connection(p, 2, 7);
        c.bench_function(&format!("p_curvature rank 2 p={p}"), |bench| bench.iter(|| black_box(&conn).p_curvature().unwrap()));
        c.bench_function(&format!("taylor_stratification level {p} p={p}"), |bench| {
            bench.iter(|| taylor_stratification(black_box(&conn), p as u32).unwrap())
        });
        let one = flat_connection_1d(p, 2, 7);
        c.bench_function(&format!("flat_sections rank 2 p={p}"), |bench| bench.iter(|| flat_sections(black_box(&one), None).unwrap()));
    }
}

fn theta(c: &mut Criterion) {
    let r = plain_ring(3, 1);
    let th = standard_theta(3);
    c.bench_function("theta coalgebra level 9 p=3", |bench| bench.iter(|| theta_coalgebra_check(black_box(&r), 9, &th)));
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(20);
    targets = operators, connections, theta
}
criterion_main!(kernels);

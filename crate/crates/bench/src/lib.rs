use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use echolab_core::echo::{certify_fixed_point, verify_certificate, BuildOptions, Thresholds};
use echolab_core::kbonacci::{count_cycle_covers, incidence_graph, lifted_kbonacci};
use echolab_core::poly::{eval_number, q_recurrence};
use echolab_core::stream::fixed_point_prefix;
use echolab_core::{AlgebraicInput, Letter, Morphism, Word, WordStream};
use num_bigint::BigInt;
use num_rational::BigRational;

fn tenth() -> BigRational {
    BigRational::new(1.into(), 10.into())
}

fn words(c: &mut Criterion) {
    let trib = Morphism::tribonacci();
    c.bench_function("tribonacci prefix 1e6", |b| b.iter(|| fixed_point_prefix(&trib, Letter(0), black_box(1_000_000))));
    let u = WordStream::new(trib, Letter(0)).unwrap();
    c.bench_function("tribonacci random access at 1e12", |b| b.iter(|| u.get(black_box(1_000_000_000_000))));
}

fn certificates(c: &mut Criterion) {
    let mut group = c.benchmark_group("certificate");
    group.sample_size(10);
    let x = Word::parse_digits("0").unwrap();
    for (name, m) in [("fib", Morphism::fibonacci()), ("trib", Morphism::tribonacci())] {
        let opts = BuildOptions::new(tenth(), 12, 100_000);
        group.bench_with_input(BenchmarkId::new("build", name), &m, |b, m| b.iter(|| certify_fixed_point(m, &x, &opts)));
        let cert = certify_fixed_point(&m, &x, &opts).unwrap().certificate;
        let u = WordStream::new(m.clone(), Letter(0)).unwrap();
        group.bench_with_input(BenchmarkId::new("verify", name), &cert, |b, cert| {
            b.iter(|| verify_certificate(&u, cert, 100_000, &Thresholds::default()))
        });
    }
    group.finish();
}

fn kbonacci(c: &mut Criterion) {
    let mut group = c.benchmark_group("kbonacci");
    for k in [3, 5, 6] {
        let sys = lifted_kbonacci(k).unwrap();
        let g = incidence_graph(&sys);
        group.bench_with_input(BenchmarkId::new("cycle covers", k), &g, |b, g| b.iter(|| count_cycle_covers(g)));
        group.bench_with_input(BenchmarkId::new("q recurrence n=5", k), &sys, |b, sys| b.iter(|| q_recurrence(&sys.lift, 5)));
    }
    group.finish();
}

fn evaluation(c: &mut Criterion) {
    let u = WordStream::new(Morphism::fibonacci(), Letter(0)).unwrap();
    let target = BigRational::new(1.into(), BigInt::from(10).pow(100));
    for beta in ["2", "1+i"] {
        let b = AlgebraicInput::parse(beta).unwrap();
        c.bench_function(&format!("fibonacci value at {beta} to 1e-100"), |bench| bench.iter(|| eval_number(&u, &b, &target)));
    }
}

pub fn benchmarks(c: &mut Criterion) {
    words(c);
    certificates(c);
    kbonacci(c);
    evaluation(c);
}

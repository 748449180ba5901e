use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlocal_core::{
    bell_local_lp, born_evaluate, canonicalize, decompose_rs, evaluate_nlocal, examples,
    expand_full, factorization_check, nlocal_search, random, realize, Party, Scenario,
    SearchConfig,
};

fn decomposition(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose_rs");
    for (m, o) in [(2, 2), (3, 3), (5, 5)] {
        let b = random::response_matrix(m, o, &mut random::rng(1));
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{m}x{o}")),
            &b,
            |bench, b| bench.iter(|| decompose_rs(black_box(b), 1e-12).unwrap()),
        );
    }
    g.finish();
}

fn models(c: &mut Criterion) {
    let mut g = c.benchmark_group("models");
    for (label, s, dims) in [
        (
            "n2-o2-m2-d3",
            Scenario::homogeneous(2, 2, 2).unwrap(),
            vec![3, 3],
        ),
        (
            "n3-o2-m2-d4",
            Scenario::homogeneous(3, 2, 2).unwrap(),
            vec![4, 4, 4],
        ),
        (
            "n2-o3-m3-d4",
            Scenario::homogeneous(2, 3, 3).unwrap(),
            vec![4, 4],
        ),
    ] {
        let m = random::model(&s, &dims, &mut random::rng(2)).unwrap();
        g.bench_with_input(BenchmarkId::new("evaluate", label), &m, |b, m| {
            b.iter(|| evaluate_nlocal(black_box(m)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("canonicalize", label), &m, |b, m| {
            b.iter(|| canonicalize(black_box(m)).unwrap())
        });
        let canon = canonicalize(&m).unwrap();
        g.bench_with_input(BenchmarkId::new("expand", label), &canon, |b, c| {
            b.iter(|| expand_full(black_box(c)).unwrap())
        });
        let r = realize(&canon).unwrap();
        g.bench_with_input(BenchmarkId::new("born", label), &r, |b, r| {
            b.iter(|| born_evaluate(black_box(r)).unwrap())
        });
    }
    g.finish();
}

fn certificates(c: &mut Criterion) {
    let t = examples::not_bilocal();
    c.bench_function("factorization_check 222", |b| {
        b.iter(|| factorization_check(black_box(&t), Party::Hub, 1e-9).unwrap())
    });
    c.bench_function("bell_local_lp 222", |b| {
        b.iter(|| bell_local_lp(black_box(&t), 1e-9).unwrap())
    });
    let s = Scenario::homogeneous(2, 2, 2).unwrap();
    let planted = random::canonical(&s, &mut random::rng(3))
        .unwrap()
        .evaluate()
        .unwrap();
    let cfg = SearchConfig::default();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("planted 222", |b| {
        b.iter(|| nlocal_search(black_box(&planted), &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, decomposition, models, certificates);
criterion_main!(benches);

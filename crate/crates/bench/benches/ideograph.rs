use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ideograph::equality::{bare_equal, t_equal};
use ideograph::rewrite::{normalize, Strategy};
use ideograph::{check, corpus};
use ideograph_bench::{check_inputs, doubling_input};

fn checking(c: &mut Criterion) {
    let mut g = c.benchmark_group("check");
    for (name, b) in check_inputs().unwrap() {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &b, |bch, b| bch.iter(|| check(black_box(b))));
    }
    g.finish();
}

fn normalizing(c: &mut Criterion) {
    let mut g = c.benchmark_group("normalize");
    g.sample_size(20);
    for n in [1, 3, 5] {
        let b = doubling_input(n).unwrap();
        for s in Strategy::ALL {
            g.bench_with_input(BenchmarkId::new(format!("{s:?}"), n), &b, |bch, b| {
                bch.iter(|| normalize(black_box(&b.term), &b.external, s, 10_000).unwrap())
            });
        }
    }
    let higher = corpus::get("let_higher").unwrap();
    g.bench_function("let_higher", |bch| {
        bch.iter(|| normalize(black_box(&higher.term), &higher.external, Strategy::OutermostFirst, 100).unwrap())
    });
    g.finish();
}

fn comparing(c: &mut Criterion) {
    let mut g = c.benchmark_group("equality");
    let doubled = corpus::get("graph_three_doubled").unwrap();
    let applied = corpus::get("doubler_applied").unwrap();
    let nf = normalize(&applied.term, &applied.external, Strategy::OutermostFirst, 10_000).unwrap();
    g.bench_function("doubled_graph_bare", |bch| bch.iter(|| bare_equal(black_box(&nf.term), &doubled.term)));
    let (a, b) = (corpus::get("pair_id").unwrap(), corpus::get("pair_swap").unwrap());
    g.bench_function("pair_t_equal", |bch| {
        bch.iter(|| t_equal(&a.ty, black_box(&a.term), &a.external, &b.term, &b.external).unwrap())
    });
    let twice = corpus::get("let_twice").unwrap();
    g.bench_function("let_twice_self", |bch| {
        bch.iter(|| t_equal(&twice.ty, black_box(&twice.term), &twice.external, &twice.term, &twice.external).unwrap())
    });
    g.finish();
}

criterion_group!(benches, checking, normalizing, comparing);
criterion_main!(benches);

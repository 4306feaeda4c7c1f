use criterion::{BenchmarkId, Criterion};
use std::hint::black_box;

use stabtop::oracle::{matrix_rep, oracle_hn, OracleObject};
use stabtop::ztilde::{enumerate_universe, ZtildeIndex};
use stabtop::{hn, parse_object, Charge, ProjPoint, UniverseBounds};

fn charges() -> [(&'static str, Charge); 3] {
    [
        ("all-semistable", Charge::from_ints((-1, 0), (0, 1)).unwrap()),
        ("collapsed", Charge::from_ints((0, 1), (-1, 0)).unwrap()),
        ("degenerate", Charge::from_ints((0, 1), (0, 2)).unwrap()),
    ]
}

pub fn bench_hn(c: &mut Criterion) {
    let x = parse_object("P(3)^2 + R([1:1],2)[1] + I(1)[-1] + R([0:1],1)^4 + P(0)").unwrap();
    let mut group = c.benchmark_group("hn");
    for (name, z) in charges() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &z, |b, z| {
            b.iter(|| hn(black_box(z), black_box(&x)))
        });
    }
    group.finish();
}

pub fn bench_oracle_hn(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_hn");
    group.sample_size(20);
    for text in ["P(1)", "R([1:0],1) + P(0)^2", "R([1:1],3)", "I(1) + P(1)"] {
        let rep = matrix_rep(&parse_object(text).unwrap(), 2).unwrap();
        let z = &charges()[1].1;
        group.bench_with_input(BenchmarkId::new("enumerate", text), &rep, |b, rep| {
            b.iter(|| oracle_hn(black_box(z), black_box(rep)).unwrap())
        });
        let prepared = OracleObject::new(&parse_object(text).unwrap(), 2).unwrap();
        group.bench_with_input(BenchmarkId::new("prepared", text), &prepared, |b, o| {
            b.iter(|| o.hn(black_box(z)).unwrap())
        });
    }
    group.finish();
}

pub fn bench_universe(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_universe");
    group.sample_size(10);
    for (d, shifts) in [(3, (-1, 1)), (6, (0, 0))] {
        let bounds = UniverseBounds::new(d, d, shifts, ProjPoint::over_prime(2));
        group.bench_with_input(BenchmarkId::from_parameter(format!("{d}x{d}@{shifts:?}")), &bounds, |b, bounds| {
            b.iter(|| enumerate_universe(black_box(bounds)).unwrap())
        });
    }
    let bounds = UniverseBounds::new(3, 3, (-1, 1), ProjPoint::over_prime(2));
    let universe = enumerate_universe(&bounds).unwrap();
    let z = Charge::from_ints((-1, 1), (1, 2)).unwrap();
    group.bench_function("ztilde_index_3x3", |b| b.iter(|| ZtildeIndex::new(black_box(&z), &universe)));
    group.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    bench_hn(c);
    bench_oracle_hn(c);
    bench_universe(c);
}

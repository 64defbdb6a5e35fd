use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twopage::dp::{decide_subham_with, DpOptions};
use twopage::gen;
use twopage::kernel::kernelize_two_page;
use twopage::planarity::planar_embedding;
use twopage::types::enumerate_type_codes;

fn decide(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide");
    group.sample_size(10);
    for n in [50usize, 100, 200] {
        let g = gen::planar_deg4(n, 7).unwrap();
        group.bench_with_input(BenchmarkId::new("planar-deg4", n), &g, |b, g| b.iter(|| decide_subham_with(black_box(g), &DpOptions::default()).unwrap()));
    }
    let gh = gen::goldner_harary();
    group.bench_function("goldner-harary exact", |b| b.iter(|| decide_subham_with(black_box(&gh), &DpOptions::exact()).unwrap()));
    group.finish();
}

fn pieces(c: &mut Criterion) {
    let g = gen::planar_deg4(200, 3).unwrap();
    c.bench_function("planar embedding n=200", |b| b.iter(|| planar_embedding(black_box(&g))));
    let f = gen::random_fen(400, 6, 3).unwrap();
    c.bench_function("two-page kernel n=400", |b| b.iter(|| kernelize_two_page(black_box(&f)).unwrap()));
    let o = twopage::spherecut::WeakNoose::new((0..4).map(|i| twopage::spherecut::Subcurve::new(i, (i + 1) % 4, i)).collect()).unwrap();
    c.bench_function("types on a length-4 noose", |b| b.iter(|| enumerate_type_codes(black_box(&o))));
}

criterion_group!(benches, decide, pieces);
criterion_main!(benches);

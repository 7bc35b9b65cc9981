use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gted_core::{
    bleu, corpus, fixture_trees, gted_distance, ted_distance, tree_of, AlphaMode, CostModel,
    TransformationSet,
};

fn pair(a: &str, b: &str) -> (gted_core::OperatorTree, gted_core::OperatorTree) {
    let load = |id: &str| tree_of(corpus::find(id).unwrap().source, &Default::default()).unwrap();
    (load(a), load(b))
}

fn distances(c: &mut Criterion) {
    let unit = CostModel::unit();
    let scoped = TransformationSet::with_alpha(AlphaMode::Scoped, true, unit);
    let mut group = c.benchmark_group("distance");
    for (a, b) in [
        ("alpha-t1", "alpha-t2"),
        ("marbles-label", "marbles-pred"),
        ("poly-label", "poly-pred"),
    ] {
        let (ta, tb) = pair(a, b);
        let name = format!("{a}/{b}");
        group.bench_with_input(
            BenchmarkId::new("ted", &name),
            &(&ta, &tb),
            |bench, (x, y)| bench.iter(|| ted_distance(black_box(x), black_box(y), &unit)),
        );
        group.bench_with_input(
            BenchmarkId::new("gted-scoped", &name),
            &(&ta, &tb),
            |bench, (x, y)| bench.iter(|| gted_distance(black_box(x), black_box(y), &scoped)),
        );
    }
    group.finish();
}

fn all_pairs(c: &mut Criterion) {
    let trees = fixture_trees();
    let scoped = TransformationSet::with_alpha(AlphaMode::Scoped, true, CostModel::unit());
    c.bench_function("gted-scoped/all-fixture-pairs", |bench| {
        bench.iter(|| {
            let mut total = 0.0;
            for (_, a) in &trees {
                for (_, b) in &trees {
                    total += gted_distance(a, b, &scoped);
                }
            }
            total
        })
    });
}

fn front_end(c: &mut Criterion) {
    let source = corpus::find("poly-label").unwrap().source;
    c.bench_function("parse-standardize-build/poly-label", |bench| {
        bench.iter(|| tree_of(black_box(source), &Default::default()).unwrap())
    });
    let pred = corpus::find("poly-pred").unwrap().source;
    c.bench_function("bleu/poly", |bench| {
        bench.iter(|| bleu(black_box(pred), black_box(source)))
    });
}

criterion_group!(benches, distances, all_pairs, front_end);
criterion_main!(benches);

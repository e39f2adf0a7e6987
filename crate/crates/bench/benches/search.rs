use std::time::Duration;

use birkhoff_core::{classify_all, count_models, find_model, ClassifyParams, Identity, IdentitySet, SearchQuery, Tag};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_search(c: &mut Criterion) {
    let evans = IdentitySet::of(&[Tag::A, Tag::C, Tag::B, Tag::D]);
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("count_evans_order4", |b| b.iter(|| count_models(evans, 4).unwrap()));
    let q = SearchQuery::new(
        IdentitySet::of(&[Tag::A, Tag::C, Tag::B]),
        Some(Identity::canonical(Tag::D)),
        4,
        Duration::from_secs(60),
    );
    group.bench_function("refute_acb_d_order4", |b| b.iter(|| find_model(&q).unwrap()));
    group.finish();
}

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    group.sample_size(10);
    let params = ClassifyParams { max_order: 3, budget_ms: 10_000 };
    group.bench_function("all_subsets_order3", |b| b.iter(|| classify_all(params).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_search, bench_classify);
criterion_main!(benches);

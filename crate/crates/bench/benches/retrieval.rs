use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use helpsys_bench::unit_vectors;
use helpsys_core::retrieval::{brute_force_knn, KdTree, SearchMode, DEFAULT_BUCKET_SIZE};
use std::hint::black_box;

fn knn(c: &mut Criterion) {
    let mut group = c.benchmark_group("knn_d32");
    for n in [2_000, 50_000] {
        let points = unit_vectors(n, 32, 1);
        let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
        let tree = KdTree::build(&refs, 32, DEFAULT_BUCKET_SIZE).unwrap();
        let queries = unit_vectors(64, 32, 2);
        let budget = (tree.leaf_count() / 10).max(1);
        group.bench_with_input(BenchmarkId::new("exact", n), &n, |b, _| {
            b.iter(|| {
                for q in &queries {
                    black_box(tree.knn(q, 1, SearchMode::Exact).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("approx_10pct", n), &n, |b, _| {
            b.iter(|| {
                for q in &queries {
                    black_box(tree.knn(q, 1, SearchMode::Approx { budget }).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("brute_force", n), &n, |b, _| {
            b.iter(|| {
                for q in &queries {
                    black_box(brute_force_knn(&refs, q, 1));
                }
            })
        });
    }
    group.finish();
}

fn build(c: &mut Criterion) {
    let points = unit_vectors(50_000, 32, 3);
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    c.bench_function("kdtree_build_50k_d32", |b| {
        b.iter(|| black_box(KdTree::build(&refs, 32, DEFAULT_BUCKET_SIZE).unwrap()))
    });
}

criterion_group!(benches, knn, build);
criterion_main!(benches);

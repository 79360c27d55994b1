use criterion::{criterion_group, criterion_main, Criterion};
use helpsys_bench::{desk_data, small_model};
use helpsys_core::models::ModelKind;
use helpsys_core::pipeline::{Engine, QueryRequest};
use helpsys_core::pos_mapper::{default_responses, Lexicons};
use helpsys_core::retrieval::index_dataset;
use helpsys_core::textnorm::{normalize, NormConfig};
use std::hint::black_box;

fn normalization(c: &mut Criterion) {
    let norm = NormConfig::default();
    let texts: Vec<String> = desk_data(200, 5).into_iter().map(|q| q.text).collect();
    c.bench_function("normalize_200_queries", |b| {
        b.iter(|| {
            for t in &texts {
                black_box(normalize(t, &norm));
            }
        })
    });
}

fn prediction(c: &mut Criterion) {
    let norm = NormConfig::default();
    let mut group = c.benchmark_group("predict");
    for kind in ModelKind::ALL {
        let (model, _) = small_model(kind);
        let nq = model.normalize("how do i set an alarm for 7 am", &norm).unwrap();
        group.bench_function(kind.name(), |b| b.iter(|| black_box(model.predict_normalized(&nq).unwrap())));
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let norm = NormConfig::default();
    let (model, train) = small_model(ModelKind::CBiLstm);
    let index = index_dataset(&model, &norm, &train, default_responses(), 8).unwrap();
    let engine = Engine::new(model, index, Lexicons::shipped(), norm).unwrap();
    let req = QueryRequest::new("can you help me snooze my alarm");
    c.bench_function("engine_query", |b| b.iter(|| black_box(engine.query(&req).unwrap())));
}

criterion_group!(benches, normalization, prediction, end_to_end);
criterion_main!(benches);

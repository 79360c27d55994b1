//! Fixtures shared by the benchmarks.

use helpsys_core::harness::{generate_dataset, split_dataset, GeneratorConfig, TemplateSet, DEFAULT_FRACTIONS};
use helpsys_core::models::{train, Classifier, LabeledQuery, ModelKind, TrainConfig};
use helpsys_core::textnorm::NormConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `n` points drawn uniformly from the unit sphere in `d` dimensions.
pub fn unit_vectors(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

pub fn desk_data(n: usize, seed: u64) -> Vec<LabeledQuery> {
    let set = TemplateSet::desk();
    generate_dataset(&set, n, &set.default_weights(), &GeneratorConfig::default(), seed).expect("generator")
}

/// A briefly trained desk-scale model and its training split.
pub fn small_model(kind: ModelKind) -> (Classifier, Vec<LabeledQuery>) {
    let data = desk_data(1000, 1);
    let split = split_dataset(&data, DEFAULT_FRACTIONS, 1).expect("split");
    let cfg = TrainConfig {
        epochs: 2,
        ..TrainConfig::default()
    };
    let (model, _) = train(&split.train, &split.validation, kind, &cfg, &NormConfig::default()).expect("train");
    (model, split.train)
}

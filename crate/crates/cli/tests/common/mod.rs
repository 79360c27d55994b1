use helpsys_core::harness::{generate_dataset, split_dataset, GeneratorConfig, TemplateSet, DEFAULT_FRACTIONS};
use helpsys_core::models::{train, Classifier, LabeledQuery, ModelKind, TrainConfig};
use helpsys_core::pipeline::Engine;
use helpsys_core::pos_mapper::{default_responses, Lexicons};
use helpsys_core::retrieval::{index_dataset, RetrievalIndex};
use helpsys_core::textnorm::NormConfig;

pub fn small_config() -> TrainConfig {
    TrainConfig {
        epochs: 8,
        lr: 0.01,
        embed_dim: 16,
        filter_count: 8,
        hidden: 8,
        ..TrainConfig::default()
    }
}

pub fn fixture_data() -> Vec<LabeledQuery> {
    let set = TemplateSet::desk();
    generate_dataset(&set, 800, &set.default_weights(), &GeneratorConfig::default(), 3).unwrap()
}

pub fn fixture_parts() -> (Classifier, RetrievalIndex, Vec<LabeledQuery>) {
    let norm = NormConfig::default();
    let split = split_dataset(&fixture_data(), DEFAULT_FRACTIONS, 3).unwrap();
    let (model, _) = train(&split.train, &split.validation, ModelKind::CBiLstm, &small_config(), &norm).unwrap();
    let index = index_dataset(&model, &norm, &split.train, default_responses(), 8).unwrap();
    (model, index, split.test)
}

#[allow(dead_code)]
pub fn fixture_engine() -> Engine {
    let (model, index, _) = fixture_parts();
    Engine::new(model, index, Lexicons::shipped(), NormConfig::default()).unwrap()
}

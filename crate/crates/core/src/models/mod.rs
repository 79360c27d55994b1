//! Help-query classifiers (CNN, LSTM, BiLSTM, C-BiLSTM), their training,
//! evaluation and checkpoint persistence.

mod checkpoint;
mod classifier;
mod data;
mod metrics;
mod objective;
mod train;

pub use checkpoint::{load, load_from_bytes, save, save_to_bytes, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use classifier::{Architecture, Classifier, ForwardCache, ModelKind, Params, HELP_CLASS, NUM_CLASSES};
pub use data::{read_jsonl, write_jsonl, HelpKind, Label, LabeledQuery};
pub use metrics::Metrics;
pub use objective::ClassifierObjective;
pub use train::{
    evaluate, evaluate_normalized, train, EpochRecord, TrainConfig, TrainReport, DECISION_THRESHOLD,
};

//! Synthetic data, splits, and the experiments that tie the modules together.

mod experiments;
mod generate;
pub mod templates;

pub use experiments::{
    check_grid, gold_help, parse_grid, pos_baseline, retrieval_baseline, run_comparison, score_answers,
    threshold_sweep, ComparisonReport, ComparisonRow, SweepReport, SweepRow, REFERENCE_GRID,
};
pub use generate::{
    generate_dataset, split_dataset, DatasetSplit, GeneratorConfig, TemplateSet, DEFAULT_DATASET_SIZE,
    DEFAULT_FRACTIONS, FULL_DATASET_SIZE,
};

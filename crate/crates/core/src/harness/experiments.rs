//! Model comparison, threshold sweeps and the rule-based baseline scored
//! against gold responses.

use serde::{Deserialize, Serialize};

use super::generate::DatasetSplit;
use crate::error::{Error, Result};
use crate::models::{evaluate, train, Classifier, LabeledQuery, Metrics, ModelKind, TrainConfig, TrainReport};
use crate::pos_mapper::{answer, Lexicons};
use crate::retrieval::{embed, FetchOptions, RetrievalIndex};
use crate::textnorm::NormConfig;

/// Similarity thresholds of the reference precision/recall table.
pub const REFERENCE_GRID: [f64; 8] = [0.60, 0.65, 0.70, 0.75, 0.80, 0.82, 0.83, 0.85];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub kind: ModelKind,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub best_epoch: usize,
    pub epochs_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    /// Whether test F1 ranks C-BiLSTM ≥ BiLSTM ≥ max(CNN, LSTM); `None`
    /// unless all four kinds were run.
    pub reference_order_holds: Option<bool>,
}

impl ComparisonReport {
    pub fn f1_of(&self, kind: ModelKind) -> Option<f64> {
        self.rows.iter().find(|r| r.kind == kind).map(|r| r.f1)
    }
}

/// Trains each kind with the same seed and configuration and scores it on
/// the test split. Returns the trained models alongside the report.
pub fn run_comparison(
    split: &DatasetSplit,
    kinds: &[ModelKind],
    cfg: &TrainConfig,
    norm: &NormConfig,
) -> Result<(ComparisonReport, Vec<(Classifier, TrainReport)>)> {
    if split.test.is_empty() {
        return Err(Error::Dataset("test split is empty".into()));
    }
    let mut rows = Vec::with_capacity(kinds.len());
    let mut models = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let (model, report) = train(&split.train, &split.validation, kind, cfg, norm)?;
        let m = evaluate(&model, &split.test, norm)?;
        rows.push(ComparisonRow {
            kind,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            best_epoch: report.best_epoch,
            epochs_run: report.history.len(),
        });
        models.push((model, report));
    }
    let mut report = ComparisonReport {
        rows,
        reference_order_holds: None,
    };
    if let [Some(c), Some(b), Some(cnn), Some(l)] = [
        report.f1_of(ModelKind::CBiLstm),
        report.f1_of(ModelKind::BiLstm),
        report.f1_of(ModelKind::Cnn),
        report.f1_of(ModelKind::Lstm),
    ] {
        report.reference_order_holds = Some(c >= b && b >= cnn.max(l));
    }
    Ok((report, models))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub answered: usize,
    pub correct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub best_threshold: f64,
    pub best_f1: f64,
    pub eval_size: usize,
}

impl SweepReport {
    pub fn recall_non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].recall <= w[0].recall)
    }
}

/// Help queries of `data` that carry a gold response.
pub fn gold_help(data: &[LabeledQuery]) -> Vec<(&str, &str)> {
    data.iter()
        .filter(|q| q.label.is_help())
        .filter_map(|q| q.response_id.as_deref().map(|r| (q.text.as_str(), r)))
        .collect()
}

/// Scores answers against gold: precision over answered queries, recall over
/// all of them. Only an exact response id match counts as correct.
pub fn score_answers<'a, I>(pairs: I) -> (Metrics, usize)
where
    I: IntoIterator<Item = (Option<&'a str>, &'a str)>,
{
    let (mut answered, mut correct, mut total) = (0, 0, 0);
    for (got, gold) in pairs {
        total += 1;
        if let Some(got) = got {
            answered += 1;
            if got == gold {
                correct += 1;
            }
        }
    }
    // Wrong answers are false positives; unanswered or wrong gold items are
    // the misses.
    (Metrics::from_counts(correct, answered - correct, total - correct), answered)
}

/// Runs retrieval over the gold help queries of `eval` at every threshold.
pub fn threshold_sweep(
    index: &RetrievalIndex,
    model: &Classifier,
    norm: &NormConfig,
    eval: &[LabeledQuery],
    grid: &[f64],
    base: &FetchOptions,
) -> Result<SweepReport> {
    let gold = gold_help(eval);
    if gold.is_empty() {
        return Err(Error::Dataset("evaluation set has no help queries".into()));
    }
    check_grid(grid)?;
    let vectors = gold
        .iter()
        .map(|(text, _)| embed(model, norm, text))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(grid.len());
    for &threshold in grid {
        let opts = FetchOptions { threshold, ..*base };
        let mut answers = Vec::with_capacity(gold.len());
        for v in &vectors {
            answers.push(index.match_vector(v, &opts)?.response.map(|r| r.response_id));
        }
        let (m, answered) = score_answers(answers.iter().map(Option::as_deref).zip(gold.iter().map(|g| g.1)));
        rows.push(SweepRow {
            threshold,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            answered,
            correct: m.tp,
        });
    }
    let best = rows
        .iter()
        .fold(None::<&SweepRow>, |best, r| match best {
            Some(b) if b.f1 >= r.f1 => Some(b),
            _ => Some(r),
        })
        .expect("grid is non-empty");
    Ok(SweepReport {
        best_threshold: best.threshold,
        best_f1: best.f1,
        rows,
        eval_size: gold.len(),
    })
}

/// Scores the lexicon baseline on the gold help queries of `eval`.
pub fn pos_baseline(lex: &Lexicons, norm: &NormConfig, eval: &[LabeledQuery]) -> Result<Metrics> {
    let gold = gold_help(eval);
    if gold.is_empty() {
        return Err(Error::Dataset("evaluation set has no help queries".into()));
    }
    let answers: Vec<Option<String>> = gold.iter().map(|(t, _)| answer(t, lex, norm).response_id).collect();
    Ok(score_answers(answers.iter().map(Option::as_deref).zip(gold.iter().map(|g| g.1))).0)
}

/// Retrieval scored the same way as [`pos_baseline`], at one setting.
pub fn retrieval_baseline(
    index: &RetrievalIndex,
    model: &Classifier,
    norm: &NormConfig,
    eval: &[LabeledQuery],
    opts: &FetchOptions,
) -> Result<Metrics> {
    let report = threshold_sweep(index, model, norm, eval, &[opts.threshold], opts)?;
    let row = report.rows[0];
    Ok(Metrics::from_counts(row.correct, row.answered - row.correct, report.eval_size - row.correct))
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("threshold grid is empty".into()));
    }
    if grid.iter().any(|t| !(-1.0..=1.0).contains(t)) {
        return Err(Error::InvalidConfig("thresholds must lie in [-1, 1]".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("threshold grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("bad threshold grid {spec:?}"));
    let grid = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Rounded to 1e-9 so 0.6 + 3 × 0.05 prints as 0.75.
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.60:0.85:0.05").unwrap(), vec![0.6, 0.65, 0.7, 0.75, 0.8, 0.85]);
        assert_eq!(parse_grid("0.6, 0.75").unwrap(), vec![0.6, 0.75]);
        assert!(parse_grid("0.8:0.6:0.1").is_err());
        assert!(parse_grid("0.6:0.8:0").is_err());
        assert!(parse_grid("0.7,0.6").is_err());
        assert!(parse_grid("x").is_err());
        assert!(check_grid(&REFERENCE_GRID).is_ok());
    }

    #[test]
    fn gold_scoring() {
        let (m, answered) = score_answers([(Some("a"), "a"), (Some("b"), "a"), (None, "c"), (Some("d"), "d")]);
        assert_eq!(answered, 3);
        assert_eq!((m.tp, m.fp, m.fn_), (2, 1, 2));
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.recall - 0.5).abs() < 1e-12);
    }
}

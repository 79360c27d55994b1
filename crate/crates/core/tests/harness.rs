use std::collections::{BTreeMap, HashSet};

use helpsys_core::harness::templates::SKILLS;
use helpsys_core::harness::{
    generate_dataset, gold_help, parse_grid, pos_baseline, retrieval_baseline, run_comparison, score_answers,
    split_dataset, threshold_sweep, GeneratorConfig, TemplateSet, DEFAULT_FRACTIONS, REFERENCE_GRID,
};
use helpsys_core::models::{write_jsonl, Label, LabeledQuery, ModelKind, TrainConfig};
use helpsys_core::pos_mapper::{default_responses, Lexicons};
use helpsys_core::retrieval::{embed, index_dataset, FetchOptions};
use helpsys_core::textnorm::NormConfig;

fn desk(n: usize, seed: u64) -> Vec<LabeledQuery> {
    let set = TemplateSet::desk();
    generate_dataset(&set, n, &set.default_weights(), &GeneratorConfig::default(), seed).unwrap()
}

fn quick_config() -> TrainConfig {
    TrainConfig {
        epochs: 8,
        lr: 0.01,
        embed_dim: 16,
        filter_count: 8,
        hidden: 8,
        ..TrainConfig::default()
    }
}

#[test]
fn generation_is_deterministic() {
    let set = TemplateSet::desk().only(&["alarm"]);
    let w = set.default_weights();
    let a = generate_dataset(&set, 10, &w, &GeneratorConfig::default(), 5).unwrap();
    let b = generate_dataset(&set, 10, &w, &GeneratorConfig::default(), 5).unwrap();
    assert_eq!(write_jsonl(&a).unwrap(), write_jsonl(&b).unwrap());
    let c = generate_dataset(&set, 10, &w, &GeneratorConfig::default(), 6).unwrap();
    assert_ne!(a, c);
}

#[test]
fn texts_are_distinct_and_labels_consistent() {
    let data = desk(2000, 3);
    let texts: HashSet<&str> = data.iter().map(|q| q.text.as_str()).collect();
    assert_eq!(texts.len(), data.len());
    let ids: HashSet<String> = TemplateSet::desk().response_ids().into_iter().collect();
    for q in &data {
        q.validate().unwrap();
        match q.label {
            Label::Help => assert!(ids.contains(q.response_id.as_deref().unwrap()), "{q:?}"),
            Label::NotHelp => assert!(q.response_id.is_none()),
        }
    }
}

#[test]
fn concentrated_weights_draw_one_skill() {
    let set = TemplateSet::desk();
    let mut w = vec![0.0; set.skills.len()];
    let music = set.skills.iter().position(|s| s.skill == "music").unwrap();
    w[music] = 1.0;
    let data = generate_dataset(&set, 300, &w, &GeneratorConfig::default(), 9).unwrap();
    for q in data.iter().filter(|q| q.skill.is_some()) {
        assert_eq!(q.skill.as_deref(), Some("music"), "{q:?}");
    }
}

#[test]
fn skill_frequencies_follow_weights() {
    let set = TemplateSet::desk();
    let weights = set.default_weights();
    let total: f64 = weights.iter().sum();
    let data = generate_dataset(&set, 5000, &weights, &GeneratorConfig::default(), 42).unwrap();
    let tagged: Vec<&str> = data.iter().filter_map(|q| q.skill.as_deref()).collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &tagged {
        *counts.entry(s).or_default() += 1;
    }
    for (s, w) in set.skills.iter().zip(&weights) {
        let expected = tagged.len() as f64 * w / total;
        let got = counts.get(s.skill).copied().unwrap_or(0) as f64;
        assert!((got - expected).abs() <= 0.2 * expected, "{}: {got} vs {expected:.0}", s.skill);
    }
}

#[test]
fn bad_generator_input_is_rejected() {
    let empty = TemplateSet::desk().only(&[]);
    assert!(generate_dataset(&empty, 10, &[], &GeneratorConfig::default(), 1).is_err());
    let set = TemplateSet::desk();
    assert!(generate_dataset(&set, 0, &set.default_weights(), &GeneratorConfig::default(), 1).is_err());
    assert!(generate_dataset(&set, 10, &[1.0], &GeneratorConfig::default(), 1).is_err());
    assert!(generate_dataset(&set, 10, &vec![0.0; set.skills.len()], &GeneratorConfig::default(), 1).is_err());
}

#[test]
fn template_responses_exist() {
    let known: HashSet<String> = default_responses().into_iter().map(|r| r.response_id).collect();
    let lex = Lexicons::shipped();
    let table: HashSet<&str> = lex.table.entries().map(|(_, _, id)| id).collect();
    for id in TemplateSet::full().response_ids() {
        assert!(known.contains(&id), "{id} has no response text");
    }
    for s in SKILLS {
        for t in s.tasks {
            assert!(table.contains(s.response_id(t).as_str()), "{} not in the action-skill table", s.response_id(t));
        }
    }
}

#[test]
fn split_sizes_are_exact() {
    let data = desk(100, 1);
    let s = split_dataset(&data, DEFAULT_FRACTIONS, 7).unwrap();
    assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (80, 5, 15));
    assert_eq!(s, split_dataset(&data, DEFAULT_FRACTIONS, 7).unwrap());
    assert_ne!(s.train, split_dataset(&data, DEFAULT_FRACTIONS, 8).unwrap().train);

    let mut all: Vec<&str> = s.train.iter().chain(&s.validation).chain(&s.test).map(|q| q.text.as_str()).collect();
    all.sort_unstable();
    let mut orig: Vec<&str> = data.iter().map(|q| q.text.as_str()).collect();
    orig.sort_unstable();
    assert_eq!(all, orig);

    for n in [20, 40, 200, 5000] {
        let data = desk(n, 2);
        let s = split_dataset(&data, DEFAULT_FRACTIONS, 1).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (n * 16 / 20, n / 20, n * 3 / 20));
    }
    assert!(split_dataset(&data[..2], DEFAULT_FRACTIONS, 1).is_err());
    assert!(split_dataset(&data, [0.5, 0.5, 0.5], 1).is_err());
}

#[test]
fn answers_are_scored_against_gold() {
    let (m, answered) = score_answers([
        (Some("a"), "a"),
        (Some("b"), "a"),
        (None, "c"),
        (Some("d"), "d"),
    ]);
    assert_eq!(answered, 3);
    assert_eq!((m.tp, m.fp, m.fn_), (2, 1, 2));
    assert!((m.precision - 2.0 / 3.0).abs() < 1e-12);
    assert!((m.recall - 0.5).abs() < 1e-12);
}

#[test]
fn grids_parse() {
    assert_eq!(parse_grid("0.60:0.85:0.05").unwrap(), vec![0.6, 0.65, 0.7, 0.75, 0.8, 0.85]);
    assert_eq!(parse_grid("0.6, 0.7").unwrap(), vec![0.6, 0.7]);
    assert!(parse_grid("0.7,0.6").is_err());
    assert!(parse_grid("0.6:0.8").is_err());
    assert!(parse_grid("0:2:1").is_err());
    assert!(parse_grid("").is_err());
}

#[test]
fn sweep_and_baselines() {
    let norm = NormConfig::default();
    let data = desk(1200, 4);
    let split = split_dataset(&data, DEFAULT_FRACTIONS, 4).unwrap();
    let (report, mut models) = run_comparison(&split, &[ModelKind::CBiLstm], &quick_config(), &norm).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert!(report.reference_order_holds.is_none());
    let (model, _) = models.remove(0);
    let index = index_dataset(&model, &norm, &split.train, default_responses(), 8).unwrap();

    let sweep = threshold_sweep(&index, &model, &norm, &split.test, &REFERENCE_GRID, &FetchOptions::default()).unwrap();
    assert_eq!(sweep.rows.len(), 8);
    assert!(sweep.recall_non_increasing());
    assert_eq!(sweep.eval_size, gold_help(&split.test).len());
    let best = sweep.rows.iter().map(|r| r.f1).fold(f64::MIN, f64::max);
    let first_best = sweep.rows.iter().find(|r| r.f1 == best).unwrap();
    assert_eq!(sweep.best_threshold, first_best.threshold);

    // A query answered correctly at t stays correct at any lower t.
    let gold = gold_help(&split.test);
    for (text, want) in &gold {
        let v = embed(&model, &norm, text).unwrap();
        let mut correct_above = false;
        for &t in REFERENCE_GRID.iter().rev() {
            let opts = FetchOptions { threshold: t, ..FetchOptions::default() };
            let got = index.match_vector(&v, &opts).unwrap().response.map(|r| r.response_id);
            let correct = got.as_deref() == Some(*want);
            assert!(correct || !correct_above, "{text} lost at {t}");
            correct_above |= correct;
        }
    }

    // Threshold 1 answers only exact duplicates of indexed queries.
    let dup: Vec<LabeledQuery> = split.train.iter().filter(|q| q.label.is_help()).take(5).cloned().collect();
    let exact = threshold_sweep(&index, &model, &norm, &dup, &[1.0 - 1e-9], &FetchOptions::default()).unwrap();
    assert_eq!(exact.rows[0].answered, 5);

    let r = retrieval_baseline(&index, &model, &norm, &split.test, &FetchOptions::default()).unwrap();
    let p = pos_baseline(&Lexicons::shipped(), &norm, &split.test).unwrap();
    for m in [r, p] {
        assert!((0.0..=1.0).contains(&m.precision) && (0.0..=1.0).contains(&m.recall));
    }
    let no_help: Vec<LabeledQuery> = split.test.iter().filter(|q| !q.label.is_help()).cloned().collect();
    assert!(pos_baseline(&Lexicons::shipped(), &norm, &no_help).is_err());
    assert!(threshold_sweep(&index, &model, &norm, &split.test, &[], &FetchOptions::default()).is_err());
}

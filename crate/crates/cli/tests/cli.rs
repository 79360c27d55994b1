mod common;

use std::path::Path;
use std::process::{Command, Output};

use helpsys_core::models::{read_jsonl, write_jsonl};
use serde_json::Value;

fn helpsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helpsys"))
        .env_remove("HELPSYS_CONFIG")
        .args(args)
        .output()
        .unwrap()
}

fn json_out(args: &[&str]) -> Value {
    let out = helpsys(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors() {
    let out = helpsys(&[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(!helpsys(&["frobnicate"]).status.success());
    assert!(!helpsys(&["normalize", "--bogus"]).status.success());
    assert!(!helpsys(&["query", "--text", "hi"]).status.success());
}

#[test]
fn normalize_prints_tokens() {
    let v = json_out(&["normalize", "--json", "--text", "Wake me up at 7:30am"]);
    let tokens = v[0]["tokens"].as_array().unwrap();
    assert_eq!(tokens.len(), 15);
    assert_eq!(tokens.last().unwrap(), "time_stamp");
}

#[test]
fn generated_data_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let v = json_out(&["generate-data", "--json", "--seed", "9", "--n", "200", "--out-dir", p(dir.path())]);
        assert_eq!((v["train"].as_u64(), v["validation"].as_u64(), v["test"].as_u64()), (Some(160), Some(10), Some(30)));
    }
    for f in ["dataset.jsonl", "train.jsonl", "validation.jsonl", "test.jsonl"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let text = std::fs::read_to_string(a.path().join("dataset.jsonl")).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["text", "label", "response_id", "skill", "help_kind"] {
        assert!(first.get(key).is_some(), "{key}");
    }
}

#[test]
fn config_file_and_env_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"train": {"maxlen": 6}}"#).unwrap();
    let v = json_out(&["normalize", "--json", "--config", p(&cfg), "--text", "set an alarm"]);
    assert_eq!(v[0]["tokens"].as_array().unwrap().len(), 6);

    let out = Command::new(env!("CARGO_BIN_EXE_helpsys"))
        .env("HELPSYS_CONFIG", &cfg)
        .args(["normalize", "--json", "--text", "set an alarm"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["tokens"].as_array().unwrap().len(), 6);

    std::fs::write(&cfg, r#"{"trian": {}}"#).unwrap();
    assert!(!helpsys(&["normalize", "--config", p(&cfg), "--text", "x"]).status.success());
}

#[test]
fn train_index_query_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = common::fixture_data();
    let split = helpsys_core::harness::split_dataset(&data, helpsys_core::harness::DEFAULT_FRACTIONS, 3).unwrap();
    for (name, part) in [("train", &split.train), ("validation", &split.validation), ("test", &split.test)] {
        std::fs::write(d.join(format!("{name}.jsonl")), write_jsonl(part).unwrap()).unwrap();
    }
    assert_eq!(read_jsonl(&std::fs::read_to_string(d.join("test.jsonl")).unwrap()).unwrap(), split.test);

    let cfg = d.join("cfg.json");
    let small = common::small_config();
    std::fs::write(&cfg, serde_json::json!({ "train": small }).to_string()).unwrap();
    let model = d.join("m.ckpt");
    let index = d.join("i.idx");
    let report = json_out(&["train", "--json", "--config", p(&cfg), "--data-dir", p(d), "--out", p(&model)]);
    assert_eq!(report["history"].as_array().unwrap().len(), small.epochs);
    let m = json_out(&["eval", "--json", "--config", p(&cfg), "--model", p(&model), "--data", p(&d.join("test.jsonl"))]);
    assert!((0.0..=1.0).contains(&m["f1"].as_f64().unwrap()));
    let idx = json_out(&[
        "index", "--json", "--config", p(&cfg), "--model", p(&model), "--data", p(&d.join("train.jsonl")), "--out", p(&index),
    ]);
    assert!(idx["entries"].as_u64().unwrap() > 0);

    let q = json_out(&[
        "query", "--json", "--config", p(&cfg), "--text", "how do I set an alarm", "--model", p(&model), "--index", p(&index),
    ]);
    for key in ["normalized_tokens", "is_help", "p_help", "match", "pos_baseline", "latency_ms"] {
        assert!(q.get(key).is_some(), "{key}");
    }
    let sweep = json_out(&[
        "sweep", "--json", "--config", p(&cfg), "--model", p(&model), "--index", p(&index), "--data",
        p(&d.join("validation.jsonl")), "--grid", "0.60:0.85:0.05",
    ]);
    let rows = sweep["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let recalls: Vec<f64> = rows.iter().map(|r| r["recall"].as_f64().unwrap()).collect();
    assert!(recalls.windows(2).all(|w| w[1] <= w[0]));

    let out = helpsys(&["sweep", "--model", p(&model), "--index", p(&index), "--data", p(&d.join("validation.jsonl"))]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Threshold"));
}

#[test]
fn lexicon_baseline_reports_gaps() {
    let v = json_out(&["pos-baseline", "--json", "--text", "Can you hook up via bluetooth?"]);
    assert_eq!(v["action"], Value::Null);
    assert_eq!(v["skill"], "bluetooth");
    assert_eq!(v["outcome"], "missing_action");
}

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead};
use std::net::SocketAddr;
use std::path::Path;

use anyhow::{bail, Context, Result};
use helpsys_core::harness::{
    generate_dataset, parse_grid, pos_baseline, run_comparison, split_dataset, threshold_sweep, ComparisonReport,
    DatasetSplit, SweepReport, TemplateSet, DEFAULT_DATASET_SIZE, DEFAULT_FRACTIONS, FULL_DATASET_SIZE,
    REFERENCE_GRID,
};
use helpsys_core::models::{self, evaluate, read_jsonl, write_jsonl, LabeledQuery, Metrics, ModelKind, TrainConfig};
use helpsys_core::pipeline::{Engine, QueryRequest, QueryResponse};
use helpsys_core::pos_mapper::{answer, default_responses, parse_responses, Lexicons};
use helpsys_core::retrieval::{index_dataset, FetchOptions, RetrievalIndex, SearchMode};
use helpsys_core::textnorm::normalize;
use serde::Serialize;
use serde_json::json;

use crate::cli::{Artifacts, Cli, Command, GlobalArgs, SkillSet, SplitArgs};
use crate::config::AppConfig;
use crate::server;

pub const SPLIT_FILES: [&str; 3] = ["train.jsonl", "validation.jsonl", "test.jsonl"];

/// Applies the global flags on top of the loaded configuration.
pub fn effective_config(global: &GlobalArgs) -> Result<AppConfig> {
    let mut cfg = AppConfig::load(global.config.as_deref())?;
    if global.paper_scale {
        cfg.train = TrainConfig {
            seed: cfg.train.seed,
            ..TrainConfig::full_scale()
        };
    }
    if let Some(seed) = global.seed {
        cfg.train.seed = seed;
    }
    Ok(cfg)
}

pub fn load_engine(artifacts: &Artifacts, cfg: &AppConfig) -> Result<Engine> {
    let model = models::load(&artifacts.model).with_context(|| format!("loading {}", artifacts.model.display()))?;
    let index =
        RetrievalIndex::load(&artifacts.index).with_context(|| format!("loading {}", artifacts.index.display()))?;
    let norm = cfg.norm_config()?;
    let lexicons = Lexicons::default_with(&norm)?;
    Ok(Engine::new(model, index, lexicons, norm)?)
}

fn read_data(path: &Path) -> Result<Vec<LabeledQuery>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_jsonl(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit<T: Serialize>(json: bool, value: &T, human: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", human());
    }
    Ok(())
}

fn metrics_line(m: &Metrics) -> String {
    format!(
        "precision {:.3}  recall {:.3}  f1 {:.3}  (tp {}, fp {}, fn {})\n",
        m.precision, m.recall, m.f1, m.tp, m.fp, m.fn_
    )
}

pub fn comparison_table(report: &ComparisonReport) -> String {
    let mut out = format!("{:<10} {:>9} {:>9} {:>9} {:>6}\n", "Model", "Precision", "Recall", "F1", "Epoch");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<10} {:>9.3} {:>9.3} {:>9.3} {:>6}",
            r.kind.name(),
            r.precision,
            r.recall,
            r.f1,
            r.best_epoch
        );
    }
    if let Some(holds) = report.reference_order_holds {
        let _ = writeln!(out, "C-BiLSTM >= BiLSTM >= {{CNN, LSTM}}: {}", if holds { "yes" } else { "no" });
    }
    out
}

pub fn sweep_table(report: &SweepReport) -> String {
    let mut out = format!(
        "{:>9} {:>9} {:>9} {:>9} {:>9}\n",
        "Threshold", "Precision", "Recall", "F1", "Answered"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>9.2} {:>9.3} {:>9.3} {:>9.3} {:>9}",
            r.threshold, r.precision, r.recall, r.f1, r.answered
        );
    }
    let _ = writeln!(
        out,
        "best threshold {:.2} (f1 {:.3}) over {} help queries",
        report.best_threshold, report.best_f1, report.eval_size
    );
    out
}

pub fn query_text(r: &QueryResponse) -> String {
    let mut out = format!("tokens: {}\n", r.normalized_tokens.join(" "));
    let verdict = if r.is_help { "help" } else { "not help" };
    let _ = writeln!(out, "verdict: {verdict} (p_help {:.3})", r.p_help);
    match &r.matched {
        Some(m) => {
            let _ = writeln!(out, "match: {:?} (similarity {:.3})", m.matched_query, m.similarity);
            let _ = writeln!(out, "response [{}]: {}", m.response_id, m.response_text);
        }
        None if r.is_help => out.push_str("match: none above threshold\n"),
        None => {}
    }
    if let Some(p) = &r.pos_baseline {
        let _ = writeln!(
            out,
            "lexicon baseline: action {} skill {} -> {}",
            p.action.as_deref().unwrap_or("-"),
            p.skill.as_deref().unwrap_or("-"),
            p.response_id.as_deref().unwrap_or("no response")
        );
    }
    out
}

fn load_split(args: &SplitArgs) -> Result<(Vec<LabeledQuery>, Vec<LabeledQuery>)> {
    match (&args.data_dir, &args.train) {
        (Some(dir), _) => Ok((read_data(&dir.join(SPLIT_FILES[0]))?, read_data(&dir.join(SPLIT_FILES[1]))?)),
        (None, Some(train)) => {
            let val = match &args.validation {
                Some(p) => read_data(p)?,
                None => Vec::new(),
            };
            Ok((read_data(train)?, val))
        }
        (None, None) => bail!("give --data-dir or --train"),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = effective_config(&cli.global)?;
    let json = cli.global.json;
    match cli.command {
        Command::GenerateData { out_dir, n, skills } => {
            let full = skills.map_or(cli.global.paper_scale, |s| s == SkillSet::Full);
            let set = if full { TemplateSet::full() } else { TemplateSet::desk() };
            let n = n.unwrap_or(if cli.global.paper_scale { FULL_DATASET_SIZE } else { DEFAULT_DATASET_SIZE });
            let seed = cfg.train.seed;
            let data = generate_dataset(&set, n, &set.default_weights(), &cfg.generator, seed)?;
            let split = split_dataset(&data, DEFAULT_FRACTIONS, seed)?;
            write_file(&out_dir.join("dataset.jsonl"), write_jsonl(&data)?)?;
            let DatasetSplit { train, validation, test, .. } = &split;
            for (name, part) in SPLIT_FILES.iter().zip([train, validation, test]) {
                write_file(&out_dir.join(name), write_jsonl(part)?)?;
            }
            let help = data.iter().filter(|q| q.label.is_help()).count();
            let summary = json!({
                "size": data.len(),
                "help": help,
                "skills": set.skills.len(),
                "train": train.len(),
                "validation": validation.len(),
                "test": test.len(),
                "seed": seed,
            });
            emit(json, &summary, || {
                format!(
                    "{} queries ({help} help) over {} skills; split {}/{}/{}; written to {}\n",
                    data.len(),
                    set.skills.len(),
                    train.len(),
                    validation.len(),
                    test.len(),
                    out_dir.display()
                )
            })
        }
        Command::Normalize { text } => {
            let norm = cfg.norm_config()?;
            let lines: Vec<String> = match text {
                Some(t) => vec![t],
                None => io::stdin().lock().lines().collect::<io::Result<_>>()?,
            };
            let out: Vec<_> = lines.iter().map(|l| normalize(l, &norm)).collect();
            emit(json, &out, || {
                out.iter().map(|q| q.tokens.join(" ") + "\n").collect()
            })
        }
        Command::Train { data, kind, out, epochs } => {
            let kind: ModelKind = kind.parse()?;
            let (train, val) = load_split(&data)?;
            let mut tc = cfg.train.clone();
            if let Some(e) = epochs {
                tc.epochs = e;
            }
            let norm = cfg.norm_config()?;
            let (model, report) = models::train(&train, &val, kind, &tc, &norm)?;
            models::save(&model, &out)?;
            emit(json, &report, || {
                let mut s = String::new();
                for e in &report.history {
                    let _ = writeln!(
                        s,
                        "epoch {:>3}  loss {:.4}  val f1 {:.3}  val loss {:.4}",
                        e.epoch, e.train_loss, e.val_f1, e.val_loss
                    );
                }
                let _ = writeln!(
                    s,
                    "kept epoch {} (val f1 {:.3}); saved {}",
                    report.best_epoch,
                    report.best_val_f1,
                    out.display()
                );
                s
            })
        }
        Command::Eval { model, data } => {
            let model = models::load(&model)?;
            let norm = cfg.norm_config()?.with_maxlen(model.arch.maxlen)?;
            let m = evaluate(&model, &read_data(&data)?, &norm)?;
            emit(json, &m, || metrics_line(&m))
        }
        Command::Compare { data_dir, kinds, save_dir, epochs } => {
            let kinds = kinds.iter().map(|k| k.parse()).collect::<helpsys_core::Result<Vec<ModelKind>>>()?;
            let split = DatasetSplit {
                train: read_data(&data_dir.join(SPLIT_FILES[0]))?,
                validation: read_data(&data_dir.join(SPLIT_FILES[1]))?,
                test: read_data(&data_dir.join(SPLIT_FILES[2]))?,
                seed: cfg.train.seed,
            };
            let mut tc = cfg.train.clone();
            if let Some(e) = epochs {
                tc.epochs = e;
            }
            let (report, trained) = run_comparison(&split, &kinds, &tc, &cfg.norm_config()?)?;
            if let Some(dir) = save_dir {
                fs::create_dir_all(&dir)?;
                for (model, _) in &trained {
                    models::save(model, &dir.join(format!("{}.ckpt", model.kind.name().to_lowercase())))?;
                }
            }
            emit(json, &report, || comparison_table(&report))
        }
        Command::Index { model, data, out, responses, bucket_size } => {
            let model = models::load(&model)?;
            let norm = cfg.norm_config()?.with_maxlen(model.arch.maxlen)?;
            let responses = match responses {
                Some(p) => parse_responses(&fs::read_to_string(&p)?)?,
                None => default_responses(),
            };
            let bucket = bucket_size.unwrap_or(cfg.retrieval.bucket_size);
            let index = index_dataset(&model, &norm, &read_data(&data)?, responses, bucket)?;
            index.save(&out)?;
            let summary = json!({
                "entries": index.len(),
                "dim": index.dim(),
                "leaves": index.tree().leaf_count(),
                "depth": index.tree().depth(),
            });
            emit(json, &summary, || {
                format!(
                    "indexed {} help queries (d={}, {} leaves, depth {}) into {}\n",
                    index.len(),
                    index.dim(),
                    index.tree().leaf_count(),
                    index.tree().depth(),
                    out.display()
                )
            })
        }
        Command::Query { text, artifacts, threshold, k } => {
            let engine = load_engine(&artifacts, &cfg)?;
            let req = QueryRequest {
                text,
                threshold: Some(threshold.unwrap_or(cfg.retrieval.threshold)),
                k: Some(k.unwrap_or(cfg.retrieval.k)),
            };
            let resp = engine.query(&req)?;
            emit(json, &resp, || query_text(&resp))
        }
        Command::Sweep { artifacts, data, grid, k } => {
            let engine = load_engine(&artifacts, &cfg)?;
            let grid = match grid {
                Some(g) => parse_grid(&g)?,
                None => REFERENCE_GRID.to_vec(),
            };
            let base = FetchOptions {
                threshold: cfg.retrieval.threshold,
                k: k.unwrap_or(cfg.retrieval.k),
                mode: SearchMode::Exact,
            };
            let report = threshold_sweep(&engine.index, &engine.model, &engine.norm, &read_data(&data)?, &grid, &base)?;
            if !report.recall_non_increasing() {
                bail!("recall increased with the threshold; the index or sweep is inconsistent");
            }
            emit(json, &report, || sweep_table(&report))
        }
        Command::PosBaseline { text, data } => {
            let norm = cfg.norm_config()?;
            let lex = Lexicons::default_with(&norm)?;
            if let Some(text) = text {
                let r = answer(&text, &lex, &norm);
                emit(json, &r, || {
                    format!(
                        "action {}  skill {}  -> {} ({:?})\n",
                        r.action.as_deref().unwrap_or("-"),
                        r.skill.as_deref().unwrap_or("-"),
                        r.response_id.as_deref().unwrap_or("no response"),
                        r.outcome
                    )
                })
            } else {
                let path = data.expect("clap requires --data without --text");
                let m = pos_baseline(&lex, &norm, &read_data(&path)?)?;
                emit(json, &m, || metrics_line(&m))
            }
        }
        Command::Serve { artifacts, host, port, cors_origins } => {
            let host = host.unwrap_or_else(|| cfg.service.host.clone());
            let port = port.unwrap_or(cfg.service.port);
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .or_else(|_| std::net::ToSocketAddrs::to_socket_addrs(&(host.as_str(), port))?.next().context("no address"))
                .with_context(|| format!("bad bind address {host}:{port}"))?;
            let origins = if cors_origins.is_empty() { cfg.service.cors_origins.clone() } else { cors_origins };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(addr, &origins, move || load_engine(&artifacts, &cfg), server::ctrl_c()))
        }
    }
}

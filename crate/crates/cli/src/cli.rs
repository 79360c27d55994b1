use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "helpsys", version, about = "Detect help queries and retrieve canned responses")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for data generation, splitting and training.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON config file; falls back to $HELPSYS_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// 200K queries over 24 skills and the larger network.
    #[arg(long, global = true)]
    pub paper_scale: bool,
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SkillSet {
    Desk,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic labeled corpus and its train/validation/test split.
    GenerateData {
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Number of queries (default 5000, or 200000 with --paper-scale).
        #[arg(long)]
        n: Option<usize>,
        /// Skill templates to draw from (default desk, or full with --paper-scale).
        #[arg(long, value_enum)]
        skills: Option<SkillSet>,
    },
    /// Print normalized tokens for --text, or for each line of stdin.
    Normalize {
        #[arg(long)]
        text: Option<String>,
    },
    /// Train one classifier and write its checkpoint.
    Train {
        #[command(flatten)]
        data: SplitArgs,
        #[arg(long, default_value = "c-bilstm")]
        kind: String,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Score a checkpoint on a labeled JSONL file.
    Eval {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
    },
    /// Train several kinds with the same settings and compare them on the test split.
    Compare {
        /// Directory holding train.jsonl, validation.jsonl and test.jsonl.
        #[arg(long, value_name = "DIR")]
        data_dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "cnn,lstm,bilstm,c-bilstm")]
        kinds: Vec<String>,
        /// Also save each trained checkpoint here.
        #[arg(long, value_name = "DIR")]
        save_dir: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Build a retrieval index from the help queries of a labeled file.
    Index {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Response texts (TSV: id, text); defaults to the shipped set.
        #[arg(long, value_name = "PATH")]
        responses: Option<PathBuf>,
        #[arg(long)]
        bucket_size: Option<usize>,
    },
    /// Run the full pipeline on one query.
    Query {
        #[arg(long)]
        text: String,
        #[command(flatten)]
        artifacts: Artifacts,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Precision and recall of retrieval over a grid of similarity thresholds.
    Sweep {
        #[command(flatten)]
        artifacts: Artifacts,
        /// Labeled file whose help queries are scored.
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
        /// `start:stop:step` or a comma list; defaults to the reference grid.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run the lexicon baseline on --text, or score it on --data.
    PosBaseline {
        #[arg(long, conflicts_with = "data")]
        text: Option<String>,
        #[arg(long, value_name = "PATH", required_unless_present = "text")]
        data: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[command(flatten)]
        artifacts: Artifacts,
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        port: Option<u16>,
        /// Allowed browser origin; repeatable.
        #[arg(long = "cors-origin", value_name = "ORIGIN")]
        cors_origins: Vec<String>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    /// Directory holding train.jsonl and validation.jsonl.
    #[arg(long, value_name = "DIR", required_unless_present = "train")]
    pub data_dir: Option<PathBuf>,
    #[arg(long, value_name = "PATH", conflicts_with = "data_dir")]
    pub train: Option<PathBuf>,
    #[arg(long, value_name = "PATH", requires = "train")]
    pub validation: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Artifacts {
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub index: PathBuf,
}

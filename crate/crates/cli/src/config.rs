//! JSON configuration file. Every section is optional.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use helpsys_core::harness::GeneratorConfig;
use helpsys_core::models::TrainConfig;
use helpsys_core::retrieval::{DEFAULT_K, DEFAULT_THRESHOLD};
use helpsys_core::textnorm::{NormConfig, NormSettings};
use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "HELPSYS_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrievalSettings {
    pub threshold: f64,
    pub k: usize,
    pub bucket_size: usize,
}

impl Default for RetrievalSettings {
    fn default() -> Self {
        RetrievalSettings {
            threshold: DEFAULT_THRESHOLD,
            k: DEFAULT_K,
            bucket_size: helpsys_core::retrieval::DEFAULT_BUCKET_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceSettings {
    pub host: String,
    pub port: u16,
    /// Origins allowed to call the API from a browser; empty disables CORS.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceSettings {
    fn default() -> Self {
        ServiceSettings {
            host: "127.0.0.1".into(),
            port: 8080,
            cors_origins: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub train: TrainConfig,
    pub norm: NormSettings,
    pub generator: GeneratorConfig,
    pub retrieval: RetrievalSettings,
    pub service: ServiceSettings,
}

impl AppConfig {
    /// Reads `path`, or the file named by `HELPSYS_CONFIG`, or returns defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let path: Option<PathBuf> = match path {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(AppConfig::default());
        };
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Normalization settings; the sequence length always follows the
    /// training configuration.
    pub fn norm_config(&self) -> Result<NormConfig> {
        let settings = NormSettings {
            maxlen: Some(self.train.maxlen),
            ..self.norm.clone()
        };
        Ok(NormConfig::from_settings(&settings)?)
    }
}

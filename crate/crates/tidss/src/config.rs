//! Application configuration, read from a JSON file.
//!
//! Relative paths in the file are resolved against the file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tidss_core::orchestrate::DEFAULT_GENERATIONS;
use tidss_core::synthesis::{MockReply, MockRule, RetryPolicy, SynthesisConfig};
use tidss_core::topsis::{default_criteria, CriterionSpec};

use crate::error::{Error, Result};
use crate::formats::read_json;

/// Where action weights come from. Exactly one source is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum WeightSource {
    /// TOPSIS over the catalog and the configured criteria.
    TopsisEngine,
    /// A weight table file, JSON or CSV.
    ExternalFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendKind {
    Mock {
        #[serde(default)]
        rules: Vec<MockRule>,
        /// JSON file `{rules: [...]}` appended after the inline rules.
        #[serde(default)]
        rules_file: Option<PathBuf>,
        #[serde(default)]
        script: Vec<MockReply>,
    },
    Http {
        endpoint: String,
        /// Name of the environment variable holding a bearer token.
        #[serde(default)]
        auth_token_env: Option<String>,
        #[serde(default = "default_timeout_ms")]
        timeout_ms: u64,
    },
}

fn default_timeout_ms() -> u64 {
    120_000
}

fn default_max_in_flight() -> usize {
    4
}

fn default_max_prompt_tokens() -> usize {
    128_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub id: String,
    #[serde(flatten)]
    pub kind: BackendKind,
    /// Concurrent requests allowed, shared by every job using this backend.
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_max_prompt_tokens")]
    pub max_prompt_tokens: usize,
}

impl BackendConfig {
    pub fn mock(id: &str) -> Self {
        BackendConfig {
            id: id.to_string(),
            kind: BackendKind::Mock {
                rules: Vec::new(),
                rules_file: None,
                script: Vec::new(),
            },
            max_in_flight: default_max_in_flight(),
            retry: RetryPolicy::immediate(3),
            max_prompt_tokens: default_max_prompt_tokens(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AppConfig {
    /// Replacement impact and resource-engagement scores for the catalog.
    pub catalog_override: Option<PathBuf>,
    pub weights: WeightSource,
    pub criteria: Vec<CriterionSpec>,
    pub backends: Vec<BackendConfig>,
    /// Backend used when a request names none; the first one otherwise.
    pub default_backend: Option<String>,
    /// Generations fused per plan.
    pub m: usize,
    /// Reprompts per generation when no plan can be extracted.
    pub reprompts: u32,
    pub data_dir: PathBuf,
    pub accidents: Option<PathBuf>,
    pub guidelines: Option<PathBuf>,
    pub fixtures_dir: PathBuf,
    pub manual_label: String,
    pub synthesis: SynthesisConfig,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            catalog_override: None,
            weights: WeightSource::TopsisEngine,
            criteria: default_criteria(),
            backends: vec![BackendConfig::mock("mock")],
            default_backend: None,
            m: DEFAULT_GENERATIONS,
            reprompts: 3,
            data_dir: PathBuf::from("data"),
            accidents: None,
            guidelines: None,
            fixtures_dir: PathBuf::from("fixtures"),
            manual_label: "Manual solution".into(),
            synthesis: SynthesisConfig::default(),
        }
    }
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut config: AppConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        config.resolve_paths(&base);
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.catalog_override.as_mut() {
            resolve(p);
        }
        if let WeightSource::ExternalFile { path } = &mut self.weights {
            resolve(path);
        }
        resolve(&mut self.data_dir);
        resolve(&mut self.fixtures_dir);
        if let Some(p) = self.accidents.as_mut() {
            resolve(p);
        }
        if let Some(p) = self.guidelines.as_mut() {
            resolve(p);
        }
        for backend in &mut self.backends {
            if let BackendKind::Mock {
                rules_file: Some(p),
                ..
            } = &mut backend.kind
            {
                resolve(p);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.backends.is_empty() {
            return Err(Error::Config("no backends configured".into()));
        }
        for (i, b) in self.backends.iter().enumerate() {
            if self.backends[..i].iter().any(|o| o.id == b.id) {
                return Err(Error::Config(format!(
                    "backend id {:?} appears twice",
                    b.id
                )));
            }
            if b.max_in_flight == 0 {
                return Err(Error::Config(format!(
                    "backend {:?}: max_in_flight must be at least 1",
                    b.id
                )));
            }
        }
        if let Some(id) = &self.default_backend {
            self.backend(Some(id))?;
        }
        if self.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        Ok(())
    }

    /// The named backend, or the default when `id` is `None`.
    pub fn backend(&self, id: Option<&str>) -> Result<&BackendConfig> {
        match id.or(self.default_backend.as_deref()) {
            Some(id) => self
                .backends
                .iter()
                .find(|b| b.id == id)
                .ok_or_else(|| Error::Config(format!("unknown backend {id:?}"))),
            None => self
                .backends
                .first()
                .ok_or_else(|| Error::Config("no backends configured".into())),
        }
    }
}

//! Experiment configuration files.
//!
//! A single JSON document mirroring [`ExperimentConfig`]; parse failures name
//! the offending field. `docs/experiment-config.md` documents the schema.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decision::{BackendKind, LlmConfig, OraclePolicy};
use crate::error::Error;
use crate::world::WorldConfig;

pub const EXPERIMENT_SCHEMA_VERSION: u32 = 1;

/// Backend selection plus its optional settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OraclePolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub llm: Option<LlmConfig>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Oracle,
            oracle: None,
            llm: None,
        }
    }
}

impl BackendConfig {
    pub fn build(&self) -> Result<std::sync::Arc<dyn crate::decision::DecisionBackend>, Error> {
        self.kind.build(self.oracle.clone(), self.llm.clone())
    }
}

/// A replicated experiment: one world configuration run under
/// `replications` consecutive seeds starting at `base_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub label: String,
    pub world: WorldConfig,
    pub replications: u32,
    pub base_seed: u64,
    #[serde(default)]
    pub backend: BackendConfig,
}

impl ExperimentConfig {
    /// Seed for replication `k` (0-based).
    pub fn seed_for(&self, replication: u32) -> u64 {
        self.base_seed.wrapping_add(u64::from(replication))
    }

    /// World configuration for replication `k`.
    pub fn world_for(&self, replication: u32) -> WorldConfig {
        WorldConfig {
            seed: self.seed_for(replication),
            run_name: format!("{}-replication-{replication}", self.label),
            ..self.world.clone()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.schema_version != EXPERIMENT_SCHEMA_VERSION {
            return Err(Error::config(format!(
                "schema_version {} unsupported (expected {EXPERIMENT_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.replications < 1 {
            return Err(Error::config("replications must be at least 1"));
        }
        if self.label.is_empty() || self.label.contains(['/', '\\']) {
            return Err(Error::config(
                "label must be non-empty and free of path separators",
            ));
        }
        self.world.validate()?;
        if let Some(policy) = &self.backend.oracle {
            policy.validate()?;
        }
        Ok(())
    }

    /// Parse and validate a config file; parse errors name the field.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path)?;
        let mut deserializer = serde_json::Deserializer::from_str(&text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(&mut deserializer)
            .map_err(|e| {
                Error::config(format!(
                    "{}: field `{}`: {}",
                    path.display(),
                    e.path(),
                    e.inner()
                ))
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let body = serde_json::to_vec_pretty(self)
            .map_err(|e| Error::config(format!("serialize experiment config: {e}")))?;
        fs::write(path, body)?;
        Ok(())
    }
}

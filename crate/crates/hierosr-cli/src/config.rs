//! Optional JSON config files. Keys mirror the long flag names (kebab-case);
//! explicit flags always win over config values, which win over defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;

#[derive(Default)]
pub struct ConfigFile {
    values: serde_json::Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let value: Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        match value {
            Value::Object(values) => Ok(ConfigFile { values }),
            _ => bail!("config {} must be a JSON object", path.display()),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| anyhow::anyhow!("config key {key} must be a number")),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|u| Some(u as usize))
                .ok_or_else(|| anyhow::anyhow!("config key {key} must be a nonnegative integer")),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| anyhow::anyhow!("config key {key} must be a nonnegative integer")),
        }
    }

    pub fn get_string(&self, key: &str) -> Result<Option<String>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| anyhow::anyhow!("config key {key} must be a string")),
        }
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_bool()
                .map(Some)
                .ok_or_else(|| anyhow::anyhow!("config key {key} must be a boolean")),
        }
    }
}

/// flag > config > default.
pub fn resolve<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// flag > config, no default: the value is required from one of the two.
pub fn resolve_required<T>(flag: Option<T>, config: Option<T>, what: &str) -> Result<T> {
    flag.or(config)
        .ok_or_else(|| anyhow::anyhow!("missing required option --{what} (or config key {what})"))
}

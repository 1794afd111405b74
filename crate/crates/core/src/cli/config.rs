//! `key=value` configuration files.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Option values by flag name (without the leading dashes).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub entries: BTreeMap<String, String>,
}

impl RunConfig {
    /// Blank lines and lines starting with `#` are skipped; keys are unique.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("config line {}: expected key=value, got '{line}'", i + 1)))?;
            let key = k.trim().trim_start_matches("--");
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::arg(format!("config line {}: bad key '{}'", i + 1, k.trim())));
            }
            if entries.insert(key.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::arg(format!("config line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(RunConfig { entries })
    }

    /// Sorted `key=value` lines.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// `args` with `--key value` appended for every key the flags do not set.
    pub fn merge_under(&self, args: &[String]) -> Vec<String> {
        let given = |key: &str| {
            let flag = format!("--{key}");
            let prefixed = format!("--{key}=");
            args.iter().any(|a| *a == flag || a.starts_with(&prefixed))
        };
        let mut out = args.to_vec();
        for (k, v) in &self.entries {
            if k != "config" && !given(k) {
                out.push(format!("--{k}"));
                out.push(v.clone());
            }
        }
        out
    }
}

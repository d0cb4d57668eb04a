//! Plain-text `key = value` configuration files.
//!
//! Lines starting with `#` and blank lines are ignored. Keys are
//! case-sensitive; unknown keys are kept so callers can reject or ignore
//! them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("config key {key:?}: invalid value {value:?} ({reason})")]
    Value { key: String, value: String, reason: String },
    #[error("config key {key:?} is not recognised")]
    UnknownKey { key: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: n + 1, text: raw.to_string() });
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: n + 1, text: raw.to_string() });
            }
            entries.insert(key.to_string(), v.trim().to_string());
        }
        Ok(KeyValues { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Parsed value for `key`, if present.
    pub fn get<V>(&self, key: &str) -> Result<Option<V>, ConfigError>
    where
        V: FromStr,
        V::Err: fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<V>().map_err(|e| ConfigError::Value {
                    key: key.to_string(),
                    value: v.clone(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Fails on the first key not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(ConfigError::UnknownKey { key: k.to_string() }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let kv = KeyValues::parse("# units\nunits = V\n\nsync_amplitude=5\n").unwrap();
        assert_eq!(kv.get_str("units"), Some("V"));
        assert_eq!(kv.get::<f64>("sync_amplitude").unwrap(), Some(5.0));
        assert_eq!(kv.get::<f64>("missing").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(KeyValues::parse("units V"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(KeyValues::parse(" = 3"), Err(ConfigError::Syntax { .. })));
        let kv = KeyValues::parse("width = wide").unwrap();
        assert!(matches!(kv.get::<usize>("width"), Err(ConfigError::Value { .. })));
        assert!(matches!(kv.check_keys(&["height"]), Err(ConfigError::UnknownKey { .. })));
    }
}

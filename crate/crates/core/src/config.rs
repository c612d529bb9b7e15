//! Flat `key=value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may use `-` or
//! `_` interchangeably; they are stored with `_`.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("config key {key:?}: cannot parse {value:?}")]
    BadValue { key: String, value: String },
}

pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(ConfigError::Duplicate { line: i + 1, key });
        }
    }
    Ok(out)
}

pub fn to_kv(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

/// Parses `key` from `map` if present.
pub fn get<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ConfigError> {
    map.get(key)
        .map(|v| {
            v.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: v.clone(),
            })
        })
        .transpose()
}

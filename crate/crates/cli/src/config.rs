//! Flat `key = value` experiment files. Keys are the long flag names.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const KEYS: &[&str] = &[
    "t-min", "t-max", "tol", "cache-dir", "suite", "T", "U", "U-policy", "l", "n", "out", "format",
    "epsilon", "levels", "rel-tol", "deep",
];

/// Settings after merging a config file with command-line flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                bail!("line {}: unknown key `{k}`", i + 1);
            }
            map.insert(k.to_string(), v.to_string());
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse_file(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Flag values override file values.
    pub fn overlay(mut self, flags: impl IntoIterator<Item = (&'static str, Option<String>)>) -> Self {
        for (k, v) in flags {
            if let Some(v) = v {
                self.0.insert(k.to_string(), v);
            }
        }
        self
    }

    pub fn map(&self) -> &BTreeMap<String, String> {
        &self.0
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| anyhow!("invalid value `{v}` for `{key}`")))
            .transpose()
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse::<T>().map_err(|_| anyhow!("invalid value `{s}` for `{key}`")))
                    .collect()
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = Settings::parse_file("# sweep\nT = 1e4, 1e5\nl=2\n\nformat = json # trailing\n").unwrap();
        let s = file.overlay([("l", Some("3".to_string())), ("n", None)]);
        assert_eq!(s.list::<f64>("T").unwrap(), Some(vec![1e4, 1e5]));
        assert_eq!(s.get::<usize>("l").unwrap(), Some(3));
        assert_eq!(s.raw("format"), Some("json"));
        assert_eq!(s.get::<usize>("n").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        assert!(Settings::parse_file("colour = red").is_err());
        assert!(Settings::parse_file("T 100").is_err());
        let s = Settings::parse_file("l = two").unwrap();
        assert!(s.get::<usize>("l").is_err());
    }
}

//! `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are case
//! sensitive apart from `-` and `_` being interchangeable; values run to the
//! end of the line.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const KEYS: &[&str] = &[
    "family",
    "r",
    "alpha",
    "J",
    "gamma_ratio",
    "t_max",
    "n_points",
    "engine",
    "seed",
    "n_traj",
    "dt",
    "fallback_ode",
    "out_dir",
    "n_paths",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    let k = key.trim().replace('-', "_");
    if k == "coupling" {
        "J".to_string()
    } else {
        k
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value, got {raw:?}", n + 1))?;
            let key = normalize(k);
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {:?}", n + 1, k.trim());
            }
            if entries.insert(key, v.trim().to_string()).is_some() {
                bail!("line {}: duplicate key {:?}", n + 1, k.trim());
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
            .transpose()
    }

    /// Flag value if given, else the file value.
    pub fn merge<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn merge_str(&self, flag: Option<&str>, key: &str) -> Option<String> {
        flag.map(str::to_string).or_else(|| self.raw(key).map(str::to_string))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_merge() {
        let cfg = ConfigFile::parse("# demo\nfamily = Phi\nJ=0.4\n\ngamma-ratio = 0.1\nfallback_ode = true\n").unwrap();
        assert_eq!(cfg.raw("family"), Some("Phi"));
        assert_eq!(cfg.get::<f64>("gamma_ratio").unwrap(), Some(0.1));
        assert_eq!(cfg.get::<f64>("coupling").unwrap(), Some(0.4));
        assert_eq!(cfg.merge(Some(0.8), "J").unwrap(), Some(0.8));
        assert_eq!(cfg.merge::<f64>(None, "J").unwrap(), Some(0.4));
        assert_eq!(cfg.merge::<f64>(None, "t_max").unwrap(), None);
        assert_eq!(cfg.get::<bool>("fallback_ode").unwrap(), Some(true));
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(ConfigFile::parse("J 0.4").is_err());
        assert!(ConfigFile::parse("temperature = 3").is_err());
        assert!(ConfigFile::parse("J = 1\nJ = 2").is_err());
        assert!(ConfigFile::parse("J = x").unwrap().get::<f64>("J").is_err());
    }
}

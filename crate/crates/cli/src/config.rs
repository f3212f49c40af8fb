//! Flat `key = value` configuration files.
//!
//! Keys mirror long flag names (`required-len` and `required_len` are the
//! same key). Relative paths resolve against the file's directory. Values
//! given on the command line win over the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    base: PathBuf,
    source: String,
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let source = path.display().to_string();
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &source, base)
    }

    pub fn parse(text: &str, source: &str, base: PathBuf) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("{source}:{}: expected 'key = value'", i + 1);
            };
            let key = normalize(k);
            if key.is_empty() {
                bail!("{source}:{}: empty key", i + 1);
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                bail!("{source}:{}: duplicate key '{key}'", i + 1);
            }
        }
        Ok(ConfigFile {
            values,
            base,
            source: source.to_string(),
        })
    }

    pub fn optional(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize(key)).map(String::as_str)
    }

    /// Flag value if given, else the file's value, parsed.
    pub fn get<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("{}: {key} = '{v}': {e}", self.source)))
            .transpose()
    }

    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(flag, key)?
            .ok_or_else(|| anyhow!("missing --{key} (give the flag or set it in the config file)"))
    }

    /// Path from the flag as given, or from the file relative to its directory.
    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.raw(key).map(|v| self.base.join(v)))
    }

    pub fn bool(&self, flag: Option<bool>, key: &str) -> Result<Option<bool>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some("true" | "yes" | "1") => Ok(Some(true)),
            Some("false" | "no" | "0") => Ok(Some(false)),
            Some(v) => bail!("{}: {key} = '{v}' is not a boolean", self.source),
        }
    }
}

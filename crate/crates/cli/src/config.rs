//! Flat `key = value` configuration files with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::CliError;

/// Resolved configuration: every allowed key with its value and the line it
/// came from (`None` for defaults).
#[derive(Clone, Debug)]
pub struct Config {
    entries: BTreeMap<&'static str, (String, Option<usize>)>,
}

impl Config {
    pub fn defaults(schema: &[(&'static str, &str)]) -> Self {
        Self {
            entries: schema.iter().map(|(k, v)| (*k, (v.to_string(), None))).collect(),
        }
    }

    pub fn parse(text: &str, schema: &[(&'static str, &str)]) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(schema);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::Config {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            let slot = schema
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(k, _)| *k)
                .ok_or_else(|| CliError::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                })?;
            cfg.entries.insert(slot, (value.trim().to_string(), Some(line)));
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, schema: &[(&'static str, &str)]) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::defaults(schema)),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse(&text, schema)
            }
        }
    }

    fn raw(&self, key: &str) -> (&str, Option<usize>) {
        let (v, line) = self.entries.get(key).unwrap_or_else(|| panic!("key `{key}` missing from schema"));
        (v.as_str(), *line)
    }

    fn typed<T>(&self, key: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<T, CliError> {
        let (v, line) = self.raw(key);
        parse(v).ok_or_else(|| CliError::Config {
            line: line.unwrap_or(0),
            message: format!("`{key}` must be {what}, found `{v}`"),
        })
    }

    pub fn string(&self, key: &str) -> String {
        self.raw(key).0.to_string()
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.typed(key, "a number", |v| v.parse().ok().filter(|x: &f64| x.is_finite()))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.typed(key, "a nonnegative integer", |v| v.parse().ok())
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.typed(key, "a nonnegative integer", |v| v.parse().ok())
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        self.typed(key, "true or false", |v| v.parse().ok())
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.typed(key, "a comma-separated list of numbers", |v| {
            v.split(',')
                .map(|x| x.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<_>>>()
                .filter(|l| !l.is_empty())
        })
    }

    /// Error for a semantically invalid value of `key`.
    pub fn invalid(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            line: self.raw(key).1.unwrap_or(0),
            message: format!("`{key}`: {}", message.into()),
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (v, line)) in &self.entries {
            match line {
                Some(l) => writeln!(f, "  {k} = {v}    # line {l}")?,
                None => writeln!(f, "  {k} = {v}")?,
            }
        }
        Ok(())
    }
}

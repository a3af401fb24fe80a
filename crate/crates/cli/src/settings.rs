//! Flat `key = value` settings merged from flags and an optional config file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

const KEYS: &[&str] = &[
    "shape", "eps", "lambda", "mtrunc", "nr", "ntheta", "tau", "tol", "max-iter", "out", "meshes",
    "filter", "update", "b0", "mu", "dump", "delta", "mbound",
];

#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: Option<impl Display>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.to_string());
        }
    }

    /// Overlays a config file; its entries win over anything already set.
    pub fn overlay_file(&mut self, path: &Path) -> Result<(), Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.overlay_text(&text)
    }

    pub fn overlay_text(&mut self, text: &str) -> Result<(), Failure> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Failure::Usage(format!("config line {}: expected key = value", n + 1))
            })?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::Usage(format!(
                    "config line {}: unknown key `{}`",
                    n + 1,
                    k.trim()
                )));
            }
            self.values.insert(key, v.trim().to_string());
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, Failure>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|e| Failure::Usage(format!("invalid value `{s}` for {key}: {e}"))),
        }
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| Failure::Usage(format!("invalid value `{s}` for {key}: {e}"))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, Failure> {
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(s) => Err(Failure::Usage(format!("invalid boolean `{s}` for {key}"))),
        }
    }

    pub fn list(&self, key: &str, default: &str) -> Vec<String> {
        self.raw(key)
            .unwrap_or(default)
            .split([',', ' '])
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }
}

//! Flat `key = value` experiment configs.
//!
//! One key per line, `#` starts a comment. Reals accept a `pi` suffix
//! (`10pi`, `0.5*pi`, `-pi`). Keys prefixed `long.` replace the plain key
//! when the long horizon is requested (`--long`).

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{config, Result};

const LONG_PREFIX: &str = "long.";

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_pair(line).ok_or_else(|| {
                config(format!(
                    "line {}: expected key = value, got '{}'",
                    lineno + 1,
                    raw.trim()
                ))
            })?;
            if cfg.values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(cfg)
    }

    /// Applies a `key=value` override from the command line.
    pub fn set(&mut self, pair: &str) -> Result<()> {
        let (key, value) = split_pair(pair).ok_or_else(|| config(format!("--set expects key=value, got '{pair}'")))?;
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Copy of the entries with no read history.
    pub fn entries(&self) -> Self {
        Self {
            values: self.values.clone(),
            ..Self::default()
        }
    }

    pub fn insert(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    /// Promotes every `long.<key>` entry over `<key>`; without the flag the
    /// prefixed entries are recorded but ignored.
    pub fn select_long(&mut self, enabled: bool) {
        let long: Vec<(String, String)> = self
            .values
            .iter()
            .filter_map(|(k, v)| k.strip_prefix(LONG_PREFIX).map(|base| (base.to_string(), v.clone())))
            .collect();
        self.values.retain(|k, _| !k.starts_with(LONG_PREFIX));
        if enabled {
            self.values.extend(long);
        }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.values.get(key).cloned()
    }

    fn record(&mut self, key: &str, value: impl ToString) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    fn parsed<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| config(format!("{key}: expected {what}, got '{raw}'"))),
        }
    }

    pub fn real(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.opt_real(key)?.unwrap_or(default);
        self.record(key, v);
        Ok(v)
    }

    pub fn opt_real(&mut self, key: &str) -> Result<Option<f64>> {
        let Some(raw) = self.take(key) else {
            return Ok(None);
        };
        let v = parse_real(&raw).ok_or_else(|| config(format!("{key}: expected a real number, got '{raw}'")))?;
        if !v.is_finite() {
            return Err(config(format!("{key}: must be finite, got '{raw}'")));
        }
        self.record(key, v);
        Ok(Some(v))
    }

    pub fn uint(&mut self, key: &str, default: u64) -> Result<u64> {
        let v = match self.take(key) {
            None => default,
            Some(raw) => parse_uint(&raw)
                .ok_or_else(|| config(format!("{key}: expected a non-negative integer, got '{raw}'")))?,
        };
        self.record(key, v);
        Ok(v)
    }

    pub fn opt_uint(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => {
                let v = parse_uint(&raw)
                    .ok_or_else(|| config(format!("{key}: expected a non-negative integer, got '{raw}'")))?;
                self.record(key, v);
                Ok(Some(v))
            }
        }
    }

    pub fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        let v = self.parsed(key, "true or false")?.unwrap_or(default);
        self.record(key, v);
        Ok(v)
    }

    /// One of `choices`, returned as the matching index.
    pub fn choice(&mut self, key: &str, choices: &[&str], default: &str) -> Result<usize> {
        let raw = self.take(key).unwrap_or_else(|| default.to_string());
        let idx = choices
            .iter()
            .position(|c| *c == raw)
            .ok_or_else(|| config(format!("{key}: expected one of {}, got '{raw}'", choices.join("|"))))?;
        self.record(key, &raw);
        Ok(idx)
    }

    pub fn text(&mut self, key: &str) -> Option<String> {
        let v = self.take(key)?;
        self.record(key, &v);
        Some(v)
    }

    pub fn uint_list(&mut self, key: &str, default: &[u64]) -> Result<Vec<u64>> {
        let v = match self.take(key) {
            None => default.to_vec(),
            Some(raw) => raw
                .split(',')
                .map(|s| {
                    parse_uint(s.trim())
                        .ok_or_else(|| config(format!("{key}: expected comma-separated integers, got '{raw}'")))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        if v.is_empty() {
            return Err(config(format!("{key}: list is empty")));
        }
        let joined: Vec<String> = v.iter().map(u64::to_string).collect();
        self.record(key, joined.join(","));
        Ok(v)
    }

    /// Fails on any key that was never read.
    pub fn reject_unknown(&self, experiment: &str) -> Result<()> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !self.used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(config(format!(
                "unknown key(s) for {experiment}: {}",
                unknown.join(", ")
            )))
        }
    }

    /// Every key that was read, with the value actually used.
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

fn parse_uint(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse() {
        return Some(v);
    }
    // allow 1e5 style integers
    let f: f64 = s.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < 2f64.powi(63)).then_some(f as u64)
}

pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let Some(head) = s.strip_suffix("pi") else {
        return s.parse().ok();
    };
    let head = head.trim_end().trim_end_matches('*').trim_end();
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse().ok()?,
    };
    Some(coeff * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_with_pi() {
        assert_eq!(parse_real("10pi"), Some(10.0 * PI));
        assert_eq!(parse_real("0.5*pi"), Some(0.5 * PI));
        assert_eq!(parse_real("-pi"), Some(-PI));
        assert_eq!(parse_real("pi"), Some(PI));
        assert_eq!(parse_real("2.5e-3"), Some(2.5e-3));
        assert_eq!(parse_real("tenpi"), None);
    }

    #[test]
    fn comments_overrides_and_unknown_keys() {
        let mut c = Config::parse("# header\nN = 64  # grid\ng = 10pi\n\nsteps=1e4\n").unwrap();
        c.set("steps=20").unwrap();
        assert_eq!(c.uint("N", 0).unwrap(), 64);
        assert_eq!(c.uint("steps", 0).unwrap(), 20);
        assert!(c.reject_unknown("walk").unwrap_err().to_string().contains('g'));
        assert_eq!(c.real("g", 0.0).unwrap(), 10.0 * PI);
        c.reject_unknown("walk").unwrap();
        assert_eq!(c.resolved()["steps"], "20");
    }

    #[test]
    fn errors_name_the_field() {
        let mut c = Config::parse("N = abc").unwrap();
        assert!(c.uint("N", 4).unwrap_err().to_string().contains("N:"));
        assert!(Config::parse("N = 1\nN = 2").is_err());
        assert!(Config::parse("just words").is_err());
        let mut c = Config::parse("shift = sideways").unwrap();
        assert!(c.choice("shift", &["index", "spectral"], "index").is_err());
    }

    #[test]
    fn long_horizon_promotes_prefixed_keys() {
        let text = "steps = 100\nlong.steps = 500000\n";
        let mut c = Config::parse(text).unwrap();
        c.select_long(false);
        assert_eq!(c.uint("steps", 0).unwrap(), 100);
        let mut c = Config::parse(text).unwrap();
        c.select_long(true);
        assert_eq!(c.uint("steps", 0).unwrap(), 500_000);
        c.reject_unknown("walk").unwrap();
    }
}

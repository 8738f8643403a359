// Copyright 2026 The Farsight Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Flat `key = value` configuration with flag overrides and aggregated
//! validation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use farsight_core::ApertureGeometry;

/// Resolved settings: file values first, then flags on top.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

/// Every problem found while validating, reported together.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

impl Config {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are
    /// skipped.
    pub fn parse(text: &str, allowed: &[&str]) -> Result<Self, ConfigErrors> {
        let mut values = BTreeMap::new();
        let mut errors = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    let key = k.trim().to_string();
                    if !allowed.contains(&key.as_str()) {
                        errors.push(format!("line {}: unknown key `{key}`", n + 1));
                    } else if values.insert(key.clone(), v.trim().to_string()).is_some() {
                        errors.push(format!("line {}: duplicate key `{key}`", n + 1));
                    }
                }
                None => errors.push(format!("line {}: expected `key = value`", n + 1)),
            }
        }
        if errors.is_empty() {
            Ok(Self { values })
        } else {
            Err(ConfigErrors(errors))
        }
    }

    pub fn set(&mut self, key: &str, value: Option<&String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.clone());
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// One line per key, sorted, for logging.
    pub fn dump(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join("\n")
    }
}

/// Typed reads that record failures instead of stopping at the first one.
pub struct Reader<'a> {
    cfg: &'a Config,
    pub errors: Vec<String>,
}

impl<'a> Reader<'a> {
    pub fn new(cfg: &'a Config) -> Self {
        Self { cfg, errors: Vec::new() }
    }

    pub fn optional<T: FromStr>(&mut self, key: &str) -> Option<T> {
        let raw = self.cfg.raw(key)?;
        match raw.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.errors.push(format!("`{key}`: cannot parse `{raw}`"));
                None
            }
        }
    }

    pub fn required<T: FromStr>(&mut self, key: &str) -> Option<T> {
        if !self.cfg.has(key) {
            self.errors.push(format!("`{key}` is required"));
            return None;
        }
        self.optional(key)
    }

    pub fn or<T: FromStr>(&mut self, key: &str, default: T) -> T {
        if self.cfg.has(key) {
            self.optional(key).unwrap_or(default)
        } else {
            default
        }
    }

    pub fn list(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        let Some(raw) = self.cfg.raw(key) else { return default.to_vec() };
        let mut out = Vec::new();
        for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse() {
                Ok(v) => out.push(v),
                Err(_) => self.errors.push(format!("`{key}`: cannot parse `{part}`")),
            }
        }
        if out.is_empty() {
            self.errors.push(format!("`{key}` is empty"));
        }
        out
    }

    pub fn check(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.errors.push(msg.into());
        }
    }

    /// Scale from exactly one of `sigma`, `delta`.
    pub fn scale(&mut self) -> Option<f64> {
        match (self.cfg.has("sigma"), self.cfg.has("delta")) {
            (true, true) => {
                self.errors.push("give exactly one of `sigma`, `delta`".into());
                None
            }
            (false, false) => {
                self.errors.push("one of `sigma`, `delta` is required".into());
                None
            }
            (true, false) => {
                let s: f64 = self.optional("sigma")?;
                self.check(s.is_finite() && s > 0.0, format!("`sigma` must be positive, got {s}"));
                Some(s)
            }
            (false, true) => {
                let d: f64 = self.optional("delta")?;
                self.check(d.is_finite() && d > 0.0, format!("`delta` must be positive, got {d}"));
                Some(2.0 * std::f64::consts::PI / d)
            }
        }
    }

    /// Geometry from one of `sigma`/`delta` and one of `r`/`beta`.
    pub fn geometry(&mut self) -> Option<ApertureGeometry> {
        let sigma = self.scale();
        let ratio = match (self.cfg.has("r"), self.cfg.has("beta")) {
            (true, true) => {
                self.errors.push("give exactly one of `r`, `beta`".into());
                None
            }
            (false, false) => {
                self.errors.push("one of `r`, `beta` is required".into());
                None
            }
            (true, false) => self.optional::<f64>("r"),
            // r = 2β/δ = βσ/π
            (false, true) => self.optional::<f64>("beta").zip(sigma).map(|(b, s)| b * s / std::f64::consts::PI),
        };
        let (sigma, ratio) = (sigma?, ratio?);
        match ApertureGeometry::from_rayleigh(sigma, ratio) {
            Ok(g) => Some(g),
            Err(e) => {
                self.errors.push(e.to_string());
                None
            }
        }
    }

    pub fn finish(self) -> Result<(), ConfigErrors> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(self.errors))
        }
    }
}

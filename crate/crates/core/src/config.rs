//! Plain-text job configuration: one `key = value` per line, `#` comments.

use crate::dynamics::MapSpec;
use crate::plm::c_pq;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::path::Path;

pub const KEYS: &[&str] = &[
    "map",
    "A_re",
    "A_im",
    "a_re",
    "a_im",
    "c_re",
    "c_im",
    "q",
    "center_re",
    "center_im",
    "width",
    "px",
    "max_iter",
    "out",
    "m_plus_re",
    "m_plus_im",
    "m_minus_re",
    "m_minus_im",
    "epsilon",
];

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("cannot read config: {0}")]
    Io(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct JobConfig {
    values: BTreeMap<String, String>,
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<JobConfig, ConfigError> {
        let mut cfg = JobConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1 });
            }
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<JobConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
        JobConfig::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Later values win.
    pub fn merged(mut self, over: &JobConfig) -> JobConfig {
        for (k, v) in &over.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: v.to_string(),
            }),
        }
    }

    pub fn real(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn int(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    /// `<prefix>_re + i <prefix>_im`, each defaulting independently.
    pub fn complex(&self, prefix: &str, default: C64) -> Result<C64, ConfigError> {
        Ok(C64::new(self.real(&format!("{prefix}_re"), default.re)?, self.real(&format!("{prefix}_im"), default.im)?))
    }

    /// Complex value that must be given in full, or not at all.
    pub fn complex_opt(&self, prefix: &str) -> Result<Option<C64>, ConfigError> {
        let re: Option<f64> = self.parsed(&format!("{prefix}_re"))?;
        let im: Option<f64> = self.parsed(&format!("{prefix}_im"))?;
        match (re, im) {
            (None, None) => Ok(None),
            (Some(re), Some(im)) => Ok(Some(C64::new(re, im))),
            (None, _) => Err(ConfigError::Missing(format!("{prefix}_re"))),
            (_, None) => Err(ConfigError::Missing(format!("{prefix}_im"))),
        }
    }

    /// Map selected by `map` = `per1 | htwo | cubic | quaditer`.
    /// Defaults: `A = 1`, `a = i`, `c = c_{1/3}`, `q = 3`.
    pub fn map(&self) -> Result<MapSpec, ConfigError> {
        let name = self.get("map").ok_or_else(|| ConfigError::Missing("map".into()))?;
        match name {
            "per1" => Ok(MapSpec::PerOne(self.complex("A", C64::new(1.0, 0.0))?)),
            "htwo" => Ok(MapSpec::HTwo),
            "cubic" => Ok(MapSpec::CubicC(self.complex("a", C64::new(0.0, 1.0))?)),
            "quaditer" => {
                let q = self.int("q", 3)?;
                let q = u32::try_from(q).ok().filter(|&q| q >= 1).ok_or_else(|| ConfigError::BadValue {
                    key: "q".into(),
                    value: q.to_string(),
                })?;
                Ok(MapSpec::QuadIter { c: self.complex("c", c_pq(1, 3))?, q })
            }
            other => Err(ConfigError::BadValue { key: "map".into(), value: other.to_string() }),
        }
    }
}

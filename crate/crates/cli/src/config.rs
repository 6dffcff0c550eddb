//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. `name` and `kind` are
//! required; `seed` defaults to 0. Every other key is kind-specific.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gromov_core::lattice::{parse_rational, Rational};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ScalingGeodesic,
    ProductUpper,
    TruncationLower,
    LatticeRatio,
    LatticeWitness,
    IsometryExample,
}

impl ExperimentKind {
    /// Keys that must be present for this kind.
    pub fn required_keys(&self) -> &'static [&'static str] {
        match self {
            ExperimentKind::ScalingGeodesic => &["ts"],
            ExperimentKind::ProductUpper => &[],
            ExperimentKind::TruncationLower => &["gap", "ks"],
            ExperimentKind::LatticeRatio => &["n", "lambda", "ts"],
            ExperimentKind::LatticeWitness => &["n", "lambda", "grid"],
            ExperimentKind::IsometryExample => &["c"],
        }
    }

    pub fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            ExperimentKind::ScalingGeodesic => &["ts", "space", "points", "mode"],
            ExperimentKind::ProductUpper => &["trials", "max_product"],
            ExperimentKind::TruncationLower => &["gap", "ks", "x", "x_points", "y", "y_points"],
            ExperimentKind::LatticeRatio => &["n", "lambda", "c", "ts"],
            ExperimentKind::LatticeWitness => &["n", "lambda", "c", "grid"],
            ExperimentKind::IsometryExample => &["c", "line", "line_points", "interval", "interval_points"],
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "ScalingGeodesic" => ExperimentKind::ScalingGeodesic,
            "ProductUpper" => ExperimentKind::ProductUpper,
            "TruncationLower" => ExperimentKind::TruncationLower,
            "LatticeRatio" => ExperimentKind::LatticeRatio,
            "LatticeWitness" => ExperimentKind::LatticeWitness,
            "IsometryExample" => ExperimentKind::IsometryExample,
            _ => return Err(CliError::ConfigInvalid("kind".into(), format!("unknown kind {s:?}"))),
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Keys accepted by every kind.
const COMMON_KEYS: &[&str] = &["name", "kind", "seed", "output_dir", "max_nodes"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    /// Directory relative paths in the config are resolved against.
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> CliResult<Self> {
        let mut params = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::ConfigInvalid(format!("line {}", lineno + 1), "expected `key = value`".into())
            })?;
            let key = k.trim().to_string();
            if params.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::ConfigInvalid(key, "duplicate key".into()));
            }
        }
        let name = params
            .remove("name")
            .ok_or_else(|| CliError::ConfigInvalid("name".into(), "missing".into()))?;
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(CliError::ConfigInvalid("name".into(), "must be a plain file stem".into()));
        }
        let kind: ExperimentKind = params
            .remove("kind")
            .ok_or_else(|| CliError::ConfigInvalid("kind".into(), "missing".into()))?
            .parse()?;
        let seed = match params.remove("seed") {
            Some(s) => s
                .parse()
                .map_err(|_| CliError::ConfigInvalid("seed".into(), format!("not an integer: {s:?}")))?,
            None => 0,
        };
        for key in kind.required_keys() {
            if !params.contains_key(*key) {
                return Err(CliError::ConfigInvalid(key.to_string(), format!("required for {kind}")));
            }
        }
        for key in params.keys() {
            if !kind.allowed_keys().contains(&key.as_str()) && !COMMON_KEYS.contains(&key.as_str()) {
                return Err(CliError::ConfigInvalid(key.clone(), format!("not a {kind} key")));
            }
        }
        Ok(ExperimentConfig { name, kind, seed, params, base_dir: base_dir.to_path_buf() })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|_| CliError::FileNotFound(path.to_path_buf()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn invalid(&self, key: &str, msg: impl Into<String>) -> CliError {
        CliError::ConfigInvalid(key.to_string(), msg.into())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.invalid(key, format!("not a number: {v:?}"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.invalid(key, format!("not a count: {v:?}"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> CliResult<Vec<f64>> {
        let v = self.get(key).ok_or_else(|| self.invalid(key, "missing"))?;
        v.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| self.invalid(key, format!("not a number: {t:?}"))))
            .collect()
    }

    pub fn usize_list(&self, key: &str) -> CliResult<Vec<usize>> {
        let v = self.get(key).ok_or_else(|| self.invalid(key, "missing"))?;
        v.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| self.invalid(key, format!("not a count: {t:?}"))))
            .collect()
    }

    pub fn rational(&self, key: &str) -> CliResult<Rational> {
        let v = self.get(key).ok_or_else(|| self.invalid(key, "missing"))?;
        parse_rational(v).map_err(|e| self.invalid(key, e.to_string()))
    }

    pub fn rational_or(&self, key: &str, default: Rational) -> CliResult<Rational> {
        if self.get(key).is_none() {
            return Ok(default);
        }
        self.rational(key)
    }

    /// Comma-separated rationals, or an integer range `a..b` (inclusive).
    pub fn rational_list(&self, key: &str) -> CliResult<Vec<Rational>> {
        let v = self.get(key).ok_or_else(|| self.invalid(key, "missing"))?;
        if let Some((a, b)) = v.split_once("..") {
            let a: i128 = a.trim().parse().map_err(|_| self.invalid(key, "bad range start"))?;
            let b: i128 = b.trim().parse().map_err(|_| self.invalid(key, "bad range end"))?;
            if a > b {
                return Err(self.invalid(key, "empty range"));
            }
            return Ok((a..=b).map(Rational::from_integer).collect());
        }
        v.split(',')
            .map(|t| parse_rational(t).map_err(|e| self.invalid(key, e.to_string())))
            .collect()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|p| self.base_dir.join(p))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.path("output_dir").unwrap_or_else(|| self.base_dir.clone())
    }

    /// Canonical `key = value` echo, sorted by key.
    pub fn echo(&self) -> String {
        let mut s = format!("name = {}\nkind = {}\nseed = {}\n", self.name, self.kind, self.seed);
        for (k, v) in &self.params {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<ExperimentConfig> {
        ExperimentConfig::parse(text, Path::new("."))
    }

    #[test]
    fn parses_flat_file() {
        let c = parse("# comment\nname = w\nkind = LatticeWitness\nn = 1\nlambda = 2\nc = 3\ngrid = 1..10\n").unwrap();
        assert_eq!(c.kind, ExperimentKind::LatticeWitness);
        assert_eq!(c.seed, 0);
        assert_eq!(c.rational_list("grid").unwrap().len(), 10);
        assert_eq!(c.rational("c").unwrap(), Rational::from_integer(3));
    }

    #[test]
    fn missing_key_is_named() {
        let e = parse("name = r\nkind = LatticeRatio\nn = 1\nts = 1\n").unwrap_err();
        assert_eq!(e, CliError::ConfigInvalid("lambda".into(), "required for LatticeRatio".into()));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(
            parse("name = r\nkind = ProductUpper\nbogus = 1\n"),
            Err(CliError::ConfigInvalid(k, _)) if k == "bogus"
        ));
        assert!(matches!(
            parse("name = r\nname = s\nkind = ProductUpper\n"),
            Err(CliError::ConfigInvalid(k, _)) if k == "name"
        ));
        assert!(parse("name = r\nkind = Nope\n").is_err());
        assert!(parse("kind = ProductUpper\n").is_err());
        assert!(parse("name = r\nkind = ProductUpper\njunk line\n").is_err());
    }

    #[test]
    fn lists() {
        let c = parse("name = s\nkind = ScalingGeodesic\nts = 0, 0.5,2\n").unwrap();
        assert_eq!(c.f64_list("ts").unwrap(), vec![0.0, 0.5, 2.0]);
        assert!(c.usize_list("ts").is_err());
    }
}

//! Run configuration: command-line flags layered over an optional
//! `key = value` file. Flags win over file values, file values over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use rootfock_core::cyclo::check_admissible;
use rootfock_core::{BasisKind, DEFAULT_TOLERANCE};
use serde::Serialize;

/// A configuration or parameter problem; maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Exact,
    Float,
    Both,
}

impl BackendChoice {
    pub fn exact(self) -> bool {
        matches!(self, BackendChoice::Exact | BackendChoice::Both)
    }

    pub fn float(self) -> bool {
        matches!(self, BackendChoice::Float | BackendChoice::Both)
    }
}

impl FromStr for BackendChoice {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(BackendChoice::Exact),
            "float" => Ok(BackendChoice::Float),
            "both" => Ok(BackendChoice::Both),
            other => Err(usage(format!("unknown backend {other:?}; expected exact, float or both"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Clifford,
    Gram,
    Osp,
    Sl,
    Decomp,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Clifford, Suite::Gram, Suite::Osp, Suite::Sl, Suite::Decomp];
}

/// Parses `all` or a comma-separated list; the result is sorted and deduplicated.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part {
            "all" => out.extend(Suite::ALL),
            "clifford" => out.push(Suite::Clifford),
            "gram" => out.push(Suite::Gram),
            "osp" => out.push(Suite::Osp),
            "sl" => out.push(Suite::Sl),
            "decomp" => out.push(Suite::Decomp),
            other => bail!(usage(format!("unknown suite {other:?}; expected clifford, gram, osp, sl, decomp or all"))),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(usage(format!("unknown format {other:?}; expected json or csv"))),
        }
    }
}

pub fn parse_basis(s: &str) -> Result<BasisKind> {
    match s.trim() {
        "raw" => Ok(BasisKind::Raw),
        "orthonormal" => Ok(BasisKind::Orthonormal),
        other => Err(usage(format!("unknown basis {other:?}; expected raw or orthonormal"))),
    }
}

/// Parameters (m, n, k, l) of one module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Params {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub l: u32,
}

impl Params {
    /// Rejects empty modules and inadmissible roots of unity.
    pub fn validate(&self) -> Result<()> {
        if self.m + self.n == 0 {
            bail!(usage("the module needs at least one mode: m + n >= 1"));
        }
        check_admissible(self.k, self.l).map_err(|e| {
            usage(format!(
                "{e}. Admissible parameters satisfy k >= 2, 1 <= l < k and gcd(l, k) = 1, so that q = e^(iπl/k) is a primitive 2k-th root of unity"
            ))
        })
    }
}

impl FromStr for Params {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            bail!(usage(format!("expected m,n,k,l but got {s:?}")));
        }
        let num = |p: &str| p.parse::<u64>().map_err(|_| usage(format!("not a nonnegative integer: {p:?} in {s:?}")));
        Ok(Params {
            m: num(parts[0])? as usize,
            n: num(parts[1])? as usize,
            k: num(parts[2])? as u32,
            l: num(parts[3])? as u32,
        })
    }
}

/// Parses a grid such as `1,1,2,1; 2,1,3,1`. An empty string is an empty grid.
pub fn parse_points(s: &str) -> Result<Vec<Params>> {
    s.split(';').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect()
}

/// Everything a single verification run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    pub backend: BackendChoice,
    pub suites: Vec<Suite>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub tolerance: f64,
}

impl RunConfig {
    pub fn new(params: Params) -> Self {
        RunConfig {
            params,
            backend: BackendChoice::Exact,
            suites: Suite::ALL.to_vec(),
            output: None,
            format: Format::Json,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        check_tolerance(self.tolerance)?;
        if self.suites.is_empty() {
            bail!(usage("at least one suite is required"));
        }
        Ok(())
    }
}

pub fn check_tolerance(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        bail!(usage(format!("tolerance must be a positive number, got {t}")));
    }
    Ok(())
}

const KNOWN_KEYS: [&str; 13] = [
    "m", "n", "k", "l", "backend", "suites", "output", "format", "tolerance", "basis", "points", "workers", "timings",
];

/// Values read from a `key = value` file. Blank lines and `#` comments are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(usage(format!("config line {}: expected key = value", no + 1)));
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!(usage(format!("config line {}: unknown key {key:?}", no + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `flag` if given, else the parsed file value, else `None`.
    pub fn layer<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key {key}: {e}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_and_sort() {
        assert_eq!(parse_suites("sl,gram,sl").unwrap(), vec![Suite::Gram, Suite::Sl]);
        assert_eq!(parse_suites("all").unwrap().len(), 5);
        assert!(parse_suites("bogus").is_err());
    }

    #[test]
    fn params_validation_explains_admissibility() {
        let p: Params = "1,1,4,2".parse().unwrap();
        let err = p.validate().unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        assert!(err.to_string().contains("gcd"));
        assert!("1,1,3".parse::<Params>().is_err());
        assert!("0,0,3,1".parse::<Params>().unwrap().validate().is_err());
    }

    #[test]
    fn grid_parsing() {
        assert!(parse_points("").unwrap().is_empty());
        let g = parse_points("1,1,2,1; 2,1,3,1;").unwrap();
        assert_eq!(g[1], Params { m: 2, n: 1, k: 3, l: 1 });
    }

    #[test]
    fn file_layering() {
        let f = ConfigFile::parse("# demo\nk = 5\nl=2 # trailing\n\ntolerance = 1e-8\n").unwrap();
        assert_eq!(f.layer::<u32>(None, "k").unwrap(), Some(5));
        assert_eq!(f.layer::<u32>(Some(7), "k").unwrap(), Some(7));
        assert_eq!(f.layer::<u32>(None, "m").unwrap(), None);
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("k 5").is_err());
        assert!(f.layer::<u32>(None, "tolerance").is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(check_tolerance(0.0).is_err());
        assert!(check_tolerance(f64::NAN).is_err());
        assert!(check_tolerance(1e-10).is_ok());
    }
}

//! Configuration resolution: command-line flags take precedence over a
//! `key=value` config file, which takes precedence over defaults.
//! Environment variables are deliberately not consulted.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Inclusive depth range, written `a..b` or as a single depth `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthRange {
    pub start: usize,
    pub end: usize,
}

impl DepthRange {
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl FromStr for DepthRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_one = |part: &str| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| format!("expected a nonnegative integer, got {part:?}"))
        };
        let range = match s.split_once("..") {
            Some((a, b)) => DepthRange {
                start: parse_one(a)?,
                end: parse_one(b)?,
            },
            None => {
                let n = parse_one(s)?;
                DepthRange { start: n, end: n }
            }
        };
        if range.start > range.end {
            return Err(format!("empty range {}..{}", range.start, range.end));
        }
        Ok(range)
    }
}

impl fmt::Display for DepthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

const KNOWN_KEYS: &[&str] = &[
    "f", "q", "eps", "f0", "n", "m", "target", "seed", "format", "output",
];

/// Parsed `key=value` config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Invalid(format!(
                    "config {} line {}: expected key=value, got {raw:?}",
                    path.display(),
                    line_no + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Invalid(format!(
                    "config {} line {}: unknown key {key:?} (known: {})",
                    path.display(),
                    line_no + 1,
                    KNOWN_KEYS.join(", ")
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Invalid(format!("config key {key}={raw:?}: {e}"))),
        }
    }
}

/// flag > config > default; errors when a required value is missing.
pub fn resolve<T: FromStr + Clone>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
    default: Option<T>,
) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = config.get::<T>(key)? {
        return Ok(v);
    }
    default.ok_or_else(|| {
        CliError::Invalid(format!(
            "missing required parameter --{key} (set a flag or a config entry)"
        ))
    })
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Wrapper so PathBuf resolution can use the same helpers.
pub fn resolve_output(
    flag: Option<PathBuf>,
    config: &ConfigFile,
) -> Result<Option<PathBuf>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    Ok(config.values.get("output").map(PathBuf::from))
}

//! Flag/config resolution.
//!
//! Config files are flat `key = value` lines. Blank lines and lines starting
//! with `#` are skipped, keys are the long flag names without dashes
//! (`alpha`, `N1`, `delta-grid`, ...). Flags win over the file, the file wins
//! over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "beta",
    "gamma",
    "delta",
    "n",
    "N1",
    "N2",
    "R1",
    "R2",
    "method",
    "out",
    "seed",
    "threads",
    "chi",
    "sites",
    "start",
    "len",
    "gamma-grid",
    "delta-grid",
    "r2-range",
    "only",
    "strict",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(CliError::Input(format!("config line {}: unknown key '{k}'", i + 1)));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Input(format!("config line {}: duplicate key '{k}'", i + 1)));
            }
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Flag value if given, else the config entry, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Input(format!("config value for '{key}' does not parse: '{v}'"))),
        }
    }
}

/// Inclusive `min:max:step` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.min + self.step * i as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not min:max:step"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("grid '{s}': '{x}' is not a number"));
        let g = Grid { min: num(a)?, max: num(b)?, step: num(c)? };
        if g.step.is_nan() || g.step <= 0.0 || !g.min.is_finite() || !g.max.is_finite() || g.max < g.min {
            return Err(format!("grid '{s}' needs step > 0 and max >= min"));
        }
        Ok(g)
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.step)
    }
}

/// Inclusive integer range `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("range '{s}' is not lo:hi"))?;
        let lo = a.trim().parse().map_err(|_| format!("range '{s}': bad lower end"))?;
        let hi = b.trim().parse().map_err(|_| format!("range '{s}': bad upper end"))?;
        if lo > hi {
            return Err(format!("range '{s}' is empty"));
        }
        Ok(IntRange { lo, hi })
    }
}

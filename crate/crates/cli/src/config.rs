//! Flat key-value run configuration.
//!
//! The format is deliberately plain text, one `key = value` per line, so
//! that the deformation parameters arrive as exact rationals: `q` and `c`
//! are given by integer numerator and denominator keys and never pass
//! through floating point.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use suq2_core::scalar::{format_rat, rat, rat_int};
use suq2_core::Rat;

/// One of the certificate suites the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteName {
    Algebra,
    Representation,
    Dirac,
    Fredholm,
    Calculus,
    L2,
    Sphere,
}

impl SuiteName {
    /// Every suite, in the fixed order reports are written.
    pub const ALL: [SuiteName; 7] = [
        SuiteName::Algebra,
        SuiteName::Representation,
        SuiteName::Dirac,
        SuiteName::Fredholm,
        SuiteName::Calculus,
        SuiteName::L2,
        SuiteName::Sphere,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Algebra => "algebra",
            SuiteName::Representation => "representation",
            SuiteName::Dirac => "dirac",
            SuiteName::Fredholm => "fredholm",
            SuiteName::Calculus => "calculus",
            SuiteName::L2 => "l2",
            SuiteName::Sphere => "sphere",
        }
    }
}

impl FromStr for SuiteName {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    /// Line number and complaint for a malformed line.
    Parse(usize, String),
    /// A structurally fine file whose values fail validation.
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "config: {e}"),
            ConfigError::Parse(line, msg) => write!(f, "config line {line}: {msg}"),
            ConfigError::Invalid(msg) => write!(f, "config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        ConfigError::Io(e)
    }
}

/// Validated run parameters shared by every suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// Deformation parameter, strictly inside (0, 1).
    pub q: Rat,
    /// Sphere parameter, strictly positive.
    pub c: Rat,
    /// Truncation windows, ascending; the first sets the working scan.
    pub windows: Vec<u32>,
    /// Suites to run, deduplicated, in canonical order.
    pub suites: Vec<SuiteName>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: rat(1, 2),
            c: rat_int(2),
            windows: vec![8, 16],
            suites: SuiteName::ALL.to_vec(),
        }
    }
}

impl RunConfig {
    /// Scan radius the boundedness gates use: the first window, floored at
    /// the smallest radius the gates accept.
    pub fn scan(&self) -> u32 {
        self.windows.first().copied().unwrap_or(8).max(8)
    }

    pub fn describe(&self) -> String {
        format!(
            "q = {}, c = {}, windows = {:?}",
            format_rat(&self.q),
            format_rat(&self.c),
            self.windows
        )
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    /// Parses the flat `key = value` format. Unknown and duplicate keys are
    /// rejected so a typo cannot silently fall back to a default.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut q_num: Option<i64> = None;
        let mut q_den: Option<i64> = None;
        let mut c_num: Option<i64> = None;
        let mut c_den: Option<i64> = None;
        let mut windows: Option<Vec<u32>> = None;
        let mut suites: Option<Vec<SuiteName>> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::Parse(lineno, format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            let dup = |k: &str| ConfigError::Parse(lineno, format!("duplicate key `{k}`"));
            match key {
                "q_num" | "q_den" | "c_num" | "c_den" => {
                    let n: i64 = value.parse().map_err(|_| {
                        ConfigError::Parse(
                            lineno,
                            format!("`{key}` needs an integer, got `{value}`"),
                        )
                    })?;
                    let slot = match key {
                        "q_num" => &mut q_num,
                        "q_den" => &mut q_den,
                        "c_num" => &mut c_num,
                        _ => &mut c_den,
                    };
                    if slot.replace(n).is_some() {
                        return Err(dup(key));
                    }
                }
                "windows" => {
                    let parsed: Result<Vec<u32>, _> =
                        value.split(',').map(|w| w.trim().parse::<u32>()).collect();
                    let parsed = parsed.map_err(|_| {
                        ConfigError::Parse(
                            lineno,
                            format!("`windows` needs comma-separated integers, got `{value}`"),
                        )
                    })?;
                    if windows.replace(parsed).is_some() {
                        return Err(dup(key));
                    }
                }
                "suites" => {
                    let parsed: Result<Vec<SuiteName>, _> =
                        value.split(',').map(|s| s.trim().parse()).collect();
                    if suites.replace(parsed?).is_some() {
                        return Err(dup(key));
                    }
                }
                other => {
                    return Err(ConfigError::Parse(lineno, format!("unknown key `{other}`")));
                }
            }
        }

        let default = RunConfig::default();
        let ratio =
            |num: Option<i64>, den: Option<i64>, fallback: &Rat, label: &str| match (num, den) {
                (None, None) => Ok(fallback.clone()),
                (num, den) => {
                    let den = den.unwrap_or(1);
                    if den == 0 {
                        return Err(ConfigError::Invalid(format!("{label}_den must be nonzero")));
                    }
                    Ok(rat(num.unwrap_or(1), den))
                }
            };
        let cfg = RunConfig {
            q: ratio(q_num, q_den, &default.q, "q")?,
            c: ratio(c_num, c_den, &default.c, "c")?,
            windows: windows.unwrap_or(default.windows),
            suites: suites.unwrap_or(default.suites),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let zero = rat_int(0);
        let one = rat_int(1);
        if self.q <= zero || self.q >= one {
            return Err(ConfigError::Invalid("q must lie in (0,1)".to_string()));
        }
        if self.c <= zero {
            return Err(ConfigError::Invalid("c must be positive".to_string()));
        }
        if self.windows.is_empty() {
            return Err(ConfigError::Invalid("windows must be nonempty".to_string()));
        }
        if self.windows.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid(
                "windows must be strictly increasing".to_string(),
            ));
        }
        if self.suites.is_empty() {
            return Err(ConfigError::Invalid("suites must be nonempty".to_string()));
        }
        Ok(())
    }

    /// Canonical deduplicated suite list in report order.
    pub fn suite_order(&self) -> Vec<SuiteName> {
        let mut out: Vec<SuiteName> = SuiteName::ALL
            .into_iter()
            .filter(|n| self.suites.contains(n))
            .collect();
        out.dedup();
        out
    }
}

//! Flat `key=value` run configuration.
//!
//! One assignment per line; blank lines and lines starting with `#` are
//! ignored, as is anything after a `#` on an assignment line. Recognized keys:
//!
//! | key | value |
//! |-----|-------|
//! | `mode` | `spin`, `photon`, `baseline` or `swap` |
//! | `trials` | integer ≥ 1 (default 10000) |
//! | `master_seed` / `seed` | unsigned 64-bit integer (default 42) |
//! | `eta_abs`, `eta_det`, `p_in`, `p_pdc` | probability in `[0, 1]` (default 1) |
//! | `input` | `haar-random`, `fixed:A,B` or `fixed:A_RE,A_IM,B_RE,B_IM` |
//! | `output` / `output_path` | path of the JSON-lines file |

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

use crate::photonic::EfficiencyConfig;
use crate::teleport::UnknownState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Spin,
    Photon,
    Baseline,
    Swap,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Self::Spin, Self::Photon, Self::Baseline, Self::Swap];

    pub fn name(self) -> &'static str {
        match self {
            Self::Spin => "spin",
            Self::Photon => "photon",
            Self::Baseline => "baseline",
            Self::Swap => "swap",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSpec {
    HaarRandom,
    Fixed(UnknownState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub trials: u64,
    pub master_seed: u64,
    pub efficiency: EfficiencyConfig,
    pub input: InputSpec,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Spin,
            trials: 10_000,
            master_seed: 42,
            efficiency: EfficiencyConfig::IDEAL,
            input: InputSpec::HaarRandom,
            output_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigErrorKind {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("expected `key=value`, found `{0}`")]
    MissingEquals(String),
    #[error("malformed value for `{key}`: `{value}`")]
    Malformed { key: String, value: String },
    #[error("`{key}` = {value} is out of range ({expected})")]
    OutOfRange {
        key: String,
        value: String,
        expected: &'static str,
    },
}

/// A configuration problem, tagged with the 1-based line it came from
/// (`0` for values that did not come from a file).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ConfigError {
    pub line: usize,
    pub kind: ConfigErrorKind,
}

impl RunConfig {
    /// Sets one key from its textual value, with the same validation as the
    /// file parser.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigErrorKind> {
        let malformed = || ConfigErrorKind::Malformed {
            key: key.to_string(),
            value: value.to_string(),
        };
        let probability = || -> Result<f64, ConfigErrorKind> {
            let v: f64 = value.parse().map_err(|_| malformed())?;
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigErrorKind::OutOfRange {
                    key: key.to_string(),
                    value: value.to_string(),
                    expected: "0 <= value <= 1",
                });
            }
            Ok(v)
        };
        match key {
            "mode" => self.mode = Mode::from_name(value).ok_or_else(malformed)?,
            "trials" => {
                let n: u64 = value.parse().map_err(|_| malformed())?;
                if n == 0 {
                    return Err(ConfigErrorKind::OutOfRange {
                        key: key.to_string(),
                        value: value.to_string(),
                        expected: "trials >= 1",
                    });
                }
                self.trials = n;
            }
            "master_seed" | "seed" => self.master_seed = value.parse().map_err(|_| malformed())?,
            "eta_abs" => self.efficiency.eta_abs = probability()?,
            "eta_det" => self.efficiency.eta_det = probability()?,
            "p_in" => self.efficiency.p_in = probability()?,
            "p_pdc" => self.efficiency.p_pdc = probability()?,
            "input" => self.input = parse_input(key, value)?,
            "output" | "output_path" => {
                if value.is_empty() {
                    return Err(malformed());
                }
                self.output_path = Some(PathBuf::from(value));
            }
            _ => return Err(ConfigErrorKind::UnknownKey(key.to_string())),
        }
        Ok(())
    }
}

fn parse_input(key: &str, value: &str) -> Result<InputSpec, ConfigErrorKind> {
    let malformed = || ConfigErrorKind::Malformed {
        key: key.to_string(),
        value: value.to_string(),
    };
    if value == "haar-random" {
        return Ok(InputSpec::HaarRandom);
    }
    let body = value.strip_prefix("fixed:").ok_or_else(malformed)?;
    let nums = body
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| malformed())?;
    let (a, b) = match nums[..] {
        [a, b] => (Complex64::new(a, 0.0), Complex64::new(b, 0.0)),
        [ar, ai, br, bi] => (Complex64::new(ar, ai), Complex64::new(br, bi)),
        _ => return Err(malformed()),
    };
    UnknownState::new(a, b)
        .map(InputSpec::Fixed)
        .map_err(|_| ConfigErrorKind::OutOfRange {
            key: key.to_string(),
            value: value.to_string(),
            expected: "|a|^2 + |b|^2 = 1",
        })
}

/// Parses a configuration file, starting from the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |kind| ConfigError { line: i + 1, kind };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(ConfigErrorKind::MissingEquals(line.to_string())))?;
        cfg.set(key.trim(), value.trim()).map_err(err)?;
    }
    Ok(cfg)
}

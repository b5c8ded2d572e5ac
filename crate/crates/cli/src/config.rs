//! Line-oriented `key = value` run configuration.
//!
//! `#` starts a comment. Unknown keys, duplicates and out-of-range values are
//! errors that name the key and line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cmqea_core::protocol::{ProtocolConfig, Role};
use cmqea_core::StrategyId;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sampled,
    Exact,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sampled => "sampled",
            Mode::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub protocol: ProtocolConfig,
    pub strategies: Vec<StrategyId>,
    pub mode: Mode,
    /// Independent runs in sampled mode.
    pub samples: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            protocol: ProtocolConfig::default(),
            strategies: StrategyId::ALL.to_vec(),
            mode: Mode::Sampled,
            samples: 10_000,
            output_path: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    /// Output file: the configured path, or `report.<format>`.
    pub fn resolved_output(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("report.{}", self.format.name())))
    }
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    At(usize),
    Default,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::At(n) => write!(f, "line {n}"),
            Line::Default => f.write_str("default value"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: key `{key}` given more than once")]
    Duplicate { key: String, line: usize },
    #[error("{line}: invalid value for `{key}`: {message}")]
    InvalidValue { key: String, line: Line, message: String },
}

const KEYS: [&str; 10] = [
    "rounds",
    "decoys_per_sequence",
    "decoy_error_threshold",
    "direction",
    "seed",
    "strategy",
    "mode",
    "samples",
    "output_path",
    "format",
];

pub const MAX_DECOYS_PER_SEQUENCE: usize = 1024;

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut lines: [Line; KEYS.len()] = [Line::Default; KEYS.len()];
    let mut cfg = RunConfig::default();
    let mut strategy_given = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        let slot = KEYS.iter().position(|k| *k == key).ok_or_else(|| ConfigError::UnknownKey {
            key: key.to_string(),
            line,
        })?;
        if lines[slot] != Line::Default {
            return Err(ConfigError::Duplicate {
                key: key.to_string(),
                line,
            });
        }
        lines[slot] = Line::At(line);

        let invalid = |message: String| ConfigError::InvalidValue {
            key: key.to_string(),
            line: Line::At(line),
            message,
        };
        match key {
            "rounds" => cfg.protocol.rounds = parse_num(value).map_err(invalid)?,
            "decoys_per_sequence" => cfg.protocol.decoys_per_sequence = parse_num(value).map_err(invalid)?,
            "decoy_error_threshold" => cfg.protocol.decoy_error_threshold = parse_num(value).map_err(invalid)?,
            "direction" => cfg.protocol.direction = value.parse().map_err(invalid)?,
            "seed" => cfg.protocol.seed = parse_num(value).map_err(invalid)?,
            "strategy" => {
                cfg.strategies = parse_strategies(value).map_err(invalid)?;
                strategy_given = true;
            }
            "mode" => {
                cfg.mode = match value.to_ascii_lowercase().as_str() {
                    "sampled" => Mode::Sampled,
                    "exact" => Mode::Exact,
                    _ => return Err(invalid(format!("`{value}` is not sampled or exact"))),
                }
            }
            "samples" => cfg.samples = parse_num(value).map_err(invalid)?,
            "output_path" => {
                if value.is_empty() {
                    return Err(invalid("empty path".into()));
                }
                cfg.output_path = Some(PathBuf::from(value));
            }
            "format" => {
                cfg.format = match value.to_ascii_lowercase().as_str() {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(invalid(format!("`{value}` is not json or csv"))),
                }
            }
            _ => unreachable!("key list and match arms agree"),
        }
    }

    if cfg.mode == Mode::Exact && !strategy_given {
        cfg.strategies = vec![StrategyId::Honest, StrategyId::PreMeasure];
    }

    let at = |key: &str| lines[KEYS.iter().position(|k| *k == key).expect("known key")];
    let invalid = |key: &str, message: &str| ConfigError::InvalidValue {
        key: key.to_string(),
        line: at(key),
        message: message.to_string(),
    };
    let p = &cfg.protocol;
    if p.rounds == 0 {
        return Err(invalid("rounds", "must be at least 1"));
    }
    if p.decoys_per_sequence > MAX_DECOYS_PER_SEQUENCE {
        return Err(invalid("decoys_per_sequence", "must be at most 1024"));
    }
    if !(0.0..=1.0).contains(&p.decoy_error_threshold) {
        return Err(invalid("decoy_error_threshold", "must lie in [0, 1]"));
    }
    if p.direction == Role::Charlie {
        return Err(invalid("direction", "must be Alice or Bob"));
    }
    if cfg.mode == Mode::Sampled && cfg.samples == 0 {
        return Err(invalid("samples", "sampled mode needs at least 1 sample"));
    }
    if cfg.mode == Mode::Exact && cfg.strategies.contains(&StrategyId::InterceptResend) {
        return Err(invalid("strategy", "InterceptResend has no exact mode"));
    }
    Ok(cfg)
}

fn parse_num<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("`{value}`: {e}"))
}

/// One strategy name, a comma-separated list, or `all`.
fn parse_strategies(value: &str) -> Result<Vec<StrategyId>, String> {
    if value.eq_ignore_ascii_case("all") {
        return Ok(StrategyId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in value.split(',') {
        let id: StrategyId = part.trim().parse()?;
        if out.contains(&id) {
            return Err(format!("strategy {id} listed twice"));
        }
        out.push(id);
    }
    Ok(out)
}

//! Run reports in JSON or CSV.
//!
//! Reals are rounded to 12 significant digits and nothing time-dependent is
//! written, so the same config always yields byte-identical output.

use std::fmt::Write as _;

use cmqea_core::oracle::{exact_summary, exact_transcript_distribution, sampled_rates, tv_distance, Rate};
use cmqea_core::protocol::{run_sampled, RoundKey};
use cmqea_core::{RoundRecord, StrategyId};
use serde_json::{json, Value};

use crate::config::{Format, Mode, RunConfig};
use crate::CliError;

pub const TOOL: &str = "cmqea";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "strategy,key,mode,trials,accept_rate,accept_ci_low,accept_ci_high,\
detection_rate,detection_ci_low,detection_ci_high,key_recovery_rate,key_recovery_ci_low,\
key_recovery_ci_high,tv_distance";

/// Rounds `x` to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// A probability with an optional confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub interval: Option<(f64, f64)>,
}

impl Estimate {
    fn exact(value: f64) -> Self {
        Self { value, interval: None }
    }
}

impl From<Rate> for Estimate {
    fn from(r: Rate) -> Self {
        Self {
            value: r.value,
            interval: Some((r.low, r.high)),
        }
    }
}

/// Which keys a row aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyScope {
    One(RoundKey),
    All,
}

impl KeyScope {
    pub fn name(self) -> String {
        match self {
            KeyScope::One(k) => k.to_string(),
            KeyScope::All => "all".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub strategy: StrategyId,
    pub key: KeyScope,
    /// Sampled rounds behind the row; `None` for exact rows.
    pub trials: Option<u64>,
    pub accept: Estimate,
    pub detection: Estimate,
    /// `None` when the strategy never infers a key.
    pub key_recovery: Option<Estimate>,
    /// Exact mode only: distance of the public transcript from the honest one.
    pub tv_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: RunConfig,
    pub rows: Vec<ResultRow>,
}

pub fn build_report(config: &RunConfig) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    for &strategy in &config.strategies {
        match config.mode {
            Mode::Sampled => sampled_rows(config, strategy, &mut rows)?,
            Mode::Exact => exact_rows(config, strategy, &mut rows)?,
        }
    }
    Ok(Report {
        config: config.clone(),
        rows,
    })
}

fn sampled_rows(config: &RunConfig, strategy: StrategyId, rows: &mut Vec<ResultRow>) -> Result<(), CliError> {
    let runs = run_sampled(&config.protocol, strategy, config.samples)?;
    let records: Vec<RoundRecord> = runs.into_iter().flat_map(|r| r.records).collect();
    let scopes = RoundKey::ALL.into_iter().map(KeyScope::One).chain([KeyScope::All]);
    for scope in scopes {
        let subset: Vec<RoundRecord> = match scope {
            KeyScope::One(k) => records.iter().filter(|r| r.key == k).cloned().collect(),
            KeyScope::All => records.clone(),
        };
        // a key may go undrawn in a very small run
        if subset.is_empty() {
            continue;
        }
        let rates = sampled_rates(&subset)?;
        rows.push(ResultRow {
            strategy,
            key: scope,
            trials: Some(rates.rounds),
            accept: rates.accept.into(),
            detection: rates.detection.into(),
            key_recovery: rates.key_recovery.map(Estimate::from),
            tv_distance: None,
        });
    }
    Ok(())
}

fn exact_rows(config: &RunConfig, strategy: StrategyId, rows: &mut Vec<ResultRow>) -> Result<(), CliError> {
    let direction = config.protocol.direction;
    for key in RoundKey::ALL {
        let summary = exact_summary(strategy, key, direction)?;
        let honest = exact_transcript_distribution(StrategyId::Honest, key, direction)?;
        let observed = exact_transcript_distribution(strategy, key, direction)?;
        rows.push(ResultRow {
            strategy,
            key: KeyScope::One(key),
            trials: None,
            accept: Estimate::exact(summary.accept_probability),
            detection: Estimate::exact(summary.abort_probability),
            key_recovery: summary.key_recovery_probability.map(Estimate::exact),
            tv_distance: Some(tv_distance(&honest, &observed)?),
        });
    }
    Ok(())
}

fn real(x: f64) -> Value {
    json!(sig12(x))
}

fn opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, real)
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    fn config_json(&self) -> Value {
        let c = &self.config;
        let p = &c.protocol;
        let sampled = c.mode == Mode::Sampled;
        let strategies: Vec<&str> = c.strategies.iter().map(|s| s.name()).collect();
        // exact mode runs single decoy-free rounds and draws nothing at random
        json!({
            "mode": c.mode.name(),
            "strategy": strategies,
            "direction": p.direction.name(),
            "rounds": if sampled { json!(p.rounds) } else { Value::Null },
            "decoys_per_sequence": if sampled { json!(p.decoys_per_sequence) } else { Value::Null },
            "decoy_error_threshold": if sampled { real(p.decoy_error_threshold) } else { Value::Null },
            "samples": if sampled { json!(c.samples) } else { Value::Null },
            "seed": if sampled { json!(p.seed) } else { Value::Null },
            "format": c.format.name(),
        })
    }

    pub fn to_json(&self) -> String {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let (acc_lo, acc_hi) = r.accept.interval.unzip();
                let (det_lo, det_hi) = r.detection.interval.unzip();
                let (kr_lo, kr_hi) = r.key_recovery.and_then(|e| e.interval).unzip();
                json!({
                    "strategy": r.strategy.name(),
                    "key": r.key.name(),
                    "trials": r.trials,
                    "accept_rate": real(r.accept.value),
                    "accept_ci_low": opt_real(acc_lo),
                    "accept_ci_high": opt_real(acc_hi),
                    "detection_rate": real(r.detection.value),
                    "detection_ci_low": opt_real(det_lo),
                    "detection_ci_high": opt_real(det_hi),
                    "key_recovery_rate": opt_real(r.key_recovery.map(|e| e.value)),
                    "key_recovery_ci_low": opt_real(kr_lo),
                    "key_recovery_ci_high": opt_real(kr_hi),
                    "tv_distance": opt_real(r.tv_distance),
                })
            })
            .collect();
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "config": self.config_json(),
            "results": results,
        });
        let mut out = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        fn cell(x: Option<f64>) -> String {
            x.map(|v| sig12(v).to_string()).unwrap_or_default()
        }
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let (acc_lo, acc_hi) = r.accept.interval.unzip();
            let (det_lo, det_hi) = r.detection.interval.unzip();
            let (kr_lo, kr_hi) = r.key_recovery.and_then(|e| e.interval).unzip();
            let fields = [
                r.strategy.name().to_string(),
                r.key.name(),
                self.config.mode.name().to_string(),
                r.trials.map(|t| t.to_string()).unwrap_or_default(),
                cell(Some(r.accept.value)),
                cell(acc_lo),
                cell(acc_hi),
                cell(Some(r.detection.value)),
                cell(det_lo),
                cell(det_hi),
                cell(r.key_recovery.map(|e| e.value)),
                cell(kr_lo),
                cell(kr_hi),
                cell(r.tv_distance),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Short human summary: one line per strategy with its headline rates.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for &strategy in &self.config.strategies {
            let rows: Vec<&ResultRow> = self.rows.iter().filter(|r| r.strategy == strategy).collect();
            let _ = write!(out, "{strategy} [{}]", self.config.mode.name());
            match self.config.mode {
                Mode::Sampled => {
                    if let Some(all) = rows.iter().find(|r| r.key == KeyScope::All) {
                        let _ = write!(
                            out,
                            " rounds={} accept={} detection={} key_recovery={}",
                            all.trials.unwrap_or(0),
                            sig12(all.accept.value),
                            sig12(all.detection.value),
                            all.key_recovery.map_or("n/a".to_string(), |e| sig12(e.value).to_string()),
                        );
                    }
                }
                Mode::Exact => {
                    // keys are uniform, so the headline is the mean over keys
                    let n = rows.len().max(1) as f64;
                    let mean = |f: &dyn Fn(&ResultRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
                    let tv_max = rows.iter().filter_map(|r| r.tv_distance).fold(0.0, f64::max);
                    let recovery = if rows.iter().all(|r| r.key_recovery.is_some()) && !rows.is_empty() {
                        sig12(mean(&|r| r.key_recovery.map_or(0.0, |e| e.value))).to_string()
                    } else {
                        "n/a".to_string()
                    };
                    let _ = write!(
                        out,
                        " accept={} detection={} key_recovery={} max_tv_distance={}",
                        sig12(mean(&|r| r.accept.value)),
                        sig12(mean(&|r| r.detection.value)),
                        recovery,
                        sig12(tv_max),
                    );
                }
            }
            out.push('\n');
        }
        out
    }
}

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::photonic::CascadeRecord;
use crate::teleport::{BaselineRecord, ClassicalMessage, SwapRecord, TrialRecord, UnknownState};

/// Rounds to 12 significant digits, the precision of every number the
/// harness emits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form of [`round_sig`].
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// One JSON-lines row. Field order is the on-disk order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub trial: u64,
    pub seed: u64,
    pub outcome: String,
    pub message_bits: Option<String>,
    pub fidelity: Option<f64>,
    /// Detector event code; photon mode only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
    pub a_re: Option<f64>,
    pub a_im: Option<f64>,
    pub b_re: Option<f64>,
    pub b_im: Option<f64>,
}

impl BatchRecord {
    fn base(trial: u64, seed: u64, input: Option<&UnknownState>) -> Self {
        Self {
            trial,
            seed,
            outcome: String::new(),
            message_bits: None,
            fidelity: None,
            event: None,
            a_re: input.map(|u| round_sig(u.a().re)),
            a_im: input.map(|u| round_sig(u.a().im)),
            b_re: input.map(|u| round_sig(u.b().re)),
            b_im: input.map(|u| round_sig(u.b().im)),
        }
    }

    pub fn from_trial(trial: u64, r: &TrialRecord) -> Self {
        Self {
            outcome: r.outcome.name().to_string(),
            message_bits: Some(r.message.to_string()),
            fidelity: Some(round_sig(r.fidelity)),
            ..Self::base(trial, r.rng_seed, Some(&r.input))
        }
    }

    pub fn from_baseline(trial: u64, r: &BaselineRecord) -> Self {
        Self {
            outcome: r.outcome.to_string(),
            message_bits: r.message.map(|m| m.to_string()),
            fidelity: Some(round_sig(r.fidelity)),
            ..Self::base(trial, r.rng_seed, Some(&r.input))
        }
    }

    pub fn from_swap(trial: u64, r: &SwapRecord) -> Self {
        Self {
            outcome: r.outcome.name().to_string(),
            message_bits: Some(ClassicalMessage::encode(r.outcome).to_string()),
            fidelity: Some(round_sig(r.fidelity)),
            ..Self::base(trial, r.rng_seed, None)
        }
    }

    pub fn from_cascade(trial: u64, r: &CascadeRecord) -> Self {
        let label = r.event.original_bell;
        Self {
            outcome: label.map_or("none", |l| l.name()).to_string(),
            message_bits: label.map(|l| ClassicalMessage::encode(l.analog()).to_string()),
            fidelity: r.fidelity.map(round_sig),
            event: Some(r.event.kind.code().to_string()),
            ..Self::base(trial, r.rng_seed, Some(&r.input))
        }
    }
}

pub fn write_jsonl<'a>(
    records: impl IntoIterator<Item = &'a BatchRecord>,
    mut out: impl Write,
) -> Result<(), HarnessError> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl(input: impl BufRead) -> Result<Vec<BatchRecord>, HarnessError> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

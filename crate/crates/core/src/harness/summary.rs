use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::record::{fmt_sig, round_sig, BatchRecord};
use super::{HarnessError, Mode};
use crate::observables::BellOutcome;
use crate::photonic::{analytic_distribution, EfficiencyConfig, EventKind};
use crate::teleport::{ProductOutcome, UnknownState};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeCount {
    pub outcome: String,
    pub count: u64,
    pub frequency: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub mode: String,
    pub trials: u64,
    pub counts: Vec<OutcomeCount>,
    pub mean_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    /// Minimum fidelity over successful trials only.
    pub min_success_fidelity: Option<f64>,
    pub success_rate: f64,
    pub chi_square: Option<ChiSquare>,
    pub duration_secs: f64,
}

impl BatchSummary {
    pub fn count(&self, outcome: &str) -> u64 {
        self.counts
            .iter()
            .find(|c| c.outcome == outcome)
            .map_or(0, |c| c.count)
    }

    pub fn frequency(&self, outcome: &str) -> f64 {
        self.counts
            .iter()
            .find(|c| c.outcome == outcome)
            .map_or(0.0, |c| c.frequency)
    }

    /// The same summary with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let mut s = self.clone();
        for c in &mut s.counts {
            c.frequency = round_sig(c.frequency);
            c.expected = c.expected.map(round_sig);
        }
        s.mean_fidelity = s.mean_fidelity.map(round_sig);
        s.min_fidelity = s.min_fidelity.map(round_sig);
        s.min_success_fidelity = s.min_success_fidelity.map(round_sig);
        s.success_rate = round_sig(s.success_rate);
        s.chi_square = s.chi_square.map(|c| ChiSquare {
            statistic: round_sig(c.statistic),
            dof: c.dof,
            p_value: round_sig(c.p_value),
        });
        s.duration_secs = round_sig(s.duration_secs);
        s
    }

    /// One CSV row per outcome: `outcome,count,frequency,expected`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "outcome,count,frequency,expected")?;
        for c in &self.counts {
            let expected = c.expected.map(fmt_sig).unwrap_or_default();
            writeln!(out, "{},{},{},{}", c.outcome, c.count, fmt_sig(c.frequency), expected)?;
        }
        Ok(())
    }

    /// Protocol guarantees that a batch must satisfy; each entry describes
    /// one breach.
    pub fn violations(&self, mode: Mode, efficiency: &EfficiencyConfig) -> Vec<String> {
        let floor = 1.0 - tol::FIDELITY;
        let mut out = Vec::new();
        let gate = match mode {
            Mode::Spin | Mode::Swap => self.min_fidelity,
            Mode::Baseline => self.min_success_fidelity,
            // Lossy absorption can misroute pairs; the guarantee is for
            // ideal regions only.
            Mode::Photon if efficiency.eta_abs >= 1.0 => self.min_fidelity,
            Mode::Photon => None,
        };
        if let Some(f) = gate.filter(|&f| f < floor) {
            out.push(format!("{mode}: minimum fidelity {} below {}", fmt_sig(f), fmt_sig(floor)));
        }
        let total: u64 = self.counts.iter().map(|c| c.count).sum();
        if total != self.trials {
            out.push(format!("counts sum to {total}, expected {}", self.trials));
        }
        out
    }
}

/// Canonical outcome keys for a mode, in reporting order.
pub fn outcome_keys(mode: Mode) -> Vec<String> {
    match mode {
        Mode::Spin | Mode::Swap => BellOutcome::ALL.iter().map(|b| b.name().to_string()).collect(),
        Mode::Baseline => std::iter::once(BellOutcome::PsiMinus.name())
            .chain(ProductOutcome::ALL.iter().map(|p| p.name()))
            .map(str::to_string)
            .collect(),
        Mode::Photon => EventKind::ALL.iter().map(|k| k.code().to_string()).collect(),
    }
}

fn key_of(mode: Mode, r: &BatchRecord) -> String {
    match mode {
        Mode::Photon => r.event.clone().unwrap_or_else(|| "NONE".to_string()),
        _ => r.outcome.clone(),
    }
}

fn is_success(mode: Mode, r: &BatchRecord) -> bool {
    let perfect = r.fidelity.is_some_and(|f| f >= 1.0 - tol::FIDELITY);
    match mode {
        Mode::Spin | Mode::Swap => perfect,
        Mode::Baseline => r.message_bits.is_some(),
        Mode::Photon => {
            r.event
                .as_deref()
                .and_then(EventKind::from_code)
                .is_some_and(EventKind::is_identifying)
                && perfect
        }
    }
}

/// Analytic outcome probabilities for modes where they do not depend on the
/// input; `None` for the baseline, whose product-basis readout does.
pub fn expected_distribution(mode: Mode, efficiency: &EfficiencyConfig) -> Option<Vec<(String, f64)>> {
    match mode {
        Mode::Spin | Mode::Swap => Some(outcome_keys(mode).into_iter().map(|k| (k, 0.25)).collect()),
        Mode::Baseline => None,
        Mode::Photon => {
            let reference = UnknownState::real(1.0, 0.0).expect("normalized");
            let d = analytic_distribution(&reference, efficiency).ok()?;
            Some(
                EventKind::ALL
                    .iter()
                    .map(|&k| (k.code().to_string(), d.get(k)))
                    .collect(),
            )
        }
    }
}

/// Pearson chi-square of `counts` against `expected` probabilities. Bins with
/// zero expected probability are left out; an observation in such a bin
/// makes the statistic infinite.
pub fn chi_square(counts: &[(String, u64)], expected: &[(String, f64)]) -> Option<ChiSquare> {
    let n: u64 = counts.iter().map(|(_, c)| c).sum();
    let observed = |k: &str| counts.iter().find(|(o, _)| o == k).map_or(0, |(_, c)| *c);
    let mut statistic = 0.0;
    let mut bins = 0u64;
    for (k, p) in expected {
        let o = observed(k) as f64;
        if *p <= 0.0 {
            if o > 0.0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        let e = p * n as f64;
        statistic += (o - e) * (o - e) / e;
        bins += 1;
    }
    for (k, c) in counts {
        if *c > 0 && !expected.iter().any(|(e, _)| e == k) {
            statistic = f64::INFINITY;
        }
    }
    let dof = bins.checked_sub(1).filter(|&d| d > 0)?;
    let p_value = if statistic.is_finite() {
        ChiSquared::new(dof as f64).ok()?.sf(statistic)
    } else {
        0.0
    };
    Some(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

/// Deterministic aggregation of a record stream.
pub fn summarize<'a>(
    mode: Mode,
    records: impl IntoIterator<Item = &'a BatchRecord>,
    expected: Option<&[(String, f64)]>,
) -> Result<BatchSummary, HarnessError> {
    let mut keys = outcome_keys(mode);
    let mut tallies: Vec<(String, u64)> = keys.iter().map(|k| (k.clone(), 0)).collect();
    let mut trials = 0u64;
    let mut successes = 0u64;
    let mut fid_sum = 0.0;
    let mut fid_n = 0u64;
    let mut fid_min: Option<f64> = None;
    let mut success_min: Option<f64> = None;

    for r in records {
        trials += 1;
        let key = key_of(mode, r);
        match tallies.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => *c += 1,
            None => {
                keys.push(key.clone());
                tallies.push((key, 1));
            }
        }
        if let Some(f) = r.fidelity {
            fid_sum += f;
            fid_n += 1;
            fid_min = Some(fid_min.map_or(f, |m| m.min(f)));
        }
        if is_success(mode, r) {
            successes += 1;
            if let Some(f) = r.fidelity {
                success_min = Some(success_min.map_or(f, |m| m.min(f)));
            }
        }
    }
    if trials == 0 {
        return Err(HarnessError::EmptyStream);
    }

    let counts = tallies
        .iter()
        .map(|(k, c)| OutcomeCount {
            outcome: k.clone(),
            count: *c,
            frequency: *c as f64 / trials as f64,
            expected: expected.and_then(|e| e.iter().find(|(o, _)| o == k).map(|(_, p)| *p)),
        })
        .collect();
    Ok(BatchSummary {
        mode: mode.name().to_string(),
        trials,
        counts,
        mean_fidelity: (fid_n > 0).then(|| fid_sum / fid_n as f64),
        min_fidelity: fid_min,
        min_success_fidelity: success_min,
        success_rate: successes as f64 / trials as f64,
        chi_square: expected.and_then(|e| chi_square(&tallies, e)),
        duration_secs: 0.0,
    })
}

use std::fmt;
use std::io::Write;

use super::record::fmt_sig;
use super::HarnessError;
use crate::photonic::{analytic_distribution, EfficiencyConfig, EventDistribution, EventKind};
use crate::teleport::UnknownState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    EtaAbs,
    EtaDet,
    PIn,
    PPdc,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [Self::EtaAbs, Self::EtaDet, Self::PIn, Self::PPdc];

    pub fn name(self) -> &'static str {
        match self {
            Self::EtaAbs => "eta_abs",
            Self::EtaDet => "eta_det",
            Self::PIn => "p_in",
            Self::PPdc => "p_pdc",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    fn set(self, cfg: &mut EfficiencyConfig, v: f64) {
        match self {
            Self::EtaAbs => cfg.eta_abs = v,
            Self::EtaDet => cfg.eta_det = v,
            Self::PIn => cfg.p_in = v,
            Self::PPdc => cfg.p_pdc = v,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub distribution: EventDistribution,
}

/// Analytic event probabilities at `steps` evenly spaced values of `param`
/// from `from` to `to` inclusive, other efficiencies taken from `base`.
pub fn sweep_efficiency(
    base: &EfficiencyConfig,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, HarnessError> {
    if steps == 0 {
        return Err(HarnessError::InvalidConfig("steps must be at least 1".into()));
    }
    // The event distribution does not depend on the input.
    let input = UnknownState::real(1.0, 0.0)?;
    (0..steps)
        .map(|i| {
            let value = if steps == 1 {
                from
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            };
            let mut cfg = *base;
            param.set(&mut cfg, value);
            cfg.validate()?;
            Ok(SweepRow {
                value,
                distribution: analytic_distribution(&input, &cfg)?,
            })
        })
        .collect()
}

pub fn write_sweep_csv(param: SweepParam, rows: &[SweepRow], mut out: impl Write) -> std::io::Result<()> {
    write!(out, "{}", param.name())?;
    for k in EventKind::ALL {
        write!(out, ",{}", k.code())?;
    }
    writeln!(out)?;
    for r in rows {
        write!(out, "{}", fmt_sig(r.value))?;
        for k in EventKind::ALL {
            write!(out, ",{}", fmt_sig(r.distribution.get(k)))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

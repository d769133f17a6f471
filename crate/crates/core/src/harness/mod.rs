//! Batch runner, statistics, configuration and serialization behind the CLI.
//!
//! Trials run in parallel but records are collected in trial-index order, so
//! the JSON-lines stream depends only on the configuration.

mod config;
mod record;
mod seed;
mod summary;
mod sweep;

pub use config::{parse_config, ConfigError, ConfigErrorKind, InputSpec, Mode, RunConfig};
pub use record::{fmt_sig, read_jsonl, round_sig, write_jsonl, BatchRecord};
pub use seed::{splitmix64_mix, trial_seed};
pub use summary::{
    chi_square, expected_distribution, outcome_keys, summarize, BatchSummary, ChiSquare, OutcomeCount,
};
pub use sweep::{sweep_efficiency, write_sweep_csv, SweepParam, SweepRow};

use std::fs::File;
use std::io::BufWriter;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::photonic::run_cascade;
use crate::sampling::input_rng;
use crate::teleport::{run_baseline_computational, run_entangled_input, run_trial, UnknownState};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Quantum(#[from] crate::Error),
    #[error("config {0}")]
    Config(#[from] ConfigError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("empty record stream")]
    EmptyStream,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

fn input_for(cfg: &RunConfig, seed: u64) -> UnknownState {
    match cfg.input {
        InputSpec::Fixed(u) => u,
        InputSpec::HaarRandom => UnknownState::haar(&mut input_rng(seed)),
    }
}

fn run_one(cfg: &RunConfig, trial: u64) -> crate::Result<BatchRecord> {
    let seed = trial_seed(cfg.master_seed, trial);
    Ok(match cfg.mode {
        Mode::Spin => BatchRecord::from_trial(trial, &run_trial(&input_for(cfg, seed), seed)?),
        Mode::Baseline => {
            let (_, r) = run_baseline_computational(&input_for(cfg, seed), seed)?;
            BatchRecord::from_baseline(trial, &r)
        }
        Mode::Swap => BatchRecord::from_swap(trial, &run_entangled_input(seed)?),
        Mode::Photon => {
            BatchRecord::from_cascade(trial, &run_cascade(&input_for(cfg, seed), &cfg.efficiency, seed)?)
        }
    })
}

pub fn validate(cfg: &RunConfig) -> Result<(), HarnessError> {
    if cfg.trials == 0 {
        return Err(HarnessError::InvalidConfig("trials must be at least 1".into()));
    }
    cfg.efficiency.validate()?;
    Ok(())
}

/// All trial records of a batch, in trial-index order.
pub fn run_records(cfg: &RunConfig) -> Result<Vec<BatchRecord>, HarnessError> {
    validate(cfg)?;
    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_one(cfg, i))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(records)
}

/// Runs the batch, writes the JSON-lines file when `output_path` is set, and
/// summarizes.
pub fn run_batch(cfg: &RunConfig) -> Result<BatchSummary, HarnessError> {
    let start = Instant::now();
    // Open the output first so an unwritable path fails before any work.
    let out = cfg.output_path.as_ref().map(File::create).transpose()?;
    let records = run_records(cfg)?;
    if let Some(f) = out {
        write_jsonl(&records, BufWriter::new(f))?;
    }
    let expected = expected_distribution(cfg.mode, &cfg.efficiency);
    let mut summary = summarize(cfg.mode, &records, expected.as_deref())?;
    summary.duration_secs = start.elapsed().as_secs_f64();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode, trials: u64) -> RunConfig {
        RunConfig {
            mode,
            trials,
            ..RunConfig::default()
        }
    }

    #[test]
    fn records_are_ordered_and_seeded() {
        let r = run_records(&cfg(Mode::Spin, 50)).unwrap();
        for (i, rec) in r.iter().enumerate() {
            assert_eq!(rec.trial, i as u64);
            assert_eq!(rec.seed, trial_seed(42, i as u64));
        }
    }

    #[test]
    fn every_mode_runs() {
        for mode in Mode::ALL {
            let s = run_batch(&cfg(mode, 200)).unwrap();
            assert_eq!(s.trials, 200);
            assert_eq!(s.counts.iter().map(|c| c.count).sum::<u64>(), 200);
            let freq: f64 = s.counts.iter().map(|c| c.frequency).sum();
            assert!((freq - 1.0).abs() < 1e-12);
            assert!(s.violations(mode, &RunConfig::default().efficiency).is_empty(), "{mode}");
        }
    }

    #[test]
    fn unwritable_output_is_an_error() {
        let mut c = cfg(Mode::Spin, 1);
        c.output_path = Some("/nonexistent-dir/x/out.jsonl".into());
        assert!(matches!(run_batch(&c), Err(HarnessError::Io(_))));
    }

    #[test]
    fn streaming_soundness() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(Mode::Photon, 300);
        c.output_path = Some(dir.path().join("p.jsonl"));
        let mut s = run_batch(&c).unwrap();
        let back = read_jsonl(std::io::BufReader::new(File::open(dir.path().join("p.jsonl")).unwrap())).unwrap();
        let expected = expected_distribution(Mode::Photon, &c.efficiency);
        let mut t = summarize(Mode::Photon, &back, expected.as_deref()).unwrap();
        s.duration_secs = 0.0;
        t.duration_secs = 0.0;
        assert_eq!(s.rounded(), t.rounded());
    }
}

use std::fmt;

use serde::Serialize;

use super::{build_three_mode, correction_for_photonic, waveplate, PhotonBell, PolarizationState};
use crate::error::{Error, Result};
use crate::qcore::{fidelity, measure_projective, Operator, StateVector};
use crate::sampling::{trial_rng, unit};
use crate::teleport::UnknownState;
use crate::tol;

/// Device imperfections. All entries are probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyConfig {
    /// Absorption probability for a resonant pair in a region.
    pub eta_abs: f64,
    /// Probability that a fired event is registered by its detector(s).
    pub eta_det: f64,
    /// Probability that the input photon is present in the trial window.
    pub p_in: f64,
    /// Probability that the down-converted pair is present.
    pub p_pdc: f64,
}

impl EfficiencyConfig {
    pub const IDEAL: EfficiencyConfig = EfficiencyConfig {
        eta_abs: 1.0,
        eta_det: 1.0,
        p_in: 1.0,
        p_pdc: 1.0,
    };

    pub fn new(eta_abs: f64, eta_det: f64, p_in: f64, p_pdc: f64) -> Result<Self> {
        let cfg = Self {
            eta_abs,
            eta_det,
            p_in,
            p_pdc,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("eta_abs", self.eta_abs),
            ("eta_det", self.eta_det),
            ("p_in", self.p_in),
            ("p_pdc", self.p_pdc),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ProbabilityOutOfRange { name, value });
            }
        }
        Ok(())
    }
}

impl Default for EfficiencyConfig {
    fn default() -> Self {
        Self::IDEAL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    D1,
    D2,
    D4,
    D3Coincidence,
    D3SingleTop,
    D3SingleLower,
    NoEvent,
}

impl EventKind {
    pub const ALL: [EventKind; 7] = [
        Self::D1,
        Self::D2,
        Self::D4,
        Self::D3Coincidence,
        Self::D3SingleTop,
        Self::D3SingleLower,
        Self::NoEvent,
    ];

    pub const IDENTIFYING: [EventKind; 4] = [Self::D1, Self::D2, Self::D4, Self::D3Coincidence];

    pub fn code(self) -> &'static str {
        match self {
            Self::D1 => "D1",
            Self::D2 => "D2",
            Self::D4 => "D4",
            Self::D3Coincidence => "D3C",
            Self::D3SingleTop => "D3ST",
            Self::D3SingleLower => "D3SL",
            Self::NoEvent => "NONE",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn is_identifying(self) -> bool {
        Self::IDENTIFYING.contains(&self)
    }

    /// Bell analog of the original three-mode expansion that this event
    /// identifies.
    pub fn original_bell(self) -> Option<PhotonBell> {
        match self {
            Self::D1 => Some(PhotonBell::ChiMinus),
            Self::D2 => Some(PhotonBell::GammaPlus),
            Self::D4 => Some(PhotonBell::GammaMinus),
            Self::D3Coincidence => Some(PhotonBell::ChiPlus),
            _ => None,
        }
    }

    pub fn stage(self) -> Option<Stage> {
        match self {
            Self::D1 => Some(Stage::C),
            Self::D2 => Some(Stage::E),
            Self::NoEvent => None,
            _ => Some(Stage::F),
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|&k| k == self).expect("listed")
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    C,
    E,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CascadeEvent {
    pub kind: EventKind,
    pub stage: Option<Stage>,
    pub original_bell: Option<PhotonBell>,
}

impl From<EventKind> for CascadeEvent {
    fn from(kind: EventKind) -> Self {
        Self {
            kind,
            stage: kind.stage(),
            original_bell: kind.original_bell(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeRecord {
    pub input: UnknownState,
    pub event: CascadeEvent,
    pub bob_pre: Option<StateVector>,
    pub bob_post: Option<StateVector>,
    pub fidelity: Option<f64>,
    pub rng_seed: u64,
}

/// Outcome of one absorption region.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub absorbed: bool,
    pub probability: f64,
    pub post: PolarizationState,
}

/// Both branches of an absorption region selecting `target` on `(k₁, k₂)`.
///
/// A pair is absorbed with probability `eta_abs · ‖P s‖²`, leaving the
/// projected state. When nothing is absorbed, an ideal region
/// (`eta_abs = 1`) has projected onto the complement; a lossy region is
/// treated as not having measured at all and passes `s` on unchanged.
fn stage_branches(s: &PolarizationState, target: PhotonBell, eta_abs: f64) -> Result<Vec<StageResult>> {
    let p = Operator::projector(&target.state())?;
    let selected = s.as_state().apply(&p, &[0, 1])?;
    let weight = selected.norm_sqr();
    let p_abs = eta_abs * weight;
    let mut out = Vec::with_capacity(2);
    if p_abs >= tol::DEGENERATE_PROBABILITY {
        out.push(StageResult {
            absorbed: true,
            probability: p_abs,
            post: PolarizationState::new(selected.normalized()?),
        });
    }
    let p_pass = 1.0 - p_abs;
    if p_pass >= tol::DEGENERATE_PROBABILITY {
        let post = if eta_abs >= 1.0 {
            let complement = &Operator::identity(4) - &p;
            s.as_state().apply(&complement, &[0, 1])?.normalized()?
        } else {
            s.as_state().clone()
        };
        out.push(StageResult {
            absorbed: false,
            probability: p_pass,
            post: PolarizationState::new(post),
        });
    }
    Ok(out)
}

fn sample_stage(s: &PolarizationState, target: PhotonBell, eta_abs: f64, rng_sample: f64) -> Result<StageResult> {
    if !(0.0..1.0).contains(&rng_sample) {
        return Err(Error::RngSampleOutOfRange(rng_sample));
    }
    let branches = stage_branches(s, target, eta_abs)?;
    let mut cumulative = 0.0;
    for br in &branches {
        cumulative += br.probability;
        if rng_sample < cumulative {
            return Ok(br.clone());
        }
    }
    branches.last().cloned().ok_or(Error::DegenerateMeasurement)
}

/// Region C or E: selects the zero-spin pair `χ⁻` on `(k₁, k₂)`.
pub fn absorption_stage(s: &PolarizationState, eta_abs: f64, rng_sample: f64) -> Result<StageResult> {
    sample_stage(s, PhotonBell::ChiMinus, eta_abs, rng_sample)
}

/// Region F: selects the `S_z = 0` pair `χ⁺`. Absorption fires D4; a
/// surviving pair reaches both D3 detectors.
pub fn stage_f(s: &PolarizationState, eta_abs: f64, rng_sample: f64) -> Result<(EventKind, StageResult)> {
    let r = sample_stage(s, PhotonBell::ChiPlus, eta_abs, rng_sample)?;
    let kind = if r.absorbed {
        EventKind::D4
    } else {
        EventKind::D3Coincidence
    };
    Ok((kind, r))
}

/// Readout of the pair arriving at the D3 detectors. The detectors do not
/// resolve polarization; sampling the pair in the Bell-analog basis gives a
/// pure conditional state for Bob whose average is his reduced state.
fn settle_surviving_pair(s: &PolarizationState, rng_sample: f64) -> Result<PolarizationState> {
    let projectors = PhotonBell::ALL
        .iter()
        .map(|b| Operator::projector(&b.state())?.embed(s.n_modes(), &[0, 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PolarizationState::new(
        measure_projective(s.as_state(), &projectors, rng_sample)?.post_state,
    ))
}

struct Samples {
    input_present: f64,
    pair_present: f64,
    stage_c: f64,
    stage_e: f64,
    stage_f: f64,
    settle: f64,
    detect: f64,
}

/// One trial through the full apparatus.
///
/// Draws seven uniforms from the trial stream in a fixed order (input
/// presence, pair presence, regions C/E/F, D3 readout, detection) so that
/// the stream alignment does not depend on the path taken.
pub fn run_cascade(input: &UnknownState, cfg: &EfficiencyConfig, rng_seed: u64) -> Result<CascadeRecord> {
    cfg.validate()?;
    let mut rng = trial_rng(rng_seed);
    let r = Samples {
        input_present: unit(&mut rng),
        pair_present: unit(&mut rng),
        stage_c: unit(&mut rng),
        stage_e: unit(&mut rng),
        stage_f: unit(&mut rng),
        settle: unit(&mut rng),
        detect: unit(&mut rng),
    };
    let has_input = r.input_present < cfg.p_in;
    let has_pair = r.pair_present < cfg.p_pdc;

    let (fired, final_state) = match (has_input, has_pair) {
        (false, false) => (EventKind::NoEvent, None),
        (true, false) => (EventKind::D3SingleTop, None),
        (false, true) => (EventKind::D3SingleLower, None),
        (true, true) => {
            let s = build_three_mode(input);
            let c = absorption_stage(&s, cfg.eta_abs, r.stage_c)?;
            if c.absorbed {
                (EventKind::D1, Some(c.post))
            } else {
                let s = waveplate(&c.post, 1)?;
                let e = absorption_stage(&s, cfg.eta_abs, r.stage_e)?;
                if e.absorbed {
                    (EventKind::D2, Some(e.post))
                } else {
                    let (kind, f) = stage_f(&e.post, cfg.eta_abs, r.stage_f)?;
                    let post = if kind == EventKind::D3Coincidence {
                        settle_surviving_pair(&f.post, r.settle)?
                    } else {
                        f.post
                    };
                    (kind, Some(post))
                }
            }
        }
    };

    let registered = fired != EventKind::NoEvent && r.detect < cfg.eta_det;
    let kind = if registered { fired } else { EventKind::NoEvent };
    let event = CascadeEvent::from(kind);

    let (bob_pre, bob_post, fid) = match (event.original_bell, final_state) {
        (Some(label), Some(state)) => {
            let pre = state.as_state().factor_out(&[2])?;
            let post = pre.apply(&correction_for_photonic(label), &[0])?;
            let f = fidelity(&post, &input.state())?;
            (Some(pre), Some(post), Some(f))
        }
        _ => (None, None, None),
    };
    Ok(CascadeRecord {
        input: *input,
        event,
        bob_pre,
        bob_post,
        fidelity: fid,
        rng_seed,
    })
}

/// Exact probabilities over [`EventKind::ALL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventDistribution(pub [f64; 7]);

impl EventDistribution {
    pub fn get(&self, kind: EventKind) -> f64 {
        self.0[kind.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Distribution over the four identifying events, conditioned on one of
    /// them being registered. `None` when none can occur.
    pub fn conditional_identifying(&self) -> Option<[f64; 4]> {
        let probs = EventKind::IDENTIFYING.map(|k| self.get(k));
        let total: f64 = probs.iter().sum();
        (total > 0.0).then(|| probs.map(|p| p / total))
    }

    fn add(&mut self, kind: EventKind, p: f64) {
        self.0[kind.index()] += p;
    }
}

/// Event probabilities obtained by walking every branch of the stage tree
/// with its exact weight; no sampling.
pub fn analytic_distribution(input: &UnknownState, cfg: &EfficiencyConfig) -> Result<EventDistribution> {
    cfg.validate()?;
    let mut fired = EventDistribution([0.0; 7]);
    let both = cfg.p_in * cfg.p_pdc;
    fired.add(EventKind::D3SingleTop, cfg.p_in * (1.0 - cfg.p_pdc));
    fired.add(EventKind::D3SingleLower, (1.0 - cfg.p_in) * cfg.p_pdc);
    fired.add(EventKind::NoEvent, (1.0 - cfg.p_in) * (1.0 - cfg.p_pdc));

    if both > 0.0 {
        let s = build_three_mode(input);
        for c in stage_branches(&s, PhotonBell::ChiMinus, cfg.eta_abs)? {
            let wc = both * c.probability;
            if c.absorbed {
                fired.add(EventKind::D1, wc);
                continue;
            }
            let s = waveplate(&c.post, 1)?;
            for e in stage_branches(&s, PhotonBell::ChiMinus, cfg.eta_abs)? {
                let we = wc * e.probability;
                if e.absorbed {
                    fired.add(EventKind::D2, we);
                    continue;
                }
                for f in stage_branches(&e.post, PhotonBell::ChiPlus, cfg.eta_abs)? {
                    let kind = if f.absorbed {
                        EventKind::D4
                    } else {
                        EventKind::D3Coincidence
                    };
                    fired.add(kind, we * f.probability);
                }
            }
        }
    }

    let mut out = EventDistribution([0.0; 7]);
    for kind in EventKind::ALL {
        let p = fired.get(kind);
        if kind == EventKind::NoEvent {
            out.add(kind, p);
        } else {
            out.add(kind, p * cfg.eta_det);
            out.add(EventKind::NoEvent, p * (1.0 - cfg.eta_det));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonic::{reference_residual_after_c, reference_residual_after_e, three_mode_branches};
    use crate::qcore::Amp;
    use crate::sampling::input_rng;

    fn sample_input() -> UnknownState {
        UnknownState::new(Amp::new(0.6, 0.0), Amp::new(0.0, 0.8)).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(EfficiencyConfig::new(1.0, 0.7, 1.0, 1.0).is_ok());
        assert!(matches!(
            EfficiencyConfig::new(1.0, 1.7, 1.0, 1.0),
            Err(Error::ProbabilityOutOfRange { name: "eta_det", .. })
        ));
    }

    #[test]
    fn event_codes_round_trip() {
        for k in EventKind::ALL {
            assert_eq!(EventKind::from_code(k.code()), Some(k));
        }
    }

    #[test]
    fn region_c_on_three_mode_state() {
        let u = sample_input();
        let s = build_three_mode(&u);
        let br = stage_branches(&s, PhotonBell::ChiMinus, 1.0).unwrap();
        assert!((br[0].probability - 0.25).abs() < 1e-12);
        // residual has no χ⁻ component
        let residual = absorption_stage(&s, 1.0, 0.9).unwrap();
        assert!(!residual.absorbed);
        let p = Operator::projector(&PhotonBell::ChiMinus.state()).unwrap().embed(3, &[0, 1]).unwrap();
        assert!(p.expectation(residual.post.as_state()).unwrap().norm() < 1e-12);
        // absorbed: Bob holds −a|L⟩ − b|R⟩
        let hit = absorption_stage(&s, 1.0, 0.1).unwrap();
        assert!(hit.absorbed);
        let bob = hit.post.as_state().factor_out(&[2]).unwrap();
        let want = StateVector::from_amplitudes(vec![-u.b(), -u.a()]).unwrap();
        assert!(fidelity(&bob, &want).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn orthogonal_input_never_absorbed() {
        let s = PolarizationState::new(crate::qcore::tensor(
            &PhotonBell::GammaPlus.state(),
            &StateVector::up(),
        ));
        for r in [0.0, 0.5, 0.999] {
            let out = absorption_stage(&s, 1.0, r).unwrap();
            assert!(!out.absorbed);
            assert!(out.post.as_state().max_abs_diff(s.as_state()).unwrap() < 1e-15);
        }
        assert!(absorption_stage(&s, 1.0, 1.5).is_err());
    }

    #[test]
    fn residuals_match_closed_forms() {
        for i in 0..100 {
            let u = UnknownState::haar(&mut input_rng(i));
            let c = absorption_stage(&build_three_mode(&u), 1.0, 0.99).unwrap();
            let after_c = waveplate(&c.post, 1).unwrap();
            let want = reference_residual_after_c(&u).unwrap();
            assert!(fidelity(after_c.as_state(), want.as_state()).unwrap() > 1.0 - 1e-12);
            let e = absorption_stage(&after_c, 1.0, 0.99).unwrap();
            assert!(!e.absorbed);
            let want = reference_residual_after_e(&u).unwrap();
            assert!(fidelity(e.post.as_state(), want.as_state()).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn region_f_splits_evenly() {
        let u = sample_input();
        let s = reference_residual_after_e(&u).unwrap();
        let br = stage_branches(&s, PhotonBell::ChiPlus, 1.0).unwrap();
        assert_eq!(br.len(), 2);
        assert!((br[0].probability - 0.5).abs() < 1e-12);
        assert!((br[1].probability - 0.5).abs() < 1e-12);

        let (kind, d4) = stage_f(&s, 1.0, 0.2).unwrap();
        assert_eq!(kind, EventKind::D4);
        let bob = d4.post.as_state().factor_out(&[2]).unwrap();
        assert!(fidelity(&bob, &u.state()).unwrap() > 1.0 - 1e-12);

        let (kind, d3) = stage_f(&s, 1.0, 0.7).unwrap();
        assert_eq!(kind, EventKind::D3Coincidence);
        let bob = d3.post.as_state().factor_out(&[2]).unwrap();
        let chi_plus_branch = StateVector::from_amplitudes(vec![u.b(), -u.a()]).unwrap();
        assert!(fidelity(&bob, &chi_plus_branch).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn ideal_distribution_is_uniform() {
        let d = analytic_distribution(&sample_input(), &EfficiencyConfig::IDEAL).unwrap();
        let want = [0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0];
        for (got, w) in d.0.iter().zip(want) {
            assert!((got - w).abs() < 1e-12);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_pair_means_single_top_or_nothing() {
        let cfg = EfficiencyConfig::new(1.0, 1.0, 0.3, 0.0).unwrap();
        let d = analytic_distribution(&sample_input(), &cfg).unwrap();
        assert!((d.get(EventKind::D3SingleTop) - 0.3).abs() < 1e-15);
        assert!((d.get(EventKind::NoEvent) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn lossy_absorption_tree() {
        // Hand enumeration for eta_abs = η, all else ideal. A failed region
        // leaves the state untouched, so every region sees its target with
        // weight 1/4:
        //   D1 = η/4, D2 = (1 − η/4) η/4, D4 = (1 − η/4)² η/4, D3C = (1 − η/4)³
        let eta = 0.5;
        let q = 1.0 - eta / 4.0;
        let want = [eta / 4.0, q * eta / 4.0, q * q * eta / 4.0, q * q * q];
        assert_eq!(want, [0.125, 0.109375, 0.095703125, 0.669921875]);
        let cfg = EfficiencyConfig::new(eta, 1.0, 1.0, 1.0).unwrap();
        let d = analytic_distribution(&sample_input(), &cfg).unwrap();
        for (k, w) in EventKind::IDENTIFYING.iter().zip(want) {
            assert!((d.get(*k) - w).abs() < 1e-12, "{k}");
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_input_fires_lower_d3() {
        let cfg = EfficiencyConfig::new(1.0, 1.0, 0.0, 1.0).unwrap();
        for seed in 0..10 {
            let rec = run_cascade(&sample_input(), &cfg, seed).unwrap();
            assert_eq!(rec.event.kind, EventKind::D3SingleLower);
            assert!(rec.bob_pre.is_none() && rec.fidelity.is_none());
        }
    }

    #[test]
    fn ideal_cascade_always_teleports() {
        for seed in 0..200 {
            let u = UnknownState::haar(&mut input_rng(seed));
            let rec = run_cascade(&u, &EfficiencyConfig::IDEAL, seed).unwrap();
            assert!(rec.event.kind.is_identifying());
            assert!(rec.fidelity.unwrap() > 1.0 - 1e-10);
            // Bob's uncorrected qubit is the closed-form branch for the label.
            let label = rec.event.original_bell.unwrap();
            let br = three_mode_branches(&u).into_iter().find(|b| b.label == label).unwrap();
            assert!(fidelity(rec.bob_pre.as_ref().unwrap(), &br.bob).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn stream_is_reproducible() {
        let cfg = EfficiencyConfig::new(0.8, 0.7, 0.9, 0.9).unwrap();
        let u = sample_input();
        assert_eq!(run_cascade(&u, &cfg, 9).unwrap(), run_cascade(&u, &cfg, 9).unwrap());
    }
}

//! Photonic Bell analysis by cascaded two-photon absorption.
//!
//! Polarization modes map onto qubits with `|R⟩ ≡ |↑⟩` and `|L⟩ ≡ |↓⟩`; in a
//! three-mode register mode `k₁` is qubit 0, `k₂` qubit 1 and `k₃` (Bob's
//! mode) qubit 2. The two-photon Bell analogs on `(k₁, k₂)` are
//!
//! ```text
//! χ± = √½(|RL⟩ ± |LR⟩)     γ± = √½(|RR⟩ ± |LL⟩)
//! ```
//!
//! The analyzer is three absorption regions in series. Regions C and E absorb
//! only the zero-spin pair `χ⁻`; a half-wave plate on `k₂` between them moves
//! `γ⁺` into the `χ⁻` slot. Region F absorbs only the `S_z = 0` pair `χ⁺`
//! (the selection-rule argument reduces to that projector); a pair that
//! survives all three regions reaches the two D3 detectors in coincidence.

mod cascade;

pub use cascade::{
    absorption_stage, analytic_distribution, run_cascade, stage_f, CascadeEvent, CascadeRecord,
    EfficiencyConfig, EventDistribution, EventKind, Stage, StageResult,
};

use std::fmt;

use crate::error::Result;
use crate::observables::{bell_state, BellOutcome};
use crate::qcore::{gates, tensor, Amp, Operator, StateVector};
use crate::teleport::UnknownState;

/// Normalized polarization state of one photon per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationState(StateVector);

impl PolarizationState {
    pub fn new(s: StateVector) -> Self {
        Self(s)
    }

    pub fn as_state(&self) -> &StateVector {
        &self.0
    }

    pub fn into_state(self) -> StateVector {
        self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.n_qubits()
    }
}

/// Two-photon Bell analogs on modes `(k₁, k₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhotonBell {
    ChiPlus,
    ChiMinus,
    GammaPlus,
    GammaMinus,
}

impl PhotonBell {
    pub const ALL: [PhotonBell; 4] = [Self::ChiPlus, Self::ChiMinus, Self::GammaPlus, Self::GammaMinus];

    /// The spin Bell state with the same amplitudes under `R ≡ ↑`, `L ≡ ↓`.
    pub fn analog(self) -> BellOutcome {
        match self {
            Self::ChiPlus => BellOutcome::PsiPlus,
            Self::ChiMinus => BellOutcome::PsiMinus,
            Self::GammaPlus => BellOutcome::PhiPlus,
            Self::GammaMinus => BellOutcome::PhiMinus,
        }
    }

    pub fn from_analog(b: BellOutcome) -> Self {
        match b {
            BellOutcome::PsiPlus => Self::ChiPlus,
            BellOutcome::PsiMinus => Self::ChiMinus,
            BellOutcome::PhiPlus => Self::GammaPlus,
            BellOutcome::PhiMinus => Self::GammaMinus,
        }
    }

    pub fn state(self) -> StateVector {
        bell_state(self.analog())
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ChiPlus => "chi+",
            Self::ChiMinus => "chi-",
            Self::GammaPlus => "gamma+",
            Self::GammaMinus => "gamma-",
        }
    }
}

impl fmt::Display for PhotonBell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Down-converted pair on `(k₂, k₃)`: `√½(|RR⟩ − |LL⟩)`.
pub fn pdc_state() -> PolarizationState {
    PolarizationState(PhotonBell::GammaMinus.state())
}

/// Half-wave plate: `|R⟩ → |L⟩`, `|L⟩ → −|R⟩`.
pub fn waveplate_operator() -> Operator {
    Operator::from_real_rows([[0.0, -1.0], [1.0, 0.0]])
}

/// Applies the half-wave plate to one mode (qubit index).
pub fn waveplate(s: &PolarizationState, mode: usize) -> Result<PolarizationState> {
    Ok(PolarizationState(s.0.apply(&waveplate_operator(), &[mode])?))
}

/// The pair as it leaves the source path with the plate inserted in `k₂`:
/// `√½(|RL⟩ + |LR⟩)`.
pub fn plated_pair() -> Result<PolarizationState> {
    waveplate(&pdc_state(), 0)
}

/// Three-mode state entering region C: the unknown photon in `k₁` next to
/// the source pair on `(k₂, k₃)`.
///
/// Its `(k₁, k₂)` Bell-analog expansion is
///
/// ```text
/// ½ [ χ⁺(−aL + bR) + χ⁻(−aL − bR) + γ⁺(aR − bL) + γ⁻(aR + bL) ]
/// ```
///
/// which is what the region C/E/F detector assignments and the correction
/// table below are written against. Passing the pair through the `k₂` plate
/// first ([`plated_pair`]) gives the same state with `W` applied on `k₂`; see
/// [`three_mode_with_plated_pair`].
pub fn build_three_mode(input: &UnknownState) -> PolarizationState {
    PolarizationState(tensor(&input.state(), pdc_state().as_state()))
}

/// `|φ⟩ ⊗ √½(|RL⟩ + |LR⟩)`.
pub fn three_mode_with_plated_pair(input: &UnknownState) -> Result<PolarizationState> {
    Ok(PolarizationState(tensor(&input.state(), plated_pair()?.as_state())))
}

/// One term `½ |β⟩_{k₁k₂} ⊗ |bob⟩_{k₃}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonBranch {
    pub label: PhotonBell,
    pub bob: StateVector,
    pub coefficient: f64,
}

fn rl(r: Amp, l: Amp) -> StateVector {
    StateVector::from_amplitudes(vec![r, l]).expect("finite amplitudes")
}

/// Closed-form expansion of [`build_three_mode`].
pub fn three_mode_branches(input: &UnknownState) -> Vec<PhotonBranch> {
    let (a, b) = (input.a(), input.b());
    [
        (PhotonBell::ChiPlus, rl(b, -a)),
        (PhotonBell::ChiMinus, rl(-b, -a)),
        (PhotonBell::GammaPlus, rl(a, -b)),
        (PhotonBell::GammaMinus, rl(a, b)),
    ]
    .into_iter()
    .map(|(label, bob)| PhotonBranch {
        label,
        bob,
        coefficient: 0.5,
    })
    .collect()
}

fn superpose(terms: &[(PhotonBell, StateVector)]) -> Result<PolarizationState> {
    let mut amps = vec![Amp::new(0.0, 0.0); 8];
    for (label, bob) in terms {
        for (acc, t) in amps.iter_mut().zip(tensor(&label.state(), bob).amplitudes()) {
            *acc += t;
        }
    }
    Ok(PolarizationState(StateVector::normalized_from(amps)?))
}

/// Residual after region C (no absorption) and the second `k₂` plate, in
/// closed form, normalized:
/// `γ⁻(aL − bR) + χ⁻(aR − bL) + χ⁺(aR + bL)`.
pub fn reference_residual_after_c(input: &UnknownState) -> Result<PolarizationState> {
    let (a, b) = (input.a(), input.b());
    superpose(&[
        (PhotonBell::GammaMinus, rl(-b, a)),
        (PhotonBell::ChiMinus, rl(a, -b)),
        (PhotonBell::ChiPlus, rl(a, b)),
    ])
}

/// Residual after region E (no absorption), normalized:
/// `γ⁻(aL − bR) + χ⁺(aR + bL)`.
pub fn reference_residual_after_e(input: &UnknownState) -> Result<PolarizationState> {
    let (a, b) = (input.a(), input.b());
    superpose(&[
        (PhotonBell::GammaMinus, rl(-b, a)),
        (PhotonBell::ChiPlus, rl(a, b)),
    ])
}

/// Polarization operation on `k₃` that maps Bob's branch for `label` (in the
/// labelling of [`three_mode_branches`]) onto `a|R⟩ + b|L⟩` up to phase.
pub fn correction_for_photonic(label: PhotonBell) -> Operator {
    match label {
        PhotonBell::GammaMinus => Operator::identity(2),
        PhotonBell::GammaPlus => gates::pauli_z(),
        PhotonBell::ChiMinus => gates::pauli_x(),
        PhotonBell::ChiPlus => waveplate_operator(),
    }
}

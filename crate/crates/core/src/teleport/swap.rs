use super::correction_for;
use crate::error::Result;
use crate::observables::{bell_measure, bell_state, BellOutcome};
use crate::qcore::{fidelity, partial_trace, tensor, DensityMatrix, StateVector};
use crate::sampling::{trial_rng, unit};

/// Result of teleporting one half of a singlet.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapRecord {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// State of qubits (0, 3) after Bob's correction.
    pub final_pair: StateVector,
    /// Fidelity of `final_pair` with the singlet.
    pub fidelity: f64,
    pub reduced_before: DensityMatrix,
    pub reduced_after: DensityMatrix,
    pub rng_seed: u64,
}

/// Entanglement swapping: qubits (0, 1) and (2, 3) start as singlets, Alice
/// Bell-measures (1, 2) and Bob corrects qubit 3 as in ordinary
/// teleportation. Qubits 0 and 3 end up in a singlet although they never
/// interacted.
pub fn run_entangled_input(rng_seed: u64) -> Result<SwapRecord> {
    let mut rng = trial_rng(rng_seed);
    let singlet = bell_state(BellOutcome::PsiMinus);
    let start = tensor(&singlet, &singlet);
    let reduced_before = partial_trace(&start, &[0])?;
    let m = bell_measure(&start, (1, 2), unit(&mut rng))?;
    let corrected = m.post_state.apply(&correction_for(m.outcome), &[3])?;
    let final_pair = corrected.factor_out(&[0, 3])?;
    let reduced_after = partial_trace(&corrected, &[0])?;
    Ok(SwapRecord {
        outcome: m.outcome,
        probability: m.probability,
        fidelity: fidelity(&final_pair, &singlet)?,
        final_pair,
        reduced_before,
        reduced_after,
        rng_seed,
    })
}

//! Spin-1/2 teleportation through a shared singlet.
//!
//! Qubit 0 carries the unknown state, qubits 1 and 2 the singlet; Alice owns
//! qubits 0 and 1, Bob owns qubit 2.

mod baseline;
mod swap;

pub use baseline::{run_baseline_computational, BaselineOutcome, BaselineRecord, ProductOutcome};
pub use swap::{run_entangled_input, SwapRecord};

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::observables::{bell_measure, bell_state, BellOutcome};
use crate::qcore::{fidelity, gates, tensor, Amp, DensityMatrix, Operator, StateVector};
use crate::sampling::{trial_rng, unit};
use crate::tol;

/// `a|↑⟩ + b|↓⟩`, the state to be teleported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnknownState {
    a: Amp,
    b: Amp,
}

impl UnknownState {
    pub fn new(a: Amp, b: Amp) -> Result<Self> {
        if ![a.re, a.im, b.re, b.im].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr = a.norm_sqr() + b.norm_sqr();
        if (norm_sqr - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { a, b })
    }

    pub fn real(a: f64, b: f64) -> Result<Self> {
        Self::new(Amp::new(a, 0.0), Amp::new(b, 0.0))
    }

    /// Uniform on the Bloch sphere: `a = cos(θ/2)`, `b = e^{iφ} sin(θ/2)` with
    /// `cos θ` uniform on `[−1, 1]` and `φ` uniform on `[0, 2π)`.
    pub fn haar(rng: &mut impl Rng) -> Self {
        let cos_theta: f64 = 2.0 * unit(rng) - 1.0;
        let phi = std::f64::consts::TAU * unit(rng);
        let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
        Self {
            a: Amp::new(half.cos(), 0.0),
            b: Amp::from_polar(half.sin(), phi),
        }
    }

    pub fn a(&self) -> Amp {
        self.a
    }

    pub fn b(&self) -> Amp {
        self.b
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_amplitudes(vec![self.a, self.b]).expect("two finite amplitudes")
    }
}

/// Two classical bits naming Alice's outcome.
///
/// Encoding: `Ψ⁻ = 00`, `Ψ⁺ = 01`, `Φ⁻ = 10`, `Φ⁺ = 11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassicalMessage(u8);

impl ClassicalMessage {
    pub fn encode(outcome: BellOutcome) -> Self {
        Self(match outcome {
            BellOutcome::PsiMinus => 0b00,
            BellOutcome::PsiPlus => 0b01,
            BellOutcome::PhiMinus => 0b10,
            BellOutcome::PhiPlus => 0b11,
        })
    }

    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 4).then_some(Self(bits))
    }

    pub fn decode(self) -> BellOutcome {
        match self.0 {
            0b00 => BellOutcome::PsiMinus,
            0b01 => BellOutcome::PsiPlus,
            0b10 => BellOutcome::PhiMinus,
            _ => BellOutcome::PhiPlus,
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

impl fmt::Display for ClassicalMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

/// `√½(|↑↓⟩ − |↓↑⟩)`
pub fn prepare_singlet() -> StateVector {
    bell_state(BellOutcome::PsiMinus)
}

/// `|φ⟩ ⊗ |Ψ⁻⟩`, the three-qubit state before Alice measures.
pub fn joint_state(input: &UnknownState) -> StateVector {
    tensor(&input.state(), &prepare_singlet())
}

/// One term `coefficient · |β⟩₀₁ ⊗ |bob⟩₂` of the joint state expanded over
/// Alice's Bell basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: BellOutcome,
    pub bob: StateVector,
    pub coefficient: f64,
}

/// Bell-basis expansion of `|φ⟩|Ψ⁻⟩` written out in closed form:
///
/// ```text
/// ½ [ Ψ⁻(−a↑ − b↓) + Ψ⁺(−a↑ + b↓) + Φ⁻(b↑ + a↓) + Φ⁺(−b↑ + a↓) ]
/// ```
pub fn branch_decomposition(input: &UnknownState) -> Vec<Branch> {
    let (a, b) = (input.a, input.b);
    let bob = |up: Amp, down: Amp| StateVector::from_amplitudes(vec![up, down]).expect("finite");
    vec![
        Branch {
            outcome: BellOutcome::PsiMinus,
            bob: bob(-a, -b),
            coefficient: 0.5,
        },
        Branch {
            outcome: BellOutcome::PsiPlus,
            bob: bob(-a, b),
            coefficient: 0.5,
        },
        Branch {
            outcome: BellOutcome::PhiMinus,
            bob: bob(b, a),
            coefficient: 0.5,
        },
        Branch {
            outcome: BellOutcome::PhiPlus,
            bob: bob(-b, a),
            coefficient: 0.5,
        },
    ]
}

/// `Σ coefficient · |β⟩ ⊗ |bob⟩`
pub fn reassemble(branches: &[Branch]) -> Result<StateVector> {
    let mut acc: Option<Vec<Amp>> = None;
    for br in branches {
        let term = tensor(&bell_state(br.outcome), &br.bob).scaled(Amp::new(br.coefficient, 0.0));
        acc = Some(match acc {
            None => term.into_amplitudes(),
            Some(v) => v.iter().zip(term.amplitudes()).map(|(x, y)| x + y).collect(),
        });
    }
    StateVector::from_amplitudes(acc.ok_or(Error::EmptyQubitList)?)
}

/// Bob's unitary for each outcome, defined up to global phase.
pub fn correction_for(outcome: BellOutcome) -> Operator {
    match outcome {
        BellOutcome::PsiMinus => Operator::identity(2),
        BellOutcome::PsiPlus => gates::pauli_z(),
        BellOutcome::PhiMinus => gates::pauli_x(),
        BellOutcome::PhiPlus => &gates::pauli_x() * &gates::pauli_z(),
    }
}

/// Outcome-averaged density matrix of Bob's qubit before any correction.
pub fn bob_average_state(input: &UnknownState) -> Result<DensityMatrix> {
    let branches = branch_decomposition(input);
    DensityMatrix::mixture(
        branches
            .iter()
            .map(|b| (b.coefficient * b.coefficient * b.bob.norm_sqr(), &b.bob)),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub input: UnknownState,
    pub outcome: BellOutcome,
    pub probability: f64,
    pub message: ClassicalMessage,
    pub bob_pre: StateVector,
    pub bob_post: StateVector,
    pub fidelity: f64,
    pub rng_seed: u64,
}

/// Runs the protocol end to end: Bell measurement on qubits (0, 1), two-bit
/// message, Bob's correction on qubit 2.
pub fn run_trial(input: &UnknownState, rng_seed: u64) -> Result<TrialRecord> {
    let mut rng = trial_rng(rng_seed);
    let joint = joint_state(input);
    let m = bell_measure(&joint, (0, 1), unit(&mut rng))?;
    let message = ClassicalMessage::encode(m.outcome);
    let bob_pre = m.post_state.factor_out(&[2])?;
    let bob_post = bob_pre.apply(&correction_for(message.decode()), &[0])?;
    let fidelity = fidelity(&bob_post, &input.state())?;
    Ok(TrialRecord {
        input: *input,
        outcome: m.outcome,
        probability: m.probability,
        message,
        bob_pre,
        bob_post,
        fidelity,
        rng_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{bell_probabilities, build_spin_observables};
    use crate::qcore::partial_trace;
    use crate::sampling::input_rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn random_inputs(n: u64) -> impl Iterator<Item = UnknownState> {
        (0..n).map(|i| UnknownState::haar(&mut input_rng(1000 + i)))
    }

    #[test]
    fn singlet_amplitudes_and_reductions() {
        let s = prepare_singlet();
        let want = [0.0, H, -H, 0.0];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15);
        }
        for q in 0..2 {
            let rho = partial_trace(&s, &[q]).unwrap();
            assert!(rho.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
        }
        let obs = build_spin_observables();
        assert!(obs.s_total_sq.expectation(&s).unwrap().norm() < 1e-15);
    }

    #[test]
    fn joint_state_for_up_input() {
        // a=1, b=0: √½(|↑↑↓⟩ − |↑↓↑⟩)
        let s = joint_state(&UnknownState::real(1.0, 0.0).unwrap());
        let mut want = vec![Amp::new(0.0, 0.0); 8];
        want[0b001] = Amp::new(H, 0.0);
        want[0b010] = Amp::new(-H, 0.0);
        let want = StateVector::from_amplitudes(want).unwrap();
        assert!(s.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn unknown_state_validation() {
        assert!(UnknownState::real(0.6, 0.8).is_ok());
        assert!(matches!(
            UnknownState::real(0.6, 0.6),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(UnknownState::real(f64::NAN, 0.0), Err(Error::NonFinite));
    }

    #[test]
    fn haar_inputs_are_normalized() {
        for u in random_inputs(200) {
            assert!((u.a.norm_sqr() + u.b.norm_sqr() - 1.0).abs() < 1e-14);
            assert!(u.a.im == 0.0 && u.a.re >= 0.0);
        }
    }

    #[test]
    fn message_encoding_is_bijective() {
        for b in BellOutcome::ALL {
            let m = ClassicalMessage::encode(b);
            assert_eq!(m.decode(), b);
            assert_eq!(ClassicalMessage::from_bits(m.bits()), Some(m));
        }
        assert_eq!(ClassicalMessage::encode(BellOutcome::PsiMinus).to_string(), "00");
        assert_eq!(ClassicalMessage::encode(BellOutcome::PhiPlus).to_string(), "11");
        assert_eq!(ClassicalMessage::from_bits(4), None);
    }

    #[test]
    fn decomposition_special_cases() {
        let up = UnknownState::real(1.0, 0.0).unwrap();
        let br = branch_decomposition(&up);
        assert_eq!(br[0].outcome, BellOutcome::PsiMinus);
        let minus_up = StateVector::up().scaled(Amp::new(-1.0, 0.0));
        assert!(br[0].bob.max_abs_diff(&minus_up).unwrap() < 1e-15);

        let down = UnknownState::real(0.0, 1.0).unwrap();
        let br = branch_decomposition(&down);
        assert_eq!(br[2].outcome, BellOutcome::PhiMinus);
        assert!(br[2].bob.max_abs_diff(&StateVector::up()).unwrap() < 1e-15);
    }

    #[test]
    fn decomposition_reassembles_joint_state() {
        // Oracle: explicit tensor product of the input and the singlet.
        for u in random_inputs(100) {
            let back = reassemble(&branch_decomposition(&u)).unwrap();
            assert!(back.max_abs_diff(&joint_state(&u)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn corrections_are_unitary_and_restore_input() {
        for b in BellOutcome::ALL {
            assert!(correction_for(b).unitarity_defect() < 1e-12);
        }
        for u in random_inputs(100) {
            for br in branch_decomposition(&u) {
                let fixed = br.bob.apply(&correction_for(br.outcome), &[0]).unwrap();
                assert!(fidelity(&fixed, &u.state()).unwrap() > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn wrong_corrections_fail_for_generic_inputs() {
        for u in random_inputs(100) {
            for br in branch_decomposition(&u) {
                for wrong in BellOutcome::ALL.into_iter().filter(|&w| w != br.outcome) {
                    let fixed = br.bob.apply(&correction_for(wrong), &[0]).unwrap();
                    assert!(fidelity(&fixed, &u.state()).unwrap() < 1.0 - 1e-6);
                }
            }
        }
    }

    #[test]
    fn basis_and_equal_superposition_teleport() {
        for u in [
            UnknownState::real(1.0, 0.0).unwrap(),
            UnknownState::real(H, H).unwrap(),
        ] {
            for seed in 0..20 {
                let rec = run_trial(&u, seed).unwrap();
                assert!(rec.fidelity > 1.0 - 1e-10);
                assert!(rec.bob_post.is_normalized());
                // Branch oracle: Bob's collapsed qubit is the closed-form branch.
                let br = branch_decomposition(&u)
                    .into_iter()
                    .find(|b| b.outcome == rec.outcome)
                    .unwrap();
                assert!(fidelity(&rec.bob_pre, &br.bob).unwrap() > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn analytic_branch_weights_are_quarter() {
        for u in random_inputs(100) {
            for p in bell_probabilities(&joint_state(&u), (0, 1)).unwrap() {
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_plus_branch_matches_closed_form() {
        let u = UnknownState::new(Amp::new(0.6, 0.0), Amp::new(0.0, 0.8)).unwrap();
        let joint = joint_state(&u);
        // Cumulative order Ψ⁺, Ψ⁻, Φ⁺, Φ⁻: 0.6 lands in Φ⁺.
        let m = bell_measure(&joint, (0, 1), 0.6).unwrap();
        assert_eq!(m.outcome, BellOutcome::PhiPlus);
        let bob = m.post_state.factor_out(&[2]).unwrap();
        let want = StateVector::from_amplitudes(vec![-u.b, u.a]).unwrap();
        assert!(fidelity(&bob, &want).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn deterministic_under_seed() {
        let u = UnknownState::haar(&mut input_rng(5));
        assert_eq!(run_trial(&u, 77).unwrap(), run_trial(&u, 77).unwrap());
    }

    #[test]
    fn bob_average_is_maximally_mixed() {
        for u in random_inputs(100) {
            let rho = bob_average_state(&u).unwrap();
            assert!(rho.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-12);
        }
    }
}

//! Linear (interaction-free) Bell analysis used as a reference point.
//!
//! Without an interaction between Alice's two particles only the singlet
//! component can be singled out. The analyzer is modelled as the two-outcome
//! projective measurement `{|Ψ⁻⟩⟨Ψ⁻|, I − |Ψ⁻⟩⟨Ψ⁻|}` on qubits (0, 1); when
//! it does not report the singlet, the pair is read out in the product basis
//! `{|↑↑⟩, |↓↓⟩, |↑↓⟩, |↓↑⟩}` and Bob is left with an uncorrected qubit.

use std::fmt;

use super::{correction_for, joint_state, ClassicalMessage, UnknownState};
use crate::error::Result;
use crate::observables::{bell_state, BellOutcome};
use crate::qcore::{fidelity, measure_projective, Operator, StateVector};
use crate::sampling::{trial_rng, unit};

/// Product-basis outcome of qubits (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductOutcome {
    UpUp,
    DownDown,
    UpDown,
    DownUp,
}

impl ProductOutcome {
    pub const ALL: [ProductOutcome; 4] = [Self::UpUp, Self::DownDown, Self::UpDown, Self::DownUp];

    /// Two-qubit basis index of this product state.
    pub fn basis_index(self) -> usize {
        match self {
            Self::UpUp => 0b00,
            Self::DownDown => 0b11,
            Self::UpDown => 0b01,
            Self::DownUp => 0b10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::UpUp => "UpUp",
            Self::DownDown => "DownDown",
            Self::UpDown => "UpDown",
            Self::DownUp => "DownUp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineOutcome {
    Singlet,
    Product(ProductOutcome),
}

impl fmt::Display for BaselineOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Singlet => f.write_str(BellOutcome::PsiMinus.name()),
            Self::Product(p) => f.write_str(p.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRecord {
    pub input: UnknownState,
    pub outcome: BaselineOutcome,
    pub success: bool,
    /// Sent only when the singlet was identified.
    pub message: Option<ClassicalMessage>,
    pub bob_pre: StateVector,
    pub bob_post: StateVector,
    pub fidelity: f64,
    pub rng_seed: u64,
}

fn analyzer_projectors() -> Result<[Operator; 2]> {
    let singlet = Operator::projector(&bell_state(BellOutcome::PsiMinus))?;
    let rest = &Operator::identity(4) - &singlet;
    Ok([singlet.embed(3, &[0, 1])?, rest.with_hermitian_hint(true).embed(3, &[0, 1])?])
}

fn product_projectors() -> Result<Vec<Operator>> {
    ProductOutcome::ALL
        .iter()
        .map(|p| Operator::projector(&StateVector::basis(2, p.basis_index())?)?.embed(3, &[0, 1]))
        .collect()
}

/// Runs one trial of the linear scheme. Returns `(success, record)`.
pub fn run_baseline_computational(input: &UnknownState, rng_seed: u64) -> Result<(bool, BaselineRecord)> {
    let mut rng = trial_rng(rng_seed);
    let joint = joint_state(input);
    let first = measure_projective(&joint, &analyzer_projectors()?, unit(&mut rng))?;
    let success = first.outcome_index == 0;
    let (outcome, post, message) = if success {
        (
            BaselineOutcome::Singlet,
            first.post_state,
            Some(ClassicalMessage::encode(BellOutcome::PsiMinus)),
        )
    } else {
        let second = measure_projective(&first.post_state, &product_projectors()?, unit(&mut rng))?;
        (
            BaselineOutcome::Product(ProductOutcome::ALL[second.outcome_index]),
            second.post_state,
            None,
        )
    };
    let bob_pre = post.factor_out(&[2])?;
    let bob_post = if success {
        bob_pre.apply(&correction_for(BellOutcome::PsiMinus), &[0])?
    } else {
        bob_pre.clone()
    };
    let fidelity = fidelity(&bob_post, &input.state())?;
    Ok((
        success,
        BaselineRecord {
            input: *input,
            outcome,
            success,
            message,
            bob_pre,
            bob_post,
            fidelity,
            rng_seed,
        },
    ))
}

//! Dense complex linear algebra and projective measurement for registers of
//! a handful of qubits.

mod density;
mod measure;
mod operator;
mod state;

pub use density::{partial_trace, DensityMatrix};
pub use measure::{born_probabilities, measure_projective, MeasurementResult};
pub use operator::{gates, Operator};
pub use state::{apply, fidelity, tensor, StateVector};

use crate::error::{Error, Result};

/// Complex amplitude.
pub type Amp = num_complex::Complex64;

pub(crate) fn check_qubits(qubits: &[usize], n_qubits: usize) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::EmptyQubitList);
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

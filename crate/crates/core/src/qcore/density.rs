use super::operator::Operator;
use super::state::StateVector;
use super::{check_qubits, Amp};

use crate::error::Result;

/// Reduced (possibly mixed) state over a subset of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
}

impl DensityMatrix {
    pub fn pure(s: &StateVector) -> Result<Self> {
        Ok(Self {
            matrix: Operator::projector(s)?,
        })
    }

    /// Maximally mixed state on `n_qubits`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            matrix: Operator::identity(dim).scale(Amp::new(1.0 / dim as f64, 0.0)),
        }
    }

    /// `Σ_k w_k |s_k⟩⟨s_k|` with the states normalized first.
    pub fn mixture<'a>(terms: impl IntoIterator<Item = (f64, &'a StateVector)>) -> Result<Self> {
        let mut acc: Option<Operator> = None;
        for (w, s) in terms {
            let p = Operator::projector(s)?.scale(Amp::new(w, 0.0));
            acc = Some(match acc {
                Some(m) => &m + &p,
                None => p,
            });
        }
        Ok(Self {
            matrix: acc.unwrap_or_else(|| Operator::zeros(2)).with_hermitian_hint(true),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Amp {
        self.matrix.get(row, col)
    }

    pub fn as_operator(&self) -> &Operator {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.hermitian_eigenvalues()[0]
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// `⟨s|ρ|s⟩`
    pub fn fidelity_with_pure(&self, s: &StateVector) -> Result<f64> {
        Ok(self.matrix.expectation(s)?.re.clamp(0.0, 1.0))
    }
}

/// Traces out every qubit not in `keep`. The kept qubits retain the order
/// given in `keep` (first listed is the most significant).
pub fn partial_trace(s: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = s.n_qubits();
    check_qubits(keep, n)?;
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dk = 1usize << k;
    let spread = |sub: usize, qubits: &[usize]| -> usize {
        let m = qubits.len();
        qubits
            .iter()
            .enumerate()
            .map(|(pos, &q)| ((sub >> (m - 1 - pos)) & 1) << (n - 1 - q))
            .sum()
    };
    let kept_idx: Vec<usize> = (0..dk).map(|i| spread(i, keep)).collect();
    let rest_idx: Vec<usize> = (0..1usize << rest.len()).map(|i| spread(i, &rest)).collect();

    let amps = s.amplitudes();
    let mut entries = vec![Amp::new(0.0, 0.0); dk * dk];
    for (r, &ri) in kept_idx.iter().enumerate() {
        for (c, &ci) in kept_idx.iter().enumerate() {
            entries[r * dk + c] = rest_idx
                .iter()
                .map(|&e| amps[ri | e] * amps[ci | e].conj())
                .sum();
        }
    }
    Ok(DensityMatrix {
        matrix: Operator::new(dk, entries)?.with_hermitian_hint(true),
    })
}

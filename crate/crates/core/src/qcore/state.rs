use num_complex::Complex64;

use super::operator::Operator;
use super::{check_qubits, Amp};
use crate::error::{Error, Result};
use crate::tol;

/// Pure state of `n_qubits` qubits as a dense amplitude vector.
///
/// Basis index `i` has qubit `k` in state `(i >> (n - 1 - k)) & 1`, so qubit 0
/// is the most significant bit (the leftmost tensor factor).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amp>,
}

impl StateVector {
    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(amps: Vec<Amp>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm.
    pub fn normalized_from(amps: Vec<Amp>) -> Result<Self> {
        Self::from_amplitudes(amps)?.normalized()
    }

    /// Real-amplitude convenience constructor (normalizes).
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized_from(values.iter().map(|&v| Amp::new(v, 0.0)).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if n_qubits == 0 || index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amps = vec![Amp::new(0.0, 0.0); dim];
        amps[index] = Amp::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// `|↑⟩`
    pub fn up() -> Self {
        Self::basis(1, 0).expect("valid basis index")
    }

    /// `|↓⟩`
    pub fn down() -> Self {
        Self::basis(1, 1).expect("valid basis index")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amp] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amp> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < tol::ALGEBRAIC
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n < tol::DEGENERATE_PROBABILITY {
            return Err(Error::ZeroNorm);
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(self)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Amp> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    pub fn scaled(&self, factor: Amp) -> StateVector {
        StateVector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Entrywise largest absolute difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// Representative of the global-phase class: the first amplitude with
    /// magnitude above `1e-12` is made real and positive.
    pub fn phase_canonical(&self) -> StateVector {
        match self.amps.iter().find(|a| a.norm() > tol::ALGEBRAIC) {
            Some(first) => self.scaled(first.conj() / first.norm()),
            None => self.clone(),
        }
    }

    /// Extracts the state of `keep` qubits when it factors out of the rest.
    ///
    /// Fails with [`Error::NotProductState`] when the kept qubits are
    /// entangled with the remainder.
    pub fn factor_out(&self, keep: &[usize]) -> Result<StateVector> {
        check_qubits(keep, self.n_qubits)?;
        let rho = super::partial_trace(self, keep)?;
        let purity = rho.purity();
        if (purity - 1.0).abs() > 1e-9 {
            return Err(Error::NotProductState { purity });
        }
        let rest: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        // Take the slice through the most heavily weighted configuration of
        // the discarded qubits; for a product state every slice is parallel.
        let best = (0..self.dim())
            .max_by(|&i, &j| self.amps[i].norm_sqr().total_cmp(&self.amps[j].norm_sqr()))
            .unwrap_or(0);
        let k = keep.len();
        let mut out = vec![Amp::new(0.0, 0.0); 1 << k];
        for (sub, slot) in out.iter_mut().enumerate() {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                let bit = (sub >> (k - 1 - pos)) & 1;
                idx |= bit << (self.n_qubits - 1 - q);
            }
            for &q in &rest {
                let shift = self.n_qubits - 1 - q;
                idx |= ((best >> shift) & 1) << shift;
            }
            *slot = self.amps[idx];
        }
        StateVector::normalized_from(out)
    }

    /// Applies `op` to `targets`, acting as identity on every other qubit.
    pub fn apply(&self, op: &Operator, targets: &[usize]) -> Result<StateVector> {
        apply(op, self, targets)
    }
}

/// Tensor product `a ⊗ b`; the qubits of `a` come first.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    StateVector {
        n_qubits: a.n_qubits + b.n_qubits,
        amps,
    }
}

/// Applies `op` on the listed qubits. `targets[0]` maps to the most
/// significant index bit of `op`.
pub fn apply(op: &Operator, s: &StateVector, targets: &[usize]) -> Result<StateVector> {
    check_qubits(targets, s.n_qubits)?;
    let k = targets.len();
    if op.dim() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            found: op.dim(),
        });
    }
    let n = s.n_qubits;
    let shifts: Vec<usize> = targets.iter().map(|&q| n - 1 - q).collect();
    let mask: usize = shifts.iter().map(|&sh| 1usize << sh).sum();
    let scatter = |sub: usize| -> usize {
        shifts
            .iter()
            .enumerate()
            .map(|(pos, &sh)| ((sub >> (k - 1 - pos)) & 1) << sh)
            .sum()
    };
    let offsets: Vec<usize> = (0..op.dim()).map(scatter).collect();

    let mut out = vec![Amp::new(0.0, 0.0); s.dim()];
    for base in (0..s.dim()).filter(|i| i & mask == 0) {
        for (row, &ro) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, &co) in offsets.iter().enumerate() {
                acc += op.get(row, col) * s.amps[base | co];
            }
            out[base | ro] = acc;
        }
    }
    StateVector::from_amplitudes(out)
}

/// `|⟨s|t⟩|²`, clamped to `[0, 1]`. Insensitive to global phase.
pub fn fidelity(s: &StateVector, t: &StateVector) -> Result<f64> {
    Ok(s.inner(t)?.norm_sqr().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn up_tensor_down_is_basis_one() {
        let s = tensor(&StateVector::up(), &StateVector::down());
        assert_eq!(s.n_qubits(), 2);
        let expect = [0.0, 1.0, 0.0, 0.0];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert_eq!(*a, Amp::new(e, 0.0));
        }
    }

    #[test]
    fn uniform_product() {
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let s = tensor(&plus, &plus);
        for a in s.amplitudes() {
            assert!((a - Amp::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(s.is_normalized());
    }

    #[test]
    fn rejects_bad_lengths_and_nan() {
        assert_eq!(
            StateVector::from_amplitudes(vec![Amp::new(1.0, 0.0); 3]),
            Err(Error::NotPowerOfTwo(3))
        );
        assert_eq!(
            StateVector::from_amplitudes(vec![Amp::new(f64::NAN, 0.0), Amp::new(0.0, 0.0)]),
            Err(Error::NonFinite)
        );
        assert_eq!(StateVector::from_real(&[0.0, 0.0]), Err(Error::ZeroNorm));
    }

    #[test]
    fn bit_flip_on_qubit_zero() {
        let s = tensor(&StateVector::up(), &StateVector::down());
        let out = apply(&gates::pauli_x(), &s, &[0]).unwrap();
        let expect = tensor(&StateVector::down(), &StateVector::down());
        assert!(out.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = StateVector::normalized_from(vec![
            Amp::new(0.1, 0.3),
            Amp::new(-0.2, 0.0),
            Amp::new(0.0, 0.7),
            Amp::new(0.4, -0.1),
        ])
        .unwrap();
        let out = apply(&Operator::identity(4), &s, &[0, 1]).unwrap();
        assert!(out.max_abs_diff(&s).unwrap() < 1e-15);
    }

    #[test]
    fn apply_rejects_bad_targets() {
        let s = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            apply(&gates::pauli_x(), &s, &[2]),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
        assert_eq!(
            apply(&Operator::identity(4), &s, &[1, 1]),
            Err(Error::DuplicateQubit(1))
        );
        assert!(matches!(
            apply(&Operator::identity(4), &s, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let up = StateVector::up();
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        assert!((fidelity(&up, &up).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity(&up, &plus).unwrap() - 0.5).abs() < 1e-15);
        let rotated = plus.scaled(Amp::from_polar(1.0, 2.1));
        assert!((fidelity(&plus, &rotated).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&up, &StateVector::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn phase_canonical_removes_global_phase() {
        let s = StateVector::from_amplitudes(vec![Amp::new(0.0, H), Amp::new(-H, 0.0)]).unwrap();
        let c = s.phase_canonical();
        assert!((c.amplitudes()[0] - Amp::new(H, 0.0)).norm() < 1e-15);
        assert!((c.amplitudes()[1] - Amp::new(0.0, H)).norm() < 1e-15);
    }

    #[test]
    fn factor_out_product_and_entangled() {
        let bob = StateVector::normalized_from(vec![Amp::new(0.6, 0.0), Amp::new(0.0, 0.8)]).unwrap();
        let s = tensor(&StateVector::from_real(&[1.0, -1.0]).unwrap(), &bob);
        let got = s.factor_out(&[1]).unwrap();
        assert!((fidelity(&got, &bob).unwrap() - 1.0).abs() < 1e-14);

        let bell = StateVector::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(bell.factor_out(&[0]), Err(Error::NotProductState { .. })));
    }
}

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use super::state::StateVector;
use super::{check_qubits, Amp};
use crate::error::{Error, Result};
use crate::tol;

/// Dense square complex matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Amp>,
    hermitian_hint: bool,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Amp>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            dim,
            entries,
            hermitian_hint: false,
        })
    }

    /// Builds from complex rows. Panics on ragged input; meant for literals.
    pub fn from_rows<const N: usize>(rows: [[Amp; N]; N]) -> Self {
        Self::new(N, rows.into_iter().flatten().collect()).expect("square literal")
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_rows(rows.map(|r| r.map(|v| Amp::new(v, 0.0))))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Amp::new(0.0, 0.0); dim * dim],
            hermitian_hint: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Amp::new(1.0, 0.0);
        }
        m
    }

    /// `|ket⟩⟨bra|`
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch {
                expected: ket.dim(),
                found: bra.dim(),
            });
        }
        let dim = ket.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in ket.amplitudes() {
            for b in bra.amplitudes() {
                entries.push(k * b.conj());
            }
        }
        Ok(Self {
            dim,
            entries,
            hermitian_hint: ket == bra,
        })
    }

    /// Rank-1 projector `|s⟩⟨s|` onto the normalized direction of `s`.
    pub fn projector(s: &StateVector) -> Result<Self> {
        let s = s.clone().normalized()?;
        Self::outer(&s, &s)
    }

    pub fn with_hermitian_hint(mut self, hint: bool) -> Self {
        self.hermitian_hint = hint;
        self
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Amp {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Amp] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![Amp::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Self {
            dim: d,
            entries,
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn scale(&self, factor: Amp) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
            hermitian_hint: self.hermitian_hint && factor.im == 0.0,
        }
    }

    pub fn trace(&self) -> Amp {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `AB − BA`
    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    /// Kronecker product; `self` acts on the leading qubits.
    pub fn kron(&self, other: &Operator) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![Amp::new(0.0, 0.0); d * d];
        for ar in 0..da {
            for ac in 0..da {
                let a = self.get(ar, ac);
                if a == Amp::new(0.0, 0.0) {
                    continue;
                }
                for br in 0..db {
                    for bc in 0..db {
                        entries[(ar * db + br) * d + ac * db + bc] = a * other.get(br, bc);
                    }
                }
            }
        }
        Self {
            dim: d,
            entries,
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
        }
    }

    /// Full-space matrix of `self` acting on `targets` of an `n_qubits`
    /// register, identity elsewhere.
    pub fn embed(&self, n_qubits: usize, targets: &[usize]) -> Result<Self> {
        check_qubits(targets, n_qubits)?;
        let full = 1usize << n_qubits;
        let mut entries = Vec::with_capacity(full * full);
        // Column j of the embedded operator is the image of basis vector j.
        let mut columns = Vec::with_capacity(full);
        for j in 0..full {
            let e = StateVector::basis(n_qubits, j)?;
            columns.push(e.apply(self, targets)?);
        }
        for r in 0..full {
            for col in &columns {
                entries.push(col.amplitudes()[r]);
            }
        }
        Ok(Self {
            dim: full,
            entries,
            hermitian_hint: self.hermitian_hint,
        })
    }

    /// `M|s⟩` over the full space of `s`.
    pub fn apply_to(&self, s: &StateVector) -> Result<StateVector> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.dim(),
            });
        }
        let amps = s.amplitudes();
        let out = (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * amps[c]).sum())
            .collect();
        StateVector::from_amplitudes(out)
    }

    /// `⟨s|M|s⟩`
    pub fn expectation(&self, s: &StateVector) -> Result<Amp> {
        s.inner(&self.apply_to(s)?)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_defect() < tolerance
    }

    /// `max |U†U − I|`
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < tol::ALGEBRAIC
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.entries);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Distinct eigenvalues of a Hermitian operator, merging values that lie
    /// within `tolerance` of each other.
    pub fn distinct_eigenvalues(&self, tolerance: f64) -> Vec<f64> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for v in self.hermitian_eigenvalues() {
            match out.last_mut() {
                Some(cluster) if (v - cluster[cluster.len() - 1]).abs() < tolerance => {
                    cluster.push(v)
                }
                _ => out.push(vec![v]),
            }
        }
        out.iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect()
    }

    /// Orthogonal projector onto the eigenspace of `eigenvalue`, built as the
    /// Lagrange polynomial `Π_{μ≠λ} (M − μ)/(λ − μ)` over `spectrum`.
    pub fn spectral_projector(&self, eigenvalue: f64, spectrum: &[f64]) -> Self {
        let id = Operator::identity(self.dim);
        let mut p = id.clone();
        for &mu in spectrum {
            if (mu - eigenvalue).abs() < tol::EIGEN_MATCH {
                continue;
            }
            let factor = &(self - &id.scale(Amp::new(mu, 0.0))) * &id.scale(Amp::new(1.0 / (eigenvalue - mu), 0.0));
            p = &p * &factor;
        }
        p.hermitian_hint = true;
        p
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let d = self.dim;
        let mut entries = vec![Amp::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == Amp::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        Operator {
            dim: d,
            entries,
            hermitian_hint: false,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
            hermitian_hint: self.hermitian_hint && rhs.hermitian_hint,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
            hermitian_hint: self.hermitian_hint && rhs.hermitian_hint,
        }
    }
}

/// Single-qubit Pauli matrices.
pub mod gates {
    use super::{Amp, Operator};

    pub fn pauli_x() -> Operator {
        Operator::from_real_rows([[0.0, 1.0], [1.0, 0.0]]).with_hermitian_hint(true)
    }

    pub fn pauli_y() -> Operator {
        let i = Amp::new(0.0, 1.0);
        let z = Amp::new(0.0, 0.0);
        Operator::from_rows([[z, -i], [i, z]]).with_hermitian_hint(true)
    }

    pub fn pauli_z() -> Operator {
        Operator::from_real_rows([[1.0, 0.0], [0.0, -1.0]]).with_hermitian_hint(true)
    }
}

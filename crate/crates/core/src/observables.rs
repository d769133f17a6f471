//! Two-particle spin observables and the Bell measurement they define.
//!
//! The squared components `Sx²`, `Sy²`, `Sz²` of the total spin commute with
//! each other and with `S²`, and the four Bell states are their common
//! eigenvectors. Any two squared components already separate all four Bell
//! states, so measuring the pair `(Sz², Sx²)` is a complete Bell measurement.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{gates, measure_projective, Amp, Operator, StateVector};
use crate::tol;

/// `S² , Sx², Sy², Sz²` of two spin-1/2 particles, in units of ħ².
#[derive(Debug, Clone)]
pub struct SpinObservableSet {
    pub sx: Operator,
    pub sy: Operator,
    pub sz: Operator,
    pub s_total_sq: Operator,
    pub sx_sq: Operator,
    pub sy_sq: Operator,
    pub sz_sq: Operator,
}

/// Which observable of [`SpinObservableSet`] is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinObservable {
    TotalSq,
    XSq,
    YSq,
    ZSq,
}

impl SpinObservable {
    pub const ALL: [SpinObservable; 4] = [Self::TotalSq, Self::XSq, Self::YSq, Self::ZSq];

    pub fn symbol(self) -> &'static str {
        match self {
            Self::TotalSq => "S^2",
            Self::XSq => "Sx^2",
            Self::YSq => "Sy^2",
            Self::ZSq => "Sz^2",
        }
    }
}

impl fmt::Display for SpinObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl SpinObservableSet {
    pub fn get(&self, which: SpinObservable) -> &Operator {
        match which {
            SpinObservable::TotalSq => &self.s_total_sq,
            SpinObservable::XSq => &self.sx_sq,
            SpinObservable::YSq => &self.sy_sq,
            SpinObservable::ZSq => &self.sz_sq,
        }
    }

    /// Largest entry of every pairwise commutator among the four squared
    /// observables, keyed by pair.
    pub fn commutator_norms(&self) -> Vec<((SpinObservable, SpinObservable), f64)> {
        let mut out = Vec::with_capacity(6);
        for (i, &a) in SpinObservable::ALL.iter().enumerate() {
            for &b in &SpinObservable::ALL[i + 1..] {
                out.push(((a, b), self.get(a).commutator(self.get(b)).max_abs()));
            }
        }
        out
    }
}

/// Builds `S_i = (σ_i ⊗ I + I ⊗ σ_i)/2`, their squares, and `S²`.
pub fn build_spin_observables() -> SpinObservableSet {
    let half = Amp::new(0.5, 0.0);
    let total = |sigma: Operator| {
        let id = Operator::identity(2);
        (&sigma.kron(&id) + &id.kron(&sigma))
            .scale(half)
            .with_hermitian_hint(true)
    };
    let sx = total(gates::pauli_x());
    let sy = total(gates::pauli_y());
    let sz = total(gates::pauli_z());
    let sx_sq = (&sx * &sx).with_hermitian_hint(true);
    let sy_sq = (&sy * &sy).with_hermitian_hint(true);
    let sz_sq = (&sz * &sz).with_hermitian_hint(true);
    let s_total_sq = (&(&sx_sq + &sy_sq) + &sz_sq).with_hermitian_hint(true);
    SpinObservableSet {
        sx,
        sy,
        sz,
        s_total_sq,
        sx_sq,
        sy_sq,
        sz_sq,
    }
}

/// The four Bell states, labelled as in the usual `Ψ±`, `Φ±` notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellOutcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellOutcome {
    /// Order used for projector lists and tables.
    pub const ALL: [BellOutcome; 4] = [
        Self::PsiPlus,
        Self::PsiMinus,
        Self::PhiPlus,
        Self::PhiMinus,
    ];

    /// Joint eigenvalues `(Sz², Sx²)` in units of ħ².
    pub fn signature(self) -> (f64, f64) {
        match self {
            Self::PsiPlus => (0.0, 1.0),
            Self::PsiMinus => (0.0, 0.0),
            Self::PhiPlus => (1.0, 1.0),
            Self::PhiMinus => (1.0, 0.0),
        }
    }

    pub fn from_signature(sz_sq: f64, sx_sq: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| {
                let (z, x) = b.signature();
                (z - sz_sq).abs() < tol::EIGEN_MATCH && (x - sx_sq).abs() < tol::EIGEN_MATCH
            })
            .ok_or(Error::UnknownSignature { sz_sq, sx_sq })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PsiPlus => "PsiPlus",
            Self::PsiMinus => "PsiMinus",
            Self::PhiPlus => "PhiPlus",
            Self::PhiMinus => "PhiMinus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bell state with the sign convention `Ψ± = √½(|↑↓⟩ ± |↓↑⟩)`,
/// `Φ± = √½(|↑↑⟩ ± |↓↓⟩)`.
pub fn bell_state(label: BellOutcome) -> StateVector {
    let v = match label {
        BellOutcome::PsiPlus => [0.0, 1.0, 1.0, 0.0],
        BellOutcome::PsiMinus => [0.0, 1.0, -1.0, 0.0],
        BellOutcome::PhiPlus => [1.0, 0.0, 0.0, 1.0],
        BellOutcome::PhiMinus => [1.0, 0.0, 0.0, -1.0],
    };
    StateVector::from_real(&v).expect("nonzero literal")
}

/// One row of the joint eigenvalue table, in units of ħ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenRow {
    pub s_sq: f64,
    pub sx_sq: f64,
    pub sy_sq: f64,
    pub sz_sq: f64,
}

impl EigenRow {
    pub fn value(&self, which: SpinObservable) -> f64 {
        match which {
            SpinObservable::TotalSq => self.s_sq,
            SpinObservable::XSq => self.sx_sq,
            SpinObservable::YSq => self.sy_sq,
            SpinObservable::ZSq => self.sz_sq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenTable {
    pub rows: Vec<(BellOutcome, EigenRow)>,
}

impl EigenTable {
    pub fn row(&self, label: BellOutcome) -> EigenRow {
        self.rows
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, r)| *r)
            .expect("table holds every Bell state")
    }

    /// Largest absolute deviation from `other`.
    pub fn max_deviation(&self, other: &EigenTable) -> f64 {
        BellOutcome::ALL
            .iter()
            .flat_map(|&b| {
                let (x, y) = (self.row(b), other.row(b));
                SpinObservable::ALL.map(move |o| (x.value(o) - y.value(o)).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Measures every Bell state against every observable, demanding an
/// eigenvector residual below `1e-10`.
pub fn verify_eigen_table(obs: &SpinObservableSet) -> Result<EigenTable> {
    let mut rows = Vec::with_capacity(4);
    for label in BellOutcome::ALL {
        let beta = bell_state(label);
        let mut vals = [0.0; 4];
        for (slot, which) in vals.iter_mut().zip(SpinObservable::ALL) {
            let image = obs.get(which).apply_to(&beta)?;
            let lambda = beta.inner(&image)?.re;
            let residual = image
                .max_abs_diff(&beta.scaled(Amp::new(lambda, 0.0)))?;
            if residual > tol::EIGEN {
                return Err(Error::EigenTableViolation {
                    state: label.to_string(),
                    observable: which.to_string(),
                    residual,
                });
            }
            *slot = lambda;
        }
        rows.push((
            label,
            EigenRow {
                s_sq: vals[0],
                sx_sq: vals[1],
                sy_sq: vals[2],
                sz_sq: vals[3],
            },
        ));
    }
    Ok(EigenTable { rows })
}

/// A pair of observables measured together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservablePair(pub SpinObservable, pub SpinObservable);

impl ObservablePair {
    /// Joint eigenvalues of each Bell state under this pair, in
    /// [`BellOutcome::ALL`] order.
    pub fn signatures(&self, table: &EigenTable) -> [(f64, f64); 4] {
        BellOutcome::ALL.map(|b| {
            let r = table.row(b);
            (r.value(self.0), r.value(self.1))
        })
    }

    /// True when every Bell state gets a different joint signature.
    pub fn distinguishes_all(&self, table: &EigenTable) -> bool {
        let sig = self.signatures(table);
        sig.iter().enumerate().all(|(i, a)| {
            sig[i + 1..].iter().all(|b| {
                (a.0 - b.0).abs() > tol::EIGEN_MATCH || (a.1 - b.1).abs() > tol::EIGEN_MATCH
            })
        })
    }
}

impl fmt::Display for ObservablePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Pairs of observables whose joint eigenvalues resolve the whole Bell basis.
///
/// Every pair drawn from the four observables is screened against the
/// computed eigenvalue table; only the three squared-component pairs survive.
pub fn minimal_pairs(obs: &SpinObservableSet) -> Result<Vec<ObservablePair>> {
    use SpinObservable::*;
    let table = verify_eigen_table(obs)?;
    let candidates = [
        ObservablePair(TotalSq, XSq),
        ObservablePair(TotalSq, YSq),
        ObservablePair(TotalSq, ZSq),
        ObservablePair(XSq, YSq),
        ObservablePair(YSq, ZSq),
        ObservablePair(ZSq, XSq),
    ];
    Ok(candidates
        .into_iter()
        .filter(|p| p.distinguishes_all(&table))
        .collect())
}

/// Rank-1 projectors `|β⟩⟨β|` in [`BellOutcome::ALL`] order.
pub fn bell_projectors() -> &'static [Operator; 4] {
    static PROJECTORS: OnceLock<[Operator; 4]> = OnceLock::new();
    PROJECTORS.get_or_init(|| {
        let rank_one = BellOutcome::ALL
            .map(|b| Operator::projector(&bell_state(b)).expect("normalized Bell state"));
        if cfg!(debug_assertions) {
            let dev = cross_validate_projectors(&build_spin_observables(), &rank_one)
                .expect("joint eigenspaces exist");
            debug_assert!(dev < tol::ALGEBRAIC, "projector routes disagree by {dev:e}");
        }
        rank_one
    })
}

/// Projectors onto the joint eigenspaces of `(Sz², Sx²)`, obtained from the
/// numerically computed spectra only, labelled by their eigenvalue signature.
pub fn joint_eigenspace_projectors(obs: &SpinObservableSet) -> Result<Vec<(BellOutcome, Operator)>> {
    let z_spec = obs.sz_sq.distinct_eigenvalues(tol::EIGEN_MATCH);
    let x_spec = obs.sx_sq.distinct_eigenvalues(tol::EIGEN_MATCH);
    let mut out = Vec::with_capacity(4);
    for &lz in &z_spec {
        let pz = obs.sz_sq.spectral_projector(lz, &z_spec);
        for &lx in &x_spec {
            let px = obs.sx_sq.spectral_projector(lx, &x_spec);
            let joint = (&pz * &px).with_hermitian_hint(true);
            if joint.trace().re < 0.5 {
                continue;
            }
            out.push((BellOutcome::from_signature(lz, lx)?, joint));
        }
    }
    out.sort_by_key(|(b, _)| BellOutcome::ALL.iter().position(|x| x == b));
    Ok(out)
}

/// Largest entrywise difference between the joint-eigenspace projectors and
/// the given rank-1 projectors.
pub fn cross_validate_projectors(obs: &SpinObservableSet, rank_one: &[Operator; 4]) -> Result<f64> {
    let joint = joint_eigenspace_projectors(obs)?;
    if joint.len() != 4 {
        return Ok(f64::INFINITY);
    }
    Ok(joint
        .iter()
        .map(|(b, p)| {
            let idx = BellOutcome::ALL.iter().position(|x| x == b).expect("known label");
            p.max_abs_diff(&rank_one[idx])
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellMeasurement {
    pub outcome: BellOutcome,
    pub probability: f64,
    pub post_state: StateVector,
}

fn bell_projectors_on(n_qubits: usize, alice: (usize, usize)) -> Result<Vec<Operator>> {
    bell_projectors()
        .iter()
        .map(|p| p.embed(n_qubits, &[alice.0, alice.1]))
        .collect()
}

/// Analytic outcome probabilities of a Bell measurement on `alice`, in
/// [`BellOutcome::ALL`] order.
pub fn bell_probabilities(s: &StateVector, alice: (usize, usize)) -> Result<[f64; 4]> {
    let projectors = bell_projectors_on(s.n_qubits(), alice)?;
    let p = crate::qcore::born_probabilities(s, &projectors)?;
    Ok([p[0], p[1], p[2], p[3]])
}

/// Bell measurement on qubits `alice` of `s`.
///
/// The outcome label is read back from the `(Sz², Sx²)` eigenvalues of the
/// collapsed state rather than from the projector index.
pub fn bell_measure(s: &StateVector, alice: (usize, usize), rng_sample: f64) -> Result<BellMeasurement> {
    let projectors = bell_projectors_on(s.n_qubits(), alice)?;
    let m = measure_projective(s, &projectors, rng_sample)?;
    let obs = spin_observables();
    let targets = [alice.0, alice.1];
    let sz = s_expectation(&obs.sz_sq, &m.post_state, &targets)?;
    let sx = s_expectation(&obs.sx_sq, &m.post_state, &targets)?;
    let outcome = BellOutcome::from_signature(sz, sx)?;
    Ok(BellMeasurement {
        outcome,
        probability: m.probability,
        post_state: m.post_state,
    })
}

fn s_expectation(op: &Operator, s: &StateVector, targets: &[usize]) -> Result<f64> {
    Ok(s.inner(&s.apply(op, targets)?)?.re)
}

/// Shared, lazily built observable set.
pub fn spin_observables() -> &'static SpinObservableSet {
    static OBS: OnceLock<SpinObservableSet> = OnceLock::new();
    OBS.get_or_init(build_spin_observables)
}

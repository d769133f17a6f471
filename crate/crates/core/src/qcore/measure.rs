use super::operator::Operator;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementResult {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: StateVector,
}

/// Born-rule probabilities `⟨s|P_k|s⟩` after validating that the projectors
/// form a complete orthogonal set.
pub fn born_probabilities(s: &StateVector, projectors: &[Operator]) -> Result<Vec<f64>> {
    validate_projectors(s.dim(), projectors)?;
    projectors
        .iter()
        .map(|p| Ok(p.expectation(s)?.re.max(0.0)))
        .collect()
}

fn validate_projectors(dim: usize, projectors: &[Operator]) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::IncompleteProjectors { deviation: 1.0 });
    }
    let mut sum = Operator::zeros(dim);
    for (index, p) in projectors.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let herm = p.hermiticity_defect();
        if herm > tol::EIGEN {
            return Err(Error::InvalidProjector {
                index,
                reason: format!("not Hermitian (defect {herm:e})"),
            });
        }
        let idem = (p * p).max_abs_diff(p);
        if idem > tol::EIGEN {
            return Err(Error::InvalidProjector {
                index,
                reason: format!("not idempotent (defect {idem:e})"),
            });
        }
        sum = &sum + p;
    }
    let deviation = sum.max_abs_diff(&Operator::identity(dim));
    if deviation > tol::EIGEN {
        return Err(Error::IncompleteProjectors { deviation });
    }
    Ok(())
}

/// Samples outcome `k` of a projective measurement.
///
/// Outcome `k` is the first index whose cumulative probability strictly
/// exceeds `rng_sample`, so a sample lying exactly on a boundary selects the
/// higher-indexed outcome. The post-measurement state is `P_k|s⟩`
/// renormalized.
pub fn measure_projective(
    s: &StateVector,
    projectors: &[Operator],
    rng_sample: f64,
) -> Result<MeasurementResult> {
    if !(0.0..1.0).contains(&rng_sample) {
        return Err(Error::RngSampleOutOfRange(rng_sample));
    }
    let probs = born_probabilities(s, projectors)?;
    if probs.iter().all(|&p| p < tol::DEGENERATE_PROBABILITY) {
        return Err(Error::DegenerateMeasurement);
    }
    let last_possible = probs
        .iter()
        .rposition(|&p| p >= tol::DEGENERATE_PROBABILITY)
        .expect("at least one outcome is possible");
    let mut cumulative = 0.0;
    let mut chosen = last_possible;
    for (k, &p) in probs.iter().enumerate() {
        if p < tol::DEGENERATE_PROBABILITY {
            continue;
        }
        cumulative += p;
        if rng_sample < cumulative {
            chosen = k;
            break;
        }
    }
    let post_state = projectors[chosen].apply_to(s)?.normalized()?;
    Ok(MeasurementResult {
        outcome_index: chosen,
        probability: probs[chosen],
        post_state,
    })
}

//! Interval estimators: the unconstrained threshold bounds and their
//! tightenings under parametric, symmetric and log-concave shape constraints.

mod al;
mod envelope;
mod logconcave;
mod parametric;
mod symmetric;

pub use al::{al_bounds, al_bounds_lp};
pub use envelope::{
    ks_lower_envelope, ks_offset, log_concave_majorant, log_concave_majorant_of_points, u_lower_bound, EnvelopeKind, EnvelopeSet,
    GridEnvelope, LogConcaveMajorant,
};
pub use logconcave::{log_concave_bounds, log_concave_envelopes, log_concave_grid};
pub use parametric::{parametric_bounds, parametric_envelopes, parametric_grid};
pub use symmetric::{symmetric_bounds, symmetric_envelopes, symmetric_grid};

use crate::constraint::{ConstraintSpec, Family};
use crate::error::{Error, Result};
use crate::lp::{optimize_weights, RatioOutcome, Sense};
use crate::sample::Sample;
use crate::solution::{GridPoint, IdentificationInterval, Provenance, WeightSolution};

/// Computes the identification interval for `spec.family`.
pub fn compute_bounds(sample: &Sample, spec: &ConstraintSpec) -> Result<IdentificationInterval> {
    match spec.family {
        Family::None => {
            spec.validate()?;
            let mut iv = al_bounds(sample, spec.gamma)?;
            iv.method = spec.clone();
            Ok(iv)
        }
        Family::ParametricGaussian => parametric_bounds(sample, spec),
        Family::Symmetric => symmetric_bounds(sample, spec),
        Family::LogConcave => log_concave_bounds(sample, spec),
    }
}

pub(crate) fn check_family(spec: &ConstraintSpec, family: Family) -> Result<()> {
    spec.validate()?;
    if spec.family != family {
        return Err(Error::invalid(format!(
            "expected family {}, got {}",
            family.name(),
            spec.family.name()
        )));
    }
    Ok(())
}

/// Interval of a constant sample: the single value, reached by uniform weights.
pub(crate) fn degenerate_interval(sample: &Sample, spec: &ConstraintSpec) -> IdentificationInterval {
    let v = sample.min();
    let mut solution = WeightSolution::uniform(sample);
    solution.objective = v;
    let mut provenance = Provenance::default();
    provenance.notes.push("all observations are equal; no optimization performed".into());
    IdentificationInterval {
        lower: v,
        upper: v,
        lower_solution: solution.clone(),
        upper_solution: solution,
        method: spec.clone(),
        provenance,
    }
}

pub(crate) struct GridOptimum {
    pub best: Option<WeightSolution>,
    pub infeasible: usize,
}

/// Maximizes (or minimizes) the weighted mean separately at every admissible
/// grid point and keeps the best value; ties go to the earliest point.
pub(crate) fn optimize_over_grid(
    sample: &Sample,
    gamma: f64,
    entries: &[GridEnvelope],
    sense: Sense,
) -> Result<GridOptimum> {
    let mut best: Option<WeightSolution> = None;
    let mut infeasible = 0;
    for entry in entries {
        if !entry.admissible {
            infeasible += 1;
            continue;
        }
        match optimize_weights(sample, gamma, &entry.rows, sense)? {
            RatioOutcome::Infeasible => infeasible += 1,
            RatioOutcome::Optimal { weights, .. } => {
                let candidate = WeightSolution::from_weights(sample, weights, Some(entry.point));
                let better = match &best {
                    None => true,
                    Some(b) => match sense {
                        Sense::Maximize => candidate.objective > b.objective,
                        Sense::Minimize => candidate.objective < b.objective,
                    },
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
    }
    Ok(GridOptimum { best, infeasible })
}

pub(crate) fn empty_set(family: Family, side: &str, points: usize) -> Error {
    Error::EmptyPlausibilitySet(format!(
        "{} constraint infeasible at all {points} grid points ({side} endpoint)",
        family.name()
    ))
}

/// Assembles the interval, pulling each endpoint inside the unconstrained
/// interval (they can only differ by rounding).
pub(crate) fn finish(
    sample: &Sample,
    spec: &ConstraintSpec,
    lower_solution: WeightSolution,
    upper_solution: WeightSolution,
    provenance: Provenance,
) -> Result<IdentificationInterval> {
    let al = al_bounds(sample, spec.gamma)?;
    let lower = lower_solution.objective.clamp(al.lower, al.upper);
    let upper = upper_solution.objective.clamp(al.lower, al.upper).max(lower);
    Ok(IdentificationInterval {
        lower,
        upper,
        lower_solution,
        upper_solution,
        method: spec.clone(),
        provenance,
    })
}

pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

pub(crate) fn center_of(point: &GridPoint) -> Option<f64> {
    match point {
        GridPoint::Center(m) => Some(*m),
        GridPoint::Theta(_) => None,
    }
}

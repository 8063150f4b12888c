use super::envelope::{ks_lower_envelope, ks_offset, log_concave_majorant, push_row, u_lower_bound};
use super::{center_of, check_family, degenerate_interval, empty_set, finish, optimize_over_grid};
use super::{EnvelopeKind, EnvelopeSet, GridEnvelope};
use crate::constraint::{CenterGrid, ConstraintSpec, Family, DEFAULT_LOGCONCAVE_THRESHOLDS};
use crate::error::Result;
use crate::lp::Sense;
use crate::sample::Sample;
use crate::solution::{BandConstants, GridPoint, IdentificationInterval, Provenance, WeightSolution};

/// Candidate thresholds; by default the distinct sample values, thinned by
/// uniform index striding to at most the requested count.
pub fn log_concave_grid(sample: &Sample, grid: &CenterGrid) -> Vec<f64> {
    match grid {
        CenterGrid::Points(points) => points.clone(),
        CenterGrid::Auto(count) => {
            let v = sample.distinct_values();
            let limit = count.unwrap_or(DEFAULT_LOGCONCAVE_THRESHOLDS);
            if v.len() <= limit {
                return v.to_vec();
            }
            if limit == 1 {
                return vec![v[(v.len() - 1) / 2]];
            }
            let mut picked: Vec<f64> = (0..limit)
                .map(|i| v[((i as f64) * (v.len() - 1) as f64 / (limit - 1) as f64).round() as usize])
                .collect();
            picked.dedup();
            picked
        }
    }
}

/// Envelope chain and rows `H(Y_(k)) >= L(Y_(k+1))` for threshold `m`,
/// where `L` is the log-concave majorant of the population lower bound.
pub(crate) fn envelope_rows(sample: &Sample, sks: &crate::step::StepFunction, gamma: f64, m: f64) -> GridEnvelope {
    let v = sample.distinct_values();
    let d = v.len();
    let u = u_lower_bound(sks, gamma, m);
    let mut rows = Vec::new();
    let mut admissible = true;
    let majorant = log_concave_majorant(&u).ok();
    if let Some(h) = &majorant {
        for k in 1..d {
            if let Some(level) = h.eval(v[k]) {
                admissible &= push_row(&mut rows, &[(k, -1.0)], -level, d);
            }
        }
    }
    GridEnvelope {
        point: GridPoint::Center(m),
        rows,
        admissible,
        lower_envelope: Some(u),
        majorant,
    }
}

/// Envelopes for the upper endpoint. The lower endpoint uses the same
/// construction on the negated sample.
pub fn log_concave_envelopes(sample: &Sample, spec: &ConstraintSpec) -> Result<EnvelopeSet> {
    check_family(spec, Family::LogConcave)?;
    sample.require_bounds_size()?;
    let sks = ks_lower_envelope(sample)?;
    let entries = log_concave_grid(sample, &spec.m_grid)
        .into_iter()
        .map(|m| envelope_rows(sample, &sks, spec.gamma, m))
        .collect();
    Ok(EnvelopeSet { kind: EnvelopeKind::LogConcave, entries })
}

/// Interval under the assumption that the population has a log-concave
/// density.
pub fn log_concave_bounds(sample: &Sample, spec: &ConstraintSpec) -> Result<IdentificationInterval> {
    check_family(spec, Family::LogConcave)?;
    sample.require_bounds_size()?;
    if sample.is_constant() {
        return Ok(degenerate_interval(sample, spec));
    }
    let upper_set = log_concave_envelopes(sample, spec)?;
    let upper = optimize_over_grid(sample, spec.gamma, &upper_set.entries, Sense::Maximize)?;

    let negated = sample.negated();
    let negated_spec = match &spec.m_grid {
        CenterGrid::Points(p) => spec.clone().with_m_grid(CenterGrid::Points(p.iter().map(|m| -m).collect())),
        CenterGrid::Auto(_) => spec.clone(),
    };
    let lower_set = log_concave_envelopes(&negated, &negated_spec)?;
    let lower = optimize_over_grid(&negated, spec.gamma, &lower_set.entries, Sense::Maximize)?;

    let upper_solution = upper.best.ok_or_else(|| empty_set(spec.family, "upper", upper_set.entries.len()))?;
    let mirrored = lower.best.ok_or_else(|| empty_set(spec.family, "lower", lower_set.entries.len()))?;
    let weights: Vec<f64> = mirrored.weights.iter().rev().copied().collect();
    let point = mirrored.grid_point.as_ref().and_then(center_of).map(|m| GridPoint::Center(-m));
    let lower_solution = WeightSolution::from_weights(sample, weights, point);

    let provenance = Provenance {
        constants: BandConstants { ks_offset: Some(ks_offset(sample.len())?), ..Default::default() },
        grid_points: upper_set.entries.len(),
        infeasible_upper: upper.infeasible,
        infeasible_lower: lower.infeasible,
        notes: vec![
            "ECDF offset uses the Kolmogorov quantile at 1 - 1/sqrt(n), divided by sqrt(n)".to_string(),
        ],
    };
    finish(sample, spec, lower_solution, upper_solution, provenance)
}

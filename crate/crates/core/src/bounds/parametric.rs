use super::envelope::push_row;
use super::{check_family, degenerate_interval, empty_set, finish, linspace, optimize_over_grid};
use super::{EnvelopeKind, EnvelopeSet, GridEnvelope};
use crate::constraint::{ConstraintSpec, Family, Theta, ThetaGrid};
use crate::dist::{delta_gamma_n, normal_cdf, sigma_gamma_sq};
use crate::error::Result;
use crate::lp::Sense;
use crate::sample::Sample;
use crate::solution::{BandConstants, GridPoint, IdentificationInterval, Provenance};

/// Candidate `(location, scale)` pairs. The automatic grid spans the sample
/// mean plus or minus three standard errors and half to twice the sample sd.
pub fn parametric_grid(sample: &Sample, grid: &ThetaGrid) -> Vec<Theta> {
    match grid {
        ThetaGrid::Points(points) => points.clone(),
        ThetaGrid::Auto { locations, scales } => {
            let mean = sample.mean();
            let sd = sample.sd();
            let se = sd / (sample.len() as f64).sqrt();
            let locs = linspace(mean - 3.0 * se, mean + 3.0 * se, *locations);
            let scs = linspace(0.5 * sd, 2.0 * sd, *scales);
            locs.iter()
                .flat_map(|&location| scs.iter().map(move |&scale| Theta { location, scale }))
                .filter(|t| t.scale > 0.0)
                .collect()
        }
    }
}

/// Rows keeping the weighted ECDF within `band` of the normal CDF with
/// parameters `theta`, checked at every value and left limit.
pub(crate) fn band_rows(sample: &Sample, theta: Theta, band: f64) -> GridEnvelope {
    let v = sample.distinct_values();
    let d = v.len();
    let f: Vec<f64> = v.iter().map(|&y| normal_cdf((y - theta.location) / theta.scale)).collect();
    let point = GridPoint::Theta(theta);
    if f[0] > band || 1.0 - f[d - 1] > band {
        return GridEnvelope::rows_only(point, Vec::new(), false);
    }
    let mut rows = Vec::new();
    let mut admissible = true;
    for k in 1..d {
        admissible &= push_row(&mut rows, &[(k, 1.0)], band + f[k - 1], d);
        admissible &= push_row(&mut rows, &[(k, -1.0)], band - f[k], d);
    }
    GridEnvelope::rows_only(point, rows, admissible)
}

pub fn parametric_envelopes(sample: &Sample, spec: &ConstraintSpec) -> Result<EnvelopeSet> {
    check_family(spec, Family::ParametricGaussian)?;
    sample.require_bounds_size()?;
    let band = delta_gamma_n(spec.gamma, sample.len())? + spec.delta_star;
    let entries = parametric_grid(sample, &spec.theta_grid)
        .into_iter()
        .map(|theta| band_rows(sample, theta, band))
        .collect();
    Ok(EnvelopeSet { kind: EnvelopeKind::Parametric, entries })
}

/// Interval under the assumption that the population is (within `delta*`
/// in KS distance of) a normal distribution on the parameter grid.
pub fn parametric_bounds(sample: &Sample, spec: &ConstraintSpec) -> Result<IdentificationInterval> {
    check_family(spec, Family::ParametricGaussian)?;
    sample.require_bounds_size()?;
    if sample.is_constant() {
        return Ok(degenerate_interval(sample, spec));
    }
    let delta = delta_gamma_n(spec.gamma, sample.len())?;
    let set = parametric_envelopes(sample, spec)?;
    let upper = optimize_over_grid(sample, spec.gamma, &set.entries, Sense::Maximize)?;
    let lower = optimize_over_grid(sample, spec.gamma, &set.entries, Sense::Minimize)?;
    let points = set.entries.len();
    let upper_solution = upper.best.ok_or_else(|| empty_set(spec.family, "upper", points))?;
    let lower_solution = lower.best.ok_or_else(|| empty_set(spec.family, "lower", points))?;
    let provenance = Provenance {
        constants: BandConstants {
            delta: Some(delta),
            sigma_sq: Some(sigma_gamma_sq(spec.gamma)?.sigma_sq),
            band: Some(delta + spec.delta_star),
            ..Default::default()
        },
        grid_points: points,
        infeasible_upper: upper.infeasible,
        infeasible_lower: lower.infeasible,
        notes: Vec::new(),
    };
    finish(sample, spec, lower_solution, upper_solution, provenance)
}

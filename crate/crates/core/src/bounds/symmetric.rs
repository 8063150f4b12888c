use std::collections::HashSet;

use super::envelope::push_row;
use super::{check_family, degenerate_interval, empty_set, finish, linspace, optimize_over_grid};
use super::{EnvelopeKind, EnvelopeSet, GridEnvelope};
use crate::constraint::{CenterGrid, ConstraintSpec, Family, DEFAULT_SYMMETRIC_CENTERS};
use crate::dist::zeta_gamma_alpha;
use crate::error::Result;
use crate::lp::{CdfRow, Sense};
use crate::sample::Sample;
use crate::solution::{BandConstants, GridPoint, IdentificationInterval, Provenance};

/// Candidate centers; by default equally spaced over the sample range.
pub fn symmetric_grid(sample: &Sample, grid: &CenterGrid) -> Vec<f64> {
    match grid {
        CenterGrid::Points(points) => points.clone(),
        CenterGrid::Auto(count) => {
            linspace(sample.min(), sample.max(), count.unwrap_or(DEFAULT_SYMMETRIC_CENTERS))
        }
    }
}

/// Rows bounding `|H(m + b) + H(m - b) - 1|` and `|H(m + b) + H((m - b)-) - 1|`
/// by `band` for every `b` among the distances `|Y_i - m|` and zero.
pub(crate) fn symmetry_rows(sample: &Sample, m: f64, band: f64) -> GridEnvelope {
    let v = sample.distinct_values();
    let d = v.len();
    let dev: Vec<f64> = v.iter().map(|y| y - m).collect();
    let mut radii: Vec<f64> = dev.iter().map(|x| x.abs()).collect();
    radii.push(0.0);
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut rows: Vec<CdfRow> = Vec::new();
    let mut admissible = true;
    for b in radii {
        let k_right = dev.partition_point(|&x| x <= b);
        let k_left = dev.partition_point(|&x| x <= -b);
        let k_left_open = dev.partition_point(|&x| x < -b);
        for k in [k_left, k_left_open] {
            if !seen.insert((k_right, k)) {
                continue;
            }
            admissible &= push_row(&mut rows, &[(k_right, 1.0), (k, 1.0)], 1.0 + band, d);
            admissible &= push_row(&mut rows, &[(k_right, -1.0), (k, -1.0)], band - 1.0, d);
        }
    }
    GridEnvelope::rows_only(GridPoint::Center(m), rows, admissible)
}

fn band(sample: &Sample, spec: &ConstraintSpec) -> Result<(f64, f64)> {
    let n = sample.len();
    let zeta = zeta_gamma_alpha(spec.gamma, spec.resolved_alpha(n))?;
    Ok((zeta, zeta / (n as f64).sqrt() + spec.delta_star))
}

pub fn symmetric_envelopes(sample: &Sample, spec: &ConstraintSpec) -> Result<EnvelopeSet> {
    check_family(spec, Family::Symmetric)?;
    sample.require_bounds_size()?;
    let (_, width) = band(sample, spec)?;
    let entries = symmetric_grid(sample, &spec.m_grid)
        .into_iter()
        .map(|m| symmetry_rows(sample, m, width))
        .collect();
    Ok(EnvelopeSet { kind: EnvelopeKind::Symmetric, entries })
}

/// Interval under the assumption that the population distribution is
/// symmetric about some center on the grid.
pub fn symmetric_bounds(sample: &Sample, spec: &ConstraintSpec) -> Result<IdentificationInterval> {
    check_family(spec, Family::Symmetric)?;
    sample.require_bounds_size()?;
    if sample.is_constant() {
        return Ok(degenerate_interval(sample, spec));
    }
    let (zeta, width) = band(sample, spec)?;
    let set = symmetric_envelopes(sample, spec)?;
    let upper = optimize_over_grid(sample, spec.gamma, &set.entries, Sense::Maximize)?;
    let lower = optimize_over_grid(sample, spec.gamma, &set.entries, Sense::Minimize)?;
    let points = set.entries.len();
    let upper_solution = upper.best.ok_or_else(|| empty_set(spec.family, "upper", points))?;
    let lower_solution = lower.best.ok_or_else(|| empty_set(spec.family, "lower", points))?;
    let mut notes = Vec::new();
    if spec.delta_star > 0.0 {
        notes.push("delta* widens the symmetry band additively".to_string());
    }
    let provenance = Provenance {
        constants: BandConstants { zeta: Some(zeta), band: Some(width), ..Default::default() },
        grid_points: points,
        infeasible_upper: upper.infeasible,
        infeasible_lower: lower.infeasible,
        notes,
    };
    finish(sample, spec, lower_solution, upper_solution, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::al_bounds;
    use crate::error::Error;
    use crate::lp::{build_weight_lp, solve, LpStatus};
    use crate::solution::WeightSolution;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn spec(gamma: f64) -> ConstraintSpec {
        ConstraintSpec::new(gamma, Family::Symmetric)
    }

    // Symmetry functional of a weighted ECDF, scanned densely.
    fn max_asymmetry(sample: &Sample, weights: &[f64], m: f64) -> f64 {
        let h = |y: f64| -> f64 {
            sample.values().iter().zip(weights).filter(|(v, _)| **v <= y).map(|(_, w)| w).sum()
        };
        let h_left = |y: f64| -> f64 {
            sample.values().iter().zip(weights).filter(|(v, _)| **v < y).map(|(_, w)| w).sum()
        };
        let mut worst = 0.0f64;
        let mut ys: Vec<f64> = sample.values().iter().map(|v| (v - m).abs()).collect();
        ys.push(0.0);
        let extra: Vec<f64> = ys.iter().map(|b| b + 1e-7).collect();
        ys.extend(extra);
        for b in ys {
            worst = worst.max((h(m + b) + h(m - b) - 1.0).abs());
            worst = worst.max((h(m + b) + h_left(m - b) - 1.0).abs());
        }
        worst
    }

    #[test]
    fn rows_agree_with_direct_evaluation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let n = rng.random_range(3..15);
            let s = Sample::new((0..n).map(|_| rng.random_range(0..8) as f64).collect()).unwrap();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|x| x / total).collect();
            let m = rng.random_range(0..15) as f64 / 2.0;
            let worst = max_asymmetry(&s, &w, m);
            let d = s.distinct_values().len();
            let mut prefix = vec![0.0; d + 1];
            for k in 1..=d {
                prefix[k] = w[..s.group_start(k)].iter().sum();
            }
            for band in [worst - 1e-9, worst + 1e-9] {
                let env = symmetry_rows(&s, m, band);
                let ok = env.admissible && env.rows.iter().all(|r| r.slack(&prefix) >= -1e-12);
                assert_eq!(ok, band > worst, "band {band} worst {worst}");
            }
        }
    }

    #[test]
    fn symmetric_sample_contains_its_mean() {
        let a = [0.3, 1.1, 2.0, 2.9, 4.4];
        let s = Sample::new(a.iter().flat_map(|x| [-x, *x]).collect()).unwrap();
        let uniform = WeightSolution::uniform(&s);
        // right values at the atoms are off by one atom's mass
        assert_abs_diff_eq!(max_asymmetry(&s, &uniform.weights, 0.0), 0.1, epsilon = 1e-12);
        let sp = spec(3.0).with_m_grid(CenterGrid::Points(vec![0.0]));
        let iv = symmetric_bounds(&s, &sp).unwrap();
        assert!(iv.contains(0.0));
        assert!(iv.is_within(&al_bounds(&s, 3.0).unwrap()));
    }

    #[test]
    fn translation_equivariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        let s = Sample::new((0..60).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
        let shift = 4.0;
        let grid: Vec<f64> = (0..11).map(|i| -0.5 + 0.1 * i as f64).collect();
        let a = symmetric_bounds(&s, &spec(2.0).with_m_grid(CenterGrid::Points(grid.clone()))).unwrap();
        let shifted_grid = grid.iter().map(|m| m + shift).collect();
        let b = symmetric_bounds(&s.shifted(shift), &spec(2.0).with_m_grid(CenterGrid::Points(shifted_grid)))
            .unwrap();
        assert_abs_diff_eq!(a.lower + shift, b.lower, epsilon = 1e-9);
        assert_abs_diff_eq!(a.upper + shift, b.upper, epsilon = 1e-9);
    }

    #[test]
    fn grid_point_matches_dense_lp() {
        let s = Sample::new(vec![-1.5, -0.4, 0.0, 0.2, 0.2, 0.9, 1.3, 2.2, 3.0]).unwrap();
        let sp = spec(2.0).with_m_grid(CenterGrid::Points(vec![0.3])).with_alpha(0.2);
        let iv = symmetric_bounds(&s, &sp).unwrap();
        let (_, width) = band(&s, &sp).unwrap();
        let env = symmetry_rows(&s, 0.3, width);
        for (sense, value) in [(Sense::Maximize, iv.upper), (Sense::Minimize, iv.lower)] {
            let r = solve(&build_weight_lp(&s, 2.0, &env.rows, sense)).unwrap();
            assert_eq!(r.status, LpStatus::Optimal);
            assert_abs_diff_eq!(r.objective_value, value, epsilon = 1e-8);
        }
    }

    #[test]
    fn far_center_is_infeasible() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let s = Sample::new((0..200).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
        let sp = spec(1.5).with_m_grid(CenterGrid::Points(vec![5.0]));
        assert!(matches!(symmetric_bounds(&s, &sp), Err(Error::EmptyPlausibilitySet(_))));
    }

    #[test]
    fn default_grid() {
        let s = Sample::new(vec![1.0, 2.0, 6.0]).unwrap();
        let g = symmetric_grid(&s, &CenterGrid::default());
        assert_eq!(g.len(), 101);
        assert_eq!((g[0], g[100]), (1.0, 6.0));
    }
}

use crate::constraint::{ConstraintSpec, Family};
use crate::error::{Error, Result};
use crate::lp::{build_weight_lp, solve, weights_from_solution, LpStatus, Sense};
use crate::sample::Sample;
use crate::solution::{IdentificationInterval, Provenance, WeightSolution};

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("gamma must be >= 1, got {gamma}")))
    }
}

/// Best threshold weighting: weight 1 below a cut and `gamma` above it
/// (`upper`), or the mirror image (`!upper`).
fn threshold_scan(sample: &Sample, gamma: f64, upper: bool) -> WeightSolution {
    let y = sample.values();
    let n = y.len();
    let center = sample.mean();
    let total: f64 = y.iter().map(|v| v - center).sum();
    let (w_low, w_high) = if upper { (1.0, gamma) } else { (gamma, 1.0) };
    let mut best_k = 0;
    let mut best = f64::NAN;
    let mut below = 0.0;
    for k in 0..=n {
        if k > 0 {
            below += y[k - 1] - center;
        }
        let num = w_low * below + w_high * (total - below);
        let den = w_low * k as f64 + w_high * (n - k) as f64;
        let value = num / den;
        let improves = if upper { value > best } else { value < best };
        if best.is_nan() || improves {
            best = value;
            best_k = k;
        }
    }
    let den = w_low * best_k as f64 + w_high * (n - best_k) as f64;
    let weights = (0..n).map(|i| if i < best_k { w_low / den } else { w_high / den }).collect();
    WeightSolution::from_weights(sample, weights, None)
}

/// Unconstrained interval: extreme weighted means over all normalized
/// weightings with `max(w) / min(w) <= gamma`, computed by scanning the
/// `n + 1` threshold weightings.
pub fn al_bounds(sample: &Sample, gamma: f64) -> Result<IdentificationInterval> {
    check_gamma(gamma)?;
    sample.require_bounds_size()?;
    let upper_solution = threshold_scan(sample, gamma, true);
    let lower_solution = threshold_scan(sample, gamma, false);
    Ok(IdentificationInterval {
        lower: lower_solution.objective,
        upper: upper_solution.objective,
        lower_solution,
        upper_solution,
        method: ConstraintSpec::new(gamma, Family::None),
        provenance: Provenance::default(),
    })
}

/// Same interval as [`al_bounds`], solved as two linear programs.
pub fn al_bounds_lp(sample: &Sample, gamma: f64) -> Result<IdentificationInterval> {
    check_gamma(gamma)?;
    sample.require_bounds_size()?;
    let n = sample.len();
    let solve_sense = |sense| -> Result<WeightSolution> {
        let result = solve(&build_weight_lp(sample, gamma, &[], sense))?;
        if result.status != LpStatus::Optimal {
            return Err(Error::SolverFailure(format!("unconstrained weight LP reported {:?}", result.status)));
        }
        let weights = weights_from_solution(&result, n).expect("optimal");
        Ok(WeightSolution::from_weights(sample, weights, None))
    };
    let upper_solution = solve_sense(Sense::Maximize)?;
    let lower_solution = solve_sense(Sense::Minimize)?;
    Ok(IdentificationInterval {
        lower: lower_solution.objective,
        upper: upper_solution.objective,
        lower_solution,
        upper_solution,
        method: ConstraintSpec::new(gamma, Family::None),
        provenance: Provenance::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn three_point_fixture() {
        let s = Sample::new(vec![0.0, 1.0, 2.0]).unwrap();
        let iv = al_bounds(&s, 2.0).unwrap();
        assert_abs_diff_eq!(iv.lower, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(iv.upper, 1.25, epsilon = 1e-12);
        let w = &iv.upper_solution.weights;
        assert_abs_diff_eq!(w[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(w[2], 0.5, epsilon = 1e-12);
        iv.upper_solution.check(&s, 2.0).unwrap();
        iv.lower_solution.check(&s, 2.0).unwrap();
    }

    #[test]
    fn gamma_one_gives_the_mean() {
        let s = Sample::new(vec![0.3, 1.0, 4.5, 7.0]).unwrap();
        let iv = al_bounds(&s, 1.0).unwrap();
        assert_abs_diff_eq!(iv.lower, s.mean(), epsilon = 1e-12);
        assert_abs_diff_eq!(iv.upper, s.mean(), epsilon = 1e-12);
    }

    #[test]
    fn scan_agrees_with_lp() {
        let s = Sample::new(vec![-1.0, 0.2, 0.2, 3.0, 5.5, 6.0]).unwrap();
        for gamma in [1.0, 1.5, 4.0, 9.0] {
            let a = al_bounds(&s, gamma).unwrap();
            let b = al_bounds_lp(&s, gamma).unwrap();
            assert_abs_diff_eq!(a.lower, b.lower, epsilon = 1e-8);
            assert_abs_diff_eq!(a.upper, b.upper, epsilon = 1e-8);
        }
    }

    #[test]
    fn rejects_tiny_samples_and_bad_gamma() {
        let s = Sample::new(vec![1.0]).unwrap();
        assert!(al_bounds(&s, 2.0).is_err());
        let s = Sample::new(vec![1.0, 2.0]).unwrap();
        assert!(al_bounds(&s, 0.9).is_err());
    }
}

//! Elementary weighted estimators: the Hajek ratio estimator, weighted
//! empirical distribution functions and the exact sup-distance between a
//! step function and a continuous CDF.

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::step::StepFunction;

/// Ratio estimator `sum(Y_i / pi_i) / sum(1 / pi_i)` for known selection probabilities.
pub fn hajek_estimate(sample: &Sample, probs: &[f64]) -> Result<f64> {
    if probs.len() != sample.len() {
        return Err(Error::invalid(format!(
            "{} selection probabilities for {} observations",
            probs.len(),
            sample.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(Error::invalid(format!("selection probability {p} outside (0, 1]")));
    }
    let (num, den) = sample
        .values()
        .iter()
        .zip(probs)
        .fold((0.0, 0.0), |(num, den), (y, p)| (num + y / p, den + 1.0 / p));
    Ok(num / den)
}

/// Weighted ECDF with breakpoints at the distinct sample values.
///
/// Weights are aligned to the sorted sample; tied values aggregate.
pub fn weighted_ecdf(sample: &Sample, weights: &[f64]) -> Result<StepFunction> {
    if weights.len() != sample.len() {
        return Err(Error::invalid(format!(
            "{} weights for {} observations",
            weights.len(),
            sample.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::invalid("weights must be finite and nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!("weights sum to {total}, expected 1")));
    }
    let mut levels = Vec::with_capacity(sample.distinct_values().len());
    let mut acc = 0.0;
    let mut start = 0;
    for &end in sample.cumulative_counts() {
        acc += weights[start..end].iter().sum::<f64>();
        levels.push(acc / total);
        start = end;
    }
    Ok(StepFunction::new_unchecked(sample.distinct_values().to_vec(), levels, 0.0))
}

/// Unweighted ECDF of the sample.
pub fn ecdf(sample: &Sample) -> StepFunction {
    let n = sample.len() as f64;
    let levels = sample.cumulative_counts().iter().map(|&c| c as f64 / n).collect();
    StepFunction::new_unchecked(sample.distinct_values().to_vec(), levels, 0.0)
}

/// `sup_y |f(y) - g(y)|` for a step function `f` and a continuous CDF `g`.
///
/// On each constancy interval of `f` the gap is monotone in `g`, so the
/// supremum is attained at a breakpoint, a left limit, or one of the tails.
pub fn ks_distance<G: Fn(f64) -> f64>(f: &StepFunction, g: G) -> f64 {
    let mut sup = 0.0f64;
    let mut prev = f.pre_level();
    // lower tail: g runs from 0 up to g(b_0)
    sup = sup.max(prev.abs());
    for (&b, &level) in f.breakpoints().iter().zip(f.levels()) {
        let gb = g(b);
        sup = sup.max((prev - gb).abs()).max((level - gb).abs());
        prev = level;
    }
    // upper tail: g runs up to 1
    sup.max((prev - 1.0).abs())
}

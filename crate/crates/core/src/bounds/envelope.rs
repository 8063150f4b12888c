//! Plausibility-set envelopes: per-grid-point ECDF rows, and the
//! lower-envelope chain used for log-concave populations
//! (shifted ECDF, population lower bound at a threshold, and the
//! exponentiated least concave majorant of its logarithm).

use crate::dist::kolmogorov_quantile;
use crate::error::{Error, Result};
use crate::estimate::ecdf;
use crate::lp::CdfRow;
use crate::sample::Sample;
use crate::solution::GridPoint;
use crate::step::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    Parametric,
    Symmetric,
    LogConcave,
}

/// Constraint rows (and, for log-concave sets, the envelopes behind them)
/// for one grid point of the plausibility-set union.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEnvelope {
    pub point: GridPoint,
    pub rows: Vec<CdfRow>,
    /// False when a data-independent check already rules the point out.
    pub admissible: bool,
    pub lower_envelope: Option<StepFunction>,
    pub majorant: Option<LogConcaveMajorant>,
}

impl GridEnvelope {
    pub(crate) fn rows_only(point: GridPoint, rows: Vec<CdfRow>, admissible: bool) -> Self {
        GridEnvelope { point, rows, admissible, lower_envelope: None, majorant: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSet {
    pub kind: EnvelopeKind,
    pub entries: Vec<GridEnvelope>,
}

pub(crate) enum RowCheck {
    Keep(CdfRow),
    Vacuous,
    Violated,
}

/// Simplifies `sum c_t P(k_t) <= rhs`: merges repeated positions, drops
/// `P(0) = 0`, moves `P(ngroups) = 1` into the right-hand side, and decides
/// rows that hold (or fail) for every nondecreasing `P` with values in `[0, 1]`.
pub(crate) fn simplify_row(terms: &[(usize, f64)], rhs: f64, ngroups: usize) -> RowCheck {
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    let mut rhs = rhs;
    for &(k, c) in terms {
        if k == 0 || c == 0.0 {
            continue;
        }
        if k >= ngroups {
            rhs -= c;
            continue;
        }
        match merged.iter_mut().find(|(j, _)| *j == k) {
            Some(t) => t.1 += c,
            None => merged.push((k, c)),
        }
    }
    merged.retain(|t| t.1 != 0.0);
    merged.sort_by_key(|t| t.0);
    // the largest value of the left side is its best suffix sum
    let mut suffix = 0.0f64;
    let mut max_lhs = 0.0f64;
    for &(_, c) in merged.iter().rev() {
        suffix += c;
        max_lhs = max_lhs.max(suffix);
    }
    if max_lhs <= rhs {
        return RowCheck::Vacuous;
    }
    if merged.is_empty() {
        return RowCheck::Violated;
    }
    RowCheck::Keep(CdfRow { terms: merged, rhs })
}

/// Adds the simplified row; returns false when it can never hold.
pub(crate) fn push_row(rows: &mut Vec<CdfRow>, terms: &[(usize, f64)], rhs: f64, ngroups: usize) -> bool {
    match simplify_row(terms, rhs, ngroups) {
        RowCheck::Keep(row) => {
            rows.push(row);
            true
        }
        RowCheck::Vacuous => true,
        RowCheck::Violated => false,
    }
}

/// Offset `K^{-1}(1 - 1/sqrt(n)) / sqrt(n)` by which the ECDF is lowered.
pub fn ks_offset(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 observations, got {n}")));
    }
    let root = (n as f64).sqrt();
    Ok(kolmogorov_quantile(1.0 - 1.0 / root)? / root)
}

/// ECDF lowered by [`ks_offset`] and clipped at zero: with probability
/// tending to one it lies below the CDF of the observed (biased) sample.
pub fn ks_lower_envelope(sample: &Sample) -> Result<StepFunction> {
    let offset = ks_offset(sample.len())?;
    let f = ecdf(sample);
    let levels = f.levels().iter().map(|l| (l - offset).max(0.0)).collect();
    Ok(StepFunction::new_unchecked(f.breakpoints().to_vec(), levels, 0.0))
}

/// Lower bound on the population CDF when the selection probabilities jump
/// from their low to their high value at `m`:
/// `(gamma S(y) - (gamma - 1) S(min(y, m))) / (gamma - (gamma - 1) S(m))`.
pub fn u_lower_bound(sks: &StepFunction, gamma: f64, m: f64) -> StepFunction {
    let s_m = sks.eval(m);
    let den = gamma - (gamma - 1.0) * s_m;
    let level = |y: f64, s_y: f64| {
        let s_min = if y <= m { s_y } else { s_m };
        ((gamma * s_y - (gamma - 1.0) * s_min) / den).clamp(0.0, 1.0)
    };
    let levels = sks.breakpoints().iter().zip(sks.levels()).map(|(&b, &s)| level(b, s)).collect();
    let pre = sks.pre_level() / den;
    StepFunction::new_unchecked(sks.breakpoints().to_vec(), levels, pre.clamp(0.0, 1.0))
}

/// `exp` of a concave piecewise-linear function, stored by its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConcaveMajorant {
    xs: Vec<f64>,
    log_values: Vec<f64>,
}

impl LogConcaveMajorant {
    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.log_values.iter().copied())
    }

    /// Closed interval on which the majorant is defined.
    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value of the concave log-majorant at `y`, `None` outside the domain.
    pub fn log_eval(&self, y: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&y) {
            return None;
        }
        let k = self.xs.partition_point(|&x| x <= y);
        if k == self.xs.len() {
            return Some(self.log_values[k - 1]);
        }
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (v0, v1) = (self.log_values[k - 1], self.log_values[k]);
        Some(v0 + (v1 - v0) * (y - x0) / (x1 - x0))
    }

    pub fn eval(&self, y: f64) -> Option<f64> {
        self.log_eval(y).map(f64::exp)
    }
}

/// Least concave majorant of `log u` over the breakpoints where `u > 0`,
/// exponentiated.
pub fn log_concave_majorant(u: &StepFunction) -> Result<LogConcaveMajorant> {
    log_concave_majorant_of_points(u.breakpoints(), u.levels())
}

/// Same as [`log_concave_majorant`] for arbitrary (not necessarily
/// monotone) positive values at strictly increasing `xs`; nonpositive
/// values are skipped. Uses the upper convex hull of `(x, log value)`
/// (monotone chain).
pub fn log_concave_majorant_of_points(xs: &[f64], values: &[f64]) -> Result<LogConcaveMajorant> {
    let points: Vec<(f64, f64)> = xs
        .iter()
        .zip(values)
        .filter(|(_, &l)| l > 0.0)
        .map(|(&b, &l)| (b, l.ln()))
        .collect();
    if points.is_empty() {
        return Err(Error::Degenerate("no positive level to take the logarithm of".into()));
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            // a lies on or below the chord o -> p
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let (xs, log_values) = hull.into_iter().unzip();
    Ok(LogConcaveMajorant { xs, log_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn row_simplification() {
        assert!(matches!(simplify_row(&[(1, 1.0)], 1.0, 3), RowCheck::Vacuous));
        assert!(matches!(simplify_row(&[(1, -1.0)], 0.0, 3), RowCheck::Vacuous));
        assert!(matches!(simplify_row(&[(3, 1.0), (0, 1.0)], 0.5, 3), RowCheck::Violated));
        match simplify_row(&[(2, 1.0), (2, 1.0), (3, 1.0)], 2.2, 3) {
            RowCheck::Keep(r) => {
                assert_eq!(r.terms, vec![(2, 2.0)]);
                assert_abs_diff_eq!(r.rhs, 1.2, epsilon = 1e-15);
            }
            _ => panic!("row should be kept"),
        }
        let mut rows = Vec::new();
        assert!(push_row(&mut rows, &[(1, 1.0)], 0.4, 3));
        assert!(!push_row(&mut rows, &[(3, 1.0)], 0.4, 3));
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn offset_for_400() {
        let o = ks_offset(400).unwrap();
        assert_abs_diff_eq!(o, kolmogorov_quantile(0.95).unwrap() / 20.0, epsilon = 1e-15);
        assert!((o - 0.0679).abs() < 1e-4);
    }

    #[test]
    fn lowered_ecdf() {
        let s = Sample::new((0..50).map(|i| (i as f64).sqrt()).collect()).unwrap();
        let offset = ks_offset(50).unwrap();
        let sks = ks_lower_envelope(&s).unwrap();
        let plain = ecdf(&s);
        for (a, b) in sks.levels().iter().zip(plain.levels()) {
            assert!(a <= b);
            if *a > 0.0 {
                assert_abs_diff_eq!(b - a, offset, epsilon = 1e-15);
            }
            assert!(*a >= 0.0 && *a <= 1.0 - offset + 1e-15);
        }
    }

    #[test]
    fn u_bound_hand_example() {
        // S(m) = 0.5 at m = 1; S(0) = 0.2; S(2) = 1
        let sks = StepFunction::new(vec![0.0, 1.0, 2.0], vec![0.2, 0.5, 1.0], 0.0).unwrap();
        let u = u_lower_bound(&sks, 2.0, 1.0);
        assert_abs_diff_eq!(u.eval(2.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.eval(0.0), 0.2 / 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.eval(1.0), 0.5 / 1.5, epsilon = 1e-15);
    }

    #[test]
    fn u_bound_gamma_one_is_identity() {
        let sks = StepFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.3, 0.9], 0.0).unwrap();
        for m in [-1.0, 0.5, 1.0, 3.0] {
            assert_eq!(u_lower_bound(&sks, 1.0, m).levels(), sks.levels());
        }
    }

    #[test]
    fn u_bound_monotone_and_capped() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let k = rng.random_range(2..20);
            let mut levels: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..0.95)).collect();
            levels.sort_by(f64::total_cmp);
            let sks = StepFunction::new((0..k).map(|i| i as f64).collect(), levels, 0.0).unwrap();
            let m = rng.random_range(-1.0..k as f64);
            let u = u_lower_bound(&sks, rng.random_range(1.0..10.0), m);
            assert!(u.levels().windows(2).all(|w| w[0] <= w[1]));
            assert!(u.levels().iter().all(|&l| (0.0..=1.0).contains(&l)));
        }
    }

    #[test]
    fn majorant_three_point_hull() {
        let h = log_concave_majorant_of_points(&[0.0, 1.0, 2.0], &[1.0, (-2f64).exp(), (-1f64).exp()]).unwrap();
        assert_abs_diff_eq!(h.log_eval(0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.log_eval(1.0).unwrap(), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(h.log_eval(2.0).unwrap(), -1.0, epsilon = 1e-15);
        assert_eq!(h.vertices().count(), 2);
        assert!(h.eval(2.5).is_none());
    }

    #[test]
    fn majorant_of_concave_sequence_is_exact() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let logs: Vec<f64> = xs.iter().map(|x| -(7.0 - x) * (7.0 - x) / 20.0).collect();
        let levels: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        let u = StepFunction::new(xs.clone(), levels.clone(), 0.0).unwrap();
        let h = log_concave_majorant(&u).unwrap();
        for (x, l) in xs.iter().zip(&levels) {
            assert_abs_diff_eq!(h.eval(*x).unwrap(), *l, epsilon = 1e-12);
        }
    }

    #[test]
    fn majorant_dominates_random_steps() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let k = rng.random_range(1..40);
            let mut levels: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
            levels.sort_by(f64::total_cmp);
            let mut x = 0.0;
            let xs: Vec<f64> = (0..k).map(|_| { x += rng.random_range(0.01..2.0); x }).collect();
            let u = StepFunction::new(xs.clone(), levels.clone(), 0.0).unwrap();
            let h = log_concave_majorant(&u).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for (x, l) in xs.iter().zip(&levels) {
                if *l > 0.0 {
                    let v = h.eval(*x).unwrap();
                    assert!(v >= l * (1.0 - 1e-12), "{v} < {l}");
                    assert!(v >= prev);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn majorant_needs_a_positive_level() {
        let u = StepFunction::new(vec![0.0, 1.0], vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(log_concave_majorant(&u), Err(Error::Degenerate(_))));
    }
}

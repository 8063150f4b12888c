//! Structured solver for ratio-bounded weight problems.
//!
//! Writing `w_i = u_i / sum(u)` with `u_i` in `[1, gamma]` turns the ratio
//! bound into a box, and every ECDF row into a homogeneous row in `u`. Tied
//! observations are interchangeable, so one variable per distinct value
//! carries the group total `U_g` in `[c_g, gamma c_g]`.
//!
//! The fractional objective `sum U_g Y_g / sum U_g` is handled by
//! Dinkelbach's iteration (maximize `sum U_g (Y_g - lambda)`, update
//! `lambda` to the attained ratio). Each inner problem is a bounded dual
//! simplex on a dense tableau that contains only the ECDF rows found
//! violated so far; since every variable is boxed, the slack basis is always
//! dual feasible and no phase 1 is needed.

use super::{CdfRow, Sense};
use crate::error::{Error, Result};
use crate::sample::Sample;

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-9;
const ROW_VIOLATION_TOL: f64 = 1e-10;
const ROWS_PER_ROUND: usize = 24;
const MAX_DINKELBACH_STEPS: usize = 100;

/// Result of [`optimize_weights`].
#[derive(Debug, Clone, PartialEq)]
pub enum RatioOutcome {
    Optimal {
        /// Per-observation weights aligned to the sorted sample.
        weights: Vec<f64>,
        objective: f64,
        /// ECDF rows that had to be added before no row was violated.
        active_rows: usize,
    },
    Infeasible,
}

struct BoxedDual {
    nstruct: usize,
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    // row holding each column when basic
    basic_row: Vec<Option<usize>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    pivots: usize,
}

impl BoxedDual {
    fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let n = lower.len();
        BoxedDual {
            nstruct: n,
            t: Vec::new(),
            basis: Vec::new(),
            basic_row: vec![None; n],
            x: lower.clone(),
            lower,
            upper,
            cost: vec![0.0; n],
            d: vec![0.0; n],
            pivots: 0,
        }
    }

    fn ncols(&self) -> usize {
        self.lower.len()
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.upper[j] - self.lower[j] <= PRIMAL_TOL * (1.0 + self.lower[j].abs())
    }

    fn at_upper(&self, j: usize) -> bool {
        self.x[j] > 0.5 * (self.lower[j] + self.upper[j])
    }

    /// Sets structural costs, moves dual-infeasible nonbasics to their other bound.
    fn set_objective(&mut self, c: &[f64]) {
        self.cost[..self.nstruct].copy_from_slice(c);
        self.d.copy_from_slice(&self.cost);
        for (i, row) in self.t.iter().enumerate() {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                for (d, v) in self.d.iter_mut().zip(row) {
                    *d -= cb * v;
                }
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
        for j in 0..self.ncols() {
            if self.basic_row[j].is_some() {
                continue;
            }
            if self.d[j] > 0.0 {
                self.x[j] = self.upper[j];
            } else if self.d[j] < 0.0 {
                self.x[j] = self.lower[j];
            }
        }
        self.recompute_basics();
    }

    /// `x_B = -B^{-1} N x_N` (all rows are homogeneous).
    fn recompute_basics(&mut self) {
        for (i, row) in self.t.iter().enumerate() {
            let mut v = 0.0;
            for (j, (&a, &xj)) in row.iter().zip(&self.x).enumerate() {
                if a != 0.0 && self.basic_row[j].is_none() {
                    v -= a * xj;
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    /// Adds `a . x_struct <= 0`. Returns `false` if no point of the box satisfies it.
    fn add_row(&mut self, a: &[f64]) -> bool {
        // slack = -a.x ranges over [s_min, s_max] on the box
        let (mut s_min, mut s_max) = (0.0, 0.0);
        for j in 0..self.nstruct {
            let (p, q) = (-a[j] * self.lower[j], -a[j] * self.upper[j]);
            s_min += p.min(q);
            s_max += p.max(q);
        }
        let scale: f64 = 1.0 + a.iter().zip(&self.upper).map(|(a, u)| (a * u).abs()).sum::<f64>();
        if s_max < -PRIMAL_TOL * scale {
            return false;
        }
        if s_min >= 0.0 {
            // satisfied everywhere on the box
            return true;
        }
        let col = self.ncols();
        for row in self.t.iter_mut() {
            row.push(0.0);
        }
        self.lower.push(0.0);
        self.upper.push(s_max.max(0.0));
        self.cost.push(0.0);
        self.d.push(0.0);
        self.basic_row.push(Some(self.t.len()));

        let mut row = vec![0.0; col + 1];
        row[..self.nstruct].copy_from_slice(a);
        row[col] = 1.0;
        for (i, trow) in self.t.iter().enumerate() {
            let b = self.basis[i];
            if b < self.nstruct {
                let f = row[b];
                if f != 0.0 {
                    for (v, tv) in row.iter_mut().zip(trow) {
                        *v -= f * tv;
                    }
                    row[b] = 0.0;
                }
            }
        }
        let slack: f64 = -a.iter().zip(&self.x).map(|(a, x)| a * x).sum::<f64>();
        self.x.push(slack);
        self.t.push(row);
        self.basis.push(col);
        true
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.t[r][q];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let prow = std::mem::take(&mut self.t[r]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, pv) in self.d.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
        self.d[q] = 0.0;
        self.t[r] = prow;
        let leaving = self.basis[r];
        self.basic_row[leaving] = None;
        self.basic_row[q] = Some(r);
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Runs dual simplex iterations until primal feasible. `Ok(false)` means infeasible.
    fn dual_simplex(&mut self) -> Result<bool> {
        let cap = 200 * (self.t.len() + self.ncols()) + 10_000;
        let mut iters = 0usize;
        loop {
            iters += 1;
            if iters > cap {
                return Err(Error::SolverFailure(format!(
                    "dual simplex exceeded {cap} pivots ({} rows)",
                    self.t.len()
                )));
            }
            // leaving row: largest bound violation
            let mut leave: Option<(usize, f64, bool)> = None;
            for (i, &b) in self.basis.iter().enumerate() {
                let v = self.x[b];
                let (lo, hi) = (self.lower[b], self.upper[b]);
                let (viol, below) = if v < lo - PRIMAL_TOL * (1.0 + lo.abs()) {
                    (lo - v, true)
                } else if v > hi + PRIMAL_TOL * (1.0 + hi.abs()) {
                    (v - hi, false)
                } else {
                    continue;
                };
                if leave.map_or(true, |(_, best, _)| viol > best) {
                    leave = Some((i, viol, below));
                }
            }
            let Some((r, _, below)) = leave else {
                self.recompute_basics();
                return Ok(true);
            };
            let row = &self.t[r];
            // eligible entering columns
            let eligible = |j: usize, alpha: f64| -> bool {
                if self.basic_row[j].is_some() || alpha.abs() <= PIVOT_TOL || self.is_fixed(j) {
                    return false;
                }
                let up = self.at_upper(j);
                if below {
                    (!up && alpha < 0.0) || (up && alpha > 0.0)
                } else {
                    (!up && alpha > 0.0) || (up && alpha < 0.0)
                }
            };
            let mut theta_max = f64::INFINITY;
            for (j, &alpha) in row.iter().enumerate() {
                if eligible(j, alpha) {
                    theta_max = theta_max.min((self.d[j].abs() + DUAL_TOL) / alpha.abs());
                }
            }
            if theta_max.is_infinite() {
                return Ok(false);
            }
            let mut entering: Option<(usize, f64)> = None;
            for (j, &alpha) in row.iter().enumerate() {
                if eligible(j, alpha) && self.d[j].abs() / alpha.abs() <= theta_max {
                    if entering.map_or(true, |(_, best)| alpha.abs() > best) {
                        entering = Some((j, alpha.abs()));
                    }
                }
            }
            let (q, _) = entering.expect("theta_max finite implies a candidate");
            let leaving = self.basis[r];
            let target = if below { self.lower[leaving] } else { self.upper[leaving] };
            let alpha = self.t[r][q];
            let delta = (self.x[leaving] - target) / alpha;
            self.x[q] += delta;
            for (i, trow) in self.t.iter().enumerate() {
                let b = self.basis[i];
                self.x[b] -= trow[q] * delta;
            }
            self.x[leaving] = target;
            self.pivot(r, q);
        }
    }
}

/// Optimizes the weighted mean over normalized weights with
/// `max(w) / min(w) <= gamma` subject to the given ECDF rows.
///
/// Returns per-observation weights; tied observations share their group's
/// weight equally.
pub fn optimize_weights(sample: &Sample, gamma: f64, rows: &[CdfRow], sense: Sense) -> Result<RatioOutcome> {
    if !(gamma.is_finite() && gamma >= 1.0) {
        return Err(Error::invalid(format!("gamma must be >= 1, got {gamma}")));
    }
    let distinct = sample.distinct_values();
    let ngroups = distinct.len();
    for row in rows {
        if row.terms.iter().any(|&(k, _)| k > ngroups) {
            return Err(Error::invalid("ECDF row references a position past the last value"));
        }
    }
    let counts: Vec<f64> = sample.group_counts().into_iter().map(|c| c as f64).collect();
    let center = sample.mean();
    let sign = match sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let y: Vec<f64> = distinct.iter().map(|v| sign * (v - center)).collect();
    let yscale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let lower = counts.clone();
    let upper: Vec<f64> = counts.iter().map(|c| gamma * c).collect();
    let mut solver = BoxedDual::new(lower, upper);
    let mut active = vec![false; rows.len()];
    let mut active_rows = 0usize;
    let mut prefix = vec![0.0; ngroups + 1];

    let mut lambda = 0.0;
    let shifted = |lambda: f64| y.iter().map(|v| v - lambda).collect::<Vec<_>>();
    solver.set_objective(&shifted(lambda));

    for _ in 0..MAX_DINKELBACH_STEPS {
        loop {
            if !solver.dual_simplex()? {
                return Ok(RatioOutcome::Infeasible);
            }
            let u = &solver.x[..ngroups];
            let total: f64 = u.iter().sum();
            for g in 0..ngroups {
                prefix[g + 1] = prefix[g] + u[g] / total;
            }
            let mut violated: Vec<(f64, usize)> = rows
                .iter()
                .enumerate()
                .filter(|(i, _)| !active[*i])
                .filter_map(|(i, row)| {
                    let v = -row.slack(&prefix);
                    (v > ROW_VIOLATION_TOL).then_some((v, i))
                })
                .collect();
            if violated.is_empty() {
                break;
            }
            violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for &(_, i) in violated.iter().take(ROWS_PER_ROUND) {
                active[i] = true;
                active_rows += 1;
                let row = &rows[i];
                let mut a = vec![-row.rhs; ngroups];
                for &(k, c) in &row.terms {
                    for v in a.iter_mut().take(k) {
                        *v += c;
                    }
                }
                if !solver.add_row(&a) {
                    return Ok(RatioOutcome::Infeasible);
                }
            }
        }
        let u = &solver.x[..ngroups];
        let den: f64 = u.iter().sum();
        let num: f64 = u.iter().zip(&y).map(|(u, y)| u * y).sum();
        let gap = num - lambda * den;
        lambda = num / den;
        if gap.abs() <= 1e-13 * den * yscale {
            break;
        }
        solver.set_objective(&shifted(lambda));
    }

    let u = &solver.x[..ngroups];
    let total: f64 = u.iter().sum();
    let mut weights = Vec::with_capacity(sample.len());
    for (g, &ug) in u.iter().enumerate() {
        let per = ug / counts[g] / total;
        weights.extend(std::iter::repeat(per).take(counts[g] as usize));
    }
    let objective = weights.iter().zip(sample.values()).map(|(w, v)| w * v).sum();
    Ok(RatioOutcome::Optimal { weights, objective, active_rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{build_weight_lp, solve, LpStatus};
    use rand::{Rng, SeedableRng};

    fn objective(outcome: &RatioOutcome) -> Option<f64> {
        match outcome {
            RatioOutcome::Optimal { objective, .. } => Some(*objective),
            RatioOutcome::Infeasible => None,
        }
    }

    #[test]
    fn unconstrained_three_point() {
        let s = Sample::new(vec![0.0, 1.0, 2.0]).unwrap();
        let hi = optimize_weights(&s, 2.0, &[], Sense::Maximize).unwrap();
        let lo = optimize_weights(&s, 2.0, &[], Sense::Minimize).unwrap();
        assert!((objective(&hi).unwrap() - 1.25).abs() < 1e-12);
        assert!((objective(&lo).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn ties_share_group_weight() {
        let s = Sample::new(vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        let RatioOutcome::Optimal { weights, .. } = optimize_weights(&s, 3.0, &[], Sense::Maximize).unwrap()
        else {
            panic!("feasible")
        };
        assert_eq!(weights[1], weights[2]);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_rows_are_reported() {
        let s = Sample::new(vec![0.0, 1.0, 2.0]).unwrap();
        // P(1) >= 0.9 is impossible with ratio 2 (max is 2/4)
        let rows = [CdfRow::lower(1, 0.9)];
        assert_eq!(optimize_weights(&s, 2.0, &rows, Sense::Maximize).unwrap(), RatioOutcome::Infeasible);
        // gamma = 1 pins the weights
        let rows = [CdfRow::upper(1, 0.2)];
        assert_eq!(optimize_weights(&s, 1.0, &rows, Sense::Minimize).unwrap(), RatioOutcome::Infeasible);
    }

    fn random_rows(rng: &mut impl Rng, k_max: usize) -> Vec<CdfRow> {
        let nrows = rng.random_range(0..6);
        (0..nrows)
            .map(|_| {
                let nterms = rng.random_range(1..3);
                let terms = (0..nterms)
                    .map(|_| (rng.random_range(0..=k_max), if rng.random_bool(0.5) { 1.0 } else { -1.0 }))
                    .collect();
                CdfRow { terms, rhs: rng.random_range(-0.6..0.9) }
            })
            .collect()
    }

    #[test]
    fn matches_dense_simplex_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut feasible = 0;
        for _ in 0..300 {
            let n = rng.random_range(2..12);
            let vals: Vec<f64> = (0..n).map(|_| (rng.random_range(0.0..10.0f64) * 2.0).round() / 2.0).collect();
            let s = Sample::new(vals).unwrap();
            let gamma = [1.0, 1.5, 2.0, 5.0][rng.random_range(0..4)];
            let rows = random_rows(&mut rng, s.distinct_values().len());
            for sense in [Sense::Maximize, Sense::Minimize] {
                let fast = optimize_weights(&s, gamma, &rows, sense).unwrap();
                let dense = solve(&build_weight_lp(&s, gamma, &rows, sense)).unwrap();
                match (objective(&fast), dense.status) {
                    (Some(a), LpStatus::Optimal) => {
                        assert!((a - dense.objective_value).abs() < 1e-7, "{a} vs {}", dense.objective_value);
                        feasible += 1;
                    }
                    (None, LpStatus::Infeasible) => {}
                    (a, b) => panic!("disagreement: {a:?} vs {b:?} on {:?} gamma {gamma}", s.values()),
                }
            }
        }
        assert!(feasible > 200);
    }
}

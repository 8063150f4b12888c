//! Dense two-phase tableau simplex.
//!
//! Dantzig pricing, falling back to Bland's rule for the rest of the solve
//! once `10 * (rows + cols)` consecutive degenerate pivots have been made.

use super::{LpProblem, LpResult, LpStatus, Sense};
use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-10;
const PHASE1_INFEASIBLE: f64 = 1e-7;
const FEASIBILITY_TOL: f64 = 1e-8;
const MAX_PIVOTS: usize = 1_000_000;

struct Tableau {
    // rows x (cols + 1); last column is the right-hand side
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.a[r][self.cols]
    }

    fn pivot(&mut self, r: usize, q: usize, cost: &mut [f64]) {
        let p = self.a[r][q];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = std::mem::take(&mut self.a[r]);
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        let f = cost[q];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            cost[q] = 0.0;
        }
        self.a[r] = pivot_row;
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Minimizes with reduced-cost row `cost` (length cols + 1, last entry is -objective).
    /// Columns with `allowed[j] == false` never enter.
    fn run(&mut self, cost: &mut [f64], allowed: &[bool]) -> Result<Outcome> {
        let rows = self.a.len();
        let degenerate_limit = 10 * (rows + self.cols);
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::SolverFailure(format!("simplex exceeded {MAX_PIVOTS} pivots")));
            }
            let entering = if bland {
                (0..self.cols).find(|&j| allowed[j] && cost[j] < -COST_EPS)
            } else {
                (0..self.cols)
                    .filter(|&j| allowed[j] && cost[j] < -COST_EPS)
                    .min_by(|&i, &j| cost[i].total_cmp(&cost[j]))
            };
            let Some(q) = entering else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..rows {
                let arq = self.a[r][q];
                if arq > PIVOT_EPS {
                    let ratio = self.rhs(r).max(0.0) / arq;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            if ratio < best - 1e-12 {
                                true
                            } else if ratio <= best + 1e-12 {
                                if bland {
                                    self.basis[r] < self.basis[lr]
                                } else {
                                    arq > self.a[lr][q]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, cost);
        }
    }
}

/// Solves a linear program with the dense two-phase simplex method.
///
/// Returns `Err(SolverFailure)` only when the pivot cap is hit or the final
/// basis fails the feasibility re-check; infeasible and unbounded problems
/// are reported through [`LpStatus`].
pub fn solve(problem: &LpProblem) -> Result<LpResult> {
    problem.validate()?;
    let n = problem.num_vars();
    let lb = &problem.lower_bounds;

    // shift x = x' + lb so every variable is >= 0
    struct StdRow {
        coef: Vec<f64>,
        rhs: f64,
        slack: Option<f64>,
    }
    let mut std_rows: Vec<StdRow> = Vec::new();
    for row in &problem.eq_constraints {
        let rhs = row.rhs - row.dot(lb);
        std_rows.push(StdRow { coef: row.coefficients.clone(), rhs, slack: None });
    }
    for row in &problem.le_constraints {
        let rhs = row.rhs - row.dot(lb);
        std_rows.push(StdRow { coef: row.coefficients.clone(), rhs, slack: Some(1.0) });
    }
    for r in std_rows.iter_mut() {
        if r.rhs < 0.0 {
            r.rhs = -r.rhs;
            r.coef.iter_mut().for_each(|v| *v = -*v);
            r.slack = r.slack.map(|s| -s);
        }
    }

    let m = std_rows.len();
    let n_slack = std_rows.iter().filter(|r| r.slack.is_some()).count();
    let needs_art: Vec<bool> = std_rows.iter().map(|r| r.slack != Some(1.0)).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let cols = n + n_slack + n_art;

    let mut a = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut is_art = vec![false; cols];
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (i, r) in std_rows.iter().enumerate() {
        a[i][..n].copy_from_slice(&r.coef);
        a[i][cols] = r.rhs;
        if let Some(s) = r.slack {
            a[i][next_slack] = s;
            if s > 0.0 {
                basis[i] = next_slack;
            }
            next_slack += 1;
        }
        if needs_art[i] {
            a[i][next_art] = 1.0;
            is_art[next_art] = true;
            basis[i] = next_art;
            next_art += 1;
        }
    }
    let mut t = Tableau { a, basis, cols, pivots: 0 };

    // phase 1: minimize the sum of artificials
    if n_art > 0 {
        let mut cost = vec![0.0; cols + 1];
        for j in 0..cols {
            if is_art[j] {
                cost[j] = 1.0;
            }
        }
        for i in 0..m {
            if is_art[t.basis[i]] {
                for (c, v) in cost.iter_mut().zip(&t.a[i]) {
                    *c -= v;
                }
            }
        }
        let allowed = vec![true; cols];
        t.run(&mut cost, &allowed)?;
        let infeasibility = -cost[cols];
        if infeasibility > PHASE1_INFEASIBLE {
            return Ok(LpResult { status: LpStatus::Infeasible, solution: Vec::new(), objective_value: f64::NAN });
        }
        // drive zero-valued artificials out of the basis where possible
        for i in 0..m {
            if is_art[t.basis[i]] {
                if let Some(q) = (0..cols).find(|&j| !is_art[j] && t.a[i][j].abs() > PIVOT_EPS) {
                    let mut dummy = vec![0.0; cols + 1];
                    t.pivot(i, q, &mut dummy);
                }
            }
        }
    }

    // phase 2
    let sign = match problem.sense {
        Sense::Maximize => -1.0,
        Sense::Minimize => 1.0,
    };
    let mut cost = vec![0.0; cols + 1];
    for j in 0..n {
        cost[j] = sign * problem.objective[j];
    }
    for i in 0..m {
        let cb = cost[t.basis[i]];
        if cb != 0.0 {
            let row = t.a[i].clone();
            for (c, v) in cost.iter_mut().zip(&row) {
                *c -= cb * v;
            }
        }
    }
    let allowed: Vec<bool> = is_art.iter().map(|&b| !b).collect();
    let outcome = t.run(&mut cost, &allowed)?;
    if let Outcome::Unbounded = outcome {
        return Ok(LpResult { status: LpStatus::Unbounded, solution: Vec::new(), objective_value: f64::NAN });
    }

    let mut x = lb.clone();
    for i in 0..m {
        let j = t.basis[i];
        if j < n {
            x[j] += t.rhs(i).max(0.0);
        }
    }
    let violation = problem.max_violation(&x);
    if violation > FEASIBILITY_TOL {
        return Err(Error::SolverFailure(format!(
            "optimal basis violates constraints by {violation:e}"
        )));
    }
    let objective_value = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpResult { status: LpStatus::Optimal, solution: x, objective_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Row;
    use proptest::prelude::*;

    #[test]
    fn single_variable() {
        let mut p = LpProblem::new(vec![1.0], Sense::Maximize);
        p.add_le(vec![1.0], 1.0);
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.solution[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_optimum_value_is_unique() {
        let mut p = LpProblem::new(vec![1.0, 1.0], Sense::Maximize);
        p.add_le(vec![1.0, 1.0], 1.0);
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(vec![1.0], Sense::Maximize);
        p.add_le(vec![1.0], -1.0);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);

        let p = LpProblem::new(vec![1.0, 0.0], Sense::Maximize);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);

        let mut p = LpProblem::new(vec![1.0, 1.0], Sense::Minimize);
        p.add_eq(vec![1.0, 1.0], 1.0).add_eq(vec![1.0, 1.0], 2.0);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_lower_bounds() {
        // min x + 2y  s.t. x + y = 3, x <= 2, y >= 0.5, x >= -1
        let mut p = LpProblem::new(vec![1.0, 2.0], Sense::Minimize);
        p.lower_bounds = vec![-1.0, 0.5];
        p.add_eq(vec![1.0, 1.0], 3.0).add_le(vec![1.0, 0.0], 2.0);
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective_value - 4.0).abs() < 1e-10);
    }

    #[test]
    fn redundant_equalities() {
        let mut p = LpProblem::new(vec![1.0, 0.0, 0.0], Sense::Maximize);
        p.add_eq(vec![1.0, 1.0, 1.0], 1.0)
            .add_eq(vec![2.0, 2.0, 2.0], 2.0)
            .add_le(vec![1.0, -1.0, 0.0], 0.0);
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective_value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rejects_malformed_rows() {
        let mut p = LpProblem::new(vec![1.0, 1.0], Sense::Maximize);
        p.le_constraints.push(Row::new(vec![1.0], 1.0));
        assert!(matches!(solve(&p), Err(Error::InvalidInput(_))));
    }

    /// Exhaustive vertex enumeration over all choices of `n` tight constraints.
    fn vertex_oracle(p: &LpProblem) -> Option<f64> {
        let n = p.num_vars();
        let mut all: Vec<(Vec<f64>, f64)> =
            p.le_constraints.iter().map(|r| (r.coefficients.clone(), r.rhs)).collect();
        for j in 0..n {
            let mut c = vec![0.0; n];
            c[j] = -1.0;
            all.push((c, -p.lower_bounds[j]));
        }
        let m = all.len();
        let mut best: Option<f64> = None;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            // solve the n x n system with Gaussian elimination
            let mut a: Vec<Vec<f64>> = idx.iter().map(|&i| {
                let mut r = all[i].0.clone();
                r.push(all[i].1);
                r
            }).collect();
            let mut ok = true;
            for c in 0..n {
                let piv = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
                if a[piv][c].abs() < 1e-10 {
                    ok = false;
                    break;
                }
                a.swap(c, piv);
                for r in 0..n {
                    if r != c {
                        let f = a[r][c] / a[c][c];
                        for k in c..=n {
                            a[r][k] -= f * a[c][k];
                        }
                    }
                }
            }
            if ok {
                let x: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
                if all.iter().all(|(c, b)| c.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() <= b + 1e-9) {
                    let v: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < m - n + i {
                    idx[i] += 1;
                    for k in i + 1..n {
                        idx[k] = idx[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn random_bounded_lps_match_vertex_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        for _ in 0..100 {
            let n = 5;
            let mut p = LpProblem::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect(), Sense::Maximize);
            // a box keeps every instance bounded
            for j in 0..n {
                let mut c = vec![0.0; n];
                c[j] = 1.0;
                p.add_le(c, rng.random_range(1.0..3.0));
            }
            for _ in 0..4 {
                p.add_le((0..n).map(|_| rng.random_range(-1.0..1.0)).collect(), rng.random_range(-0.5..2.0));
            }
            let oracle = vertex_oracle(&p);
            let r = solve(&p).unwrap();
            match oracle {
                Some(v) => {
                    assert_eq!(r.status, LpStatus::Optimal);
                    assert!((r.objective_value - v).abs() < 1e-7, "{} vs {v}", r.objective_value);
                    checked += 1;
                }
                None => assert_eq!(r.status, LpStatus::Infeasible),
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn solve_is_deterministic() {
        let mut p = LpProblem::new(vec![3.0, 1.0, 2.0], Sense::Maximize);
        p.add_le(vec![1.0, 1.0, 3.0], 30.0).add_le(vec![2.0, 2.0, 5.0], 24.0).add_le(vec![4.0, 1.0, 2.0], 36.0);
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        assert_eq!(a, b);
        assert!((a.objective_value - 28.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn optimal_solutions_are_feasible(
            c in proptest::collection::vec(-2.0f64..2.0, 3),
            rows in proptest::collection::vec((proptest::collection::vec(-1.0f64..1.0, 3), 0.1f64..2.0), 1..5),
        ) {
            let mut p = LpProblem::new(c, Sense::Maximize);
            for j in 0..3 {
                let mut e = vec![0.0; 3];
                e[j] = 1.0;
                p.add_le(e, 1.0);
            }
            for (r, b) in rows {
                p.add_le(r, b);
            }
            let r = solve(&p).unwrap();
            prop_assert_eq!(r.status, LpStatus::Optimal);
            prop_assert!(p.max_violation(&r.solution) <= 1e-8);
        }
    }
}

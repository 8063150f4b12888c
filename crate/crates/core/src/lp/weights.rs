use super::{LpProblem, LpResult, LpStatus, Row, Sense};
use crate::sample::Sample;

/// A linear constraint on a weighted ECDF, `sum_t coef_t * P(k_t) <= rhs`,
/// where `P(k)` is the weight carried by the `k` smallest distinct values
/// (`P(0) = 0`, `P(#distinct) = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct CdfRow {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl CdfRow {
    /// `P(k) <= rhs`.
    pub fn upper(k: usize, rhs: f64) -> Self {
        CdfRow { terms: vec![(k, 1.0)], rhs }
    }

    /// `P(k) >= rhs`.
    pub fn lower(k: usize, rhs: f64) -> Self {
        CdfRow { terms: vec![(k, -1.0)], rhs: -rhs }
    }

    /// `rhs - sum_t coef_t P(k_t)`, given the prefix weights `prefix[k] = P(k)`.
    pub fn slack(&self, prefix: &[f64]) -> f64 {
        self.rhs - self.terms.iter().map(|&(k, c)| c * prefix[k]).sum::<f64>()
    }
}

/// Expresses ECDF rows over per-observation weights.
pub fn cdf_rows_to_weight_rows(sample: &Sample, rows: &[CdfRow]) -> Vec<Row> {
    let n = sample.len();
    rows.iter()
        .map(|row| {
            let mut coef = vec![0.0; n];
            for &(k, c) in &row.terms {
                for v in coef.iter_mut().take(sample.group_start(k)) {
                    *v += c;
                }
            }
            Row::new(coef, row.rhs)
        })
        .collect()
}

/// LP over `(w_1, .., w_n, s)`: `sum w = 1`, `s <= w_i <= gamma s`, plus the
/// given ECDF rows; the objective is the weighted mean `sum w_i Y_i`.
pub fn build_weight_lp(sample: &Sample, gamma: f64, extra_le: &[CdfRow], sense: Sense) -> LpProblem {
    let n = sample.len();
    let mut objective = sample.values().to_vec();
    objective.push(0.0);
    let mut lp = LpProblem::new(objective, sense);
    let mut sum = vec![1.0; n + 1];
    sum[n] = 0.0;
    lp.add_eq(sum, 1.0);
    for i in 0..n {
        let mut lo = vec![0.0; n + 1];
        lo[n] = 1.0;
        lo[i] = -1.0;
        lp.add_le(lo, 0.0);
        let mut hi = vec![0.0; n + 1];
        hi[i] = 1.0;
        hi[n] = -gamma;
        lp.add_le(hi, 0.0);
    }
    for row in cdf_rows_to_weight_rows(sample, extra_le) {
        let mut coef = row.coefficients;
        coef.push(0.0);
        lp.add_le(coef, row.rhs);
    }
    lp
}

/// The weight part of an optimal [`build_weight_lp`] solution.
pub fn weights_from_solution(result: &LpResult, n: usize) -> Option<Vec<f64>> {
    (result.status == LpStatus::Optimal).then(|| result.solution[..n].to_vec())
}

//! Linear programming: a dense two-phase simplex for general problems,
//! the builder that turns ratio-bounded weight problems into LP instances,
//! and a bounded dual simplex specialized to those problems.

mod dump;
mod ratio;
mod simplex;
mod weights;

pub use dump::{dump_problem, parse_dump};
pub use ratio::{optimize_weights, RatioOutcome};
pub use simplex::solve;
pub use weights::{build_weight_lp, cdf_rows_to_weight_rows, weights_from_solution, CdfRow};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// One linear constraint `coefficients . x (<= | =) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

impl Row {
    pub fn new(coefficients: Vec<f64>, rhs: f64) -> Self {
        Row { coefficients, rhs }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub sense: Sense,
    pub eq_constraints: Vec<Row>,
    pub le_constraints: Vec<Row>,
    /// Per-variable lower bounds; variables have no upper bound.
    pub lower_bounds: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, sense: Sense) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            sense,
            eq_constraints: Vec::new(),
            le_constraints: Vec::new(),
            lower_bounds: vec![0.0; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_eq(&mut self, coefficients: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_constraints.push(Row::new(coefficients, rhs));
        self
    }

    pub fn add_le(&mut self, coefficients: Vec<f64>, rhs: f64) -> &mut Self {
        self.le_constraints.push(Row::new(coefficients, rhs));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::invalid("LP has no variables"));
        }
        if self.lower_bounds.len() != n {
            return Err(Error::invalid("lower bounds do not match the variable count"));
        }
        if self.objective.iter().chain(&self.lower_bounds).any(|v| !v.is_finite()) {
            return Err(Error::invalid("LP objective and bounds must be finite"));
        }
        for row in self.eq_constraints.iter().chain(&self.le_constraints) {
            if row.coefficients.len() != n {
                return Err(Error::invalid(format!(
                    "constraint row has {} coefficients for {n} variables",
                    row.coefficients.len()
                )));
            }
            if !row.rhs.is_finite() || row.coefficients.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("constraint rows must be finite"));
            }
        }
        Ok(())
    }

    /// Largest constraint violation of `x`, each scaled by `1 + |rhs|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let eq = self.eq_constraints.iter().map(|r| (r.dot(x) - r.rhs).abs() / (1.0 + r.rhs.abs()));
        let le = self.le_constraints.iter().map(|r| (r.dot(x) - r.rhs).max(0.0) / (1.0 + r.rhs.abs()));
        let lb = x.iter().zip(&self.lower_bounds).map(|(v, l)| (l - v).max(0.0) / (1.0 + l.abs()));
        eq.chain(le).chain(lb).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub solution: Vec<f64>,
    pub objective_value: f64,
}

use crate::error::{Error, Result};

/// Right-continuous nondecreasing piecewise-constant function.
///
/// Takes `pre_level` on `(-inf, breakpoints[0])` and `levels[k]` on
/// `[breakpoints[k], breakpoints[k + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
    pre_level: f64,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>, pre_level: f64) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != levels.len() {
            return Err(Error::invalid(
                "step function needs one level per breakpoint and at least one breakpoint",
            ));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be finite and strictly increasing"));
        }
        let in_unit = |x: f64| (-1e-12..=1.0 + 1e-12).contains(&x);
        if !in_unit(pre_level) || levels.iter().any(|&l| !in_unit(l)) {
            return Err(Error::invalid("step levels must lie in [0, 1]"));
        }
        if pre_level > levels[0] + 1e-12 || levels.windows(2).any(|w| w[0] > w[1] + 1e-12) {
            return Err(Error::invalid("step levels must be nondecreasing"));
        }
        Ok(StepFunction { breakpoints, levels, pre_level })
    }

    pub(crate) fn new_unchecked(breakpoints: Vec<f64>, levels: Vec<f64>, pre_level: f64) -> Self {
        debug_assert_eq!(breakpoints.len(), levels.len());
        StepFunction { breakpoints, levels, pre_level }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn pre_level(&self) -> f64 {
        self.pre_level
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self.breakpoints.partition_point(|&b| b <= y) {
            0 => self.pre_level,
            k => self.levels[k - 1],
        }
    }

    /// Left limit `f(y-)`.
    pub fn left_limit(&self, y: f64) -> f64 {
        match self.breakpoints.partition_point(|&b| b < y) {
            0 => self.pre_level,
            k => self.levels[k - 1],
        }
    }

    pub fn final_level(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }
}

use crate::constraint::{ConstraintSpec, Theta};
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Grid point of the plausibility-set union that produced a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    /// Symmetry center or log-concave threshold.
    Center(f64),
    Theta(Theta),
}

/// Probability weights over the sorted sample with their weighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSolution {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub feasible: bool,
    pub grid_point: Option<GridPoint>,
}

impl WeightSolution {
    pub fn from_weights(sample: &Sample, weights: Vec<f64>, grid_point: Option<GridPoint>) -> Self {
        let objective = weights.iter().zip(sample.values()).map(|(w, y)| w * y).sum();
        WeightSolution { weights, objective, feasible: true, grid_point }
    }

    pub fn uniform(sample: &Sample) -> Self {
        let n = sample.len();
        Self::from_weights(sample, vec![1.0 / n as f64; n], None)
    }

    /// `max(w) / min(w)`.
    pub fn ratio(&self) -> f64 {
        let (lo, hi) = self
            .weights
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| (lo.min(w), hi.max(w)));
        hi / lo
    }

    /// Checks normalization, the weight-ratio bound and the stored objective.
    pub fn check(&self, sample: &Sample, gamma: f64) -> Result<()> {
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("weights sum to {total}")));
        }
        if self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("weights must be positive"));
        }
        if self.ratio() > gamma * (1.0 + 1e-9) {
            return Err(Error::invalid(format!("weight ratio {} exceeds gamma {gamma}", self.ratio())));
        }
        let obj: f64 = self.weights.iter().zip(sample.values()).map(|(w, y)| w * y).sum();
        let scale = 1.0 + sample.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if (obj - self.objective).abs() > 1e-9 * scale {
            return Err(Error::invalid("objective does not match the weights"));
        }
        Ok(())
    }
}

/// Constants that entered a bound computation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BandConstants {
    /// Parametric KS radius before relaxation.
    pub delta: Option<f64>,
    pub zeta: Option<f64>,
    pub sigma_sq: Option<f64>,
    /// Half-width actually imposed on the symmetric or parametric band.
    pub band: Option<f64>,
    /// Downward shift applied to the ECDF by the log-concave envelope.
    pub ks_offset: Option<f64>,
}

/// Diagnostics recorded alongside an interval.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub constants: BandConstants,
    pub grid_points: usize,
    pub infeasible_upper: usize,
    pub infeasible_lower: usize,
    pub notes: Vec<String>,
}

/// Lower and upper endpoints together with the weightings that attain them.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_solution: WeightSolution,
    pub upper_solution: WeightSolution,
    pub method: ConstraintSpec,
    pub provenance: Provenance,
}

impl IdentificationInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Distance from `x` to the nearest point of the interval.
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lower {
            self.lower - x
        } else if x > self.upper {
            x - self.upper
        } else {
            0.0
        }
    }

    pub fn is_within(&self, other: &IdentificationInterval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }
}

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default number of equally spaced centers for the symmetric family.
pub const DEFAULT_SYMMETRIC_CENTERS: usize = 101;
/// Default cap on thresholds for the log-concave family.
pub const DEFAULT_LOGCONCAVE_THRESHOLDS: usize = 200;
/// Default (location, scale) grid size for the Gaussian family.
pub const DEFAULT_THETA_GRID: (usize, usize) = (21, 21);

/// Which shape constraint restricts the population distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    None,
    ParametricGaussian,
    Symmetric,
    LogConcave,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::None => "none",
            Family::ParametricGaussian => "normal",
            Family::Symmetric => "symmetric",
            Family::LogConcave => "logconcave",
        }
    }

    pub const ALL: [Family; 4] =
        [Family::None, Family::ParametricGaussian, Family::Symmetric, Family::LogConcave];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Family::None),
            "normal" | "gaussian" | "parametric" | "parametric-gaussian" => {
                Ok(Family::ParametricGaussian)
            }
            "symmetric" => Ok(Family::Symmetric),
            "logconcave" | "log-concave" => Ok(Family::LogConcave),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }
}

/// A (location, scale) pair of the Gaussian family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub location: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThetaGrid {
    /// `locations` x `scales` points over sample mean +/- 3 standard errors
    /// and `[0.5, 2]` times the sample standard deviation.
    Auto { locations: usize, scales: usize },
    Points(Vec<Theta>),
}

impl Default for ThetaGrid {
    fn default() -> Self {
        ThetaGrid::Auto { locations: DEFAULT_THETA_GRID.0, scales: DEFAULT_THETA_GRID.1 }
    }
}

/// Grid for the symmetry center or the log-concave threshold `m`.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterGrid {
    /// Family default, optionally with an explicit point count.
    Auto(Option<usize>),
    Points(Vec<f64>),
}

impl Default for CenterGrid {
    fn default() -> Self {
        CenterGrid::Auto(None)
    }
}

/// The active plausibility-set family together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpec {
    pub gamma: f64,
    pub family: Family,
    /// Level of the symmetry band; `None` means `1 / sqrt(n)`.
    pub alpha: Option<f64>,
    /// Extra band width added to the parametric (and symmetric) band.
    pub delta_star: f64,
    pub theta_grid: ThetaGrid,
    pub m_grid: CenterGrid,
}

impl ConstraintSpec {
    pub fn new(gamma: f64, family: Family) -> Self {
        ConstraintSpec {
            gamma,
            family,
            alpha: None,
            delta_star: 0.0,
            theta_grid: ThetaGrid::default(),
            m_grid: CenterGrid::default(),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_delta_star(mut self, delta_star: f64) -> Self {
        self.delta_star = delta_star;
        self
    }

    pub fn with_theta_grid(mut self, grid: ThetaGrid) -> Self {
        self.theta_grid = grid;
        self
    }

    pub fn with_m_grid(mut self, grid: CenterGrid) -> Self {
        self.m_grid = grid;
        self
    }

    pub fn resolved_alpha(&self, n: usize) -> f64 {
        self.alpha.unwrap_or(1.0 / (n as f64).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(Error::invalid(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::invalid(format!("alpha must lie in (0, 1), got {a}")));
            }
        }
        if !(self.delta_star >= 0.0) {
            return Err(Error::invalid(format!("delta* must be >= 0, got {}", self.delta_star)));
        }
        match (&self.family, &self.theta_grid) {
            (Family::ParametricGaussian, ThetaGrid::Auto { locations, scales })
                if *locations == 0 || *scales == 0 =>
            {
                return Err(Error::invalid("theta grid is empty"));
            }
            (Family::ParametricGaussian, ThetaGrid::Points(p)) => {
                if p.is_empty() {
                    return Err(Error::invalid("theta grid is empty"));
                }
                if p.iter().any(|t| !(t.scale > 0.0) || !t.location.is_finite()) {
                    return Err(Error::invalid("theta grid needs finite locations and positive scales"));
                }
            }
            _ => {}
        }
        if matches!(self.family, Family::Symmetric | Family::LogConcave) {
            match &self.m_grid {
                CenterGrid::Auto(Some(0)) => return Err(Error::invalid("m grid is empty")),
                CenterGrid::Points(p) if p.is_empty() => return Err(Error::invalid("m grid is empty")),
                CenterGrid::Points(p) if p.iter().any(|m| !m.is_finite()) => {
                    return Err(Error::invalid("m grid values must be finite"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

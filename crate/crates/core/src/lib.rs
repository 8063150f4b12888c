//! Bounds on a population mean when units enter the sample with unknown,
//! bounded selection probabilities.
//!
//! The sample is reweighted by odds that may vary within a factor `gamma`.
//! With no further assumptions the extreme weightings give the interval from
//! [`bounds::al_bounds`]. Shape restrictions on the population distribution
//! (parametric location-scale, symmetry, log-concavity) shrink the set of
//! admissible weightings; each family is handled by scanning a grid of
//! candidate parameters and solving a weight LP per point.
//!
//! ```
//! use shapebounds::bounds::al_bounds;
//! use shapebounds::sample::Sample;
//!
//! let s = Sample::new(vec![0.0, 1.0, 2.0]).unwrap();
//! let b = al_bounds(&s, 2.0).unwrap();
//! assert!(b.lower < 1.0 && b.upper > 1.0);
//! ```

pub mod bounds;
pub mod cli;
pub mod constraint;
pub mod dist;
pub mod error;
pub mod estimate;
pub mod lp;
pub mod numfmt;
pub mod sample;
pub mod sim;
pub mod solution;
pub mod step;

pub use error::{Error, Result};

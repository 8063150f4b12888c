//! Weighted CDFs behind the upper endpoints, as CSV ready for plotting.
//!
//! cargo run --release --example cdf_series > cdfs.csv

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use shapebounds::cli::cdf_dump;
use shapebounds::constraint::{ConstraintSpec, Family};
use shapebounds::sample::Sample;

fn main() -> shapebounds::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(502.0, 104.0).unwrap();
    let scores: Vec<f64> = (0..300).map(|_| f64::round(normal.sample(&mut rng))).collect();
    let sample = Sample::new(scores)?;
    print!("{}", cdf_dump(&sample, &ConstraintSpec::new(9.0, Family::None))?);
    Ok(())
}

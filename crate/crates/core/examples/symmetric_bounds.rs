//! Tightening the interval by assuming the population is symmetric.
//!
//! cargo run --release --example symmetric_bounds

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use shapebounds::bounds::{al_bounds, compute_bounds};
use shapebounds::constraint::{CenterGrid, ConstraintSpec, Family};
use shapebounds::sample::Sample;

fn main() -> shapebounds::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let normal = Normal::new(10.0, 2.0).unwrap();
    let sample = Sample::new((0..2000).map(|_| normal.sample(&mut rng)).collect())?;

    for gamma in [1.5, 2.0, 3.0] {
        let al = al_bounds(&sample, gamma)?;
        let spec = ConstraintSpec::new(gamma, Family::Symmetric);
        let sym = compute_bounds(&sample, &spec)?;
        println!(
            "gamma {gamma}: none [{:.3}, {:.3}]  symmetric [{:.3}, {:.3}]  band {:.4}",
            al.lower,
            al.upper,
            sym.lower,
            sym.upper,
            sym.provenance.constants.band.unwrap()
        );
    }

    // a coarser grid of centers can only shrink the union of plausible sets
    let coarse = ConstraintSpec::new(2.0, Family::Symmetric).with_m_grid(CenterGrid::Auto(Some(11)));
    let iv = compute_bounds(&sample, &coarse)?;
    println!("11 centers: [{:.3}, {:.3}], upper attained at {:?}", iv.lower, iv.upper, iv.upper_solution.grid_point);
    Ok(())
}

//! Normal-family bounds and the effect of the relaxation `delta*`.
//!
//! cargo run --release --example parametric_bounds

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use shapebounds::bounds::{al_bounds, compute_bounds};
use shapebounds::constraint::{ConstraintSpec, Family, ThetaGrid};
use shapebounds::sample::Sample;
use shapebounds::solution::GridPoint;

fn main() -> shapebounds::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let sample = Sample::new((0..1000).map(|_| normal.sample(&mut rng)).collect())?;
    let gamma = 4.0;
    let al = al_bounds(&sample, gamma)?;
    println!("none            [{:.4}, {:.4}]", al.lower, al.upper);

    let base = ConstraintSpec::new(gamma, Family::ParametricGaussian)
        .with_theta_grid(ThetaGrid::Auto { locations: 11, scales: 11 });
    for delta_star in [0.0, 0.01, 0.03, 0.1] {
        let iv = compute_bounds(&sample, &base.clone().with_delta_star(delta_star))?;
        let at = match iv.upper_solution.grid_point {
            Some(GridPoint::Theta(t)) => format!("({:.3}, {:.3})", t.location, t.scale),
            _ => "-".into(),
        };
        println!("delta* = {delta_star:<5} [{:.4}, {:.4}]  upper at {at}", iv.lower, iv.upper);
    }
    Ok(())
}

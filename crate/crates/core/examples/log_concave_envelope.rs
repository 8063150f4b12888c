//! The lower-envelope chain used for log-concave populations, then the
//! resulting interval.
//!
//! cargo run --release --example log_concave_envelope

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use shapebounds::bounds::{
    al_bounds, compute_bounds, ks_lower_envelope, ks_offset, log_concave_majorant, u_lower_bound,
};
use shapebounds::constraint::{ConstraintSpec, Family};
use shapebounds::sample::Sample;

fn main() -> shapebounds::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gamma_dist = Gamma::new(4.0, 1.0).unwrap();
    let sample = Sample::new((0..800).map(|_| gamma_dist.sample(&mut rng)).collect())?;
    let gamma = 3.0;

    let sks = ks_lower_envelope(&sample)?;
    println!("ECDF lowered by {:.4}", ks_offset(sample.len())?);
    let m = sample.distinct_values()[400];
    let u = u_lower_bound(&sks, gamma, m);
    let hull = log_concave_majorant(&u)?;
    println!("threshold m = {m:.3}; majorant vertices:");
    for (x, log_value) in hull.vertices().step_by(4) {
        println!("  {x:7.3}  {:.4}", log_value.exp());
    }

    let al = al_bounds(&sample, gamma)?;
    let lc = compute_bounds(&sample, &ConstraintSpec::new(gamma, Family::LogConcave))?;
    println!("none       [{:.3}, {:.3}] width {:.3}", al.lower, al.upper, al.width());
    println!("logconcave [{:.3}, {:.3}] width {:.3}", lc.lower, lc.upper, lc.width());
    Ok(())
}

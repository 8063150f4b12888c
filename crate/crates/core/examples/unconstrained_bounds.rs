//! Unconstrained interval for a small sample, by threshold scan and by LP.
//!
//! cargo run --example unconstrained_bounds

use shapebounds::bounds::{al_bounds, al_bounds_lp};
use shapebounds::sample::Sample;

fn main() -> shapebounds::Result<()> {
    let sample = Sample::new(vec![3.1, 4.7, 2.2, 5.9, 4.4, 3.8, 6.3, 2.9])?;
    println!("sample mean {:.4}", sample.mean());
    println!("{:>6} {:>10} {:>10} {:>10}", "gamma", "lower", "upper", "lp gap");
    for gamma in [1.0, 1.5, 2.0, 4.0, 9.0] {
        let scan = al_bounds(&sample, gamma)?;
        let lp = al_bounds_lp(&sample, gamma)?;
        let gap = (scan.lower - lp.lower).abs().max((scan.upper - lp.upper).abs());
        println!("{gamma:>6} {:>10.4} {:>10.4} {gap:>10.1e}", scan.lower, scan.upper);
    }

    // the maximizing weights take two values, gamma apart
    let iv = al_bounds(&sample, 4.0)?;
    let w = &iv.upper_solution.weights;
    for (y, w) in sample.values().iter().zip(w) {
        println!("  y = {y:4.1}  w = {w:.4}");
    }
    Ok(())
}

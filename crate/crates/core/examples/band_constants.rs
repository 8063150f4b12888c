//! Band constants as functions of gamma and n.
//!
//! cargo run --example band_constants

use shapebounds::bounds::ks_offset;
use shapebounds::dist::{delta_gamma_n, sigma_gamma_sq, zeta_gamma_alpha};

fn main() -> shapebounds::Result<()> {
    println!("{:>6} {:>8} {:>8} {:>10} {:>10}", "gamma", "sigma^2", "t*", "delta(500)", "zeta(.05)");
    for gamma in [1.0, 1.5, 2.0, 3.0, 5.0, 9.0, 100.0] {
        let c = sigma_gamma_sq(gamma)?;
        println!(
            "{gamma:>6} {:>8.5} {:>8.5} {:>10.5} {:>10.5}",
            c.sigma_sq,
            c.t_star,
            delta_gamma_n(gamma, 500)?,
            zeta_gamma_alpha(gamma, 0.05)?
        );
    }
    for n in [100, 400, 1000, 10_000] {
        println!("KS offset at n = {n}: {:.5}", ks_offset(n)?);
    }
    Ok(())
}

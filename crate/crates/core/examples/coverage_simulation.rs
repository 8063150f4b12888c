//! Monte Carlo coverage under a known selection mechanism.
//!
//! cargo run --release --example coverage_simulation

use shapebounds::constraint::{ConstraintSpec, Family};
use shapebounds::sim::{coverage_experiment, draw_biased_sample, Population, Scenario};

fn main() -> shapebounds::Result<()> {
    let population = Population::Logistic { loc: 5.0, scale: 1.0 };
    let scenario = Scenario::new(population, 3.0, 300, 12345);

    let draw = draw_biased_sample(&scenario)?;
    println!(
        "one draw: {} proposals, sample mean {:.3}, oracle estimate {:.3}, population mean {:.3}",
        draw.proposals,
        draw.sample.mean(),
        draw.oracle_estimate(),
        population.mean()
    );

    for (family, gamma) in [(Family::None, 3.0), (Family::Symmetric, 3.0), (Family::None, 1.5)] {
        let report = coverage_experiment(&scenario, &ConstraintSpec::new(gamma, family), 25)?;
        println!(
            "{:<10} gamma {gamma}: mu coverage {:.2}, oracle coverage {:.2}, mean width {:.3}",
            family.name(),
            report.mu_coverage(),
            report.oracle_coverage(),
            report.mean_width()
        );
    }
    Ok(())
}

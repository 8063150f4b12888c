//! The dense simplex solver on a weight problem, plus the text dump format.
//!
//! cargo run --example lp_solver

use shapebounds::lp::{build_weight_lp, dump_problem, parse_dump, solve, CdfRow, LpProblem, Sense};
use shapebounds::sample::Sample;

fn main() -> shapebounds::Result<()> {
    let mut lp = LpProblem::new(vec![3.0, 2.0], Sense::Maximize);
    lp.add_le(vec![1.0, 1.0], 4.0).add_le(vec![1.0, 3.0], 6.0);
    let r = solve(&lp)?;
    println!("{:?} x = {:?} value {}", r.status, r.solution, r.objective_value);

    // weighted mean of [0, 1, 2] with ratio <= 2, and at most 60% of the
    // mass on the two smallest values
    let sample = Sample::new(vec![0.0, 1.0, 2.0])?;
    let rows = [CdfRow::upper(2, 0.6)];
    for sense in [Sense::Maximize, Sense::Minimize] {
        let problem = build_weight_lp(&sample, 2.0, &rows, sense);
        let r = solve(&problem)?;
        println!("{sense:?}: {:?} -> {:.4}", r.status, r.objective_value);
    }

    let text = dump_problem(&build_weight_lp(&sample, 2.0, &rows, Sense::Maximize));
    print!("{text}");
    let again = parse_dump(&text)?;
    println!("round trip value {:.4}", solve(&again)?.objective_value);
    Ok(())
}

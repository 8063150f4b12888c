//! Plain-text dump of LP instances, one constraint per line:
//!
//! ```text
//! # shapebounds lp v1
//! sense maximize
//! vars 3
//! objective 0 1 2
//! lower 0 0 0
//! eq 1 1 1 = 1
//! le 1 -1 0 <= 0
//! ```

use super::{LpProblem, Row, Sense};
use crate::error::{Error, Result};
use crate::numfmt::g17;

const HEADER: &str = "# shapebounds lp v1";

fn join(values: &[f64]) -> String {
    values.iter().map(|v| g17(*v)).collect::<Vec<_>>().join(" ")
}

pub fn dump_problem(problem: &LpProblem) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let sense = match problem.sense {
        Sense::Maximize => "maximize",
        Sense::Minimize => "minimize",
    };
    out.push_str(&format!("sense {sense}\nvars {}\n", problem.num_vars()));
    out.push_str(&format!("objective {}\n", join(&problem.objective)));
    out.push_str(&format!("lower {}\n", join(&problem.lower_bounds)));
    for r in &problem.eq_constraints {
        out.push_str(&format!("eq {} = {}\n", join(&r.coefficients), g17(r.rhs)));
    }
    for r in &problem.le_constraints {
        out.push_str(&format!("le {} <= {}\n", join(&r.coefficients), g17(r.rhs)));
    }
    out
}

fn parse_numbers(line_no: usize, fields: &[&str]) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>().map_err(|_| Error::Parse { line: line_no, message: format!("bad number '{f}'") })
        })
        .collect()
}

pub fn parse_dump(text: &str) -> Result<LpProblem> {
    let mut sense = None;
    let mut objective = None;
    let mut lower = None;
    let mut eq = Vec::new();
    let mut le = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |m: &str| Error::Parse { line: line_no, message: m.to_string() };
        match fields[0] {
            "sense" => {
                sense = Some(match fields.get(1).copied() {
                    Some("maximize") => Sense::Maximize,
                    Some("minimize") => Sense::Minimize,
                    _ => return Err(bad("unknown sense")),
                })
            }
            "vars" => {}
            "objective" => objective = Some(parse_numbers(line_no, &fields[1..])?),
            "lower" => lower = Some(parse_numbers(line_no, &fields[1..])?),
            kind @ ("eq" | "le") => {
                let op = if kind == "eq" { "=" } else { "<=" };
                if fields.len() < 3 || fields[fields.len() - 2] != op {
                    return Err(bad("malformed constraint"));
                }
                let coefficients = parse_numbers(line_no, &fields[1..fields.len() - 2])?;
                let rhs = parse_numbers(line_no, &fields[fields.len() - 1..])?[0];
                let row = Row::new(coefficients, rhs);
                if kind == "eq" {
                    eq.push(row)
                } else {
                    le.push(row)
                }
            }
            other => return Err(bad(&format!("unknown record '{other}'"))),
        }
    }
    let objective = objective.ok_or(Error::Parse { line: 0, message: "missing objective".into() })?;
    let mut lp = LpProblem::new(objective, sense.unwrap_or(Sense::Maximize));
    if let Some(l) = lower {
        lp.lower_bounds = l;
    }
    lp.eq_constraints = eq;
    lp.le_constraints = le;
    lp.validate()?;
    Ok(lp)
}

use serde_json::{json, Map, Value};

use super::config::RunConfig;
use crate::bounds::{compute_bounds, ks_offset, log_concave_envelopes, parametric_envelopes, symmetric_envelopes};
use crate::constraint::{CenterGrid, ConstraintSpec, Family, ThetaGrid};
use crate::dist::{delta_gamma_n, sigma_gamma_sq, zeta_gamma_alpha};
use crate::error::{Error, Result};
use crate::estimate::{ecdf, weighted_ecdf};
use crate::lp::{build_weight_lp, dump_problem, CdfRow, Sense};
use crate::numfmt::g17;
use crate::sample::Sample;
use crate::solution::{GridPoint, IdentificationInterval};

pub const SCHEMA_VERSION: u64 = 1;

fn grid_point_json(point: &Option<GridPoint>) -> Value {
    match point {
        None => Value::Null,
        Some(GridPoint::Center(m)) => json!({ "m": m }),
        Some(GridPoint::Theta(t)) => json!({ "location": t.location, "scale": t.scale }),
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(v))
}

fn m_grid_json(grid: &CenterGrid) -> Value {
    match grid {
        CenterGrid::Auto(None) => json!("default"),
        CenterGrid::Auto(Some(k)) => json!(k),
        CenterGrid::Points(p) => json!(p),
    }
}

fn theta_grid_json(grid: &ThetaGrid) -> Value {
    match grid {
        ThetaGrid::Auto { locations, scales } => json!(format!("{locations}x{scales}")),
        ThetaGrid::Points(p) => {
            Value::Array(p.iter().map(|t| json!({ "location": t.location, "scale": t.scale })).collect())
        }
    }
}

fn path_json(p: &Option<std::path::PathBuf>) -> Value {
    p.as_ref().map_or(Value::Null, |p| json!(p.display().to_string()))
}

/// Resolved configuration, echoed into every report.
pub fn config_json(cfg: &RunConfig) -> Value {
    let spec = &cfg.spec;
    json!({
        "input": path_json(&cfg.input),
        "column": cfg.column.to_string(),
        "header": cfg.header,
        "family": spec.family.name(),
        "gamma": spec.gamma,
        "alpha": spec.alpha.map_or(json!("1/sqrt(n)"), |a| json!(a)),
        "deltaStar": spec.delta_star,
        "mGrid": m_grid_json(&spec.m_grid),
        "thetaGrid": theta_grid_json(&spec.theta_grid),
        "emitWeights": cfg.emit_weights,
        "emitCdf": path_json(&cfg.emit_cdf),
        "emitLp": path_json(&cfg.emit_lp),
        "output": path_json(&cfg.output),
    })
}

/// Warnings worth surfacing for a computed interval.
pub fn interval_warnings(iv: &IdentificationInterval) -> Vec<String> {
    let p = &iv.provenance;
    let mut out = Vec::new();
    for (count, side) in [(p.infeasible_upper, "upper"), (p.infeasible_lower, "lower")] {
        if count > 0 {
            out.push(format!("{count} of {} grid points infeasible for the {side} endpoint", p.grid_points));
        }
    }
    out
}

/// JSON document for one bound computation.
pub fn bounds_json(cfg: &RunConfig, sample: &Sample, iv: &IdentificationInterval, warnings: &[String]) -> Result<Value> {
    let spec = &iv.method;
    let n = sample.len();
    let alpha = spec.resolved_alpha(n);
    let c = &iv.provenance.constants;
    let constants = json!({
        "delta": c.delta.unwrap_or(delta_gamma_n(spec.gamma, n)?),
        "sigmaSq": c.sigma_sq.unwrap_or(sigma_gamma_sq(spec.gamma)?.sigma_sq),
        "zeta": c.zeta.unwrap_or(zeta_gamma_alpha(spec.gamma, alpha)?),
        "band": opt(c.band),
        "ksOffset": opt(c.ks_offset.or(if spec.family == Family::LogConcave { Some(ks_offset(n)?) } else { None })),
    });
    let mut doc = Map::new();
    doc.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
    doc.insert("method".into(), json!(spec.family.name()));
    doc.insert("gamma".into(), json!(spec.gamma));
    doc.insert("n".into(), json!(n));
    doc.insert("alpha".into(), json!(alpha));
    doc.insert("deltaStar".into(), json!(spec.delta_star));
    doc.insert("interval".into(), json!({ "lower": iv.lower, "upper": iv.upper }));
    doc.insert(
        "gridArgmax".into(),
        json!({
            "lower": grid_point_json(&iv.lower_solution.grid_point),
            "upper": grid_point_json(&iv.upper_solution.grid_point),
        }),
    );
    doc.insert("constants".into(), constants);
    doc.insert(
        "diagnostics".into(),
        json!({
            "gridPoints": iv.provenance.grid_points,
            "infeasibleUpper": iv.provenance.infeasible_upper,
            "infeasibleLower": iv.provenance.infeasible_lower,
        }),
    );
    doc.insert("config".into(), config_json(cfg));
    doc.insert("warnings".into(), json!(warnings));
    doc.insert("notes".into(), json!(iv.provenance.notes));
    if cfg.emit_weights {
        doc.insert(
            "weights".into(),
            json!({ "lower": iv.lower_solution.weights, "upper": iv.upper_solution.weights }),
        );
    }
    Ok(Value::Object(doc))
}

/// Long-format `y,level,series` rows: the ECDF followed by the weighted
/// ECDF behind each interval's upper endpoint, at every order statistic.
pub fn cdf_csv(sample: &Sample, series: &[(&str, &IdentificationInterval)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["y", "level", "series"]).map_err(io)?;
    let mut all = vec![("ecdf", ecdf(sample))];
    for (name, iv) in series {
        all.push((name, weighted_ecdf(sample, &iv.upper_solution.weights)?));
    }
    for (name, f) in &all {
        for &y in sample.values() {
            w.write_record([g17(y), g17(f.eval(y)), name.to_string()]).map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// The three series of a CDF dump: no constraint, symmetry, log-concavity.
pub fn cdf_dump(sample: &Sample, spec: &ConstraintSpec) -> Result<String> {
    let mut intervals = Vec::new();
    for family in [Family::None, Family::Symmetric, Family::LogConcave] {
        let mut s = spec.clone();
        s.family = family;
        intervals.push((family.name(), compute_bounds(sample, &s)?));
    }
    let refs: Vec<(&str, &IdentificationInterval)> = intervals.iter().map(|(n, iv)| (*n, iv)).collect();
    cdf_csv(sample, &refs)
}

/// Text dump of the dense LP behind the upper endpoint, at the grid point
/// that attained it.
pub fn upper_lp_dump(sample: &Sample, iv: &IdentificationInterval) -> Result<String> {
    let spec = &iv.method;
    let rows: Vec<CdfRow> = match (spec.family, iv.upper_solution.grid_point) {
        (Family::ParametricGaussian, Some(GridPoint::Theta(t))) => {
            let s = spec.clone().with_theta_grid(ThetaGrid::Points(vec![t]));
            parametric_envelopes(sample, &s)?.entries.remove(0).rows
        }
        (Family::Symmetric, Some(GridPoint::Center(m))) => {
            let s = spec.clone().with_m_grid(CenterGrid::Points(vec![m]));
            symmetric_envelopes(sample, &s)?.entries.remove(0).rows
        }
        (Family::LogConcave, Some(GridPoint::Center(m))) => {
            let s = spec.clone().with_m_grid(CenterGrid::Points(vec![m]));
            log_concave_envelopes(sample, &s)?.entries.remove(0).rows
        }
        _ => Vec::new(),
    };
    Ok(dump_problem(&build_weight_lp(sample, spec.gamma, &rows, Sense::Maximize)))
}

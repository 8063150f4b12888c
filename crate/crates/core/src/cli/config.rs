//! Run configuration: command-line flags layered over an optional
//! `key = value` file, layered over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::constraint::{CenterGrid, ConstraintSpec, Family, ThetaGrid};
use crate::error::{Error, Result};
use crate::sim::Population;

pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "column",
    "header",
    "gamma",
    "family",
    "alpha",
    "delta-star",
    "m-grid",
    "theta-grid",
    "emit-cdf",
    "emit-weights",
    "emit-lp",
    "output",
    "summary",
    "seed",
    "reps",
    "population",
    "gamma-true",
    "sample-size",
    "pi-max",
];

/// Which CSV column holds the outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    /// Zero-based position.
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
}

impl Default for ColumnSelector {
    fn default() -> Self {
        ColumnSelector::Index(0)
    }
}

impl FromStr for ColumnSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Config("empty column selector".into()));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Name(n) => f.write_str(n),
        }
    }
}

/// `NxM` location-by-scale grid size.
pub fn parse_theta_grid(s: &str) -> Result<ThetaGrid> {
    let bad = || Error::Config(format!("theta grid must look like 21x21, got '{s}'"));
    let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let locations = a.trim().parse::<usize>().map_err(|_| bad())?;
    let scales = b.trim().parse::<usize>().map_err(|_| bad())?;
    if locations == 0 || scales == 0 {
        return Err(bad());
    }
    Ok(ThetaGrid::Auto { locations, scales })
}

pub fn parse_bool(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::Config(format!("expected a boolean, got '{other}'"))),
    }
}

/// Entries of a configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// skipped, and unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected key = value, got '{line}'"),
            })?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse { line: line_no, message: format!("unknown key '{key}'") });
            }
            if entries.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
                return Err(Error::Parse { line: line_no, message: format!("key '{key}' given twice") });
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    /// Typed value of `key`; parse failures name the file line.
    pub fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, value)) => parse(value).map(Some).map_err(|e| Error::Parse {
                line: *line,
                message: format!("{key}: {}", strip_kind(&e)),
            }),
        }
    }
}

fn strip_kind(e: &Error) -> String {
    match e {
        Error::Config(m) | Error::InvalidInput(m) => m.clone(),
        other => other.to_string(),
    }
}

pub(crate) fn parse_num<T: FromStr>(what: &'static str) -> impl Fn(&str) -> Result<T> {
    move |s: &str| s.trim().parse::<T>().map_err(|_| Error::Config(format!("invalid {what} '{s}'")))
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub column: ColumnSelector,
    pub header: bool,
    pub spec: ConstraintSpec,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub emit_weights: bool,
    pub emit_cdf: Option<PathBuf>,
    pub emit_lp: Option<PathBuf>,
    pub seed: Option<u64>,
    pub reps: usize,
    pub population: Population,
    pub gamma_true: Option<f64>,
    pub sample_size: usize,
    pub pi_max: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            column: ColumnSelector::default(),
            header: false,
            spec: ConstraintSpec::new(f64::NAN, Family::None),
            output: None,
            summary: None,
            emit_weights: false,
            emit_cdf: None,
            emit_lp: None,
            seed: None,
            reps: 100,
            population: Population::Normal { loc: 0.0, scale: 1.0 },
            gamma_true: None,
            sample_size: 100,
            pi_max: 0.9,
        }
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub column: Option<String>,
    pub header: bool,
    pub gamma: Option<f64>,
    pub family: Option<String>,
    pub alpha: Option<f64>,
    pub delta_star: Option<f64>,
    pub m_grid: Option<usize>,
    pub theta_grid: Option<String>,
    pub emit_cdf: Option<PathBuf>,
    pub emit_weights: bool,
    pub emit_lp: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub population: Option<String>,
    pub gamma_true: Option<f64>,
    pub sample_size: Option<usize>,
    pub pi_max: Option<f64>,
}

impl RunConfig {
    /// Layers `flags` over the configuration file (if any) over defaults
    /// and validates the result.
    pub fn resolve(flags: &Overrides) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Self::resolve_with(flags, &file)
    }

    pub fn resolve_with(flags: &Overrides, file: &ConfigFile) -> Result<Self> {
        let d = RunConfig::default();
        let path = |s: &str| -> Result<PathBuf> { Ok(PathBuf::from(s)) };
        let pick_path = |flag: &Option<PathBuf>, key: &str| -> Result<Option<PathBuf>> {
            Ok(match flag {
                Some(p) => Some(p.clone()),
                None => file.get(key, path)?,
            })
        };
        let column = match &flags.column {
            Some(c) => c.parse()?,
            None => file.get("column", |s| s.parse())?.unwrap_or_default(),
        };
        let header = flags.header || file.get("header", parse_bool)?.unwrap_or(false);
        let gamma = match flags.gamma {
            Some(g) => g,
            None => file.get("gamma", parse_num::<f64>("gamma"))?.unwrap_or(f64::NAN),
        };
        let family = match &flags.family {
            Some(f) => f.parse()?,
            None => file.get("family", |s| s.parse::<Family>())?.unwrap_or(Family::None),
        };
        let mut spec = ConstraintSpec::new(gamma, family);
        spec.alpha = flags.alpha.map_or_else(|| file.get("alpha", parse_num::<f64>("alpha")), |a| Ok(Some(a)))?;
        spec.delta_star = match flags.delta_star {
            Some(v) => v,
            None => file.get("delta-star", parse_num::<f64>("delta-star"))?.unwrap_or(0.0),
        };
        let m_grid = match flags.m_grid {
            Some(v) => Some(v),
            None => file.get("m-grid", parse_num::<usize>("m-grid"))?,
        };
        if let Some(m) = m_grid {
            if m == 0 {
                return Err(Error::Config("m-grid must be positive".into()));
            }
            spec.m_grid = CenterGrid::Auto(Some(m));
        }
        let theta = match &flags.theta_grid {
            Some(t) => Some(parse_theta_grid(t)?),
            None => file.get("theta-grid", parse_theta_grid)?,
        };
        if let Some(t) = theta {
            spec.theta_grid = t;
        }
        let cfg = RunConfig {
            input: pick_path(&flags.input, "input")?,
            column,
            header,
            spec,
            output: pick_path(&flags.output, "output")?,
            summary: pick_path(&flags.summary, "summary")?,
            emit_weights: flags.emit_weights || file.get("emit-weights", parse_bool)?.unwrap_or(false),
            emit_cdf: pick_path(&flags.emit_cdf, "emit-cdf")?,
            emit_lp: pick_path(&flags.emit_lp, "emit-lp")?,
            seed: match flags.seed {
                Some(s) => Some(s),
                None => file.get("seed", parse_num::<u64>("seed"))?,
            },
            reps: match flags.reps {
                Some(r) => r,
                None => file.get("reps", parse_num::<usize>("reps"))?.unwrap_or(d.reps),
            },
            population: match &flags.population {
                Some(p) => p.parse()?,
                None => file.get("population", |s| s.parse::<Population>())?.unwrap_or(d.population),
            },
            gamma_true: match flags.gamma_true {
                Some(g) => Some(g),
                None => file.get("gamma-true", parse_num::<f64>("gamma-true"))?,
            },
            sample_size: match flags.sample_size {
                Some(n) => n,
                None => file.get("sample-size", parse_num::<usize>("sample-size"))?.unwrap_or(d.sample_size),
            },
            pi_max: match flags.pi_max {
                Some(p) => p,
                None => file.get("pi-max", parse_num::<f64>("pi-max"))?.unwrap_or(d.pi_max),
            },
        };
        if cfg.spec.gamma.is_nan() {
            return Err(Error::Config("gamma is required (--gamma or 'gamma = ...' in the config file)".into()));
        }
        cfg.spec.validate().map_err(|e| Error::Config(strip_kind(&e)))?;
        if let (ColumnSelector::Name(name), false) = (&cfg.column, cfg.header) {
            return Err(Error::Config(format!("column '{name}' selected by name but no header row declared")));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = ConfigFile::parse("gamma = 3\nfamily = symmetric # comment\n\nreps=7\n").unwrap();
        let flags = Overrides { gamma: Some(5.0), ..Default::default() };
        let cfg = RunConfig::resolve_with(&flags, &file).unwrap();
        assert_eq!(cfg.spec.gamma, 5.0);
        assert_eq!(cfg.spec.family, Family::Symmetric);
        assert_eq!(cfg.reps, 7);
        assert_eq!(cfg.pi_max, 0.9);
    }

    #[test]
    fn unknown_and_malformed_keys_name_the_line() {
        assert_eq!(
            ConfigFile::parse("gamma = 2\ncolour = red\n").unwrap_err(),
            Error::Parse { line: 2, message: "unknown key 'colour'".into() }
        );
        assert!(matches!(ConfigFile::parse("gamma 2\n"), Err(Error::Parse { line: 1, .. })));
        let file = ConfigFile::parse("\n\ngamma = two\n").unwrap();
        assert!(matches!(
            RunConfig::resolve_with(&Overrides::default(), &file),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn validation() {
        let none = ConfigFile::default();
        assert!(matches!(RunConfig::resolve_with(&Overrides::default(), &none), Err(Error::Config(_))));
        let bad_gamma = Overrides { gamma: Some(0.5), ..Default::default() };
        assert!(matches!(RunConfig::resolve_with(&bad_gamma, &none), Err(Error::Config(_))));
        let by_name = Overrides { gamma: Some(2.0), column: Some("score".into()), ..Default::default() };
        assert!(RunConfig::resolve_with(&by_name, &none).is_err());
        let with_header = Overrides { header: true, ..by_name };
        assert_eq!(RunConfig::resolve_with(&with_header, &none).unwrap().column, ColumnSelector::Name("score".into()));
    }

    #[test]
    fn grids() {
        assert_eq!(parse_theta_grid("5x7").unwrap(), ThetaGrid::Auto { locations: 5, scales: 7 });
        assert!(parse_theta_grid("5").is_err());
        assert!(parse_theta_grid("0x3").is_err());
    }
}

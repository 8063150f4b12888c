//! Biased-sampling generator and Monte Carlo coverage harness.
//!
//! Every replication draws from its own ChaCha8 stream. The stream key for
//! replication `r` of a run seeded with `s` is the first four outputs of
//! SplitMix64 started at `s + r * 0x9E3779B97F4A7C15` (wrapping), written
//! little-endian into the 32-byte ChaCha key.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde_json::{json, Value};

use crate::bounds::compute_bounds;
use crate::constraint::{ConstraintSpec, Family};
use crate::error::{Error, Result};
use crate::estimate::hajek_estimate;
use crate::numfmt::g17;
use crate::sample::Sample;

pub const RNG_ALGORITHM: &str =
    "ChaCha8 keyed by 4 SplitMix64 outputs from seed + rep * 0x9E3779B97F4A7C15 (wrapping u64)";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MAX_IDLE_PROPOSALS: u64 = 1_000_000;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for a stream seed (see the module docs).
pub fn stream_rng(seed: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Stream seed of replication `rep`.
pub fn rep_seed(seed: u64, rep: u64) -> u64 {
    seed.wrapping_add(rep.wrapping_mul(GOLDEN_GAMMA))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Population {
    Normal { loc: f64, scale: f64 },
    Logistic { loc: f64, scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Uniform { a: f64, b: f64 },
}

impl Population {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Population::Normal { loc, scale } | Population::Logistic { loc, scale } => {
                loc.is_finite() && scale.is_finite() && scale > 0.0
            }
            Population::Gamma { shape, scale } => {
                shape.is_finite() && scale.is_finite() && shape > 0.0 && scale > 0.0
            }
            Population::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid population parameters: {self}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Population::Normal { loc, .. } | Population::Logistic { loc, .. } => loc,
            Population::Gamma { shape, scale } => shape * scale,
            Population::Uniform { a, b } => 0.5 * (a + b),
        }
    }

    pub fn sd(&self) -> f64 {
        match *self {
            Population::Normal { scale, .. } => scale,
            Population::Logistic { scale, .. } => scale * std::f64::consts::PI / 3f64.sqrt(),
            Population::Gamma { shape, scale } => shape.sqrt() * scale,
            Population::Uniform { a, b } => (b - a) / 12f64.sqrt(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Population::Gamma { .. })
    }

    /// True when the density is log-concave.
    pub fn is_log_concave(&self) -> bool {
        match *self {
            Population::Gamma { shape, .. } => shape >= 1.0,
            _ => true,
        }
    }

    /// Whether `family` is a correct assumption for this population.
    pub fn satisfies(&self, family: Family) -> bool {
        match family {
            Family::None => true,
            Family::ParametricGaussian => matches!(self, Population::Normal { .. }),
            Family::Symmetric => self.is_symmetric(),
            Family::LogConcave => self.is_log_concave(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Population::Normal { loc, scale } => Normal::new(loc, scale).expect("validated").sample(rng),
            Population::Logistic { loc, scale } => {
                let u: f64 = rng.random();
                let u = u.max(f64::MIN_POSITIVE);
                loc + scale * (u / (1.0 - u)).ln()
            }
            Population::Gamma { shape, scale } => Gamma::new(shape, scale).expect("validated").sample(rng),
            Population::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
        }
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Population::Normal { loc, scale } => write!(f, "normal:{},{}", g17(loc), g17(scale)),
            Population::Logistic { loc, scale } => write!(f, "logistic:{},{}", g17(loc), g17(scale)),
            Population::Gamma { shape, scale } => write!(f, "gamma:{},{}", g17(shape), g17(scale)),
            Population::Uniform { a, b } => write!(f, "uniform:{},{}", g17(a), g17(b)),
        }
    }
}

/// Parses `name:p1,p2`, e.g. `normal:0,1` or `gamma:2,1.5`.
impl FromStr for Population {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse population '{s}' (expected e.g. normal:0,1)"));
        let (name, params) = s.trim().split_once(':').ok_or_else(bad)?;
        let p: Vec<f64> = params
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if p.len() != 2 {
            return Err(bad());
        }
        let pop = match name.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Population::Normal { loc: p[0], scale: p[1] },
            "logistic" => Population::Logistic { loc: p[0], scale: p[1] },
            "gamma" => Population::Gamma { shape: p[0], scale: p[1] },
            "uniform" => Population::Uniform { a: p[0], b: p[1] },
            _ => return Err(bad()),
        };
        pop.validate()?;
        Ok(pop)
    }
}

/// `pi(y) = pi_min (1 + (gamma_true - 1) L((y - center) / spread))` with `L`
/// the logistic function, so that `pi` ranges over `[pi_min, gamma_true pi_min]`.
/// A negative `spread` makes selection decreasing in `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionModel {
    pub pi_max: f64,
    pub gamma_true: f64,
    pub center: f64,
    pub spread: f64,
}

impl SelectionModel {
    /// Increasing logistic selection centered on the population mean, with
    /// spread equal to the population sd.
    pub fn logistic_for(population: &Population, gamma_true: f64, pi_max: f64) -> Self {
        SelectionModel { pi_max, gamma_true, center: population.mean(), spread: population.sd() }
    }

    pub fn pi_min(&self) -> f64 {
        self.pi_max / self.gamma_true
    }

    pub fn prob(&self, y: f64) -> f64 {
        let z = (y - self.center) / self.spread;
        let l = 1.0 / (1.0 + (-z).exp());
        self.pi_min() * (1.0 + (self.gamma_true - 1.0) * l)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi_max > 0.0 && self.pi_max <= 1.0) {
            return Err(Error::Config(format!("pi_max must lie in (0, 1], got {}", self.pi_max)));
        }
        if !(self.gamma_true.is_finite() && self.gamma_true >= 1.0) {
            return Err(Error::Config(format!("true gamma must be >= 1, got {}", self.gamma_true)));
        }
        if !(self.center.is_finite() && self.spread.is_finite() && self.spread != 0.0) {
            return Err(Error::Config("selection center and nonzero spread must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub population: Population,
    pub selection: SelectionModel,
    pub n: usize,
    pub seed: u64,
}

impl Scenario {
    /// Population with the default increasing logistic selection.
    pub fn new(population: Population, gamma_true: f64, n: usize, seed: u64) -> Self {
        Scenario { population, selection: SelectionModel::logistic_for(&population, gamma_true, 0.9), n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        self.population.validate()?;
        self.selection.validate()?;
        if self.n == 0 {
            return Err(Error::Config("sample size must be positive".into()));
        }
        Ok(())
    }
}

/// Outcomes kept by accept-reject sampling, sorted, with their true
/// selection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasedDraw {
    pub sample: Sample,
    pub probs: Vec<f64>,
    pub proposals: u64,
}

impl BiasedDraw {
    /// Hajek estimate with the true selection probabilities.
    pub fn oracle_estimate(&self) -> f64 {
        hajek_estimate(&self.sample, &self.probs).expect("probabilities in (0, 1]")
    }
}

/// Draws from the population and keeps each draw with probability
/// `pi(y)` until `n` draws are kept.
pub fn draw_biased_sample(scenario: &Scenario) -> Result<BiasedDraw> {
    scenario.validate()?;
    let mut rng = stream_rng(scenario.seed);
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(scenario.n);
    let mut proposals = 0u64;
    let mut idle = 0u64;
    while pairs.len() < scenario.n {
        let y = scenario.population.draw(&mut rng);
        let p = scenario.selection.prob(y);
        proposals += 1;
        if rng.random::<f64>() < p {
            pairs.push((y, p));
            idle = 0;
        } else {
            idle += 1;
            if idle >= MAX_IDLE_PROPOSALS {
                return Err(Error::Config(format!(
                    "no draw accepted in {MAX_IDLE_PROPOSALS} consecutive proposals"
                )));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (values, probs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(BiasedDraw { sample: Sample::from_sorted(values)?, probs, proposals })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub rep: u64,
    pub seed: u64,
    pub lower: f64,
    pub upper: f64,
    pub sample_mean: f64,
    pub oracle: f64,
    pub covers_mu: bool,
    pub covers_oracle: bool,
    /// Distance from the population mean to the interval.
    pub distance: f64,
    /// False when the plausibility set was empty; the interval is then NaN.
    pub nonempty: bool,
}

impl CoverageRow {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub scenario: Scenario,
    pub spec: ConstraintSpec,
    pub mu: f64,
    pub rows: Vec<CoverageRow>,
}

impl CoverageReport {
    pub fn reps(&self) -> usize {
        self.rows.len()
    }

    fn rate(&self, f: impl Fn(&CoverageRow) -> bool) -> f64 {
        self.rows.iter().filter(|r| f(r)).count() as f64 / self.rows.len() as f64
    }

    pub fn mu_coverage(&self) -> f64 {
        self.rate(|r| r.covers_mu)
    }

    pub fn oracle_coverage(&self) -> f64 {
        self.rate(|r| r.covers_oracle)
    }

    pub fn empty_reps(&self) -> usize {
        self.rows.iter().filter(|r| !r.nonempty).count()
    }

    fn nonempty<'a>(&'a self) -> impl Iterator<Item = &'a CoverageRow> + 'a {
        self.rows.iter().filter(|r| r.nonempty)
    }

    pub fn mean_width(&self) -> f64 {
        let (sum, count) = self.nonempty().fold((0.0, 0usize), |(s, c), r| (s + r.width(), c + 1));
        if count == 0 {
            f64::NAN
        } else {
            sum / count as f64
        }
    }

    /// Sorted distances from the population mean to each nonempty interval.
    pub fn distances(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.nonempty().map(|r| r.distance).collect();
        d.sort_by(f64::total_cmp);
        d
    }

    /// One row per replication.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record([
            "rep", "seed", "lower", "upper", "width", "mu", "sample_mean", "oracle", "covers_mu",
            "covers_oracle", "distance", "nonempty",
        ])
        .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.rep.to_string(),
                r.seed.to_string(),
                g17(r.lower),
                g17(r.upper),
                g17(r.width()),
                g17(self.mu),
                g17(r.sample_mean),
                g17(r.oracle),
                r.covers_mu.to_string(),
                r.covers_oracle.to_string(),
                g17(r.distance),
                r.nonempty.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn summary_json(&self) -> Value {
        let d = self.distances();
        let quantile = |q: f64| -> Value {
            if d.is_empty() {
                Value::Null
            } else {
                json!(d[((d.len() - 1) as f64 * q).round() as usize])
            }
        };
        json!({
            "reps": self.reps(),
            "emptyReps": self.empty_reps(),
            "muCoverage": self.mu_coverage(),
            "oracleCoverage": self.oracle_coverage(),
            "meanWidth": finite_or_null(self.mean_width()),
            "mu": self.mu,
            "distance": { "median": quantile(0.5), "q90": quantile(0.9), "max": quantile(1.0) },
            "scenario": {
                "population": self.scenario.population.to_string(),
                "gammaTrue": self.scenario.selection.gamma_true,
                "piMax": self.scenario.selection.pi_max,
                "selectionCenter": self.scenario.selection.center,
                "selectionSpread": self.scenario.selection.spread,
                "n": self.scenario.n,
                "seed": self.scenario.seed,
            },
            "analysis": {
                "family": self.spec.family.name(),
                "gamma": self.spec.gamma,
                "alpha": self.spec.alpha.map_or(Value::String("1/sqrt(n)".into()), |a| json!(a)),
                "deltaStar": self.spec.delta_star,
            },
            "rng": RNG_ALGORITHM,
        })
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Runs one replication with stream seed `seed`.
pub fn run_replication(scenario: &Scenario, spec: &ConstraintSpec, rep: u64, seed: u64) -> Result<CoverageRow> {
    let draw = draw_biased_sample(&Scenario { seed, ..*scenario })?;
    let mu = scenario.population.mean();
    let oracle = draw.oracle_estimate();
    let sample_mean = draw.sample.mean();
    let row = |lower: f64, upper: f64, nonempty: bool| {
        let distance = if !nonempty {
            f64::NAN
        } else if mu < lower {
            lower - mu
        } else if mu > upper {
            mu - upper
        } else {
            0.0
        };
        CoverageRow {
            rep,
            seed,
            lower,
            upper,
            sample_mean,
            oracle,
            covers_mu: nonempty && lower <= mu && mu <= upper,
            covers_oracle: nonempty && lower <= oracle && oracle <= upper,
            distance,
            nonempty,
        }
    };
    match compute_bounds(&draw.sample, spec) {
        Ok(iv) => Ok(row(iv.lower, iv.upper, true)),
        Err(Error::EmptyPlausibilitySet(_)) => Ok(row(f64::NAN, f64::NAN, false)),
        Err(e) => Err(e),
    }
}

/// Repeats draw-then-bound `reps` times and records coverage of the
/// population mean and of the oracle Hajek estimate.
pub fn coverage_experiment(scenario: &Scenario, spec: &ConstraintSpec, reps: usize) -> Result<CoverageReport> {
    scenario.validate()?;
    spec.validate()?;
    if reps == 0 {
        return Err(Error::Config("reps must be positive".into()));
    }
    let rows = (0..reps as u64)
        .map(|rep| run_replication(scenario, spec, rep, rep_seed(scenario.seed, rep)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport { scenario: *scenario, spec: spec.clone(), mu: scenario.population.mean(), rows })
}

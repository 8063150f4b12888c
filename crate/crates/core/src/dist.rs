//! Special-function kernels and the concentration constants used to size
//! the plausibility bands.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Worst-case variance constants for a sampling-ratio bound `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConstants {
    pub gamma: f64,
    /// `max_t t(1 - t) + A_gamma(t)` over `[0, 1/2]`.
    pub sigma_sq: f64,
    /// The maximizer of the above.
    pub t_star: f64,
    /// `(1 + gamma)(1 + 1/gamma) / 4`, the bound on the weighted-ECDF variance inflation.
    pub omega_sq_bound: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("gamma must be finite and >= 1, got {gamma}")))
    }
}

fn a_gamma_unchecked(t: f64, gamma: f64) -> f64 {
    let t = if t > 0.5 { 1.0 - t } else { t };
    gamma * t / (1.0 - t + gamma * t) - t
}

/// Largest gap `|F(t) - t|` for a CDF on `[0, 1]` whose density ratio is at most `gamma`.
pub fn a_gamma(t: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("t must lie in [0, 1], got {t}")));
    }
    check_gamma(gamma)?;
    Ok(a_gamma_unchecked(t, gamma))
}

/// `(1 + gamma)(1 + 1/gamma) / 4`.
pub fn omega_sq_bound(gamma: f64) -> f64 {
    (1.0 + gamma) * (1.0 + 1.0 / gamma) / 4.0
}

fn variance_profile(t: f64, gamma: f64) -> f64 {
    t * (1.0 - t) + a_gamma_unchecked(t, gamma)
}

fn compute_gamma_constants(gamma: f64) -> GammaConstants {
    let omega_sq_bound = omega_sq_bound(gamma);
    if gamma == 1.0 {
        return GammaConstants { gamma, sigma_sq: 0.25, t_star: 0.5, omega_sq_bound };
    }
    // concave on [0, 1/2]: golden-section search
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 0.5f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (variance_profile(c, gamma), variance_profile(d, gamma));
    while b - a > 1e-12 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = variance_profile(c, gamma);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = variance_profile(d, gamma);
        }
    }
    let mut t_star = 0.5 * (a + b);
    let mut sigma_sq = variance_profile(t_star, gamma);
    for t in [a, b, 0.5] {
        let v = variance_profile(t, gamma);
        if v > sigma_sq {
            sigma_sq = v;
            t_star = t;
        }
    }
    GammaConstants { gamma, sigma_sq, t_star, omega_sq_bound }
}

/// Computes (and memoizes) the worst-case variance constants for `gamma`.
pub fn sigma_gamma_sq(gamma: f64) -> Result<GammaConstants> {
    check_gamma(gamma)?;
    static CACHE: OnceLock<Mutex<HashMap<u64, GammaConstants>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&gamma.to_bits()) {
        return Ok(*c);
    }
    let c = compute_gamma_constants(gamma);
    cache.lock().unwrap().insert(gamma.to_bits(), c);
    Ok(c)
}

/// Radius of the parametric KS band:
/// `sqrt(sigma_gamma^2 (1 + gamma)(1 + 1/gamma) log(n) / (4n))`.
pub fn delta_gamma_n(gamma: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be >= 2, got {n}")));
    }
    let c = sigma_gamma_sq(gamma)?;
    let n = n as f64;
    Ok((c.sigma_sq * (1.0 + gamma) * (1.0 + 1.0 / gamma) * n.ln() / (4.0 * n)).sqrt())
}

/// Scale of the symmetry band: `Phi^{-1}(1 - alpha/4) sqrt((1 + gamma)(1 + 1/gamma) / 4)`.
/// The band imposed on `H(m + y) + H(m - y) - 1` is this divided by `sqrt(n)`.
pub fn zeta_gamma_alpha(gamma: f64, alpha: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(normal_quantile(1.0 - alpha / 4.0)? * omega_sq_bound(gamma).sqrt())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile: Wichura's AS241 rational approximation
/// followed by one Newton step on `normal_cdf`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    let x = as241(p);
    let x = x - (normal_cdf(x) - p) / normal_pdf(x);
    Ok(x)
}

#[allow(clippy::excessive_precision)]
fn as241(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                + 67265.770927008700853)
                * r
                + 45921.953931549871457)
                * r
                + 13731.693765509461125)
                * r
                + 1971.5909503065514427)
                * r
                + 133.14166789178437745)
                * r
                + 3.387132872796366608)
            / (((((((5226.495278852545925 * r + 28729.085735721942674) * r
                + 39307.89580009271061)
                * r
                + 21213.794301586595867)
                * r
                + 5394.1960214247511077)
                * r
                + 687.1870074920579083)
                * r
                + 42.313330701600911252)
                * r
                + 1.0);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
            + 0.24178072517745061177)
            * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734)
            / (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                + 0.0151986665636164571966)
                * r
                + 0.14810397642748007459)
                * r
                + 0.68976733498510000455)
                * r
                + 1.6763848301838038494)
                * r
                + 2.05319162663775882187)
                * r
                + 1.0)
    } else {
        let r = r - 5.0;
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
            + 0.0012426609473880784386)
            * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772)
            / (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                + 1.8463183175100546818e-5)
                * r
                + 7.868691311456132591e-4)
                * r
                + 0.0148753612908506148525)
                * r
                + 0.13692988092273580531)
                * r
                + 0.59983220655588793769)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

const KOLMOGOROV_MIN_X: f64 = 0.05;
const KOLMOGOROV_MAX_X: f64 = 5.0;

/// Limiting distribution of `sqrt(n) sup |ECDF - F|`:
/// `K(x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x < KOLMOGOROV_MIN_X {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut k = 1.0f64;
    loop {
        let term = (-2.0 * k * k * x * x).exp();
        sum += sign * term;
        if term < 1e-14 {
            break;
        }
        sign = -sign;
        k += 1.0;
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Inverse of [`kolmogorov_cdf`] by bisection on `[0.05, 5]`.
pub fn kolmogorov_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (KOLMOGOROV_MIN_X, KOLMOGOROV_MAX_X);
    if kolmogorov_cdf(hi) <= p {
        return Ok(hi);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

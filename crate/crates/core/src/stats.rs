//! Binomial confidence intervals for Monte Carlo hit fractions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::z_critical;

/// A point estimate with a `100(1 - alpha)%` confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    pub trials: u64,
}

impl EstimateWithCI {
    /// Raw proportion `successes / trials` with its Agresti–Coull interval.
    pub fn proportion(successes: u64, trials: u64, alpha: f64) -> Result<Self> {
        let (lo, hi) = agresti_coull(successes, trials, alpha)?;
        Ok(EstimateWithCI {
            point: successes as f64 / trials as f64,
            lo,
            hi,
            alpha,
            trials,
        })
    }

    /// Pushes the estimate through a nondecreasing map.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Self {
        EstimateWithCI {
            point: f(self.point),
            lo: f(self.lo),
            hi: f(self.hi),
            ..*self
        }
    }

    /// Pushes the estimate through a nonincreasing map, swapping the bounds.
    pub fn map_antitone(&self, f: impl Fn(f64) -> f64) -> Self {
        EstimateWithCI {
            point: f(self.point),
            lo: f(self.hi),
            hi: f(self.lo),
            ..*self
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        debug_assert!(k >= 0.0);
        self.map_monotone(|v| v * k)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Half-width of the interval divided by `z_{α/2}`: a standard error on
    /// the scale of `point`.
    pub fn std_error(&self) -> f64 {
        let z = z_critical(self.alpha);
        if z > 0.0 {
            0.5 * (self.hi - self.lo) / z
        } else {
            0.0
        }
    }
}

/// Agresti–Coull (Wilson-centre) interval for a binomial proportion.
pub fn agresti_coull(successes: u64, trials: u64, alpha: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    if successes > trials {
        return Err(Error::invalid(
            "successes",
            format!("{successes} successes out of {trials} trials"),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            what: "confidence level alpha (must lie in (0, 1))",
            value: alpha,
        });
    }
    let m = trials as f64;
    let p = successes as f64 / m;
    let z = z_critical(alpha);
    let z2 = z * z;
    let denom = 1.0 + z2 / m;
    let centre = p + z2 / (2.0 * m);
    let half = z * ((p * (1.0 - p) + z2 / (4.0 * m)) / m).sqrt();
    let lo = ((centre - half) / denom).clamp(0.0, 1.0);
    let hi = ((centre + half) / denom).clamp(0.0, 1.0);
    Ok((lo, hi))
}

/// Leading-order relative bias `(ρ_start / ρ_inf)³` of the 5D capacitance
/// estimate from truncating walks at `ρ_inf`.
pub fn escape_bias_bound(rho_start: f64, rho_inf: f64) -> Result<f64> {
    if !(rho_start > 0.0 && rho_start <= rho_inf) {
        return Err(Error::invalid(
            "rho_inf",
            format!("need 0 < rho_start ({rho_start}) <= rho_inf ({rho_inf})"),
        ));
    }
    Ok((rho_start / rho_inf).powi(3))
}

/// Difference between two independent estimates in units of their pooled
/// standard error.
pub fn pooled_z(a: &EstimateWithCI, b: &EstimateWithCI) -> f64 {
    let se = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
    if se == 0.0 {
        if a.point == b.point {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a.point - b.point).abs() / se
    }
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against `cdf`.
/// Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

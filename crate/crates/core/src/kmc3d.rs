//! Capacitance of the lens cut out by two overlapping unit disks, and the
//! zero-rotation capture probability built from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{count_successes, derive_seed};
use crate::stats::EstimateWithCI;
use crate::walk::{self, PlanarTarget, TrialOutcome, WalkLimits};

/// Two unit disks centred at `(±s/2, 0)` on the plane `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensSpec {
    pub s: f64,
}

impl LensSpec {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&s) {
            return Err(Error::Domain {
                what: "lens separation s (must lie in [0, 2))",
                value: s,
            });
        }
        Ok(LensSpec { s })
    }

    /// Radius of the smallest origin-centred ball containing the lens.
    pub fn circumradius(&self) -> f64 {
        (1.0 - 0.25 * self.s * self.s).sqrt()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let h = 0.5 * self.s;
        let y2 = y * y;
        (x - h) * (x - h) + y2 < 1.0 && (x + h) * (x + h) + y2 < 1.0
    }
}

impl PlanarTarget<3> for LensSpec {
    #[inline]
    fn contains(&self, p: &[f64; 3]) -> bool {
        LensSpec::contains(self, p[1], p[2])
    }

    #[inline]
    fn clearance(&self, p: &[f64; 3]) -> Result<f64> {
        let h = 0.5 * self.s;
        let d1 = (p[1] - h).hypot(p[2]) - 1.0;
        let d2 = (p[1] + h).hypot(p[2]) - 1.0;
        let nu = d1.max(d2);
        walk::rim_clearance(nu, 1.0, || format!("lens stage II radius {nu} at ({}, {})", p[1], p[2]))
    }
}

/// Monte Carlo settings for lens capacitances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensConfig {
    pub trials: u64,
    pub rho_inf: f64,
    /// Launch radius as a multiple of the lens circumradius.
    pub start_factor: f64,
    pub seed: u64,
    pub alpha: f64,
    pub threads: usize,
    pub max_iterations: u64,
}

impl Default for LensConfig {
    fn default() -> Self {
        LensConfig {
            trials: 1_000_000,
            rho_inf: 1e5,
            start_factor: 1.1,
            seed: 0,
            alpha: 0.05,
            threads: 0,
            max_iterations: 1_000_000_000,
        }
    }
}

impl LensConfig {
    fn limits(&self, lens: &LensSpec) -> Result<WalkLimits> {
        if !(self.start_factor > 1.0 && self.start_factor.is_finite()) {
            return Err(Error::invalid(
                "start_factor",
                format!("must exceed 1, got {}", self.start_factor),
            ));
        }
        let rho_start = self.start_factor * lens.circumradius();
        if !(self.rho_inf > rho_start) || self.rho_inf.is_nan() {
            return Err(Error::invalid(
                "rho_inf",
                format!("must exceed rho_start {rho_start}, got {}", self.rho_inf),
            ));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        Ok(WalkLimits {
            rho_start,
            rho_inf: self.rho_inf,
            max_iterations: self.max_iterations,
        })
    }
}

/// Hit fraction from launch radius `rho_start`, as a proportion.
pub fn lens_hit_fraction(lens: &LensSpec, rho_start: f64, cfg: &LensConfig) -> Result<EstimateWithCI> {
    if !(rho_start > lens.circumradius() && rho_start < cfg.rho_inf) {
        return Err(Error::invalid(
            "rho_start",
            format!("must lie between the lens circumradius and rho_inf, got {rho_start}"),
        ));
    }
    let limits = WalkLimits {
        rho_start,
        rho_inf: cfg.rho_inf,
        max_iterations: cfg.max_iterations,
    };
    let hits = count_successes(cfg.trials, cfg.seed, cfg.threads, |i, rng| {
        walk::run_walk(lens, &limits, i, rng).map(|o| o == TrialOutcome::Hit)
    })?;
    EstimateWithCI::proportion(hits, cfg.trials, cfg.alpha)
}

/// Capacitance `c(s) = ρ_start · p_hit` with its confidence interval.
pub fn lens_capacitance(lens: &LensSpec, cfg: &LensConfig) -> Result<EstimateWithCI> {
    let limits = cfg.limits(lens)?;
    Ok(lens_hit_fraction(lens, limits.rho_start, cfg)?.scale(limits.rho_start))
}

/// Uniform grid `s_k = 2k / n`, `k = 0..n`; the endpoint `s = 2` is excluded.
pub fn lens_grid(grid_n: usize) -> Vec<f64> {
    (0..grid_n).map(|k| 2.0 * k as f64 / grid_n as f64).collect()
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensRow {
    pub index: usize,
    pub s: f64,
    pub c: EstimateWithCI,
}

/// Trapezoid value of `∫₀² c(s) s ds` with its standard error, given `c` on
/// [`lens_grid`] and `c(2) = 0`.
pub fn trapezoid(rows: &[LensRow]) -> Result<(f64, f64)> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::invalid("grid_n", format!("need at least 2 points, got {n}")));
    }
    let h = 2.0 / n as f64;
    let mut sum = 0.0;
    let mut var = 0.0;
    for (k, row) in rows.iter().enumerate() {
        if row.index != k {
            return Err(Error::invalid("rows", "grid rows out of order"));
        }
        // Interior weight h; the s = 0 end carries weight h/2 but s·c vanishes.
        let w = if k == 0 { 0.5 * h } else { h } * row.s;
        sum += w * row.c.point;
        var += (w * row.c.std_error()).powi(2);
    }
    Ok((sum, var.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensIntegral {
    pub rows: Vec<LensRow>,
    pub integral: f64,
    pub std_error: f64,
}

/// Evaluates `c(s)` on the grid, calling `on_row` as each point finishes,
/// and integrates. Grid point `k` uses the child seed `derive_seed(seed, k)`.
pub fn lens_integral_with(
    grid_n: usize,
    cfg: &LensConfig,
    mut on_row: impl FnMut(&LensRow) -> Result<()>,
) -> Result<LensIntegral> {
    if grid_n < 2 {
        return Err(Error::invalid("grid_n", format!("need at least 2 points, got {grid_n}")));
    }
    let mut rows = Vec::with_capacity(grid_n);
    for (k, s) in lens_grid(grid_n).into_iter().enumerate() {
        let point_cfg = LensConfig {
            seed: derive_seed(cfg.seed, k as u64),
            ..*cfg
        };
        let row = LensRow {
            index: k,
            s,
            c: lens_capacitance(&LensSpec::new(s)?, &point_cfg)?,
        };
        on_row(&row)?;
        rows.push(row);
    }
    let (integral, std_error) = trapezoid(&rows)?;
    Ok(LensIntegral {
        rows,
        integral,
        std_error,
    })
}

pub fn lens_integral(grid_n: usize, cfg: &LensConfig) -> Result<LensIntegral> {
    lens_integral_with(grid_n, cfg, |_| Ok(()))
}

/// Zero-rotation capture probability `ε³ / (4 R0) · ∫₀² c(s) s ds`, with `R0`
/// in units of the reaction radius.
pub fn zero_rotation_k0(eps: f64, r0: f64, integral: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(Error::Domain { what: "cap angle eps", value: eps });
    }
    if !(r0 > 1.0) {
        return Err(Error::invalid("r0", format!("must exceed the reaction radius, got {r0}")));
    }
    Ok(eps.powi(3) / (4.0 * r0) * integral)
}

/// Probability that two independent, uniformly placed caps of angular radius
/// `eps` overlap: `(1 - cos 2ε) / 2 = sin² ε`.
pub fn cap_overlap_probability(eps: f64) -> f64 {
    eps.sin().powi(2)
}

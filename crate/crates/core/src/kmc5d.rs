//! Capacitance of the 4D binding region in 5D, and the orientation factor χ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DerivedConstants, Point5};
use crate::rng::{count_successes, TrialRng};
use crate::stats::EstimateWithCI;
use crate::walk::{self, PlanarTarget, TrialOutcome, WalkLimits};

/// Default start radius as a multiple of the circumradius `ρ0`.
pub const DEFAULT_START_FACTOR: f64 = 1.1;
pub const DEFAULT_RHO_INF: f64 = 1e5;
pub const DEFAULT_MAX_ITERATIONS: u64 = 1_000_000_000;

/// Radius of the launch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartRadius {
    /// Multiple of `ρ0`; must exceed 1.
    RelativeToRho0(f64),
    Absolute(f64),
}

impl StartRadius {
    pub fn resolve(self, rho0: f64) -> f64 {
        match self {
            StartRadius::RelativeToRho0(k) => k * rho0,
            StartRadius::Absolute(r) => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmcConfig {
    pub rho_start: StartRadius,
    pub rho_inf: f64,
    pub trials: u64,
    pub seed: u64,
    pub alpha: f64,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub max_iterations: u64,
}

impl Default for KmcConfig {
    fn default() -> Self {
        KmcConfig {
            rho_start: StartRadius::RelativeToRho0(DEFAULT_START_FACTOR),
            rho_inf: DEFAULT_RHO_INF,
            trials: 1_000_000,
            seed: 0,
            alpha: 0.05,
            threads: 0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl KmcConfig {
    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks `ρ0 < ρ_start < ρ_inf` for the bounding radius `rho0` and returns
    /// the resolved walk limits.
    pub fn limits(&self, rho0: f64) -> Result<WalkLimits> {
        let rho_start = self.rho_start.resolve(rho0);
        if !(rho_start.is_finite() && rho_start > rho0) {
            return Err(Error::invalid(
                "rho_start",
                format!("must exceed the circumradius {rho0}, got {rho_start}"),
            ));
        }
        if !(self.rho_inf > rho_start) || self.rho_inf.is_nan() {
            return Err(Error::invalid(
                "rho_inf",
                format!("must exceed rho_start {rho_start}, got {}", self.rho_inf),
            ));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be positive"));
        }
        Ok(WalkLimits {
            rho_start,
            rho_inf: self.rho_inf,
            max_iterations: self.max_iterations,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmcResult {
    pub hits: u64,
    pub trials: u64,
    pub rho_start: f64,
    pub rho_inf: f64,
    pub p_kmc: f64,
    pub c0: f64,
    pub chi: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub alpha: f64,
}

impl KmcResult {
    pub fn chi_estimate(&self) -> EstimateWithCI {
        EstimateWithCI {
            point: self.chi,
            lo: self.ci_lo,
            hi: self.ci_hi,
            alpha: self.alpha,
            trials: self.trials,
        }
    }
}

struct Region {
    r1_sq: f64,
    r1: f64,
    r2: f64,
    r2_sq: f64,
    s: f64,
    inv_hyp: f64,
}

impl Region {
    fn new(d: &DerivedConstants) -> Self {
        Region {
            r1_sq: d.r1 * d.r1,
            r1: d.r1,
            r2: d.r2,
            r2_sq: d.r2 * d.r2,
            s: d.s,
            inv_hyp: 1.0 / (1.0 + d.s * d.s).sqrt(),
        }
    }
}

impl PlanarTarget<5> for Region {
    #[inline]
    fn contains(&self, p: &[f64; 5]) -> bool {
        if p[1] * p[1] + p[2] * p[2] >= self.r1_sq {
            return false;
        }
        let dx = p[3] - self.s * p[1];
        let dy = p[4] - self.s * p[2];
        dx * dx + dy * dy < self.r2_sq
    }

    #[inline]
    fn clearance(&self, p: &[f64; 5]) -> Result<f64> {
        let d1 = p[1].hypot(p[2]) - self.r1;
        let d2 = (p[3] - self.s * p[1]).hypot(p[4] - self.s * p[2]) - self.r2;
        let nu = d1.max(d2 * self.inv_hyp);
        walk::rim_clearance(nu, self.r1.max(self.r2), || {
            format!("stage II radius {nu} at a point inside the region (d1 = {d1}, d2 = {d2})")
        })
    }
}

/// Uniform point on the 5D sphere of the given radius about the origin.
pub fn sample_uniform_sphere5(radius: f64, rng: &mut TrialRng) -> Result<Point5> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("radius", format!("must be positive and finite, got {radius}")));
    }
    Ok(Point5::from_array(walk::sample_sphere::<5>(radius, rng)))
}

/// Stage I: moves the point to where its Brownian path first meets `z = 0`.
pub fn stage1_project(pt: &Point5, rng: &mut TrialRng) -> Point5 {
    let mut a = pt.to_array();
    walk::project_to_plane(&mut a, rng);
    Point5::from_array(a)
}

/// Stage II radius: a positive lower bound on the distance from a plane point
/// outside the region to the region.
pub fn stage2_distance(d: &DerivedConstants, pt: &Point5) -> Result<f64> {
    Region::new(d).clearance(&pt.to_array())
}

/// Runs trial number `trial` with its own generator.
pub fn run_trial(
    d: &DerivedConstants,
    cfg: &KmcConfig,
    trial: u64,
    rng: &mut TrialRng,
) -> Result<TrialOutcome> {
    let limits = cfg.limits(d.rho0)?;
    walk::run_walk(&Region::new(d), &limits, trial, rng)
}

/// Runs `cfg.trials` walks and converts the hit fraction into `c0` and `χ`.
pub fn estimate_chi(d: &DerivedConstants, cfg: &KmcConfig) -> Result<KmcResult> {
    let limits = cfg.limits(d.rho0)?;
    let region = Region::new(d);
    let hits = count_successes(cfg.trials, cfg.seed, cfg.threads, |i, rng| {
        walk::run_walk(&region, &limits, i, rng).map(|o| o == TrialOutcome::Hit)
    })?;
    let p = EstimateWithCI::proportion(hits, cfg.trials, cfg.alpha)?;
    let to_chi = d.chi_from_capacitance(limits.rho_start.powi(3));
    let chi = p.scale(to_chi);
    Ok(KmcResult {
        hits,
        trials: cfg.trials,
        rho_start: limits.rho_start,
        rho_inf: limits.rho_inf,
        p_kmc: p.point,
        c0: limits.rho_start.powi(3) * p.point,
        chi: chi.point,
        ci_lo: chi.lo,
        ci_hi: chi.hi,
        alpha: cfg.alpha,
    })
}

/// `χ(D_A, D_B)` for caps of relative size `a_A`, `a_B`.
pub fn estimate_chi_for(d_a: f64, d_b: f64, a_a: f64, a_b: f64, cfg: &KmcConfig) -> Result<KmcResult> {
    estimate_chi(&DerivedConstants::from_groups(d_a, d_b, a_a, a_b)?, cfg)
}

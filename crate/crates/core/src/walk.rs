//! Two-stage kinetic Monte Carlo for Brownian motion in `N` dimensions
//! absorbed by a flat target lying in the hyperplane `z = 0`.
//!
//! Coordinate 0 is `z`; the remaining `N - 1` are lateral. Stage I jumps the
//! walker to the plane with the exact hitting-time law; Stage II jumps it to a
//! uniform point on a sphere that cannot touch the target.

use rand::Rng;
use rand_distr::{Open01, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::TrialRng;
use crate::special::erfc_inv;

/// A flat absorbing set on the plane `z = 0`.
pub trait PlanarTarget<const N: usize>: Sync {
    /// Membership for a point already on the plane.
    fn contains(&self, p: &[f64; N]) -> bool;

    /// A positive lower bound on the distance from a plane point outside the
    /// target to the target. Zero means the point sits on the rim to within
    /// rounding and counts as a hit.
    fn clearance(&self, p: &[f64; N]) -> Result<f64>;
}

/// Slack, relative to the target's size, within which a point that fails
/// `contains` is taken to lie on the rim.
pub const RIM_TOLERANCE: f64 = 1e-12;

/// Resolves a signed rim distance: positive passes through, rounding-level
/// negatives become zero, anything else is a bug in the target.
pub fn rim_clearance(nu: f64, scale: f64, describe: impl FnOnce() -> String) -> Result<f64> {
    if nu > 0.0 {
        Ok(nu)
    } else if nu >= -RIM_TOLERANCE * scale {
        Ok(0.0)
    } else {
        Err(Error::InvariantViolation(describe()))
    }
}

/// How a single walk ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Hit,
    Escape,
}

/// Time for Brownian motion with generator Δ to reach the plane from height
/// `z`, given a uniform variate `u`: `t* = (|z| / erfc⁻¹(u))² / 4`.
#[inline]
pub fn hitting_time(z: f64, u: f64) -> f64 {
    let w = z.abs() / erfc_inv(u);
    0.25 * w * w
}

#[inline]
pub fn norm_sq<const N: usize>(p: &[f64; N]) -> f64 {
    p.iter().map(|x| x * x).sum()
}

/// Uniform point on the sphere of radius `radius` centred at the origin.
pub fn sample_sphere<const N: usize>(radius: f64, rng: &mut TrialRng) -> [f64; N] {
    loop {
        let mut g = [0.0; N];
        for x in g.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let n2 = norm_sq(&g);
        if n2 > 0.0 {
            let k = radius / n2.sqrt();
            for x in g.iter_mut() {
                *x *= k;
            }
            return g;
        }
    }
}

/// Stage I: exact-in-law projection of the walker onto `z = 0`.
pub fn project_to_plane<const N: usize>(p: &mut [f64; N], rng: &mut TrialRng) {
    let u: f64 = rng.sample(Open01);
    let sd = (2.0 * hitting_time(p[0], u)).sqrt();
    p[0] = 0.0;
    for x in p[1..].iter_mut() {
        let xi: f64 = rng.sample(StandardNormal);
        *x += sd * xi;
    }
}

/// Walk parameters shared by every trial of a run.
#[derive(Debug, Clone, Copy)]
pub struct WalkLimits {
    pub rho_start: f64,
    pub rho_inf: f64,
    /// Maximum number of Stage I/Stage II alternations per trial.
    pub max_iterations: u64,
}

/// One trial: start uniformly on the sphere of radius `rho_start`, alternate
/// the two stages until the walker lands in the target (hit) or leaves the
/// ball of radius `rho_inf` after a Stage II jump (escape).
pub fn run_walk<const N: usize, T: PlanarTarget<N>>(
    target: &T,
    limits: &WalkLimits,
    trial: u64,
    rng: &mut TrialRng,
) -> Result<TrialOutcome> {
    let rho_inf_sq = limits.rho_inf * limits.rho_inf;
    let mut p = sample_sphere::<N>(limits.rho_start, rng);
    for _ in 0..limits.max_iterations {
        project_to_plane(&mut p, rng);
        if target.contains(&p) {
            return Ok(TrialOutcome::Hit);
        }
        let nu = target.clearance(&p)?;
        if nu == 0.0 {
            return Ok(TrialOutcome::Hit);
        }
        let jump = sample_sphere::<N>(nu, rng);
        for (x, dx) in p.iter_mut().zip(jump) {
            *x += dx;
        }
        if norm_sq(&p) > rho_inf_sq {
            return Ok(TrialOutcome::Escape);
        }
    }
    Err(Error::BudgetExceeded {
        trial,
        budget: limits.max_iterations,
        unit: "stage alternations",
    })
}

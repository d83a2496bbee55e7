//! Direct Brownian dynamics of the full binding process: a point particle
//! outside the reaction sphere and two sets of caps diffusing on its surface.
//!
//! The particle carries the relative A–B position with diffusivity
//! `D_tr = D_tr,A + D_tr,B`. Caps are stored as unit vectors. Contact happens
//! when the particle reaches the sphere inside an A cap and a B cap at once.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rng::{count_successes, TrialRng};
use crate::stats::EstimateWithCI;

pub type Vec3 = [f64; 3];

#[inline]
fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn normalize(v: &mut Vec3) {
    let n = dot(v, v).sqrt();
    v[0] /= n;
    v[1] /= n;
    v[2] /= n;
}

fn gaussian3(sd: f64, rng: &mut TrialRng) -> Vec3 {
    [
        sd * rng.sample::<f64, _>(StandardNormal),
        sd * rng.sample::<f64, _>(StandardNormal),
        sd * rng.sample::<f64, _>(StandardNormal),
    ]
}

/// Uniform point on the unit sphere.
pub fn random_unit(rng: &mut TrialRng) -> Vec3 {
    loop {
        let mut v = gaussian3(1.0, rng);
        let n2 = dot(&v, &v);
        if n2 > 0.0 {
            normalize(&mut v);
            return v;
        }
    }
}

type Mat3 = [[f64; 3]; 3];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// `R_x(ω1) R_y(ω2) R_z(ω3)`.
pub fn rotation_xyz(w1: f64, w2: f64, w3: f64) -> [[f64; 3]; 3] {
    let (s1, c1) = w1.sin_cos();
    let (s2, c2) = w2.sin_cos();
    let (s3, c3) = w3.sin_cos();
    let rx = [[1.0, 0.0, 0.0], [0.0, c1, -s1], [0.0, s1, c1]];
    let ry = [[c2, 0.0, s2], [0.0, 1.0, 0.0], [-s2, 0.0, c2]];
    let rz = [[c3, -s3, 0.0], [s3, c3, 0.0], [0.0, 0.0, 1.0]];
    mat_mul(&mat_mul(&rx, &ry), &rz)
}

/// Particle position, cap centres and elapsed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub particle: Vec3,
    pub caps_a: Vec<Vec3>,
    pub caps_b: Vec<Vec3>,
    pub time: f64,
}

impl SystemState {
    /// Particle at distance `r0` in a uniform direction, caps i.i.d. uniform.
    pub fn random(r0: f64, n_a: usize, n_b: usize, rng: &mut TrialRng) -> Self {
        let u = random_unit(rng);
        SystemState {
            particle: [r0 * u[0], r0 * u[1], r0 * u[2]],
            caps_a: (0..n_a).map(|_| random_unit(rng)).collect(),
            caps_b: (0..n_b).map(|_| random_unit(rng)).collect(),
            time: 0.0,
        }
    }

    pub fn radius(&self) -> f64 {
        dot(&self.particle, &self.particle).sqrt()
    }
}

/// Diffusivities and site geometry used by the stepper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobility {
    /// Reaction radius.
    pub r: f64,
    pub dtr: f64,
    pub drot_a: f64,
    pub drot_b: f64,
    /// Angular surface diffusivities `D_surf / R²`.
    pub dsurf_a: f64,
    pub dsurf_b: f64,
    /// Cap polar angles `ε a_A`, `ε a_B`.
    pub cap_a: f64,
    pub cap_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

impl Mobility {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        let r = p.reaction_radius();
        Ok(Mobility {
            r,
            dtr: p.dtr(),
            drot_a: p.drot_a,
            drot_b: p.drot_b,
            dsurf_a: p.dsurf_a / (r * r),
            dsurf_b: p.dsurf_b / (r * r),
            cap_a: p.eps * p.a_a,
            cap_b: p.eps * p.a_b,
            n_a: usize::try_from(p.n_a).map_err(|_| Error::invalid("n_a", "too many sites"))?,
            n_b: usize::try_from(p.n_b).map_err(|_| Error::invalid("n_b", "too many sites"))?,
        })
    }

    fn deff_max(&self) -> f64 {
        (self.drot_a + self.dsurf_a).max(self.drot_b + self.dsurf_b)
    }

    /// No cap moves at all.
    pub fn frozen(&self) -> bool {
        self.deff_max() == 0.0
    }
}

fn move_caps(caps: &mut [Vec3], dsurf: f64, drot: f64, dt: f64, rng: &mut TrialRng) {
    if dsurf > 0.0 {
        let sd = (2.0 * dsurf * dt).sqrt();
        for c in caps.iter_mut() {
            let g = gaussian3(sd, rng);
            let radial = dot(&g, c);
            for k in 0..3 {
                c[k] += g[k] - radial * c[k];
            }
            normalize(c);
        }
    }
    if drot > 0.0 {
        let sd = (2.0 * drot * dt).sqrt();
        let w: [f64; 3] = [
            sd * rng.sample::<f64, _>(StandardNormal),
            sd * rng.sample::<f64, _>(StandardNormal),
            sd * rng.sample::<f64, _>(StandardNormal),
        ];
        let m = rotation_xyz(w[0], w[1], w[2]);
        for c in caps.iter_mut() {
            *c = mat_vec(&m, c);
            normalize(c);
        }
    }
}

/// One Euler–Maruyama step of length `dt`: particle translation, then surface
/// diffusion and a shared random rotation for each cap set.
pub fn step(state: &mut SystemState, dt: f64, m: &Mobility, rng: &mut TrialRng) {
    let g = gaussian3((2.0 * m.dtr * dt).sqrt(), rng);
    for (x, dx) in state.particle.iter_mut().zip(g) {
        *x += dx;
    }
    move_caps(&mut state.caps_a, m.dsurf_a, m.drot_a, dt, rng);
    move_caps(&mut state.caps_b, m.dsurf_b, m.drot_b, dt, rng);
    state.time += dt;
}

fn max_dot(caps: &[Vec3], u: &Vec3) -> f64 {
    caps.iter().map(|c| dot(c, u)).fold(f64::NEG_INFINITY, f64::max)
}

/// True when the direction of the particle lies strictly inside some A cap
/// and some B cap.
pub fn contact_test(state: &SystemState, m: &Mobility) -> bool {
    let mut u = state.particle;
    normalize(&mut u);
    max_dot(&state.caps_a, &u) > m.cap_a.cos() && max_dot(&state.caps_b, &u) > m.cap_b.cos()
}

/// Radial mirror through the sphere of radius `r`.
pub fn reflect(state: &mut SystemState, r: f64) -> Result<()> {
    let n = state.radius();
    if !(n > 0.0) {
        return Err(Error::InvariantViolation(
            "particle reached the origin; reflection direction undefined".into(),
        ));
    }
    if n < r {
        let k = (2.0 * r - n) / n;
        for x in state.particle.iter_mut() {
            *x *= k;
        }
    }
    Ok(())
}

/// Lower bound on the angle between the particle direction and the set of
/// directions covered by both cap sets; zero inside that set.
pub fn angular_gap(state: &SystemState, m: &Mobility) -> f64 {
    let mut u = state.particle;
    normalize(&mut u);
    let ga = max_dot(&state.caps_a, &u).clamp(-1.0, 1.0).acos() - m.cap_a;
    let gb = max_dot(&state.caps_b, &u).clamp(-1.0, 1.0).acos() - m.cap_b;
    ga.max(gb).max(0.0)
}

/// Whether any A cap overlaps any B cap.
pub fn caps_overlap(state: &SystemState, m: &Mobility) -> bool {
    let reach = m.cap_a + m.cap_b;
    if reach >= std::f64::consts::PI {
        return true;
    }
    let c = reach.cos();
    state
        .caps_a
        .iter()
        .any(|a| state.caps_b.iter().any(|b| dot(a, b) > c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdConfig {
    /// Start radius in units of the reaction radius.
    pub r0: f64,
    /// Escape radius in units of the reaction radius.
    pub r_inf: f64,
    pub dt_big: f64,
    pub dt_small: f64,
    pub proximity_factor: f64,
    pub trials: u64,
    pub seed: u64,
    pub alpha: f64,
    pub threads: usize,
    pub max_steps: u64,
}

impl Default for BdConfig {
    fn default() -> Self {
        BdConfig {
            r0: 1.1,
            r_inf: 10.0,
            dt_big: 1e-3,
            dt_small: 1e-8,
            proximity_factor: 3.0,
            trials: 1000,
            seed: 0,
            alpha: 0.05,
            threads: 0,
            max_steps: 10_000_000_000,
        }
    }
}

impl BdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 1.0 && self.r0.is_finite()) {
            return Err(Error::invalid("r0", format!("must exceed 1 (units of R), got {}", self.r0)));
        }
        if !(self.r_inf > self.r0 && self.r_inf.is_finite()) {
            return Err(Error::invalid(
                "r_inf",
                format!("must exceed r0 = {}, got {}", self.r0, self.r_inf),
            ));
        }
        if !(self.dt_small > 0.0 && self.dt_small < self.dt_big && self.dt_big.is_finite()) {
            return Err(Error::invalid(
                "dt_small",
                format!("need 0 < dt_small ({}) < dt_big ({})", self.dt_small, self.dt_big),
            ));
        }
        if !(self.proximity_factor > 0.0 && self.proximity_factor.is_finite()) {
            return Err(Error::invalid("proximity_factor", "must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be positive"));
        }
        Ok(())
    }
}

/// Step size for the current state.
///
/// Far from the sphere this is `dt_big`. Close to it the step shrinks so that
/// `proximity_factor` standard deviations of motion fit inside whichever is
/// larger of the radial gap and the angular gap to a possible contact,
/// bounded below by `dt_small`.
pub fn choose_dt(state: &SystemState, m: &Mobility, cfg: &BdConfig) -> f64 {
    let f2 = cfg.proximity_factor * cfg.proximity_factor;
    let gap_r = state.radius() - m.r;
    let dt_r = gap_r * gap_r / (2.0 * m.dtr * f2);
    if gap_r > 0.0 && dt_r >= cfg.dt_big {
        return cfg.dt_big;
    }
    let gap_t = angular_gap(state, m);
    let dt_t = gap_t * gap_t / (2.0 * (m.dtr / (m.r * m.r) + m.deff_max()) * f2);
    dt_r.max(dt_t).clamp(cfg.dt_small, cfg.dt_big)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BdOutcome {
    Bound,
    Escaped,
}

/// Simulates one trial until contact or escape through `r_inf`.
pub fn run_trial(m: &Mobility, cfg: &BdConfig, trial: u64, rng: &mut TrialRng) -> Result<BdOutcome> {
    let mut state = SystemState::random(cfg.r0 * m.r, m.n_a, m.n_b, rng);
    // Frozen, disjoint caps can never present a contact point.
    if m.frozen() && !caps_overlap(&state, m) {
        return Ok(BdOutcome::Escaped);
    }
    let r_sq = m.r * m.r;
    let r_inf_sq = (cfg.r_inf * m.r).powi(2);
    for _ in 0..cfg.max_steps {
        let dt = choose_dt(&state, m, cfg);
        step(&mut state, dt, m, rng);
        let n2 = dot(&state.particle, &state.particle);
        if n2 >= r_inf_sq {
            return Ok(BdOutcome::Escaped);
        }
        if n2 <= r_sq {
            if contact_test(&state, m) {
                return Ok(BdOutcome::Bound);
            }
            reflect(&mut state, m.r)?;
        }
    }
    Err(Error::BudgetExceeded {
        trial,
        budget: cfg.max_steps,
        unit: "time steps",
    })
}

/// Capacitance estimate `C/R = (1-q) r0 r_inf / (r_inf - q r0)` from the
/// escape fraction `q`, with `r0` and `r_inf` in units of `R`. This equals
/// `k0 / k_smol`.
pub fn capacitance_from_escape(q: f64, r0: f64, r_inf: f64) -> f64 {
    (1.0 - q) * r0 * r_inf / (r_inf - q * r0)
}

/// `k0 / k_smol` with a confidence interval from `escaped` out of `trials`.
pub fn estimate_k0(escaped: u64, trials: u64, cfg: &BdConfig) -> Result<EstimateWithCI> {
    let q = EstimateWithCI::proportion(escaped, trials, cfg.alpha)?;
    Ok(q.map_antitone(|q| capacitance_from_escape(q, cfg.r0, cfg.r_inf)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdResult {
    pub trials: u64,
    pub bound: u64,
    pub escaped: u64,
    /// `k0 / k_smol`.
    pub k0: EstimateWithCI,
}

/// Runs `cfg.trials` independent trials and estimates `k0 / k_smol`.
pub fn simulate(p: &ModelParams, cfg: &BdConfig) -> Result<BdResult> {
    cfg.validate()?;
    let m = Mobility::from_params(p)?;
    let bound = count_successes(cfg.trials, cfg.seed, cfg.threads, |i, rng| {
        run_trial(&m, cfg, i, rng).map(|o| o == BdOutcome::Bound)
    })?;
    let escaped = cfg.trials - bound;
    Ok(BdResult {
        trials: cfg.trials,
        bound,
        escaped,
        k0: estimate_k0(escaped, cfg.trials, cfg)?,
    })
}

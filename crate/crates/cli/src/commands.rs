use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use patchy_core::bdsim::{simulate, BdConfig};
use patchy_core::kmc3d::{lens_integral_with, zero_rotation_k0, LensConfig};
use patchy_core::kmc5d::{estimate_chi, estimate_chi_for, KmcConfig, KmcResult, StartRadius};
use patchy_core::model::stokes_einstein_params;
use patchy_core::rates::{chi_qc, k0_asymptotic, k0_saturating, RateSummary, SiteGeometry};
use patchy_core::rng::derive_seed;
use patchy_core::{derive_constants, Error, ModelParams};

use crate::args::{BdArgs, ChiArgs, Format, LensArgs, RatesArgs, ZeroRotationArgs};
use crate::output::{Cell, TableWriter};

/// Bad flag combinations caught before any core call.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Some rows were labelled with a budget diagnostic instead of data.
#[derive(Debug)]
pub struct DiagnosticsReported(pub usize);

impl std::fmt::Display for DiagnosticsReported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} row(s) hit the iteration or step budget", self.0)
    }
}

impl std::error::Error for DiagnosticsReported {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

pub struct Ctx {
    pub format: Format,
    pub threads: usize,
}

/// What a finished command reports back for the manifest.
#[derive(Debug)]
pub struct Report {
    pub sha256: String,
    pub diagnostics: usize,
}

impl Report {
    pub fn into_result(self) -> Result<String> {
        if self.diagnostics > 0 {
            return Err(DiagnosticsReported(self.diagnostics).into());
        }
        Ok(self.sha256)
    }
}

/// Resolved parameters, seed and per-point trial count of a command.
pub struct Plan {
    pub params: serde_json::Value,
    pub seed: u64,
    pub trials: u64,
}

impl Plan {
    fn new(params: &impl Serialize, seed: u64, trials: u64) -> Self {
        Plan {
            params: serde_json::to_value(params).expect("plain data serializes"),
            seed,
            trials,
        }
    }
}

fn status(err: &Error) -> String {
    format!("budget_exceeded: {err}")
}

fn check_sweep(params: &[ModelParams]) -> Result<()> {
    if params.is_empty() {
        return usage("empty --na/--nb list");
    }
    for p in params {
        p.validate()?;
    }
    Ok(())
}

const RATE_COLUMNS: [&str; 25] = [
    "n_a",
    "n_b",
    "eps",
    "k_smol",
    "f_a",
    "f_b",
    "k_geo",
    "chi_qc",
    "chi_b",
    "chi",
    "k0_asymptotic",
    "k0_saturating",
    "k_bar_a",
    "k_bar_b",
    "k_eff",
    "kappa",
    "k_geo_dim",
    "k0_asymptotic_dim",
    "k0_saturating_dim",
    "k_bar_a_dim",
    "k_bar_b_dim",
    "k_eff_dim",
    "kappa_dim",
    "reaction_radius",
    "dtr",
];

pub fn rates_plan(a: &RatesArgs) -> Plan {
    Plan::new(a, 0, 0)
}

/// Closed-form rates. Rate columns are `k / k_smol` and `κ R / D_tr`; the
/// `_dim` columns carry the caller's units.
pub fn rates(a: &RatesArgs, ctx: &Ctx, sink: Box<dyn Write>) -> Result<Report> {
    let sweep = a.model.sweep();
    check_sweep(&sweep)?;
    let mut rows = Vec::with_capacity(sweep.len());
    for p in &sweep {
        rows.push((p, RateSummary::evaluate(p, a.chi)?));
    }
    let mut t = TableWriter::new(ctx.format, RATE_COLUMNS.to_vec(), sink)?;
    for (p, s) in rows {
        let (r, dtr) = (p.reaction_radius(), p.dtr());
        let k = s.k_smol;
        t.row(vec![
            p.n_a.into(),
            p.n_b.into(),
            p.eps.into(),
            k.into(),
            s.f_a.into(),
            s.f_b.into(),
            s.k_geo.into(),
            s.chi_qc.into(),
            s.chi_b.into(),
            s.chi.into(),
            s.k0_asymptotic.into(),
            s.k0_saturating.into(),
            s.k_bar_a.into(),
            s.k_bar_b.into(),
            s.k_eff.into(),
            (s.kappa * r / dtr).into(),
            (s.k_geo * k).into(),
            (s.k0_asymptotic * k).into(),
            (s.k0_saturating * k).into(),
            (s.k_bar_a * k).into(),
            (s.k_bar_b * k).into(),
            (s.k_eff * k).into(),
            s.kappa.into(),
            r.into(),
            dtr.into(),
        ])?;
    }
    Ok(Report {
        sha256: t.finish()?,
        diagnostics: 0,
    })
}

pub fn chi_plan(a: &ChiArgs) -> Plan {
    Plan::new(a, a.seed, a.trials)
}

/// `(xi, D_A, D_B)` for each requested point.
fn chi_points(a: &ChiArgs) -> Result<Vec<(Option<f64>, f64, f64)>> {
    match &a.xi {
        Some(xs) => {
            if xs.is_empty() {
                return usage("empty --xi list");
            }
            xs.iter()
                .map(|&xi| {
                    let (da, db) = stokes_einstein_params(xi)?;
                    Ok((Some(xi), da, db))
                })
                .collect()
        }
        None => {
            if a.da.is_empty() || a.db.is_empty() {
                return usage("empty --da/--db list");
            }
            let mut out = Vec::new();
            for &da in &a.da {
                for &db in &a.db {
                    if !(da > 0.0 && db > 0.0) {
                        return usage(format!("--da/--db values must be > 0, got ({da}, {db})"));
                    }
                    out.push((None, da, db));
                }
            }
            Ok(out)
        }
    }
}

/// 5D kinetic Monte Carlo over a grid of `(D_A, D_B)`, or over size ratios.
/// Point `k` runs with seed `derive_seed(seed, k)`.
pub fn chi(a: &ChiArgs, ctx: &Ctx, sink: Box<dyn Write>) -> Result<Report> {
    let points = chi_points(a)?;
    let base = KmcConfig {
        rho_start: StartRadius::RelativeToRho0(a.rho_start),
        rho_inf: a.rho_inf,
        trials: a.trials,
        seed: a.seed,
        threads: ctx.threads,
        ..KmcConfig::default()
    };
    // Fail on bad configuration before any output.
    let probe = patchy_core::model::DerivedConstants::from_groups(points[0].1, points[0].2, a.a_a, a.a_b)?;
    base.limits(probe.rho0)?;

    let columns = vec![
        "index", "xi", "d_a", "d_b", "chi", "chi_lo", "chi_hi", "chi_qc", "rel_error", "hits", "trials",
        "rho_start", "rho_inf", "seed", "status",
    ];
    let mut t = TableWriter::new(ctx.format, columns, sink)?;
    let mut diagnostics = 0;
    for (k, &(xi, da, db)) in points.iter().enumerate() {
        let seed = derive_seed(a.seed, k as u64);
        let qc = chi_qc((1.0 + da).sqrt(), (1.0 + db).sqrt(), a.a_a, a.a_b);
        let head = vec![k.into(), xi.into(), da.into(), db.into()];
        let cfg = KmcConfig { seed, ..base };
        let cells = match estimate_chi_for(da, db, a.a_a, a.a_b, &cfg) {
            Ok(r) => chi_cells(&r, qc, seed),
            Err(e) if e.is_diagnostic() => {
                diagnostics += 1;
                let mut c = vec![Cell::Empty, Cell::Empty, Cell::Empty, qc.into(), Cell::Empty];
                c.extend([Cell::Empty, a.trials.into(), Cell::Empty, a.rho_inf.into(), seed.into()]);
                c.push(status(&e).as_str().into());
                c
            }
            Err(e) => return Err(e.into()),
        };
        t.row(head.into_iter().chain(cells).collect())?;
    }
    Ok(Report {
        sha256: t.finish()?,
        diagnostics,
    })
}

fn chi_cells(r: &KmcResult, qc: f64, seed: u64) -> Vec<Cell> {
    vec![
        r.chi.into(),
        r.ci_lo.into(),
        r.ci_hi.into(),
        qc.into(),
        ((r.chi - qc) / r.chi).into(),
        r.hits.into(),
        r.trials.into(),
        r.rho_start.into(),
        r.rho_inf.into(),
        seed.into(),
        "ok".into(),
    ]
}

pub fn lens_plan(a: &LensArgs) -> Plan {
    Plan::new(a, a.seed, a.trials)
}

/// Lens capacitances on `s_k = 2k / n`, followed by one `integral` row
/// holding the trapezoid integral of `c(s) s`, its standard error and the
/// ratio `(integral / 4) / chi_ref`.
pub fn lens(a: &LensArgs, ctx: &Ctx, sink: Box<dyn Write>) -> Result<Report> {
    if !(a.chi_ref > 0.0) {
        return usage(format!("--chi-ref must be > 0, got {}", a.chi_ref));
    }
    let cfg = LensConfig {
        trials: a.trials,
        rho_inf: a.rho_inf,
        seed: a.seed,
        threads: ctx.threads,
        ..LensConfig::default()
    };
    if a.grid_n < 2 {
        return usage(format!("--grid-n must be at least 2, got {}", a.grid_n));
    }
    let columns = vec!["kind", "index", "s", "c", "c_lo", "c_hi", "std_error", "ratio"];
    let mut t = TableWriter::new(ctx.format, columns, sink)?;
    let every = (a.grid_n / 10).max(1);
    let mut write_err = None;
    let result = lens_integral_with(a.grid_n, &cfg, |row| {
        let written = t.row(vec![
            "point".into(),
            row.index.into(),
            row.s.into(),
            row.c.point.into(),
            row.c.lo.into(),
            row.c.hi.into(),
            row.c.std_error().into(),
            Cell::Empty,
        ]);
        if let Err(e) = written {
            write_err = Some(e);
            return Err(Error::InvariantViolation("output write failed".into()));
        }
        if (row.index + 1) % every == 0 {
            eprintln!("lens: {}/{} points", row.index + 1, a.grid_n);
        }
        Ok(())
    });
    if let Some(e) = write_err {
        return Err(e);
    }
    let result = result?;
    let ratio = result.integral / 4.0 / a.chi_ref;
    let half = 1.959_963_984_540_054 * result.std_error;
    t.row(vec![
        "integral".into(),
        Cell::Empty,
        Cell::Empty,
        result.integral.into(),
        (result.integral - half).into(),
        (result.integral + half).into(),
        result.std_error.into(),
        ratio.into(),
    ])?;
    eprintln!(
        "lens: integral = {:.5} +/- {:.5}, ratio to chi_ref {} = {:.4}",
        result.integral, result.std_error, a.chi_ref, ratio
    );
    Ok(Report {
        sha256: t.finish()?,
        diagnostics: 0,
    })
}

pub fn bdsim_plan(a: &BdArgs) -> Plan {
    Plan::new(a, a.seed, a.trials)
}

fn bd_config(a: &BdArgs, threads: usize) -> BdConfig {
    BdConfig {
        r0: a.r0,
        r_inf: a.r_inf,
        dt_big: a.dt_big,
        dt_small: a.dt_small,
        proximity_factor: a.proximity_factor,
        trials: a.trials,
        seed: a.seed,
        threads,
        max_steps: a.max_steps,
        ..BdConfig::default()
    }
}

/// Brownian dynamics for each `(N_A, N_B)`, next to the asymptotic and
/// saturating predictions. Point `k` runs with seed `derive_seed(seed, k)`.
pub fn bdsim(a: &BdArgs, ctx: &Ctx, sink: Box<dyn Write>) -> Result<Report> {
    if a.zero_rotation {
        return zero_rotation(&zero_rotation_args(a), ctx, sink);
    }
    let sweep = a.model.sweep();
    check_sweep(&sweep)?;
    let base = bd_config(a, ctx.threads);
    base.validate()?;
    let chi = match a.chi {
        Some(c) if c > 0.0 && c.is_finite() => c,
        Some(c) => return usage(format!("--chi must be > 0, got {c}")),
        None => {
            let d = derive_constants(&sweep[0])?;
            let cfg = KmcConfig {
                trials: a.chi_trials,
                seed: derive_seed(a.seed, u64::MAX),
                threads: ctx.threads,
                ..KmcConfig::default()
            };
            let r = estimate_chi(&d, &cfg)?;
            eprintln!("bdsim: chi = {:.5} [{:.5}, {:.5}] from {} trials", r.chi, r.ci_lo, r.ci_hi, r.trials);
            r.chi
        }
    };
    let columns = vec![
        "index", "n_a", "n_b", "eps", "drot_a", "drot_b", "dsurf_a", "dsurf_b", "trials", "bound", "escaped",
        "k0", "k0_lo", "k0_hi", "chi", "k0_asymptotic", "k0_saturating", "seed", "status",
    ];
    let mut t = TableWriter::new(ctx.format, columns, sink)?;
    let mut diagnostics = 0;
    for (k, p) in sweep.iter().enumerate() {
        let seed = derive_seed(a.seed, k as u64);
        let g = SiteGeometry::from_params(p)?;
        let asym = k0_asymptotic(g.eps, g.n_a, g.n_b, chi, 1.0);
        let sat = k0_saturating(&g, chi);
        let mut row: Vec<Cell> = vec![
            k.into(),
            p.n_a.into(),
            p.n_b.into(),
            p.eps.into(),
            p.drot_a.into(),
            p.drot_b.into(),
            p.dsurf_a.into(),
            p.dsurf_b.into(),
            a.trials.into(),
        ];
        let tail = vec![chi.into(), asym.into(), sat.into(), seed.into()];
        match simulate(p, &BdConfig { seed, ..base }) {
            Ok(r) => {
                row.extend([r.bound.into(), r.escaped.into(), r.k0.point.into(), r.k0.lo.into(), r.k0.hi.into()]);
                row.extend(tail);
                row.push("ok".into());
            }
            Err(e) if e.is_diagnostic() => {
                diagnostics += 1;
                row.extend(std::iter::repeat_n(Cell::Empty, 5));
                row.extend(tail);
                row.push(status(&e).as_str().into());
            }
            Err(e) => return Err(e.into()),
        }
        t.row(row)?;
        eprintln!("bdsim: point {}/{} done", k + 1, sweep.len());
    }
    Ok(Report {
        sha256: t.finish()?,
        diagnostics,
    })
}

/// Site counts and diffusivities other than `D_tr` are fixed by the
/// validation setup and ignored.
fn zero_rotation_args(a: &BdArgs) -> ZeroRotationArgs {
    ZeroRotationArgs {
        eps: a.model.eps,
        r0: a.r0,
        r_inf: a.r_inf,
        trials: a.trials,
        dt_big: a.dt_big,
        dt_small: a.dt_small,
        seed: a.seed,
        integral: a.integral,
        grid_n: 400,
        lens_trials: 100_000,
    }
}

pub fn zero_rotation_plan(a: &ZeroRotationArgs) -> Plan {
    Plan::new(a, a.seed, a.trials)
}

/// One site per molecule, no rotation: Brownian dynamics against
/// `k0 / k_smol = ε³/4 · ∫₀² c(s) s ds`.
pub fn zero_rotation(a: &ZeroRotationArgs, ctx: &Ctx, sink: Box<dyn Write>) -> Result<Report> {
    let p = ModelParams {
        eps: a.eps,
        drot_a: 0.0,
        drot_b: 0.0,
        dsurf_a: 0.0,
        dsurf_b: 0.0,
        n_a: 1,
        n_b: 1,
        ..ModelParams::default()
    };
    p.validate()?;
    let cfg = BdConfig {
        r0: a.r0,
        r_inf: a.r_inf,
        dt_big: a.dt_big,
        dt_small: a.dt_small,
        trials: a.trials,
        seed: a.seed,
        threads: ctx.threads,
        ..BdConfig::default()
    };
    cfg.validate()?;
    let (integral, integral_se) = match a.integral {
        Some(v) if v > 0.0 => (v, 0.0),
        Some(v) => return usage(format!("--integral must be > 0, got {v}")),
        None => {
            let lens_cfg = LensConfig {
                trials: a.lens_trials,
                seed: derive_seed(a.seed, u64::MAX),
                threads: ctx.threads,
                ..LensConfig::default()
            };
            let r = lens_integral_with(a.grid_n, &lens_cfg, |_| Ok(()))?;
            (r.integral, r.std_error)
        }
    };
    let predicted = a.r0 * zero_rotation_k0(a.eps, a.r0, integral)?;
    let columns = vec![
        "eps", "r0", "r_inf", "trials", "bound", "escaped", "k0", "k0_lo", "k0_hi", "integral", "integral_se",
        "predicted", "z", "status",
    ];
    let mut t = TableWriter::new(ctx.format, columns, sink)?;
    let mut row: Vec<Cell> = vec![a.eps.into(), a.r0.into(), a.r_inf.into(), a.trials.into()];
    let mut diagnostics = 0;
    let tail = [integral.into(), integral_se.into(), predicted.into()];
    match simulate(&p, &cfg) {
        Ok(r) => {
            let se = r.k0.std_error().hypot(predicted / integral * integral_se);
            let z = (r.k0.point - predicted) / se;
            row.extend([r.bound.into(), r.escaped.into(), r.k0.point.into(), r.k0.lo.into(), r.k0.hi.into()]);
            row.extend(tail);
            row.extend([z.into(), "ok".into()]);
            eprintln!(
                "zero rotation: simulated k0 = {:.4e} [{:.4e}, {:.4e}], predicted {:.4e}, z = {:.2}",
                r.k0.point, r.k0.lo, r.k0.hi, predicted, z
            );
        }
        Err(e) if e.is_diagnostic() => {
            diagnostics += 1;
            row.extend(std::iter::repeat_n(Cell::Empty, 5));
            row.extend(tail);
            row.extend([Cell::Empty, status(&e).as_str().into()]);
        }
        Err(e) => return Err(e.into()),
    }
    t.row(row)?;
    Ok(Report {
        sha256: t.finish()?,
        diagnostics,
    })
}

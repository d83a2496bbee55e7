//! Closed-form binding rates.
//!
//! Apart from [`k_smol`], [`k0_asymptotic`] and [`trapping_rate`], every
//! function returns a rate normalized by the Smoluchowski rate; multiply by
//! [`k_smol`] for dimensional values.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Avogadro's number.
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// Cubic nanometres per litre.
const NM3_PER_LITRE: f64 = 1e24;

/// Smoluchowski rate `4π D_tr R` for perfectly absorbing spheres.
pub fn k_smol(dtr: f64, r: f64) -> f64 {
    4.0 * PI * dtr * r
}

/// nm³/s per molecule pair to M⁻¹s⁻¹.
pub fn molar_convert(k_nm3_per_s: f64) -> f64 {
    k_nm3_per_s * AVOGADRO / NM3_PER_LITRE
}

/// Expected fraction of a sphere covered by `n` independently placed caps of
/// polar angle `cap_angle`: `1 - cos^{2n}(cap_angle / 2)`.
pub fn surface_fraction(n: f64, cap_angle: f64) -> Result<f64> {
    if !(cap_angle > 0.0 && cap_angle < FRAC_PI_2) {
        return Err(Error::Domain {
            what: "cap polar angle (must lie in (0, pi/2))",
            value: cap_angle,
        });
    }
    if !(n >= 1.0) {
        return Err(Error::invalid("n", format!("need n >= 1, got {n}")));
    }
    // cos² = 1 - sin², evaluated without cancellation at small angles.
    let s2 = (0.5 * cap_angle).sin().powi(2);
    Ok(-libm::expm1(n * libm::log1p(-s2)))
}

/// Quasi-chemical approximation to the orientation factor χ.
pub fn chi_qc(lambda_a: f64, lambda_b: f64, a_a: f64, a_b: f64) -> f64 {
    a_a * a_b * (a_a * lambda_b + a_b * lambda_a) / (4.0 * PI)
}

/// Berg's single-site prediction of χ; differs from [`chi_qc`] by the
/// constant factor π/(2√2).
pub fn chi_berg(lambda_a: f64, lambda_b: f64, a_a: f64, a_b: f64) -> f64 {
    a_a * a_b * (a_a * lambda_b + a_b * lambda_a) / (8.0 * SQRT_2)
}

/// Leading-order rate `ε³ N_A N_B χ k_smol` for small sites.
pub fn k0_asymptotic(eps: f64, n_a: f64, n_b: f64, chi: f64, ksmol: f64) -> f64 {
    eps.powi(3) * n_a * n_b * chi * ksmol
}

/// Site geometry and mobility entering the saturating rate formulas.
///
/// Site counts are real so that the `N → ∞` limits can be probed directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteGeometry {
    pub eps: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub a_a: f64,
    pub a_b: f64,
}

impl SiteGeometry {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        let (d_a, d_b) = p.dimensionless_diffusivities();
        Ok(SiteGeometry {
            eps: p.eps,
            n_a: p.n_a as f64,
            n_b: p.n_b as f64,
            lambda_a: (1.0 + d_a).sqrt(),
            lambda_b: (1.0 + d_b).sqrt(),
            a_a: p.a_a,
            a_b: p.a_b,
        })
    }

    pub fn chi_qc(&self) -> f64 {
        chi_qc(self.lambda_a, self.lambda_b, self.a_a, self.a_b)
    }

    pub fn f_a(&self) -> Result<f64> {
        surface_fraction(self.n_a, self.eps * self.a_a)
    }

    pub fn f_b(&self) -> Result<f64> {
        surface_fraction(self.n_b, self.eps * self.a_b)
    }
}

/// Saturating rate `k̄₀ / k_smol`, which accounts for competition between
/// sites and stays in `(0, 1)`.
pub fn k0_saturating(g: &SiteGeometry, chi: f64) -> f64 {
    let e = g.eps;
    let cubic = e.powi(3) * g.n_a * g.n_b;
    let crowding = e * e * PI * (g.n_a / (g.a_b * g.lambda_b) + g.n_b / (g.lambda_a * g.a_a));
    cubic / (1.0 / chi + crowding + cubic)
}

/// `k̄_A / k_smol` for a fully reactive B surface (Berg–Purcell type limit
/// with orientational mobility of A).
pub fn k_bar_a(eps: f64, n_a: f64, a_a: f64, lambda_a: f64) -> f64 {
    let x = lambda_a * n_a * a_a * eps;
    x / (PI + x)
}

/// Berg–Purcell rate `k_bp / k_smol` for immobile sites on A.
pub fn k_berg_purcell(eps: f64, n_a: f64, a_a: f64) -> f64 {
    k_bar_a(eps, n_a, a_a, 1.0)
}

fn qc_ratio(lambda: f64, n: f64, f: f64) -> f64 {
    2.0 / PI * lambda * (n * f).sqrt()
}

/// Quasi-chemical six-state rate `k̄_eff / k_smol` for surface fractions
/// `f_a`, `f_b`.
pub fn k_eff_quasichemical(
    f_a: f64,
    f_b: f64,
    n_a: f64,
    n_b: f64,
    lambda_a: f64,
    lambda_b: f64,
) -> Result<f64> {
    for (name, f) in [("f_a", f_a), ("f_b", f_b)] {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::invalid(name, format!("must lie in (0, 1], got {f}")));
        }
    }
    let r_a = qc_ratio(lambda_a, n_a, f_a);
    let r_b = qc_ratio(lambda_b, n_b, f_b);
    // A fully covered partner gives Λ = 1 and ψ = 0.
    match (f_a == 1.0, f_b == 1.0) {
        (true, true) => return Ok(1.0),
        (false, true) => return Ok((r_a + f_a) / (r_a + 1.0)),
        (true, false) => return Ok((r_b + f_b) / (r_b + 1.0)),
        (false, false) => {}
    }
    let big_lambda = |r: f64, f: f64| f * (r + 1.0) / (r + f);
    // 1 - Λ and Λ - f in closed form to avoid cancellation at small f.
    let one_minus = |r: f64, f: f64| r * (1.0 - f) / (r + f);
    let minus_f = |r: f64, f: f64| f * (1.0 - f) / (r + f);
    let (la, lb) = (big_lambda(r_a, f_a), big_lambda(r_b, f_b));
    let (oa, ob) = (one_minus(r_a, f_a), one_minus(r_b, f_b));
    let (ma, mb) = (minus_f(r_a, f_a), minus_f(r_b, f_b));
    let psi = 1.0 / (1.0 / (oa * ob) + 1.0 / (oa * mb) + 1.0 / (ob * ma));
    Ok(f_a * f_b / (la * lb + psi))
}

/// [`k_eff_quasichemical`] with the surface fractions of `g`.
pub fn k_eff_for(g: &SiteGeometry) -> Result<f64> {
    k_eff_quasichemical(g.f_a()?, g.f_b()?, g.n_a, g.n_b, g.lambda_a, g.lambda_b)
}

/// Robin trapping rate κ reproducing a given normalized binding rate.
pub fn trapping_rate(k_over_ksmol: f64, dtr: f64, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k_over_ksmol) {
        return Err(Error::Domain {
            what: "normalized rate k/k_smol (must lie in [0, 1))",
            value: k_over_ksmol,
        });
    }
    if k_over_ksmol == 1.0 {
        return Err(Error::Divergence(k_over_ksmol));
    }
    Ok(dtr / r * k_over_ksmol / (1.0 - k_over_ksmol))
}

/// Geometric estimate `f_A f_B`.
pub fn k_geo(eps: f64, n_a: f64, n_b: f64, a_a: f64, a_b: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(surface_fraction(n_a, eps * a_a)? * surface_fraction(n_b, eps * a_b)?)
}

/// One row of closed-form rates for a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    /// Smoluchowski rate in the caller's units (length³/time).
    pub k_smol: f64,
    pub f_a: f64,
    pub f_b: f64,
    pub k_geo: f64,
    pub chi_qc: f64,
    pub chi_b: f64,
    /// χ used for the two `k0` columns.
    pub chi: f64,
    pub k0_asymptotic: f64,
    pub k0_saturating: f64,
    pub k_bar_a: f64,
    pub k_bar_b: f64,
    pub k_eff: f64,
    /// Trapping rate equivalent to `k0_saturating`.
    pub kappa: f64,
}

impl RateSummary {
    /// Evaluates every formula; χ defaults to its quasi-chemical approximation.
    pub fn evaluate(p: &ModelParams, chi: Option<f64>) -> Result<Self> {
        let g = SiteGeometry::from_params(p)?;
        let chi_qc = g.chi_qc();
        let chi = chi.unwrap_or(chi_qc);
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(Error::invalid("chi", format!("must be > 0, got {chi}")));
        }
        let k0_sat = k0_saturating(&g, chi);
        Ok(RateSummary {
            k_smol: k_smol(p.dtr(), p.reaction_radius()),
            f_a: g.f_a()?,
            f_b: g.f_b()?,
            k_geo: k_geo(g.eps, g.n_a, g.n_b, g.a_a, g.a_b)?,
            chi_qc,
            chi_b: chi_berg(g.lambda_a, g.lambda_b, g.a_a, g.a_b),
            chi,
            k0_asymptotic: k0_asymptotic(g.eps, g.n_a, g.n_b, chi, 1.0),
            k0_saturating: k0_sat,
            k_bar_a: k_bar_a(g.eps, g.n_a, g.a_a, g.lambda_a),
            k_bar_b: k_bar_a(g.eps, g.n_b, g.a_b, g.lambda_b),
            k_eff: k_eff_for(&g)?,
            kappa: trapping_rate(k0_sat, p.dtr(), p.reaction_radius())?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn smoluchowski() {
        assert!((k_smol(1.0, 1.0) - 4.0 * PI).abs() < 1e-15);
        assert!((k_smol(2.0, 0.5) - 4.0 * PI).abs() < 1e-15);
        // Typical proteins: R = 4 nm, D_tr = 2.5e8 nm²/s.
        let k = k_smol(2.5e8, 4.0);
        assert!(rel(k, 1.2566e10) < 1e-4);
        let molar = molar_convert(k);
        assert!(rel(molar, 7.567_645_268e9) < 1e-9);
        assert!((molar / 7e9 - 1.0).abs() < 0.1);
    }

    #[test]
    fn molar_conversion() {
        assert_eq!(molar_convert(0.0), 0.0);
        assert!((molar_convert(1e24 / AVOGADRO) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn surface_fractions() {
        let f = surface_fraction(1.0, 0.1).unwrap();
        assert!(rel(f, 0.002_497_917_360_987_117) < 1e-13);
        assert!(rel(f, 2.5e-3) < 1e-3);
        let f2 = surface_fraction(2.0, 0.1).unwrap();
        assert!(rel(f2, 0.004_989_595_130_831_748) < 1e-13);
        let mut prev = 0.0;
        for n in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
            let f = surface_fraction(n, 0.3).unwrap();
            assert!(f >= prev && f <= 1.0);
            prev = f;
        }
        assert!(prev > 1.0 - 1e-12);
        // Small-angle asymptote N ε² / 4.
        let f = surface_fraction(7.0, 1e-4).unwrap();
        assert!(rel(f, 7.0 * 1e-8 / 4.0) < 1e-7);
        assert!(surface_fraction(1.0, 0.0).is_err());
        assert!(surface_fraction(1.0, FRAC_PI_2).is_err());
        assert!(surface_fraction(0.0, 0.1).is_err());
    }

    #[test]
    fn chi_approximations() {
        assert!(rel(chi_qc(1.0, 1.0, 1.0, 1.0), 1.0 / (2.0 * PI)) < 1e-15);
        let r2 = 2f64.sqrt();
        assert!(rel(chi_qc(r2, r2, 1.0, 1.0), 0.225_079_079_039_276_5) < 1e-14);
        assert_eq!(chi_qc(1.3, 2.1, 0.7, 0.4), chi_qc(2.1, 1.3, 0.4, 0.7));
        assert!(rel(chi_berg(1.0, 1.0, 1.0, 1.0), 0.176_776_695_296_636_9) < 1e-14);
        assert_eq!(chi_berg(1.0, 1.0, 0.0, 1.0), 0.0);
        for (la, lb, aa, ab) in [(1.0, 1.0, 1.0, 1.0), (1.3, 4.0, 0.5, 2.0), (9.0, 1.1, 1.0, 0.3)] {
            let ratio = chi_berg(la, lb, aa, ab) / chi_qc(la, lb, aa, ab);
            assert!(rel(ratio, PI / (2.0 * SQRT_2)) < 1e-14);
        }
    }

    #[test]
    fn asymptotic_rate() {
        assert_eq!(k0_asymptotic(0.0, 10.0, 10.0, 0.3, 1.0), 0.0);
        let e = 10f64.powf(-1.5);
        let v = k0_asymptotic(e, 10.0, 10.0, 0.1459, 1.0);
        assert!(rel(v, 4.613_763_106_185_666e-4) < 1e-12);
        let a = k0_asymptotic(e, 3.0, 5.0, 0.2, 2.0);
        let b = k0_asymptotic(e, 6.0, 5.0, 0.2, 2.0);
        assert!(rel(b, 2.0 * a) < 1e-15);
    }

    fn fig4() -> SiteGeometry {
        let l = 2f64.sqrt();
        SiteGeometry {
            eps: 10f64.powf(-1.5),
            n_a: 10.0,
            n_b: 10.0,
            lambda_a: l,
            lambda_b: l,
            a_a: 1.0,
            a_b: 1.0,
        }
    }

    #[test]
    fn saturating_rate() {
        let g = fig4();
        // Independent evaluation of the closed form.
        assert!(rel(k0_saturating(&g, 0.29), 9.045_760_860_210_314e-4) < 1e-12);

        // The residual is O(1/N_B); at ε = 0.1 it sits near 1e-10.
        let big = SiteGeometry { eps: 0.1, n_b: 1e12, ..g };
        let lim = k_bar_a(0.1, g.n_a, g.a_a, g.lambda_a);
        assert!(rel(k0_saturating(&big, 0.29), lim) < 1e-9);

        let tiny = SiteGeometry { eps: 1e-6, ..g };
        let lead = k0_asymptotic(1e-6, 10.0, 10.0, 0.29, 1.0);
        assert!(rel(k0_saturating(&tiny, 0.29), lead) < 1e-4);
    }

    #[test]
    fn berg_purcell_limit() {
        assert!(k_bar_a(1e-12, 1.0, 1.0, 1.0) < 1e-11);
        assert!((k_bar_a(PI, 1.0, 1.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((k_bar_a(0.5, 2.0, 1.0, PI) - 0.5).abs() < 1e-15);
        assert!(k_bar_a(0.01, 1e15, 1.0, 1.0) > 1.0 - 1e-9);
        assert_eq!(k_berg_purcell(0.1, 3.0, 1.0), k_bar_a(0.1, 3.0, 1.0, 1.0));
    }

    #[test]
    fn quasichemical() {
        assert_eq!(k_eff_quasichemical(1.0, 1.0, 3.0, 3.0, 1.5, 1.5).unwrap(), 1.0);
        // Fully covered partner reduces to (r_A + f_A)/(r_A + 1).
        let (fa, na, la): (f64, f64, f64) = (0.01, 4.0, 1.7);
        let ra = 2.0 / PI * la * (na * fa).sqrt();
        let v = k_eff_quasichemical(fa, 1.0, na, 1.0, la, 3.0).unwrap();
        assert!(rel(v, (ra + fa) / (ra + 1.0)) < 1e-15);
        // As f_A → 0 the reduced rate tends to r_A.
        let fa = 1e-12;
        let ra = 2.0 / PI * la * (na * fa).sqrt();
        let v = k_eff_quasichemical(fa, 1.0, na, 1.0, la, 3.0).unwrap();
        assert!(rel(v, ra) < 1e-5);
        assert!(k_eff_quasichemical(0.0, 0.5, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(k_eff_quasichemical(0.5, 1.5, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn quasichemical_small_sites() {
        let g = SiteGeometry { eps: 1e-4, ..fig4() };
        let lead = k0_asymptotic(g.eps, g.n_a, g.n_b, g.chi_qc(), 1.0);
        let ratio = k_eff_for(&g).unwrap() / lead;
        assert!((ratio - 1.0).abs() < 1e-2, "{ratio}");
        // Large-N_B limit of the six-state rate approaches the reduced form.
        let big = SiteGeometry { n_b: 1e9, eps: 1e-2, ..fig4() };
        let fa = big.f_a().unwrap();
        let ra = 2.0 / PI * big.lambda_a * (big.n_a * fa).sqrt();
        let v = k_eff_for(&big).unwrap();
        assert!(rel(v, (ra + fa) / (ra + 1.0)) < 1e-6, "{v}");
    }

    #[test]
    fn trapping() {
        assert_eq!(trapping_rate(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert!((trapping_rate(0.5, 2.0, 4.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(trapping_rate(1.0, 1.0, 1.0), Err(Error::Divergence(1.0)));
        assert!(trapping_rate(1.0 - 1e-12, 1.0, 1.0).unwrap() > 1e11);
        assert!(trapping_rate(-0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn geometric_rate() {
        assert_eq!(k_geo(0.0, 3.0, 3.0, 1.0, 1.0).unwrap(), 0.0);
        let v = k_geo(0.1, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(rel(v, 6.239_591_142_320_429e-6) < 1e-12);
        // k_geo / k0 ~ ε / (16 χ) → 0.
        let chi = 0.29;
        let mut last = f64::INFINITY;
        for e in [1e-1, 1e-2, 1e-3, 1e-4] {
            let r = k_geo(e, 4.0, 5.0, 1.0, 1.0).unwrap() / k0_asymptotic(e, 4.0, 5.0, chi, 1.0);
            assert!(r < last);
            assert!(rel(r, e / (16.0 * chi)) < e);
            last = r;
        }
    }

    #[test]
    fn summary_row() {
        let row = RateSummary::evaluate(&ModelParams::default(), None).unwrap();
        assert!((row.k_smol - 4.0 * PI).abs() < 1e-14);
        assert!(row.k_geo < row.k0_asymptotic && row.k0_asymptotic < 1.0);
        assert!(row.k0_saturating < row.k0_asymptotic);
        assert!(row.kappa > 0.0);
        assert_eq!(row.chi, row.chi_qc);
    }

    proptest! {
        #[test]
        fn ordering(
            e in 1e-4f64..0.1,
            na in 1u32..=10,
            nb in 1u32..=10,
            chi in 0.1f64..0.7,
        ) {
            let (na, nb) = (na as f64, nb as f64);
            let geo = k_geo(e, na, nb, 1.0, 1.0).unwrap();
            let k0 = k0_asymptotic(e, na, nb, chi, 1.0);
            prop_assert!(geo < k0 && k0 < 1.0);
        }

        #[test]
        fn saturating_monotone(
            e in 1e-3f64..0.3,
            na in 1.0f64..1e3,
            nb in 1.0f64..1e3,
            la in 1.0f64..10.0,
            lb in 1.0f64..10.0,
            chi in 0.05f64..1.0,
        ) {
            let g = SiteGeometry { eps: e, n_a: na, n_b: nb, lambda_a: la, lambda_b: lb, a_a: 1.0, a_b: 1.0 };
            let k = k0_saturating(&g, chi);
            prop_assert!(k > 0.0 && k < 1.0);
            let bump = 1.01;
            let bumped = [
                SiteGeometry { n_a: na * bump, ..g },
                SiteGeometry { n_b: nb * bump, ..g },
                SiteGeometry { lambda_a: la * bump, ..g },
                SiteGeometry { lambda_b: lb * bump, ..g },
                SiteGeometry { eps: e * bump, ..g },
            ];
            for b in &bumped {
                prop_assert!(k0_saturating(b, chi) > k);
            }
        }

        #[test]
        fn keff_reduction(fa in 1e-6f64..0.999, na in 1.0f64..100.0, la in 1.0f64..10.0) {
            let ra = 2.0 / PI * la * (na * fa).sqrt();
            let v = k_eff_quasichemical(fa, 1.0, na, 50.0, la, 2.0).unwrap();
            prop_assert!(((v - (ra + fa) / (ra + 1.0)) / v).abs() <= 2.0 * f64::EPSILON);
        }
    }
}

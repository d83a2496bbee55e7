//! Physical parameters of a patchy-particle pair and the dimensionless
//! constants that define the 5D absorbing region.
//!
//! The region lives in coordinates `(z, x_A, y_A, x_B, y_B)`: it is the set of
//! points on the plane `z = 0` whose `(x_A, y_A)` lies in a disk of radius
//! `r1 = c11 a_A` about the origin and whose `(x_B, y_B)` lies in a disk of
//! radius `r2 = |c22| a_B` about `s (x_A, y_A)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical inputs for two spherical molecules A and B.
///
/// Lengths, times and diffusivities may be in any consistent unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub r_a: f64,
    pub r_b: f64,
    /// Translational diffusivities (length²/time).
    pub dtr_a: f64,
    pub dtr_b: f64,
    /// Rotational diffusivities (1/time).
    pub drot_a: f64,
    pub drot_b: f64,
    /// Surface diffusivities of the binding sites (length²/time).
    pub dsurf_a: f64,
    pub dsurf_b: f64,
    /// Small parameter: site polar angles are `eps * a_A` and `eps * a_B`.
    pub eps: f64,
    pub a_a: f64,
    pub a_b: f64,
    pub n_a: u64,
    pub n_b: u64,
}

impl Default for ModelParams {
    /// `R = D_tr = a = 1`, `eps = 10^-1.5`, both rotational diffusivities 1/2,
    /// ten sites per molecule.
    fn default() -> Self {
        ModelParams {
            r_a: 0.5,
            r_b: 0.5,
            dtr_a: 0.5,
            dtr_b: 0.5,
            drot_a: 0.5,
            drot_b: 0.5,
            dsurf_a: 0.0,
            dsurf_b: 0.0,
            eps: 10f64.powf(-1.5),
            a_a: 1.0,
            a_b: 1.0,
            n_a: 10,
            n_b: 10,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

impl ModelParams {
    /// Checks every field. Zero effective orientational diffusion is accepted
    /// here (the Brownian dynamics and lens paths handle it); it is rejected
    /// by [`DerivedConstants::new`] when both molecules are frozen.
    pub fn validate(&self) -> Result<()> {
        positive("r_a", self.r_a)?;
        positive("r_b", self.r_b)?;
        positive("dtr_a", self.dtr_a)?;
        positive("dtr_b", self.dtr_b)?;
        non_negative("drot_a", self.drot_a)?;
        non_negative("drot_b", self.drot_b)?;
        non_negative("dsurf_a", self.dsurf_a)?;
        non_negative("dsurf_b", self.dsurf_b)?;
        positive("a_a", self.a_a)?;
        positive("a_b", self.a_b)?;
        positive("eps", self.eps)?;
        if self.eps * self.a_a.max(self.a_b) >= FRAC_PI_2 {
            return Err(Error::invalid(
                "eps",
                format!(
                    "site polar angle eps*max(a_A, a_B) = {} must be < pi/2",
                    self.eps * self.a_a.max(self.a_b)
                ),
            ));
        }
        if self.n_a == 0 {
            return Err(Error::invalid("n_a", "need at least one site"));
        }
        if self.n_b == 0 {
            return Err(Error::invalid("n_b", "need at least one site"));
        }
        Ok(())
    }

    /// Reaction radius `R = R_A + R_B`.
    pub fn reaction_radius(&self) -> f64 {
        self.r_a + self.r_b
    }

    /// Relative translational diffusivity `D_tr = D_tr,A + D_tr,B`.
    pub fn dtr(&self) -> f64 {
        self.dtr_a + self.dtr_b
    }

    /// `D_rot,A + D_surf,A / R²`.
    pub fn deff_a(&self) -> f64 {
        let r = self.reaction_radius();
        self.drot_a + self.dsurf_a / (r * r)
    }

    pub fn deff_b(&self) -> f64 {
        let r = self.reaction_radius();
        self.drot_b + self.dsurf_b / (r * r)
    }

    /// Dimensionless orientational mobilities `(D_A, D_B) = R² D_eff / D_tr`.
    pub fn dimensionless_diffusivities(&self) -> (f64, f64) {
        let r = self.reaction_radius();
        let scale = r * r / self.dtr();
        (scale * self.deff_a(), scale * self.deff_b())
    }
}

/// Dimensionless groups and the geometry of the 5D absorbing region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub d_a: f64,
    pub d_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub c11: f64,
    pub c21: f64,
    pub c22: f64,
    pub a_a: f64,
    pub a_b: f64,
    /// Radius of the `(x_A, y_A)` disk.
    pub r1: f64,
    /// Radius of the `(x_B, y_B)` disk.
    pub r2: f64,
    /// Centre of the B disk is `s (x_A, y_A)`.
    pub s: f64,
    /// Radius of the smallest origin-centred ball containing the region.
    pub rho0: f64,
}

impl DerivedConstants {
    pub fn new(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        let (d_a, d_b) = p.dimensionless_diffusivities();
        Self::from_groups(d_a, d_b, p.a_a, p.a_b)
    }

    /// Builds the constants straight from `(D_A, D_B, a_A, a_B)`.
    pub fn from_groups(d_a: f64, d_b: f64, a_a: f64, a_b: f64) -> Result<Self> {
        non_negative("d_a", d_a)?;
        non_negative("d_b", d_b)?;
        positive("a_a", a_a)?;
        positive("a_b", a_b)?;
        // λ_A²λ_B² − 1 without the cancellation at small D.
        let q = d_a * d_b + d_a + d_b;
        if q <= 0.0 {
            return Err(Error::SingularGeometry);
        }
        let lambda_a = (1.0 + d_a).sqrt();
        let lambda_b = (1.0 + d_b).sqrt();
        let root = q.sqrt();
        let c11 = 1.0 / lambda_a;
        let c21 = 1.0 / (lambda_a * root);
        let c22 = -lambda_a / root;
        let s = 1.0 / root;
        let r1 = c11 * a_a;
        let r2 = c22.abs() * a_b;
        let rho0 = (r1 * r1 + (s * r1 + r2).powi(2)).sqrt();
        Ok(DerivedConstants {
            d_a,
            d_b,
            lambda_a,
            lambda_b,
            c11,
            c21,
            c22,
            a_a,
            a_b,
            r1,
            r2,
            s,
            rho0,
        })
    }

    /// `D_A D_B + D_A + D_B`, which equals `1 / (c11² c22²)`.
    pub fn chi_scale(&self) -> f64 {
        self.d_a * self.d_b + self.d_a + self.d_b
    }

    /// `χ = c0 / (4 c11² c22²)`.
    pub fn chi_from_capacitance(&self, c0: f64) -> f64 {
        self.chi_scale() * c0 / 4.0
    }

    pub fn contains(&self, pt: &Point5) -> bool {
        region_contains(self, pt)
    }
}

pub fn derive_constants(p: &ModelParams) -> Result<DerivedConstants> {
    DerivedConstants::new(p)
}

/// `(D_A, D_B)` under Stokes–Einstein scaling with no surface diffusion,
/// where `xi = R_B / R_A`.
pub fn stokes_einstein_params(xi: f64) -> Result<(f64, f64)> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::Domain {
            what: "size ratio R_B/R_A (must lie in (0, 1])",
            value: xi,
        });
    }
    let inv = 1.0 / xi;
    Ok((0.75 * xi * (1.0 + xi), 0.75 * inv * (1.0 + inv)))
}

/// A point `(z, x_A, y_A, x_B, y_B)` in the 5D state space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point5 {
    pub z: f64,
    pub xa: f64,
    pub ya: f64,
    pub xb: f64,
    pub yb: f64,
}

impl Point5 {
    pub const ORIGIN: Point5 = Point5 {
        z: 0.0,
        xa: 0.0,
        ya: 0.0,
        xb: 0.0,
        yb: 0.0,
    };

    pub fn new(z: f64, xa: f64, ya: f64, xb: f64, yb: f64) -> Self {
        Point5 { z, xa, ya, xb, yb }
    }

    pub fn norm_sq(&self) -> f64 {
        self.z * self.z + self.xa * self.xa + self.ya * self.ya + self.xb * self.xb + self.yb * self.yb
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.z, self.xa, self.ya, self.xb, self.yb]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Point5::new(a[0], a[1], a[2], a[3], a[4])
    }
}

impl std::ops::Add for Point5 {
    type Output = Point5;

    fn add(self, o: Point5) -> Point5 {
        Point5::new(self.z + o.z, self.xa + o.xa, self.ya + o.ya, self.xb + o.xb, self.yb + o.yb)
    }
}

/// Membership in the open 4D region on the `z = 0` plane. Boundary points are
/// excluded.
pub fn region_contains(d: &DerivedConstants, pt: &Point5) -> bool {
    if pt.z != 0.0 {
        return false;
    }
    if pt.xa * pt.xa + pt.ya * pt.ya >= d.r1 * d.r1 {
        return false;
    }
    let dx = pt.xb - d.s * pt.xa;
    let dy = pt.yb - d.s * pt.ya;
    dx * dx + dy * dy < d.r2 * d.r2
}

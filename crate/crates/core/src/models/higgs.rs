//! Lower-component Higgs reduction, `l = -(f/M) φ √(φ²)`.

use num_complex::Complex64;
use serde::Serialize;

use super::stationary::{self, Classification};
use super::{Claim, StationaryReport};
use crate::atlas::Branch;
use crate::error::{Error, Result};
use crate::fifth::BranchSpec;
use crate::momentum::ScaleM;
use crate::numeric::second_derivative;

/// Factor taking the raw curvature of the shifted Lagrangian in `φ'` to the
/// mass of the canonical field `h = √2 φ'`.
pub const MASS_NORMALIZATION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HiggsForm {
    Unshifted,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HiggsParams {
    pub f: f64,
    pub scale: ScaleM,
    pub branch: Branch,
    /// `3M/f` internal, `0` external.
    pub vev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HiggsMass {
    /// Location `u*` of the shifted minimum.
    pub u_star: f64,
    pub raw_curvature: f64,
    pub normalization: f64,
    pub mass_sq: f64,
}

impl HiggsParams {
    pub fn new(f: f64, scale: ScaleM, branch: Branch) -> Result<Self> {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::InvalidParameter(format!("f must be positive, got {f}")));
        }
        let vev = match branch {
            Branch::Internal => 3.0 * scale.value() / f,
            Branch::External => 0.0,
        };
        Ok(HiggsParams { f, scale, branch, vev })
    }

    pub fn on_branch(&self, branch: Branch) -> Self {
        HiggsParams::new(self.f, self.scale, branch).expect("f already validated")
    }

    /// Massless branch data, `η = 1`, driving the constraint.
    pub fn spec(&self) -> BranchSpec {
        BranchSpec::new(self.branch, 0.0, self.scale).expect("zero mass is valid")
    }

    fn s(&self) -> f64 {
        self.branch.sign()
    }

    fn fm(&self) -> f64 {
        self.f * self.scale.value()
    }

    pub fn l(&self, phi: f64) -> f64 {
        -self.f / self.scale.value() * phi * phi.abs()
    }

    /// `±(-3fMφ|φ| + 2f²φ³)`, the exact derivative of [`Self::l_int`].
    pub fn source(&self, phi: f64) -> f64 {
        self.s() * (-3.0 * self.fm() * phi * phi.abs() + 2.0 * self.f * self.f * phi.powi(3))
    }

    /// `±M²(-3fMφ|φ| + 2f²φ³)` with the overall `M²` kept. Differs from
    /// [`Self::source`] by exactly `M²`.
    pub fn source_printed(&self, phi: f64) -> f64 {
        self.scale.sq() * self.source(phi)
    }

    /// `±(-fMφ²|φ| + f²φ⁴/2)`.
    pub fn l_int(&self, phi: f64) -> f64 {
        self.s() * (-self.fm() * phi * phi * phi.abs() + 0.5 * self.f * self.f * phi.powi(4))
    }

    /// `±(-(fM/4)u²|u| + (f²/16)u⁴)` with `u = φ' + v̄`.
    pub fn l_int_shifted(&self, phi_prime: f64) -> f64 {
        self.shifted_in_u(phi_prime + self.vev)
    }

    fn shifted_in_u(&self, u: f64) -> f64 {
        self.s() * (-0.25 * self.fm() * u * u * u.abs() + self.f * self.f / 16.0 * u.powi(4))
    }

    fn shifted_slope(&self, u: f64) -> f64 {
        self.s() * (-0.75 * self.fm() * u * u.abs() + 0.25 * self.f * self.f * u.powi(3))
    }

    fn shifted_curvature(&self, u: f64) -> f64 {
        self.s() * (-1.5 * self.fm() * u.abs() + 0.75 * self.f * self.f * u * u)
    }

    fn slope_of_source(&self, phi: f64) -> f64 {
        self.s() * (-6.0 * self.fm() * phi.abs() + 6.0 * self.f * self.f * phi * phi)
    }

    /// `-(f/M) φ √(φ²)` on the principal root.
    pub fn l_complex(&self, phi: Complex64) -> Complex64 {
        -phi * (phi * phi).sqrt() * (self.f / self.scale.value())
    }

    /// `±(-3fMφ√(φ²) + 2f²φ³)` on the principal root.
    pub fn source_complex(&self, phi: Complex64) -> Complex64 {
        (phi * (phi * phi).sqrt() * (-3.0 * self.fm()) + phi.powi(3) * (2.0 * self.f * self.f)) * self.s()
    }

    /// Stationary points of the unshifted Lagrangian in `φ`, or of the
    /// shifted one in `u = φ' + v̄`.
    pub fn stationary_points(&self, form: HiggsForm) -> StationaryReport {
        let m = self.scale.value();
        let scale = m / self.f;
        let (lo, hi) = (-5.0 * scale, 5.0 * scale);
        match form {
            HiggsForm::Unshifted => {
                let points =
                    stationary::find(|x| self.l_int(x), |x| self.source(x), |x| self.slope_of_source(x), lo, hi, scale);
                let zeros = stationary::zeros(|x| self.l_int(x), lo, hi, &points, scale);
                let minima = 1.5 * scale;
                let zero = 2.0 * scale;
                let claims = vec![
                    extremum_claim("minima at ±3M/2f", minima, &points, scale),
                    Claim {
                        statement: "zeros at 0 and ±2M/f",
                        location: zero,
                        finding: format!("zeros {zeros:?}"),
                        holds: zeros.len() == 3
                            && [-zero, 0.0, zero].iter().zip(&zeros).all(|(a, b)| (a - b).abs() <= 1e-9 * scale),
                    },
                ];
                StationaryReport { points, zeros, claims }
            }
            HiggsForm::Shifted => {
                let points = stationary::find(
                    |u| self.shifted_in_u(u),
                    |u| self.shifted_slope(u),
                    |u| self.shifted_curvature(u),
                    2.0 * lo,
                    2.0 * hi,
                    scale,
                );
                let zeros = stationary::zeros(|u| self.shifted_in_u(u), 2.0 * lo, 2.0 * hi, &points, scale);
                let claims = vec![extremum_claim("minima at ±3M/f", 3.0 * scale, &points, scale)];
                StationaryReport { points, zeros, claims }
            }
        }
    }

    /// Curvature of the shifted Lagrangian at its positive minimum, taken
    /// numerically in `φ'`, and the resulting mass.
    pub fn mass_sq(&self) -> Result<HiggsMass> {
        let report = self.stationary_points(HiggsForm::Shifted);
        let u_star = report
            .points
            .iter()
            .filter(|p| p.location > 0.0 && p.classification == Classification::Minimum)
            .map(|p| p.location)
            .next()
            .ok_or_else(|| Error::InvalidParameter("no positive stationary point".into()))?;
        let shift = u_star - self.vev;
        let h = 1e-3 * self.scale.value() / self.f;
        let raw = second_derivative(|x| self.l_int_shifted(x), shift, h);
        Ok(HiggsMass { u_star, raw_curvature: raw, normalization: MASS_NORMALIZATION, mass_sq: MASS_NORMALIZATION * raw })
    }
}

fn extremum_claim(
    statement: &'static str,
    location: f64,
    points: &[stationary::StationaryPoint],
    scale: f64,
) -> Claim {
    let hits: Vec<_> = points
        .iter()
        .filter(|p| (p.location.abs() - location).abs() <= 1e-9 * scale)
        .collect();
    let holds = hits.len() == 2 && hits.iter().all(|p| p.classification == Classification::Minimum);
    let finding = if hits.is_empty() {
        "not stationary".to_string()
    } else {
        format!("{:?}", hits.iter().map(|p| p.classification).collect::<Vec<_>>())
    };
    Claim { statement, location, finding, holds }
}

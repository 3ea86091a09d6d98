//! Cubic constraint term `l = g φ²`.

use num_complex::Complex64;
use serde::Serialize;

use super::stationary::{self, Classification};
use super::{Claim, StationaryReport};
use crate::atlas::Branch;
use crate::error::{Error, Result};
use crate::fifth::BranchSpec;
use crate::momentum::ScaleM;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phi4Params {
    pub g: f64,
    pub eta: f64,
    pub scale: ScaleM,
    pub branch: Branch,
}

impl Phi4Params {
    /// `η` taken from the branch data.
    pub fn new(g: f64, spec: &BranchSpec) -> Self {
        Phi4Params { g, eta: spec.eta(), scale: spec.scale, branch: spec.branch }
    }

    /// Explicit `η`, independent of any mass.
    pub fn with_eta(g: f64, eta: f64, scale: ScaleM, branch: Branch) -> Self {
        Phi4Params { g, eta, scale, branch }
    }

    pub fn on_branch(&self, branch: Branch) -> Self {
        Phi4Params { branch, ..*self }
    }

    fn prefactor(&self) -> f64 {
        self.branch.sign() * self.scale.sq()
    }

    pub fn l(&self, phi: f64) -> f64 {
        self.g * phi * phi
    }

    /// `±M²(3gηφ² + 2g²φ³)`.
    pub fn source(&self, phi: f64) -> f64 {
        let g = self.g;
        self.prefactor() * (3.0 * g * self.eta * phi * phi + 2.0 * g * g * phi.powi(3))
    }

    /// `±M²(gηφ³ + g²φ⁴/2)`.
    pub fn l_int(&self, phi: f64) -> f64 {
        let g = self.g;
        self.prefactor() * (g * self.eta * phi.powi(3) + 0.5 * g * g * phi.powi(4))
    }

    pub fn l_complex(&self, phi: Complex64) -> Complex64 {
        phi * phi * self.g
    }

    pub fn source_complex(&self, phi: Complex64) -> Complex64 {
        let g = self.g;
        (phi * phi * (3.0 * g * self.eta) + phi.powi(3) * (2.0 * g * g)) * self.prefactor()
    }

    /// Branch data reproducing this `η`. Internal `η < 1` takes the
    /// lighter of its two masses.
    pub fn spec(&self) -> Result<BranchSpec> {
        let e2 = self.eta * self.eta;
        let r = match self.branch {
            Branch::Internal if self.eta <= 1.0 => 1.0 - e2,
            Branch::Internal => 1.0 + e2,
            Branch::External => e2 - 1.0,
        };
        if r < 0.0 {
            return Err(Error::InvalidParameter(format!("η = {} is not reachable on this branch", self.eta)));
        }
        BranchSpec::new(self.branch, self.scale.value() * r.sqrt(), self.scale)
    }

    fn source_slope(&self, phi: f64) -> f64 {
        let g = self.g;
        self.prefactor() * (6.0 * g * self.eta * phi + 6.0 * g * g * phi * phi)
    }

    /// Stationary points and zeros of `L_INT`, with the claimed minimum at
    /// `-2η/g` re-examined.
    pub fn stationary_points(&self) -> Result<StationaryReport> {
        if self.g == 0.0 || !self.g.is_finite() {
            return Err(Error::InvalidParameter(format!("g must be nonzero, got {}", self.g)));
        }
        let scale = if self.eta != 0.0 { (self.eta / self.g).abs() } else { 1.0 / self.g.abs() };
        let (lo, hi) = (-4.0 * scale, 4.0 * scale);
        let points = stationary::find(|x| self.l_int(x), |x| self.source(x), |x| self.source_slope(x), lo, hi, scale);
        let zeros = stationary::zeros(|x| self.l_int(x), lo, hi, &points, scale);

        let claimed = -2.0 * self.eta / self.g;
        let at = points.iter().find(|p| (p.location - claimed).abs() <= 1e-9 * scale);
        let is_zero = zeros.iter().any(|z| (z - claimed).abs() <= 1e-9 * scale);
        let finding = match at {
            Some(p) => format!("stationary ({:?})", p.classification),
            None if is_zero => format!("zero of L_INT, slope {}", self.source(claimed)),
            None => format!("not stationary, slope {}", self.source(claimed)),
        };
        let holds = at.is_some_and(|p| p.classification == Classification::Minimum);
        let claims = vec![Claim { statement: "local minimum at -2η/g", location: claimed, finding, holds }];
        Ok(StationaryReport { points, zeros, claims })
    }
}

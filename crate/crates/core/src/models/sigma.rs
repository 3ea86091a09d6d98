//! Nonlinear σ-model with the interpolating pion field.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::atlas::Branch;
use crate::error::{Error, Result};
use crate::momentum::ScaleM;
use crate::numeric::least_squares;

/// Default decay constant, MeV.
pub const F_PI_DEFAULT: f64 = 93.0;

/// `|π| / f_π` below which `L_INT` is treated as sitting on its pole.
pub const PION_POLE_TOL: f64 = 1e-6;

/// Fit window for the Laurent coefficients, in units of `f_π`.
pub const SERIES_WINDOW: (f64, f64) = (0.05, 0.3);
pub const SERIES_SAMPLES: usize = 200;
pub const SERIES_MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PionVector(pub [f64; 3]);

impl PionVector {
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> PionVector {
        PionVector(self.0.map(|x| x * s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaParams {
    pub f_pi: f64,
    pub scale: ScaleM,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesCoefficients {
    pub c_const: f64,
    pub c_inv: f64,
    pub c_2: f64,
    pub c_4: f64,
    /// Largest fit residual of `L_INT` itself over the window.
    pub max_residual: f64,
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEntry {
    pub name: &'static str,
    pub fitted: f64,
    pub expected: f64,
    pub relative_error: f64,
}

impl SeriesCoefficients {
    /// Each coefficient next to its closed-form value for decay constant `f`.
    pub fn entries(&self, f: f64) -> Vec<SeriesEntry> {
        let f2 = f * f;
        [
            ("c_const", self.c_const, -4.5 * f2),
            ("c_inv", self.c_inv, 8.0 * f2 * f2),
            ("c_2", self.c_2, -1.0),
            ("c_4", self.c_4, -0.25 / f2),
        ]
        .into_iter()
        .map(|(name, fitted, expected)| SeriesEntry {
            name,
            fitted,
            expected,
            relative_error: ((fitted - expected) / expected).abs(),
        })
        .collect()
    }
}

impl SigmaParams {
    pub fn new(f_pi: f64, scale: ScaleM, branch: Branch) -> Result<Self> {
        if !(f_pi > 0.0) || !f_pi.is_finite() {
            return Err(Error::InvalidParameter(format!("f_pi must be positive, got {f_pi}")));
        }
        Ok(SigmaParams { f_pi, scale, branch })
    }

    pub fn on_branch(&self, branch: Branch) -> Self {
        SigmaParams { branch, ..*self }
    }

    /// `π = χ / (1 + χ²/4f²)`.
    pub fn chi_to_pi(&self, chi: &PionVector) -> PionVector {
        chi.scaled(1.0 / (1.0 + chi.norm_sq() / (4.0 * self.f_pi * self.f_pi)))
    }

    /// Root of `(π/4f²)χ² - χ + π = 0` continuous with `χ = π` at the origin.
    pub fn pi_to_chi(&self, pi: &PionVector) -> Result<PionVector> {
        let r = self.ratio_sq(pi)?;
        Ok(pi.scaled(2.0 / (1.0 + (1.0 - r).sqrt())))
    }

    fn ratio_sq(&self, pi: &PionVector) -> Result<f64> {
        let r = pi.norm_sq() / (self.f_pi * self.f_pi);
        if r > 1.0 {
            return Err(Error::NoRealBranch { pi_norm: pi.norm(), f_pi: self.f_pi });
        }
        Ok(r)
    }

    /// `σ = +√(f² - π²)`.
    pub fn sigma_of_pi(&self, pi: &PionVector) -> Result<f64> {
        self.ratio_sq(pi)?;
        Ok((self.f_pi * self.f_pi - pi.norm_sq()).max(0.0).sqrt())
    }

    /// `σ = -√(f² - π²)`. Not connected to the vacuum.
    pub fn sigma_of_pi_negative(&self, pi: &PionVector) -> Result<f64> {
        self.sigma_of_pi(pi).map(|s| -s)
    }

    /// `(π² + σ² - f²)²`.
    pub fn chiral_penalty(&self, pi: &PionVector, sigma: f64) -> f64 {
        (pi.norm_sq() + sigma * sigma - self.f_pi * self.f_pi).powi(2)
    }

    /// `fσ + σ²/2 + f(f+σ)²/(f-σ)` as a function of `π²`.
    fn bracket(&self, pi_sq: f64) -> f64 {
        let f = self.f_pi;
        let s = (f * f - pi_sq).max(0.0).sqrt();
        f * s + 0.5 * s * s + f * (f + s).powi(3) / pi_sq
    }

    fn check_pole(&self, pi: &PionVector) -> Result<()> {
        if pi.norm() <= PION_POLE_TOL * self.f_pi {
            return Err(Error::PionPole { pi_norm: pi.norm() });
        }
        Ok(())
    }

    /// `∓M²(fσ + σ²/2 + f(f+σ)²/(f-σ))`.
    pub fn l_int(&self, pi: &PionVector) -> Result<f64> {
        self.ratio_sq(pi)?;
        self.check_pole(pi)?;
        Ok(-self.branch.sign() * self.scale.sq() * self.bracket(pi.norm_sq()))
    }

    /// `±M² (f+σ)/σ [1 + f(3f-σ)/(f-σ)²] π`.
    pub fn source(&self, pi: &PionVector) -> Result<PionVector> {
        self.ratio_sq(pi)?;
        self.check_pole(pi)?;
        let f = self.f_pi;
        let s = self.sigma_of_pi(pi)?;
        if s == 0.0 {
            return Err(Error::SigmaZero);
        }
        let f_minus_s = pi.norm_sq() / (f + s);
        let k = (f + s) / s * (1.0 + f * (3.0 * f - s) / (f_minus_s * f_minus_s));
        Ok(pi.scaled(self.branch.sign() * self.scale.sq() * k))
    }

    /// Least-squares fit of `L_INT / (∓M²)` to `c_const + c_inv/π² + c_2 π² + c_4 π⁴`,
    /// with `π⁶, π⁸, π¹⁰` columns absorbing the truncated tail.
    pub fn series_coefficients(&self) -> Result<SeriesCoefficients> {
        let f = self.f_pi;
        let (lo, hi) = SERIES_WINDOW;
        let n = SERIES_SAMPLES;
        let xs: Vec<f64> = (0..n).map(|i| f * (lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect();
        let cols = 7;
        let a = DMatrix::from_fn(n, cols, |i, j| {
            let p2 = xs[i] * xs[i];
            match j {
                0 => 1.0,
                1 => 1.0 / p2,
                _ => p2.powi(j as i32 - 1),
            }
        });
        let y = DVector::from_iterator(n, xs.iter().map(|x| self.bracket(x * x)));
        let fit = least_squares(&a, &y, SERIES_MAX_CONDITION)?;
        let c = &fit.coefficients;
        Ok(SeriesCoefficients {
            c_const: c[0],
            c_inv: c[1],
            c_2: c[2],
            c_4: c[3],
            max_residual: fit.max_residual * self.scale.sq(),
            condition: fit.condition,
        })
    }

    /// Signed `π²` mass coefficient, `2(±)M² c_2`.
    pub fn pion_mass_sq(&self) -> Result<f64> {
        let c = self.series_coefficients()?;
        Ok(2.0 * self.branch.sign() * self.scale.sq() * c.c_2)
    }
}

/// Pion mass coefficient on `branch` at the default decay constant.
pub fn pion_mass_sq(branch: Branch, m: ScaleM) -> Result<f64> {
    SigmaParams::new(F_PI_DEFAULT, m, branch)?.pion_mass_sq()
}

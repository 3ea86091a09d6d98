//! Four-momenta with the (+,-,-,-) metric, the scale parameter `M`, and
//! Lorentz matrices.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal of the Minkowski metric.
pub const METRIC4: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Tolerance on `Λᵀ g Λ - g` accepted by [`LorentzMatrix::new`].
pub const LORENTZ_TOL: f64 = 1e-12;

/// Scale dimension of a scalar field in the scale-invariant case. Kept for
/// reference; c-number momentum maps do not depend on it.
pub const SCALE_INVARIANT_FIELD_DIMENSION: f64 = -3.0;

/// An off-shell four-momentum `(q0, q1, q2, q3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourMomentum(pub [f64; 4]);

impl FourMomentum {
    pub const ZERO: FourMomentum = FourMomentum([0.0; 4]);

    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        FourMomentum([q0, q1, q2, q3])
    }

    pub fn q0(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Minkowski product with metric (+,-,-,-).
    pub fn dot(&self, other: &FourMomentum) -> f64 {
        self.0[0] * other.0[0] - self.0[1] * other.0[1] - self.0[2] * other.0[2]
            - self.0[3] * other.0[3]
    }

    /// `q² = q0² - q1² - q2² - q3²`.
    pub fn minkowski_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm squared of the components; used only for tolerances.
    pub fn euclid_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        FourMomentum([v[0], v[1], v[2], v[3]])
    }

    /// Largest componentwise difference relative to the size of `other`.
    pub fn rel_diff(&self, other: &FourMomentum) -> f64 {
        let scale = self.euclid_sq().max(other.euclid_sq()).sqrt().max(f64::MIN_POSITIVE);
        (*self - *other).euclid_sq().sqrt() / scale
    }
}

impl Index<usize> for FourMomentum {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourMomentum {
    type Output = FourMomentum;
    fn add(self, rhs: FourMomentum) -> FourMomentum {
        FourMomentum(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for FourMomentum {
    type Output = FourMomentum;
    fn sub(self, rhs: FourMomentum) -> FourMomentum {
        FourMomentum(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<f64> for FourMomentum {
    type Output = FourMomentum;
    fn mul(self, rhs: f64) -> FourMomentum {
        FourMomentum(self.0.map(|c| c * rhs))
    }
}

impl Mul<FourMomentum> for f64 {
    type Output = FourMomentum;
    fn mul(self, rhs: FourMomentum) -> FourMomentum {
        rhs * self
    }
}

impl Neg for FourMomentum {
    type Output = FourMomentum;
    fn neg(self) -> FourMomentum {
        self * -1.0
    }
}

impl fmt::Display for FourMomentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// The conformal-breaking scale `M > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ScaleM(f64);

impl ScaleM {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(ScaleM(m))
        } else {
            Err(Error::InvalidScale(m))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn sq(self) -> f64 {
        self.0 * self.0
    }
}

/// A 4×4 matrix satisfying `Λᵀ g Λ = g`, acting on the component array of a
/// four-momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix(Matrix4<f64>);

pub(crate) fn metric4() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::from(METRIC4))
}

impl LorentzMatrix {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let g = metric4();
        let residual = (m.transpose() * g * m - g).amax();
        let scale = m.amax().powi(2).max(1.0);
        if residual <= LORENTZ_TOL * scale {
            Ok(LorentzMatrix(m))
        } else {
            Err(Error::NotLorentz { residual })
        }
    }

    pub fn identity() -> Self {
        LorentzMatrix(Matrix4::identity())
    }

    /// Pure boost with the given rapidity along spatial axis 1, 2 or 3.
    pub fn boost(axis: usize, rapidity: f64) -> Result<Self> {
        check_axis(axis)?;
        let mut m = Matrix4::identity();
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        m[(0, 0)] = c;
        m[(axis, axis)] = c;
        m[(0, axis)] = -s;
        m[(axis, 0)] = -s;
        Ok(LorentzMatrix(m))
    }

    /// Spatial rotation by `angle` about spatial axis 1, 2 or 3.
    pub fn rotation(axis: usize, angle: f64) -> Result<Self> {
        check_axis(axis)?;
        let (i, j) = match axis {
            1 => (2, 3),
            2 => (3, 1),
            _ => (1, 2),
        };
        let mut m = Matrix4::identity();
        let (c, s) = (angle.cos(), angle.sin());
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        Ok(LorentzMatrix(m))
    }

    /// `exp(g ω)` for an antisymmetric lower-index generator `ω`.
    pub fn from_generator(omega: &LorentzGenerator) -> Self {
        LorentzMatrix((metric4() * omega.0).exp())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let g = metric4();
        LorentzMatrix(g * self.0.transpose() * g)
    }

    pub fn compose(&self, other: &LorentzMatrix) -> Self {
        LorentzMatrix(self.0 * other.0)
    }

    pub fn apply(&self, q: &FourMomentum) -> FourMomentum {
        FourMomentum::from_vector(&(self.0 * q.to_vector()))
    }
}

fn check_axis(axis: usize) -> Result<()> {
    if (1..=3).contains(&axis) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("spatial axis must be 1, 2 or 3, got {axis}")))
    }
}

/// Antisymmetric `ω_{μν}` (both indices lowered). The induced variation of
/// the component array is `δq = g ω q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzGenerator(Matrix4<f64>);

impl LorentzGenerator {
    pub fn new(omega: Matrix4<f64>) -> Result<Self> {
        let residual = (omega + omega.transpose()).amax();
        if residual <= 1e-14 * omega.amax().max(1.0) {
            Ok(LorentzGenerator(omega))
        } else {
            Err(Error::NotAntisymmetric { residual })
        }
    }

    pub fn zero() -> Self {
        LorentzGenerator(Matrix4::zeros())
    }

    pub fn scaled(&self, s: f64) -> Self {
        LorentzGenerator(self.0 * s)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// `δq = g ω q`.
    pub fn act(&self, q: &FourMomentum) -> FourMomentum {
        FourMomentum::from_vector(&(metric4() * self.0 * q.to_vector()))
    }
}

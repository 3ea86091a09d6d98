//! Six-dimensional null cone with metric diag(+1,-1,-1,-1,+1,-1) on
//! `(κ0, κ1, κ2, κ3, κ5, κ6)`. Every conformal element acts linearly here.

use nalgebra::{Matrix6, Vector6};

use crate::conformal::{ConformalElement, ConformalWord};
use crate::error::{Error, Result};
use crate::momentum::{FourMomentum, ScaleM, METRIC4};

pub const METRIC6: [f64; 6] = [1.0, -1.0, -1.0, -1.0, 1.0, -1.0];

/// Tolerance on `Gᵀ η G - η`, relative to `max(1, max|G|²)`.
pub const PSEUDO_ORTHOGONAL_TOL: f64 = 1e-12;

/// Relative tolerance on `κ5 + κ6` below which a vector is treated as the
/// image of `q² = ∞`.
pub const PROJECTIVE_TOL: f64 = 1e-12;

fn metric6() -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::from(METRIC6))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeVector(pub [f64; 6]);

impl ConeVector {
    pub fn kappa_mu(&self) -> FourMomentum {
        FourMomentum::new(self.0[0], self.0[1], self.0[2], self.0[3])
    }

    pub fn kappa5(&self) -> f64 {
        self.0[4]
    }

    pub fn kappa6(&self) -> f64 {
        self.0[5]
    }

    /// `κ₊ = (κ5 + κ6)/M`.
    pub fn kappa_plus(&self, m: ScaleM) -> f64 {
        (self.0[4] + self.0[5]) / m.value()
    }

    /// `κ₋ = (κ5 - κ6)/M`.
    pub fn kappa_minus(&self, m: ScaleM) -> f64 {
        (self.0[4] - self.0[5]) / m.value()
    }

    /// `κ_A κ^A`.
    pub fn cone_sq(&self) -> f64 {
        self.0.iter().zip(METRIC6).map(|(k, g)| g * k * k).sum()
    }

    pub fn euclid_sq(&self) -> f64 {
        self.0.iter().map(|k| k * k).sum()
    }

    /// `|κ_A κ^A| / ‖κ‖²`.
    pub fn cone_residual(&self) -> f64 {
        let n = self.euclid_sq();
        if n == 0.0 {
            0.0
        } else {
            self.cone_sq().abs() / n
        }
    }

    pub fn scaled(&self, c: f64) -> ConeVector {
        ConeVector(self.0.map(|k| k * c))
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::from(self.0)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        ConeVector(std::array::from_fn(|i| v[i]))
    }
}

/// Puts `q` on the cone with projective scale `κ₊`.
pub fn lift(q: &FourMomentum, kappa_plus: f64, m: ScaleM) -> Result<ConeVector> {
    if kappa_plus == 0.0 || !kappa_plus.is_finite() {
        return Err(Error::ZeroKappaPlus);
    }
    let k = *q * kappa_plus;
    let kappa_minus = -q.minkowski_sq() * kappa_plus / m.sq();
    let half_m = 0.5 * m.value();
    Ok(ConeVector([
        k[0],
        k[1],
        k[2],
        k[3],
        half_m * (kappa_plus + kappa_minus),
        half_m * (kappa_plus - kappa_minus),
    ]))
}

/// `q_μ = M κ_μ / (κ5 + κ6)`.
pub fn project(kappa: &ConeVector, m: ScaleM) -> Result<FourMomentum> {
    let sum = kappa.kappa5() + kappa.kappa6();
    if sum.abs() <= PROJECTIVE_TOL * kappa.euclid_sq().sqrt() || sum == 0.0 {
        return Err(Error::ProjectiveInfinity { sum });
    }
    Ok(kappa.kappa_mu() * (m.value() / sum))
}

/// A 6×6 matrix preserving the (2,4) metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixRotation(Matrix6<f64>);

impl SixRotation {
    pub fn new(g: Matrix6<f64>) -> Result<Self> {
        let residual = pseudo_orthogonality_residual(&g);
        if residual <= PSEUDO_ORTHOGONAL_TOL * g.amax().powi(2).max(1.0) {
            Ok(SixRotation(g))
        } else {
            Err(Error::NotPseudoOrthogonal { residual })
        }
    }

    pub fn identity() -> Self {
        SixRotation(Matrix6::identity())
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn compose(&self, other: &SixRotation) -> SixRotation {
        SixRotation(self.0 * other.0)
    }

    pub fn apply(&self, kappa: &ConeVector) -> ConeVector {
        ConeVector::from_vector(&(self.0 * kappa.to_vector()))
    }
}

/// `max |Gᵀ η G - η|`.
pub fn pseudo_orthogonality_residual(g: &Matrix6<f64>) -> f64 {
    let eta = metric6();
    (g.transpose() * eta * g - eta).amax()
}

/// From `(κ_μ, κ5, κ6)` to `(κ_μ, κ₊, κ₋)`.
fn to_light_cone_basis(m: ScaleM) -> Matrix6<f64> {
    let mut p = Matrix6::identity();
    let r = 1.0 / m.value();
    p[(4, 4)] = r;
    p[(4, 5)] = r;
    p[(5, 4)] = r;
    p[(5, 5)] = -r;
    p
}

/// From `(κ_μ, κ₊, κ₋)` back to `(κ_μ, κ5, κ6)`.
fn from_light_cone_basis(m: ScaleM) -> Matrix6<f64> {
    let mut p = Matrix6::identity();
    let h = 0.5 * m.value();
    p[(4, 4)] = h;
    p[(4, 5)] = h;
    p[(5, 4)] = h;
    p[(5, 5)] = -h;
    p
}

/// Translation in the light-cone basis:
/// `κ'_μ = κ_μ + h_μ κ₊`, `κ₊' = κ₊`, `κ₋' = κ₋ - (2 h·κ + h² κ₊)/M²`.
fn translation_matrix(h: &FourMomentum, m: ScaleM) -> Matrix6<f64> {
    let m2 = m.sq();
    let mut t = Matrix6::identity();
    for mu in 0..4 {
        t[(mu, 4)] = h[mu];
        t[(5, mu)] = -2.0 * METRIC4[mu] * h[mu] / m2;
    }
    t[(5, 4)] = -h.minkowski_sq() / m2;
    from_light_cone_basis(m) * t * to_light_cone_basis(m)
}

fn inversion_matrix() -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(1.0, 1.0, 1.0, 1.0, 1.0, -1.0))
}

fn element_matrix(e: &ConformalElement, m: ScaleM) -> Matrix6<f64> {
    match e {
        ConformalElement::Inversion => inversion_matrix(),
        ConformalElement::Translation { h } => translation_matrix(h, m),
        ConformalElement::Dilatation { lambda } => {
            let (c, s) = (lambda.cosh(), lambda.sinh());
            let mut g = Matrix6::identity();
            g[(4, 4)] = c;
            g[(5, 5)] = c;
            g[(4, 5)] = -s;
            g[(5, 4)] = -s;
            g
        }
        ConformalElement::Lorentz(l) => {
            let mut g = Matrix6::identity();
            g.fixed_view_mut::<4, 4>(0, 0).copy_from(l.matrix());
            g
        }
        ConformalElement::SpecialConformal { b } => {
            let i = inversion_matrix();
            i * translation_matrix(b, m) * i
        }
    }
}

/// Matrix realizing `e` on the cone. Built matrices are pseudo-orthogonal by
/// construction; the residual is checked only in debug builds.
pub fn rotation_matrix(e: &ConformalElement, m: ScaleM) -> SixRotation {
    let g = element_matrix(e, m);
    debug_assert!(
        pseudo_orthogonality_residual(&g) <= 1e-10 * g.amax().powi(2).max(1.0),
        "element matrix lost pseudo-orthogonality"
    );
    SixRotation(g)
}

/// Product of the element matrices in word order.
pub fn word_matrix(w: &ConformalWord, m: ScaleM) -> SixRotation {
    w.elements
        .iter()
        .fold(SixRotation::identity(), |acc, e| acc.compose(&rotation_matrix(e, m)))
}

/// Transforms `q` through the cone: `project(G · lift(q, 1))`.
pub fn apply_via_cone(e: &ConformalElement, q: &FourMomentum, m: ScaleM) -> Result<FourMomentum> {
    let k = lift(q, 1.0, m)?;
    project(&rotation_matrix(e, m).apply(&k), m)
}

//! The two de Sitter hyperboloids `q² + q5² = M²` (internal) and
//! `q² - q5² = -M²` (external), their four regions, and the maps between them.

use std::fmt;

use serde::Serialize;

use crate::conformal::is_lightlike;
use crate::error::{Error, Result};
use crate::momentum::{FourMomentum, ScaleM};

/// Relative tolerance on the shell condition, in units of `M²`.
pub const SHELL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::I, Region::II, Region::III, Region::IV];

    pub fn branch(self) -> Branch {
        match self {
            Region::I | Region::III => Branch::Internal,
            Region::II | Region::IV => Branch::External,
        }
    }

    /// Region reached by inversion away from the boundaries `q² = ±M²`.
    pub fn dual(self) -> Region {
        match self {
            Region::I => Region::II,
            Region::II => Region::I,
            Region::III => Region::IV,
            Region::IV => Region::III,
        }
    }

    /// Whether `q² > 0` in this region.
    pub fn timelike(self) -> bool {
        matches!(self, Region::I | Region::II)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Internal,
    External,
}

impl Branch {
    /// `(-1)^(a-1)`: +1 internal, -1 external.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Internal => 1.0,
            Branch::External => -1.0,
        }
    }

    pub fn flip(self) -> Branch {
        match self {
            Branch::Internal => Branch::External,
            Branch::External => Branch::Internal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Internal => "internal",
            Branch::External => "external",
        }
    }

    /// `q5²` forced by the shell condition on this branch.
    pub fn q5_sq(self, q_sq: f64, m: ScaleM) -> f64 {
        match self {
            Branch::Internal => m.sq() - q_sq,
            Branch::External => m.sq() + q_sq,
        }
    }

    /// `q² ± q5² ∓ M²`, zero on the shell.
    pub fn shell_residual(self, q_sq: f64, q5_sq: f64, m: ScaleM) -> f64 {
        let s = self.sign();
        q_sq + s * q5_sq - s * m.sq()
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Region of a given `q²`. Boundaries: `q² = 0` and `q² = M²` belong to I,
/// `q² = -M²` to IV.
pub fn classify(q_sq: f64, m: ScaleM) -> Region {
    let m2 = m.sq();
    if q_sq >= 0.0 {
        if q_sq <= m2 {
            Region::I
        } else {
            Region::II
        }
    } else if q_sq < -m2 {
        Region::III
    } else {
        Region::IV
    }
}

/// A momentum together with its fifth component on the hyperboloid selected
/// by its region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidPoint {
    q: FourMomentum,
    q5: f64,
    branch: Branch,
    region: Region,
    m: ScaleM,
}

impl HyperboloidPoint {
    /// Checked constructor: `q5 ≥ 0`, the branch matches the region of `q²`,
    /// and the shell condition holds to `SHELL_TOL · M²`.
    pub fn new(q: FourMomentum, q5: f64, m: ScaleM) -> Result<Self> {
        let region = classify(q.minkowski_sq(), m);
        let branch = region.branch();
        let residual = branch.shell_residual(q.minkowski_sq(), q5 * q5, m);
        if !(q5 >= 0.0) || residual.abs() > SHELL_TOL * m.sq() {
            return Err(Error::OffShell {
                branch: branch.name(),
                radicand: branch.q5_sq(q.minkowski_sq(), m),
            });
        }
        Ok(HyperboloidPoint { q, q5, branch, region, m })
    }

    pub fn q(&self) -> FourMomentum {
        self.q
    }

    pub fn q5(&self) -> f64 {
        self.q5
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn scale(&self) -> ScaleM {
        self.m
    }

    pub fn q_sq(&self) -> f64 {
        self.q.minkowski_sq()
    }

    /// `q² ± q5² ∓ M²`.
    pub fn shell_residual(&self) -> f64 {
        self.branch.shell_residual(self.q_sq(), self.q5 * self.q5, self.m)
    }
}

/// Assigns `q5 = √(M² ∓ q²)` on the branch fixed by the region of `q²`.
pub fn attach(q: &FourMomentum, m: ScaleM) -> HyperboloidPoint {
    let q_sq = q.minkowski_sq();
    let region = classify(q_sq, m);
    let branch = region.branch();
    // Nonnegative in every region; max guards the boundaries against rounding.
    let q5 = branch.q5_sq(q_sq, m).max(0.0).sqrt();
    HyperboloidPoint { q: *q, q5, branch, region, m }
}

/// Inversion on the atlas. Away from `q² = ±M²` this swaps I↔II and III↔IV;
/// the boundaries are fixed in magnitude and keep their region.
pub fn invert_point(p: &HyperboloidPoint) -> Result<HyperboloidPoint> {
    if is_lightlike(&p.q, p.m) {
        return Err(Error::LightlikeInversion { q_sq: p.q_sq() });
    }
    Ok(attach(&(p.q * (-p.m.sq() / p.q_sq())), p.m))
}

/// `λ` with `q² = ±M² e^{-2λ}`.
pub fn lambda_of(p: &HyperboloidPoint) -> Result<f64> {
    lambda_of_sq(p.q_sq(), p.m)
}

pub fn lambda_of_sq(q_sq: f64, m: ScaleM) -> Result<f64> {
    if q_sq == 0.0 {
        return Err(Error::LambdaUndefined);
    }
    Ok(-0.5 * (q_sq.abs() / m.sq()).ln())
}

/// `q²` and `q5²` as functions of `λ` in one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellSquares {
    pub q_sq: f64,
    pub q5_sq: f64,
}

/// Inverse of [`lambda_of`]. Regions I and IV need `λ ≥ 0`, II and III need
/// `λ < 0`, with `λ = 0` only in I and IV.
pub fn point_of_lambda(lambda: f64, region: Region, m: ScaleM) -> Result<ShellSquares> {
    let in_range = match region {
        Region::I | Region::IV => lambda >= 0.0,
        Region::II | Region::III => lambda < 0.0,
    };
    if !in_range || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} is outside region {region}"
        )));
    }
    let e = (-2.0 * lambda).exp();
    let m2 = m.sq();
    let q_sq = if region.timelike() { m2 * e } else { -m2 * e };
    let q5_sq = match region {
        Region::I | Region::IV => m2 * (1.0 - e),
        Region::II | Region::III => m2 * (1.0 + e),
    };
    Ok(ShellSquares { q_sq, q5_sq })
}

/// Outcome of moving a point along its shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellMove {
    /// Shifted momentum reattached to the branch of its new region.
    pub point: HyperboloidPoint,
    /// `q5'²` obtained by carrying the shell condition of the source branch
    /// along the shift. Negative when the source branch cannot host `q'`.
    pub q5_sq_on_source_branch: f64,
    pub source_branch: Branch,
    /// The new region lies on the other branch.
    pub transition: bool,
}

impl ShellMove {
    /// `q'² ± q5'² ∓ M²` on the source branch.
    pub fn source_shell_residual(&self) -> f64 {
        self.source_branch
            .shell_residual(self.point.q_sq(), self.q5_sq_on_source_branch, self.point.m)
    }
}

/// `q' = q + h`, `q5'² = q5² ∓ (2 h·q + h²)`.
pub fn translate_on_shell(p: &HyperboloidPoint, h: &FourMomentum) -> ShellMove {
    let q_new = p.q + *h;
    let delta = 2.0 * h.dot(&p.q) + h.minkowski_sq();
    let q5_sq = p.q5 * p.q5 - p.branch.sign() * delta;
    let point = attach(&q_new, p.m);
    ShellMove {
        point,
        q5_sq_on_source_branch: q5_sq,
        source_branch: p.branch,
        transition: point.branch != p.branch,
    }
}

/// `q' = q - e A` with `q5'²` fixed by the source branch shell condition.
pub fn gauge_shift(p: &HyperboloidPoint, a: &FourMomentum, e_charge: f64) -> ShellMove {
    if e_charge == 0.0 {
        return ShellMove {
            point: *p,
            q5_sq_on_source_branch: p.q5 * p.q5,
            source_branch: p.branch,
            transition: false,
        };
    }
    let q_new = p.q - *a * e_charge;
    let q5_sq = p.branch.q5_sq(q_new.minkowski_sq(), p.m);
    let point = attach(&q_new, p.m);
    ShellMove {
        point,
        q5_sq_on_source_branch: q5_sq,
        source_branch: p.branch,
        transition: point.branch != p.branch,
    }
}

/// `q5'² = q5² ∓ 2e A·q + e² A²` (upper sign internal), the componentwise
/// rule applied without the shell constraint. It differs from the value used
/// by [`gauge_shift`] by `∓4e A·q + (1 ± 1) e² A²`.
pub fn gauge_shift_q5_sq_literal(p: &HyperboloidPoint, a: &FourMomentum, e_charge: f64) -> f64 {
    p.q5 * p.q5 - p.branch.sign() * 2.0 * e_charge * a.dot(&p.q)
        + e_charge * e_charge * a.minkowski_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{apply, ConformalElement};
    use proptest::prelude::*;

    fn m(v: f64) -> ScaleM {
        ScaleM::new(v).unwrap()
    }

    #[test]
    fn table_probes() {
        let mm = m(1.0);
        assert_eq!(classify(0.5, mm), Region::I);
        assert_eq!(classify(2.0, mm), Region::II);
        assert_eq!(classify(-2.0, mm), Region::III);
        assert_eq!(classify(-0.5, mm), Region::IV);
        assert_eq!(classify(0.0, mm), Region::I);
        assert_eq!(classify(1.0, mm), Region::I);
        assert_eq!(classify(-1.0, mm), Region::IV);
        assert_eq!(classify(-0.0, mm), Region::I);
    }

    #[test]
    fn attach_examples() {
        let mm = m(1.0);
        let p = attach(&FourMomentum::new(0.5, 0.0, 0.0, 0.0), mm);
        assert_eq!(p.region(), Region::I);
        assert!((p.q5() * p.q5() - 0.75).abs() < 1e-15);
        let p = attach(&FourMomentum::new(2.0, 1.0, 0.0, 0.0), mm);
        assert_eq!(p.region(), Region::II);
        assert!((p.q5() * p.q5() - 4.0).abs() < 1e-15);
        let p = attach(&FourMomentum::ZERO, mm);
        assert_eq!(p.q5(), 1.0);
    }

    #[test]
    fn checked_point_constructor() {
        let mm = m(1.0);
        assert!(HyperboloidPoint::new(FourMomentum::new(0.5, 0.0, 0.0, 0.0), 0.75f64.sqrt(), mm).is_ok());
        assert!(HyperboloidPoint::new(FourMomentum::new(0.5, 0.0, 0.0, 0.0), 0.5, mm).is_err());
        assert!(HyperboloidPoint::new(FourMomentum::new(0.5, 0.0, 0.0, 0.0), -0.75f64.sqrt(), mm).is_err());
    }

    #[test]
    fn inversion_examples() {
        let mm = m(1.0);
        let p = attach(&FourMomentum::new(0.5, 0.0, 0.0, 0.0), mm);
        let r = invert_point(&p).unwrap();
        assert_eq!(r.q_sq(), 4.0);
        assert_eq!(r.region(), Region::II);
        let b = attach(&FourMomentum::new(1.0, 0.0, 0.0, 0.0), mm);
        let rb = invert_point(&b).unwrap();
        assert_eq!(rb.q_sq(), 1.0);
        assert_eq!(rb.region(), Region::I);
        let z = attach(&FourMomentum::new(1.0, 1.0, 0.0, 0.0), mm);
        assert!(invert_point(&z).is_err());
    }

    #[test]
    fn lambda_examples() {
        let mm = m(1.0);
        let s = point_of_lambda(2f64.ln(), Region::I, mm).unwrap();
        assert_eq!(s, ShellSquares { q_sq: 0.25, q5_sq: 0.75 });
        let p = attach(&FourMomentum::new(2f64.sqrt(), 0.0, 0.0, 0.0), mm);
        let l = lambda_of(&p).unwrap();
        assert!((l + 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(l < 0.0);
        assert_eq!(point_of_lambda(0.0, Region::I, mm).unwrap().q_sq, 1.0);
        assert_eq!(point_of_lambda(0.0, Region::IV, mm).unwrap().q_sq, -1.0);
        assert!(point_of_lambda(0.0, Region::II, mm).is_err());
        assert!(point_of_lambda(1.0, Region::III, mm).is_err());
        assert_eq!(lambda_of(&attach(&FourMomentum::ZERO, mm)), Err(Error::LambdaUndefined));
    }

    #[test]
    fn translation_example() {
        let mm = m(1.0);
        let p = attach(&FourMomentum::new(0.5, 0.0, 0.0, 0.0), mm);
        let mv = translate_on_shell(&p, &FourMomentum::new(0.25, 0.0, 0.0, 0.0));
        assert_eq!(mv.point.q_sq(), 0.5625);
        assert!((mv.q5_sq_on_source_branch - 0.4375).abs() < 1e-15);
        assert!((mv.point.q_sq() + mv.q5_sq_on_source_branch - 1.0).abs() < 1e-15);
        assert!(!mv.transition);
        let id = translate_on_shell(&p, &FourMomentum::ZERO);
        assert_eq!(id.point, p);
    }

    #[test]
    fn translation_transition_is_flagged() {
        let mm = m(1.0);
        let p = attach(&FourMomentum::new(0.5, 0.0, 0.0, 0.0), mm);
        let mv = translate_on_shell(&p, &FourMomentum::new(1.5, 0.0, 0.0, 0.0));
        assert_eq!(mv.point.region(), Region::II);
        assert!(mv.transition);
        assert!(mv.q5_sq_on_source_branch < 0.0);
        assert!(mv.source_shell_residual().abs() < 1e-15);
    }

    #[test]
    fn gauge_examples() {
        let mm = m(1.0);
        let q = FourMomentum::new(0.7, 0.2, 0.1, 0.0);
        let p = attach(&q, mm);
        let same = gauge_shift(&p, &FourMomentum::new(1.0, 2.0, 3.0, 4.0), 0.0);
        assert_eq!(same.point, p);
        let to_origin = gauge_shift(&p, &(q * 0.5), 2.0);
        assert_eq!(to_origin.point.q(), FourMomentum::ZERO);
        assert_eq!(to_origin.point.region(), Region::I);
        assert_eq!(to_origin.point.q5(), 1.0);
    }

    #[test]
    fn literal_rule_is_off_shell() {
        let mm = m(1.0);
        let a = FourMomentum::new(0.1, 0.05, 0.0, 0.02);
        let e = 0.7;
        for q in [FourMomentum::new(0.6, 0.1, 0.0, 0.0), FourMomentum::new(1.6, 0.1, 0.0, 0.0)] {
            let p = attach(&q, mm);
            let s = p.branch().sign();
            let shifted = gauge_shift(&p, &a, e);
            let literal = gauge_shift_q5_sq_literal(&p, &a, e);
            let gap = literal - shifted.q5_sq_on_source_branch;
            let expected = -s * 4.0 * e * a.dot(&q) + (1.0 + s) * e * e * a.minkowski_sq();
            assert!((gap - expected).abs() < 1e-14, "{gap} vs {expected}");
            assert!(gap.abs() > 1e-3);
        }
    }

    proptest! {
        #[test]
        fn partition_is_total(q_sq in -10.0f64..10.0, mv in 0.1f64..3.0) {
            let r = classify(q_sq, m(mv));
            let m2 = mv * mv;
            let expected = [
                (0.0..=m2).contains(&q_sq),
                q_sq > m2,
                q_sq < -m2,
                (-m2..0.0).contains(&q_sq),
            ];
            prop_assert_eq!(expected.iter().filter(|b| **b).count(), 1);
            let idx = Region::ALL.iter().position(|x| *x == r).unwrap();
            prop_assert!(expected[idx]);
        }

        #[test]
        fn attach_is_on_shell(c in prop::array::uniform4(-3.0f64..3.0), mv in 0.2f64..3.0) {
            let p = attach(&FourMomentum(c), m(mv));
            prop_assert!(p.shell_residual().abs() <= SHELL_TOL * mv * mv);
        }

        #[test]
        fn inversion_involution(c in prop::array::uniform4(-3.0f64..3.0), mv in 0.2f64..3.0) {
            let mm = m(mv);
            let q = FourMomentum(c);
            prop_assume!(q.minkowski_sq().abs() > 1e-3);
            let p = attach(&q, mm);
            let pi = invert_point(&p).unwrap();
            prop_assert!((pi.q_sq() * p.q_sq() / mm.sq().powi(2) - 1.0).abs() <= 1e-10);
            prop_assert_eq!(pi.branch(), if (p.q_sq().abs() - mm.sq()).abs() < 1e-12 { p.branch() } else { p.branch().flip() });
            let back = invert_point(&pi).unwrap();
            prop_assert!(back.q().rel_diff(&q) <= 1e-10);
            prop_assert_eq!(back.region(), p.region());
        }

        #[test]
        fn lambda_roundtrip(lambda in -10.0f64..10.0, mv in 0.2f64..3.0) {
            let mm = m(mv);
            let regions: &[Region] = if lambda >= 0.0 { &[Region::I, Region::IV] } else { &[Region::II, Region::III] };
            for &r in regions {
                let s = point_of_lambda(lambda, r, mm).unwrap();
                prop_assert_eq!(classify(s.q_sq, mm), r);
                let back = lambda_of_sq(s.q_sq, mm).unwrap();
                prop_assert!((back - lambda).abs() <= 1e-12 * lambda.abs().max(1.0));
                prop_assert!(r.branch().shell_residual(s.q_sq, s.q5_sq, mm).abs() <= 1e-12 * mm.sq().max(s.q_sq.abs()));
            }
        }

        #[test]
        fn dilatation_shifts_lambda(c in prop::array::uniform4(-3.0f64..3.0), delta in -2.0f64..2.0) {
            let mm = m(1.0);
            let q = FourMomentum(c);
            prop_assume!(q.minkowski_sq().abs() > 1e-3);
            let qd = apply(&ConformalElement::Dilatation { lambda: delta }, &q, mm).unwrap();
            let l0 = lambda_of(&attach(&q, mm)).unwrap();
            let l1 = lambda_of(&attach(&qd, mm)).unwrap();
            prop_assert!((l1 - (l0 - delta)).abs() <= 1e-12 * (1.0 + l0.abs()));
        }

        #[test]
        fn large_scale_lands_in_i_or_iv(c in prop::array::uniform4(-3.0f64..3.0)) {
            let q = FourMomentum(c);
            let mm = m(q.minkowski_sq().abs().sqrt() * 1.01 + 1e-9);
            let r = attach(&q, mm).region();
            prop_assert!(r == Region::I || r == Region::IV);
        }

        #[test]
        fn shifts_preserve_shell(c in prop::array::uniform4(-3.0f64..3.0), h in prop::array::uniform4(-3.0f64..3.0), e in -2.0f64..2.0) {
            let mm = m(1.0);
            let p = attach(&FourMomentum(c), mm);
            let t = translate_on_shell(&p, &FourMomentum(h));
            prop_assert!(t.source_shell_residual().abs() <= 1e-10 * mm.sq().max(p.q().euclid_sq()));
            prop_assert!(t.point.shell_residual().abs() <= SHELL_TOL * mm.sq().max(t.point.q().euclid_sq()));
            let g = gauge_shift(&p, &FourMomentum(h), e);
            prop_assert!(g.source_shell_residual().abs() <= 1e-10 * mm.sq().max(g.point.q().euclid_sq()));
        }
    }
}

//! Conformal group acting on four-momenta.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::momentum::{FourMomentum, LorentzGenerator, LorentzMatrix, ScaleM};

/// Relative tolerance used to detect `q² = 0` before inverting.
pub const LIGHTLIKE_TOL: f64 = 1e-12;

/// Relative tolerance on the special conformal denominator.
pub const SCT_DENOMINATOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConformalElement {
    Translation { h: FourMomentum },
    Lorentz(LorentzMatrix),
    /// `q -> e^λ q`.
    Dilatation { lambda: f64 },
    /// `q -> -M² q / q²`.
    Inversion,
    SpecialConformal { b: FourMomentum },
}

/// Kind tag without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Translation,
    Lorentz,
    Dilatation,
    Inversion,
    SpecialConformal,
}

impl ElementKind {
    pub const ALL: [ElementKind; 5] = [
        ElementKind::Translation,
        ElementKind::Lorentz,
        ElementKind::Dilatation,
        ElementKind::Inversion,
        ElementKind::SpecialConformal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Translation => "translation",
            ElementKind::Lorentz => "lorentz",
            ElementKind::Dilatation => "dilatation",
            ElementKind::Inversion => "inversion",
            ElementKind::SpecialConformal => "special_conformal",
        }
    }
}

impl ConformalElement {
    pub fn kind(&self) -> ElementKind {
        match self {
            ConformalElement::Translation { .. } => ElementKind::Translation,
            ConformalElement::Lorentz(_) => ElementKind::Lorentz,
            ConformalElement::Dilatation { .. } => ElementKind::Dilatation,
            ConformalElement::Inversion => ElementKind::Inversion,
            ConformalElement::SpecialConformal { .. } => ElementKind::SpecialConformal,
        }
    }

    pub fn inverse(&self) -> ConformalElement {
        match *self {
            ConformalElement::Translation { h } => ConformalElement::Translation { h: -h },
            ConformalElement::Lorentz(l) => ConformalElement::Lorentz(l.inverse()),
            ConformalElement::Dilatation { lambda } => {
                ConformalElement::Dilatation { lambda: -lambda }
            }
            ConformalElement::Inversion => ConformalElement::Inversion,
            ConformalElement::SpecialConformal { b } => {
                ConformalElement::SpecialConformal { b: -b }
            }
        }
    }
}

impl fmt::Display for ConformalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |q: &FourMomentum| {
            q.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        };
        match self {
            ConformalElement::Translation { h } => write!(f, "trans:{}", v(h)),
            ConformalElement::Lorentz(l) => {
                let m = l.matrix();
                let entries: Vec<String> = (0..4)
                    .flat_map(|i| (0..4).map(move |j| (i, j)))
                    .map(|(i, j)| m[(i, j)].to_string())
                    .collect();
                write!(f, "lorentz:{}", entries.join(","))
            }
            ConformalElement::Dilatation { lambda } => write!(f, "dil:{lambda}"),
            ConformalElement::Inversion => write!(f, "inv"),
            ConformalElement::SpecialConformal { b } => write!(f, "sct:{}", v(b)),
        }
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("not a number: {t:?}")))
        })
        .collect()
}

/// Parses a comma separated four-vector such as `1,0,0,0`.
pub fn parse_four_momentum(s: &str) -> Result<FourMomentum> {
    let v = parse_floats(s)?;
    match v.as_slice() {
        [a, b, c, d] => Ok(FourMomentum::new(*a, *b, *c, *d)),
        _ => Err(Error::InvalidParameter(format!(
            "expected 4 components, got {} in {s:?}",
            v.len()
        ))),
    }
}

/// Element spec strings:
/// `inv`, `dil:λ`, `trans:h0,h1,h2,h3`, `sct:b0,b1,b2,b3`,
/// `boost:axis:rapidity`, `rot:axis:angle`, `lorentz:<16 row-major entries>`.
impl FromStr for ConformalElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        fn need<'a>(r: Option<&'a str>, head: &str) -> Result<&'a str> {
            r.ok_or_else(|| Error::InvalidParameter(format!("element {head:?} needs arguments")))
        }
        match head {
            "inv" | "inversion" if rest.is_none() => Ok(ConformalElement::Inversion),
            "dil" | "dilatation" => {
                let r = need(rest, head)?;
                let lambda = r
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad dilatation {r:?}")))?;
                Ok(ConformalElement::Dilatation { lambda })
            }
            "trans" | "translation" => Ok(ConformalElement::Translation {
                h: parse_four_momentum(need(rest, head)?)?,
            }),
            "sct" | "special" => Ok(ConformalElement::SpecialConformal {
                b: parse_four_momentum(need(rest, head)?)?,
            }),
            "boost" | "rot" => {
                let r = need(rest, head)?;
                let (axis, param) = r.split_once(':').ok_or_else(|| {
                    Error::InvalidParameter(format!("expected {head}:axis:value, got {s:?}"))
                })?;
                let axis: usize = axis
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad axis {axis:?}")))?;
                let param: f64 = param
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad value {param:?}")))?;
                let l = if head == "boost" {
                    LorentzMatrix::boost(axis, param)?
                } else {
                    LorentzMatrix::rotation(axis, param)?
                };
                Ok(ConformalElement::Lorentz(l))
            }
            "lorentz" => {
                let v = parse_floats(need(rest, head)?)?;
                if v.len() != 16 {
                    return Err(Error::InvalidParameter(format!(
                        "lorentz needs 16 entries, got {}",
                        v.len()
                    )));
                }
                let m = nalgebra::Matrix4::from_row_slice(&v);
                Ok(ConformalElement::Lorentz(LorentzMatrix::new(m)?))
            }
            _ => Err(Error::InvalidParameter(format!("unknown element {s:?}"))),
        }
    }
}

/// Ordered product of elements, applied right to left: `[A, B]` maps `q` to
/// `A(B(q))`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConformalWord {
    pub elements: Vec<ConformalElement>,
}

impl ConformalWord {
    pub fn new(elements: Vec<ConformalElement>) -> Self {
        ConformalWord { elements }
    }

    pub fn identity() -> Self {
        ConformalWord::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn inverse(&self) -> ConformalWord {
        ConformalWord {
            elements: self.elements.iter().rev().map(|e| e.inverse()).collect(),
        }
    }
}

impl From<Vec<ConformalElement>> for ConformalWord {
    fn from(elements: Vec<ConformalElement>) -> Self {
        ConformalWord { elements }
    }
}

pub(crate) fn is_lightlike(q: &FourMomentum, m: ScaleM) -> bool {
    q.minkowski_sq().abs() < LIGHTLIKE_TOL * (q.euclid_sq() + m.sq())
}

fn invert(q: &FourMomentum, m: ScaleM) -> Result<FourMomentum> {
    if is_lightlike(q, m) {
        return Err(Error::LightlikeInversion {
            q_sq: q.minkowski_sq(),
        });
    }
    Ok(*q * (-m.sq() / q.minkowski_sq()))
}

/// Closed form `q' = (q - b q²/M²) / (1 - 2 q·b/M² + b² q²/M⁴)`.
fn special_conformal(q: &FourMomentum, b: &FourMomentum, m: ScaleM) -> Result<FourMomentum> {
    let m2 = m.sq();
    let q2 = q.minkowski_sq();
    let qb = q.dot(b);
    let b2 = b.minkowski_sq();
    let t1 = 2.0 * qb / m2;
    let t2 = b2 * q2 / (m2 * m2);
    let denominator = 1.0 - t1 + t2;
    if denominator.abs() <= SCT_DENOMINATOR_TOL * (1.0 + t1.abs() + t2.abs()) {
        return Err(Error::SingularSpecialConformal { denominator });
    }
    Ok((*q - *b * (q2 / m2)) * (1.0 / denominator))
}

pub fn apply(e: &ConformalElement, q: &FourMomentum, m: ScaleM) -> Result<FourMomentum> {
    match e {
        ConformalElement::Translation { h } => Ok(*q + *h),
        ConformalElement::Lorentz(l) => Ok(l.apply(q)),
        ConformalElement::Dilatation { lambda } => Ok(*q * lambda.exp()),
        ConformalElement::Inversion => invert(q, m),
        ConformalElement::SpecialConformal { b } => special_conformal(q, b, m),
    }
}

/// Right-to-left fold of [`apply`]. Errors carry the index of the failing
/// element within the word.
pub fn apply_word(w: &ConformalWord, q: &FourMomentum, m: ScaleM) -> Result<FourMomentum> {
    w.elements
        .iter()
        .enumerate()
        .rev()
        .try_fold(*q, |acc, (i, e)| apply(e, &acc, m).map_err(|err| Error::at_step(i, err)))
}

/// `I e I` expressed as a single element.
pub fn conjugate_by_inversion(e: &ConformalElement) -> ConformalElement {
    match *e {
        ConformalElement::Translation { h } => ConformalElement::SpecialConformal { b: h },
        ConformalElement::SpecialConformal { b } => ConformalElement::Translation { h: b },
        ConformalElement::Dilatation { lambda } => ConformalElement::Dilatation { lambda: -lambda },
        ConformalElement::Lorentz(l) => ConformalElement::Lorentz(l),
        ConformalElement::Inversion => ConformalElement::Inversion,
    }
}

/// Infinitesimal parameters of a conformal variation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infinitesimal {
    pub dh: FourMomentum,
    pub omega: LorentzGenerator,
    pub dlambda: f64,
    pub db: FourMomentum,
}

impl Default for Infinitesimal {
    fn default() -> Self {
        Infinitesimal {
            dh: FourMomentum::ZERO,
            omega: LorentzGenerator::zero(),
            dlambda: 0.0,
            db: FourMomentum::ZERO,
        }
    }
}

/// `δq = δh + δΛ q + δλ q + (q² δb - 2 (q·δb) q) / M²`.
///
/// The special conformal term is the first-order change produced by
/// `SpecialConformal { b: -δb }`.
pub fn infinitesimal_variation(q: &FourMomentum, d: &Infinitesimal, m: ScaleM) -> FourMomentum {
    let q2 = q.minkowski_sq();
    let qb = q.dot(&d.db);
    d.dh + d.omega.act(q) + *q * d.dlambda + (d.db * q2 - *q * (2.0 * qb)) * (1.0 / m.sq())
}

/// Inversion-invariant and anti-invariant parts of `f` at `q`.
pub fn invariant_split<F>(f: F, q: &FourMomentum, m: ScaleM) -> Result<(f64, f64)>
where
    F: Fn(&FourMomentum) -> f64,
{
    let qi = invert(q, m)?;
    let (a, b) = (f(q), f(&qi));
    Ok((0.5 * (a + b), 0.5 * (a - b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;
    use proptest::prelude::*;

    fn m1() -> ScaleM {
        ScaleM::new(1.0).unwrap()
    }

    #[test]
    fn translation_adds() {
        let q = FourMomentum::new(1.0, 0.0, 0.0, 0.0);
        let e = ConformalElement::Translation { h: FourMomentum::new(0.0, 1.0, 0.0, 0.0) };
        assert_eq!(apply(&e, &q, m1()).unwrap(), FourMomentum::new(1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn inversion_of_timelike() {
        let q = FourMomentum::new(2.0, 0.0, 0.0, 0.0);
        let r = apply(&ConformalElement::Inversion, &q, m1()).unwrap();
        assert_eq!(r, FourMomentum::new(-0.5, 0.0, 0.0, 0.0));
        assert_eq!(r.minkowski_sq(), 0.25);
    }

    #[test]
    fn inversion_rejects_lightlike() {
        let q = FourMomentum::new(1.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            apply(&ConformalElement::Inversion, &q, m1()),
            Err(Error::LightlikeInversion { .. })
        ));
    }

    #[test]
    fn special_conformal_singular_denominator() {
        // 1 - 2 q·b + b² q² = (1 - q0 b0)² for parallel timelike vectors
        let q = FourMomentum::new(2.0, 0.0, 0.0, 0.0);
        let b = FourMomentum::new(0.5, 0.0, 0.0, 0.0);
        let e = ConformalElement::SpecialConformal { b };
        assert!(matches!(apply(&e, &q, m1()), Err(Error::SingularSpecialConformal { .. })));
    }

    #[test]
    fn special_conformal_defined_on_light_cone() {
        let q = FourMomentum::new(1.0, 1.0, 0.0, 0.0);
        let b = FourMomentum::new(0.0, 0.0, 0.3, 0.0);
        let e = ConformalElement::SpecialConformal { b };
        let r = apply(&e, &q, m1()).unwrap();
        assert!(r.rel_diff(&(q * (1.0 / (1.0 - 2.0 * q.dot(&b))))) < 1e-15);
    }

    #[test]
    fn empty_word_is_identity() {
        let q = FourMomentum::new(0.3, -1.0, 2.0, 0.1);
        assert_eq!(apply_word(&ConformalWord::identity(), &q, m1()).unwrap(), q);
    }

    #[test]
    fn double_inversion() {
        let m = ScaleM::new(2.0).unwrap();
        let q = FourMomentum::new(3.0, 1.0, 0.0, 0.0);
        let w = ConformalWord::new(vec![ConformalElement::Inversion, ConformalElement::Inversion]);
        assert!(apply_word(&w, &q, m).unwrap().rel_diff(&q) < 1e-12);
    }

    #[test]
    fn dilatations_cancel() {
        let q = FourMomentum::new(3.0, 1.0, 0.5, -2.0);
        let l = 2f64.ln();
        let w = ConformalWord::new(vec![
            ConformalElement::Dilatation { lambda: l },
            ConformalElement::Dilatation { lambda: -l },
        ]);
        assert!(apply_word(&w, &q, m1()).unwrap().rel_diff(&q) < 1e-15);
    }

    #[test]
    fn word_errors_carry_step_index() {
        let w = ConformalWord::new(vec![
            ConformalElement::Inversion,
            ConformalElement::Translation { h: FourMomentum::new(-1.0, 0.0, 0.0, 0.0) },
        ]);
        let q = FourMomentum::new(1.0, 0.0, 0.0, 0.0);
        match apply_word(&w, &q, m1()) {
            Err(Error::AtStep { index, source }) => {
                assert_eq!(index, 0);
                assert!(matches!(*source, Error::LightlikeInversion { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn conjugation_table() {
        let h = FourMomentum::new(0.1, 0.2, 0.0, 0.0);
        assert_eq!(
            conjugate_by_inversion(&ConformalElement::Translation { h }),
            ConformalElement::SpecialConformal { b: h }
        );
        assert_eq!(
            conjugate_by_inversion(&ConformalElement::Dilatation { lambda: 0.7 }),
            ConformalElement::Dilatation { lambda: -0.7 }
        );
    }

    #[test]
    fn zero_variation() {
        let q = FourMomentum::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(infinitesimal_variation(&q, &Infinitesimal::default(), m1()), FourMomentum::ZERO);
        let d = Infinitesimal { dlambda: 1e-3, ..Default::default() };
        assert!(infinitesimal_variation(&q, &d, m1()).rel_diff(&(q * 1e-3)) < 1e-15);
    }

    #[test]
    fn split_of_square_at_fixed_point() {
        let m = ScaleM::new(1.5).unwrap();
        // q² = -M², so inversion fixes q
        let q = FourMomentum::new(0.0, 1.5, 0.0, 0.0);
        let (inv, anti) = invariant_split(|p| p.minkowski_sq(), &q, m).unwrap();
        assert_eq!(anti, 0.0);
        assert_eq!(inv, -m.sq());
        let (c, z) = invariant_split(|_| 4.0, &q, m).unwrap();
        assert_eq!((c, z), (4.0, 0.0));
    }

    #[test]
    fn parse_element_specs() {
        assert_eq!("inv".parse::<ConformalElement>().unwrap(), ConformalElement::Inversion);
        assert_eq!(
            "dil:0.5".parse::<ConformalElement>().unwrap(),
            ConformalElement::Dilatation { lambda: 0.5 }
        );
        assert_eq!(
            "sct:0,0.1,0,0".parse::<ConformalElement>().unwrap(),
            ConformalElement::SpecialConformal { b: FourMomentum::new(0.0, 0.1, 0.0, 0.0) }
        );
        assert!("boost:1:0.3".parse::<ConformalElement>().is_ok());
        assert!("trans:1,2".parse::<ConformalElement>().is_err());
        assert!("warp:1".parse::<ConformalElement>().is_err());
        let e = ConformalElement::Translation { h: FourMomentum::new(0.25, 1.0, -2.0, 0.0) };
        assert_eq!(e.to_string().parse::<ConformalElement>().unwrap(), e);
    }

    fn momentum() -> impl Strategy<Value = FourMomentum> {
        prop::array::uniform4(-3.0f64..3.0).prop_map(FourMomentum)
    }

    proptest! {
        #[test]
        fn group_inverse_roundtrip(q in momentum(), h in momentum(), lam in -2.0f64..2.0,
                                   rap in -1.5f64..1.5, ang in -3.0f64..3.0, axis in 1usize..4) {
            let m = ScaleM::new(1.3).unwrap();
            let l = LorentzMatrix::boost(axis, rap).unwrap()
                .compose(&LorentzMatrix::rotation(4 - axis, ang).unwrap());
            for e in [
                ConformalElement::Translation { h },
                ConformalElement::Lorentz(l),
                ConformalElement::Dilatation { lambda: lam },
            ] {
                let back = apply(&e.inverse(), &apply(&e, &q, m).unwrap(), m).unwrap();
                let scale = q.euclid_sq().sqrt() + h.euclid_sq().sqrt() + 1.0;
                prop_assert!((back - q).euclid_sq().sqrt() <= 1e-10 * scale);
            }
        }

        #[test]
        fn conjugation_is_involution(h in momentum(), lam in -2.0f64..2.0) {
            for e in [ConformalElement::Translation { h }, ConformalElement::Dilatation { lambda: lam }] {
                prop_assert_eq!(conjugate_by_inversion(&conjugate_by_inversion(&e)), e);
            }
        }

        #[test]
        fn split_parts_sum_and_invariance(q in momentum(), c in prop::array::uniform4(-1.0f64..1.0)) {
            let m = ScaleM::new(0.8).unwrap();
            prop_assume!(q.minkowski_sq().abs() > 1e-3);
            let f = |p: &FourMomentum| c[0] + c[1] * p[0] + c[2] * p[1] * p[2] + c[3] * p.minkowski_sq();
            let (inv, anti) = invariant_split(f, &q, m).unwrap();
            prop_assert!((inv + anti - f(&q)).abs() <= 1e-12 * (1.0 + f(&q).abs()));
            let qi = apply(&ConformalElement::Inversion, &q, m).unwrap();
            let (inv_i, _) = invariant_split(f, &qi, m).unwrap();
            prop_assert!((inv - inv_i).abs() <= 1e-10 * (1.0 + inv.abs()));
        }
    }

    #[test]
    fn lorentz_generator_variation() {
        let mut w = Matrix4::zeros();
        w[(0, 1)] = 1.0;
        w[(1, 0)] = -1.0;
        let g = LorentzGenerator::new(w).unwrap();
        let q = FourMomentum::new(1.0, 0.5, 0.0, 0.0);
        let d = Infinitesimal { omega: g, ..Default::default() };
        // g ω q for a boost generator mixes q0 and q1
        assert_eq!(infinitesimal_variation(&q, &d, m1()), FourMomentum::new(0.5, 1.0, 0.0, 0.0));
    }
}

use serde::Serialize;

use crate::numeric::{scan_roots, second_derivative};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Minimum,
    Maximum,
    /// Stationary but not an extremum.
    Inflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub location: f64,
    pub value: f64,
    pub second_derivative: f64,
    pub classification: Classification,
}

/// Stationary points of `f` on `[lo, hi]`.
///
/// Odd-order roots of `df` are found by sign changes. Even-order roots are
/// picked up as sign changes of `d2f` at which `df` also vanishes.
/// Classification uses the numeric second derivative of `f`, falling back
/// to comparing neighbouring values when it vanishes.
pub(crate) fn find<F, D, D2>(f: F, df: D, d2f: D2, lo: f64, hi: f64, scale: f64) -> Vec<StationaryPoint>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
    D2: Fn(f64) -> f64,
{
    let cells = 2001;
    let mut roots = scan_roots(&df, lo, hi, cells);
    let slope_scale = (0..=64)
        .map(|i| df(lo + (hi - lo) * i as f64 / 64.0).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for r in scan_roots(&d2f, lo, hi, cells) {
        if df(r).abs() <= 1e-12 * slope_scale {
            roots.push(r);
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    roots
        .into_iter()
        .map(|x| {
            let h = 1e-3 * scale;
            let d2 = second_derivative(&f, x, h);
            let curvature_scale = (f(x + h) - f(x)).abs().max((f(x - h) - f(x)).abs()) / (h * h);
            let classification = if d2.abs() > 1e-6 * curvature_scale.max(f64::MIN_POSITIVE) && d2.abs() > 0.0 {
                if d2 > 0.0 {
                    Classification::Minimum
                } else {
                    Classification::Maximum
                }
            } else {
                let (l, c, r) = (f(x - h), f(x), f(x + h));
                if l > c && r > c {
                    Classification::Minimum
                } else if l < c && r < c {
                    Classification::Maximum
                } else {
                    Classification::Inflection
                }
            };
            StationaryPoint { location: x, value: f(x), second_derivative: d2, classification }
        })
        .collect()
}

/// Zeros of `f` on `[lo, hi]`, including even-order touching zeros found
/// among the stationary points.
pub(crate) fn zeros<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, stationary: &[StationaryPoint], scale: f64) -> Vec<f64> {
    let mut z = scan_roots(&f, lo, hi, 2001);
    let value_scale = (0..=64)
        .map(|i| f(lo + (hi - lo) * i as f64 / 64.0).abs())
        .fold(0.0, f64::max);
    for p in stationary {
        if p.value.abs() <= 1e-14 * value_scale {
            z.push(p.location);
        }
    }
    z.sort_by(|a, b| a.total_cmp(b));
    z.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    z
}

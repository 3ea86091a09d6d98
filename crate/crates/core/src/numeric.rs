//! Small numerical kernels: bracketed root finding, finite-difference
//! derivatives and least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Brent's method on `[a, b]`. Requires a sign change.
pub fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..max_iter {
        if fb == 0.0 || (b - a).abs() <= tol * (1.0 + b.abs()) {
            return Some(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let outside = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0 || (b - c).abs() < tol
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0 || (c - d).abs() < tol
        };
        if outside || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Some(b)
}

/// Roots of `f` on `[lo, hi]`, found by scanning `n` cells for sign changes
/// and refining each with Brent.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = lo + step * i as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            if let Some(r) = brent(&f, x0, x1, 1e-15, 200) {
                roots.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    roots
}

/// Central difference of step `h`, refined by one Richardson step.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Central second difference refined by one Richardson step.
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Solution of a least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    pub max_residual: f64,
    /// Ratio of extreme singular values after column normalization.
    pub condition: f64,
}

/// Minimizes `‖A c - y‖` by SVD, with columns scaled to unit norm first.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>, max_condition: f64) -> Result<LeastSquares> {
    let ncols = a.ncols();
    if a.nrows() < ncols || a.nrows() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "least squares needs at least {ncols} rows matching the data, got {}x{} and {}",
            a.nrows(),
            ncols,
            y.len()
        )));
    }
    let norms: Vec<f64> = (0..ncols).map(|j| a.column(j).norm()).collect();
    if norms.iter().any(|n| *n == 0.0 || !n.is_finite()) {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    let mut scaled = a.clone();
    for (j, n) in norms.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / n);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > max_condition {
        return Err(Error::IllConditioned(condition));
    }
    let c = svd
        .solve(y, 0.0)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let coefficients: Vec<f64> = c.iter().zip(&norms).map(|(c, n)| c / n).collect();
    let r = a * DVector::from_vec(coefficients.clone()) - y;
    Ok(LeastSquares {
        coefficients,
        rms_residual: (r.norm_squared() / r.len() as f64).sqrt(),
        max_residual: r.amax(),
        condition,
    })
}

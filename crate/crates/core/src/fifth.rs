//! Dynamics along the fifth coordinate: the first-order constraint
//! `(i/M) ∂5 φ = η φ + l`, the source it induces, and the reduction to four
//! dimensions.

use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::atlas::{classify, Branch};
use crate::error::{Error, Result};
use crate::momentum::{FourMomentum, ScaleM};

/// `|φ|` above `PROFILE_GUARD · max(1, |φ(t5)|)` aborts integration.
pub const PROFILE_GUARD: f64 = 1e12;

/// Relative distance from `q5 = -Mη` treated as the pole of the inverse
/// source relation.
pub const POLE_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Branch, mass and scale. `η` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSpec {
    pub branch: Branch,
    pub mass: f64,
    pub scale: ScaleM,
}

impl BranchSpec {
    pub fn new(branch: Branch, mass: f64, scale: ScaleM) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be finite and >= 0, got {mass}")));
        }
        Ok(BranchSpec { branch, mass, scale })
    }

    pub fn eta(&self) -> f64 {
        eta(self)
    }

    /// `(-1)^(a-1)`.
    pub fn sign(&self) -> f64 {
        self.branch.sign()
    }

    pub fn m(&self) -> f64 {
        self.scale.value()
    }
}

/// `√|1 - m²/M²|` internal, `√(1 + m²/M²)` external.
pub fn eta(spec: &BranchSpec) -> f64 {
    let r = spec.mass * spec.mass / spec.scale.sq();
    match spec.branch {
        Branch::Internal => (1.0 - r).abs().sqrt(),
        Branch::External => (1.0 + r).sqrt(),
    }
}

/// Uniform grid `x_k = t5 + (k - below)·step`, `k = 0..=below+above`. The
/// anchor `t5` is the sample with index `below`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FifthGrid {
    pub t5: f64,
    pub step: f64,
    pub below: usize,
    pub above: usize,
}

impl FifthGrid {
    pub fn new(t5: f64, step: f64, below: usize, above: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !t5.is_finite() {
            return Err(Error::InvalidGrid(format!("step {step} and anchor {t5} must be finite, step > 0")));
        }
        if below + above < 5 {
            return Err(Error::InvalidGrid(format!(
                "need at least 6 points, got {}",
                below + above + 1
            )));
        }
        Ok(FifthGrid { t5, step, below, above })
    }

    /// `steps` intervals on each side of `t5` covering `half_width`.
    pub fn symmetric(t5: f64, half_width: f64, steps: usize) -> Result<Self> {
        FifthGrid::new(t5, half_width / steps as f64, steps, steps)
    }

    /// `[t5 - 10/M, t5 + 10/M]` with 1024 intervals per side.
    pub fn default_for(t5: f64, m: ScaleM) -> Self {
        FifthGrid::symmetric(t5, 10.0 / m.value(), 1024).expect("default grid is valid")
    }

    pub fn len(&self) -> usize {
        self.below + self.above + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn anchor_index(&self) -> usize {
        self.below
    }

    /// `x_k - t5`, computed without cancellation.
    pub fn offset(&self, k: usize) -> f64 {
        (k as f64 - self.below as f64) * self.step
    }

    pub fn x(&self, k: usize) -> f64 {
        self.t5 + self.offset(k)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.x(k)).collect()
    }
}

/// Complex samples on a [`FifthGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct FifthProfile {
    pub grid: FifthGrid,
    pub values: Vec<Complex64>,
}

impl FifthProfile {
    pub fn new(grid: FifthGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(FifthProfile { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: FifthGrid, f: F) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.x(k))).collect();
        FifthProfile { grid, values }
    }

    pub fn zeros(grid: FifthGrid) -> Self {
        FifthProfile { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// `amplitude · e^{-i q5 (x5 - t5)}`.
    pub fn plane_wave(grid: FifthGrid, amplitude: Complex64, q5: f64) -> Self {
        let values = (0..grid.len())
            .map(|k| amplitude * (-I * q5 * grid.offset(k)).exp())
            .collect();
        FifthProfile { grid, values }
    }

    pub fn anchor_value(&self) -> Complex64 {
        self.values[self.grid.anchor_index()]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map<F: Fn(Complex64, f64) -> Complex64>(&self, f: F) -> FifthProfile {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| f(*v, self.grid.x(k)))
            .collect();
        FifthProfile { grid: self.grid, values }
    }

    /// CSV with header `x5,re,im`; floats use shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x5,re,im")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{}", self.grid.x(k), v.re, v.im)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivative {
    /// Fourth-order stencils, one-sided near the ends.
    FiniteDifference,
    /// FFT derivative. Treats the samples as one period, i.e. the point after
    /// the last sample would repeat the first.
    Spectral,
}

/// `d/dx5` of uniformly spaced samples.
pub fn derivative(values: &[Complex64], step: f64, method: Derivative) -> Result<Vec<Complex64>> {
    match method {
        Derivative::FiniteDifference => fd_first(values, step),
        Derivative::Spectral => Ok(spectral_first(values, step)),
    }
}

fn stencil(values: &[Complex64], start: usize, weights: &[f64], scale: f64) -> Complex64 {
    weights
        .iter()
        .enumerate()
        .map(|(j, w)| values[start + j] * *w)
        .sum::<Complex64>()
        * scale
}

fn stencil_rev(values: &[Complex64], end: usize, weights: &[f64], scale: f64) -> Complex64 {
    weights
        .iter()
        .enumerate()
        .map(|(j, w)| values[end - j] * *w)
        .sum::<Complex64>()
        * scale
}

const D1_EDGE: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const D1_NEAR: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
const D1_CENTER: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2_EDGE: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
const D2_NEAR: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
const D2_CENTER: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

fn fd_first(v: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let n = v.len();
    if n < 5 {
        return Err(Error::InvalidGrid(format!("first derivative needs 5 points, got {n}")));
    }
    let s = 1.0 / (12.0 * h);
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    d[0] = stencil(v, 0, &D1_EDGE, s);
    d[1] = stencil(v, 0, &D1_NEAR, s);
    for k in 2..n - 2 {
        d[k] = stencil(v, k - 2, &D1_CENTER, s);
    }
    // Mirrored stencils change sign for an odd derivative.
    d[n - 1] = stencil_rev(v, n - 1, &D1_EDGE, -s);
    d[n - 2] = stencil_rev(v, n - 1, &D1_NEAR, -s);
    Ok(d)
}

/// `d²/dx5²` with fourth-order stencils.
pub fn second_derivative(v: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let n = v.len();
    if n < 6 {
        return Err(Error::InvalidGrid(format!("second derivative needs 6 points, got {n}")));
    }
    let s = 1.0 / (12.0 * h * h);
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    d[0] = stencil(v, 0, &D2_EDGE, s);
    d[1] = stencil(v, 0, &D2_NEAR, s);
    for k in 2..n - 2 {
        d[k] = stencil(v, k - 2, &D2_CENTER, s);
    }
    d[n - 1] = stencil_rev(v, n - 1, &D2_EDGE, s);
    d[n - 2] = stencil_rev(v, n - 1, &D2_NEAR, s);
    Ok(d)
}

fn spectral_first(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = v.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let period = n as f64 * h;
    for (j, c) in buf.iter_mut().enumerate() {
        let freq = if 2 * j < n {
            j as f64
        } else if 2 * j == n {
            0.0
        } else {
            j as f64 - n as f64
        };
        *c *= I * (2.0 * std::f64::consts::PI * freq / period);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let norm = 1.0 / n as f64;
    buf.iter().map(|c| c * norm).collect()
}

/// RK4 on `ψ = e^{iMη(x5 - t5)} φ`, integrated both ways from the anchor.
/// The free part is propagated exactly, so `l ≡ 0` reproduces
/// `φ(t5) e^{-iMη(x5 - t5)}` to rounding.
pub fn solve_constraint<L>(spec: &BranchSpec, phi_t5: Complex64, l_fn: L, grid: &FifthGrid) -> Result<FifthProfile>
where
    L: Fn(Complex64, f64) -> Complex64,
{
    let m = spec.m();
    let w = m * spec.eta();
    let guard = PROFILE_GUARD * phi_t5.norm().max(1.0);
    let t5 = grid.t5;
    let phase = |off: f64| (-I * w * off).exp();
    // dψ/dx5 at offset `off` from the anchor.
    let rhs = |off: f64, psi: Complex64| -> Complex64 {
        let phi = psi * phase(off);
        -I * m * l_fn(phi, t5 + off) / phase(off)
    };
    let n = grid.len();
    let a = grid.anchor_index();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    values[a] = phi_t5;

    let mut sweep = |indices: &mut dyn Iterator<Item = (usize, usize)>| -> Result<()> {
        let mut psi = phi_t5;
        for (from, to) in indices {
            let x0 = grid.offset(from);
            let h = grid.offset(to) - x0;
            let k1 = rhs(x0, psi);
            let k2 = rhs(x0 + 0.5 * h, psi + k1 * (0.5 * h));
            let k3 = rhs(x0 + 0.5 * h, psi + k2 * (0.5 * h));
            let k4 = rhs(x0 + h, psi + k3 * h);
            psi += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            let phi = psi * phase(grid.offset(to));
            if !phi.re.is_finite() || !phi.im.is_finite() || phi.norm() > guard {
                return Err(Error::StepDiverged { x5: grid.x(to) });
            }
            values[to] = phi;
        }
        Ok(())
    };
    sweep(&mut (a..n - 1).map(|k| (k, k + 1)))?;
    sweep(&mut (1..=a).rev().map(|k| (k, k - 1)))?;
    Ok(FifthProfile { grid: *grid, values })
}

/// `M²((i/M) ∂5 + η) f`.
pub fn constraint_operator(spec: &BranchSpec, f: &FifthProfile, method: Derivative) -> Result<Vec<Complex64>> {
    let m = spec.m();
    let eta = spec.eta();
    let d = derivative(&f.values, f.grid.step, method)?;
    Ok(f
        .values
        .iter()
        .zip(&d)
        .map(|(v, dv)| (I * m) * dv + v * (m * m * eta))
        .collect())
}

/// `j = (-1)^(a-1) M² ((i/M) ∂5 + η) l`.
pub fn source_from_l(spec: &BranchSpec, l: &FifthProfile, method: Derivative) -> Result<FifthProfile> {
    let s = spec.sign();
    let values = constraint_operator(spec, l, method)?.into_iter().map(|v| v * s).collect();
    Ok(FifthProfile { grid: l.grid, values })
}

/// Momentum-space factor `(-1)^(a-1) M (q5 + Mη)` relating a plane-wave `l`
/// to its source.
pub fn plane_wave_source_factor(spec: &BranchSpec, q5: f64) -> f64 {
    spec.sign() * spec.m() * (q5 + spec.m() * spec.eta())
}

/// Inverse of the plane-wave source relation.
pub fn l_from_source(j: Complex64, q5: f64, spec: &BranchSpec) -> Result<Complex64> {
    let shift = q5 + spec.m() * spec.eta();
    let scale = q5.abs().max(spec.m() * spec.eta()).max(spec.m());
    if shift.abs() <= POLE_TOL * scale {
        return Err(Error::ResonantPole { q5 });
    }
    Ok(j / plane_wave_source_factor(spec, q5))
}

/// `(i/M) φ' - η φ - l`, zero on solutions of the constraint.
pub fn constraint_defect(
    spec: &BranchSpec,
    phi: &FifthProfile,
    l: &FifthProfile,
    method: Derivative,
) -> Result<Vec<Complex64>> {
    let m = spec.m();
    let eta = spec.eta();
    let d = derivative(&phi.values, phi.grid.step, method)?;
    Ok(phi
        .values
        .iter()
        .zip(&d)
        .zip(&l.values)
        .map(|((p, dp), lv)| (I / m) * dp - p * eta - lv)
        .collect())
}

/// `-M²((i/M)∂5 + η) l - (∂5² φ + M²η² φ)`, the second-order defect obtained
/// by applying `M²((i/M)∂5 + η)` to the constraint.
pub fn second_order_defect(
    spec: &BranchSpec,
    phi: &FifthProfile,
    l: &FifthProfile,
    method: Derivative,
) -> Result<Vec<Complex64>> {
    let m = spec.m();
    let eta = spec.eta();
    let ol = constraint_operator(spec, l, method)?;
    let d2 = second_derivative(&phi.values, phi.grid.step)?;
    Ok(phi
        .values
        .iter()
        .zip(&d2)
        .zip(&ol)
        .map(|((p, dp2), o)| -o - dp2 - p * (m * m * eta * eta))
        .collect())
}

/// A single five-momentum component on one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMode {
    pub q: FourMomentum,
    pub q5: f64,
    pub amplitude: Complex64,
    pub branch: Branch,
}

impl SpectralMode {
    /// Assigns `q5 = √(M² ∓ q²)` on the requested branch.
    pub fn on_shell(q: FourMomentum, branch: Branch, m: ScaleM, amplitude: Complex64) -> Result<Self> {
        let radicand = branch.q5_sq(q.minkowski_sq(), m);
        if radicand < 0.0 {
            return Err(Error::OffShell { branch: branch.name(), radicand });
        }
        Ok(SpectralMode { q, q5: radicand.sqrt(), amplitude, branch })
    }

    /// `q² ± q5² ∓ M²`.
    pub fn shell_residual(&self, m: ScaleM) -> f64 {
        self.branch.shell_residual(self.q.minkowski_sq(), self.q5 * self.q5, m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellSupportEntry {
    pub index: usize,
    pub residual: f64,
    /// Region of `q²` belongs to the mode's branch.
    pub in_window: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellSupportReport {
    pub entries: Vec<ShellSupportEntry>,
    pub failures: usize,
    pub max_residual: f64,
}

impl ShellSupportReport {
    pub fn all_pass(&self) -> bool {
        self.failures == 0
    }
}

/// Shell residual and region window of every mode. A mode passes when its
/// residual is within `tol · M²` and `q²` lies in a region of its branch.
pub fn check_shell_support(modes: &[SpectralMode], m: ScaleM, tol: f64) -> ShellSupportReport {
    let entries: Vec<ShellSupportEntry> = modes
        .iter()
        .enumerate()
        .map(|(index, md)| {
            let residual = md.shell_residual(m).abs();
            let in_window = classify(md.q.minkowski_sq(), m).branch() == md.branch;
            ShellSupportEntry { index, residual, in_window, pass: in_window && residual <= tol * m.sq() }
        })
        .collect();
    ShellSupportReport {
        failures: entries.iter().filter(|e| !e.pass).count(),
        max_residual: entries.iter().map(|e| e.residual).fold(0.0, f64::max),
        entries,
    }
}

/// A plane wave `e^{-iqx - i q5 x5}` solving the constraint with a linear
/// interaction chosen so the four-dimensional source is `(m² - q²) φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourcedPlaneWave {
    pub q5: f64,
    pub phi: Complex64,
    pub l: Complex64,
    pub j: Complex64,
}

/// Builds the sourced plane wave on `spec`'s branch. `l = (q5/M - η) φ`
/// follows from the constraint and `j` from the source relation.
pub fn sourced_plane_wave(spec: &BranchSpec, q: &FourMomentum, phi: Complex64) -> Result<SourcedPlaneWave> {
    let radicand = spec.branch.q5_sq(q.minkowski_sq(), spec.scale);
    if radicand < 0.0 {
        return Err(Error::OffShell { branch: spec.branch.name(), radicand });
    }
    let q5 = radicand.sqrt();
    let l = phi * (q5 / spec.m() - spec.eta());
    let j = l * plane_wave_source_factor(spec, q5);
    Ok(SourcedPlaneWave { q5, phi, l, j })
}

/// `(m² - q²) Φ - J`, the four-dimensional Klein–Gordon residual of a plane
/// wave with momentum `q`.
pub fn kg_residual(q: &FourMomentum, mass: f64, phi: Complex64, j: Complex64) -> Complex64 {
    phi * (mass * mass - q.minkowski_sq()) - j
}

/// `Φ = φ1(t5) + φ2(t5)` and `J = j1(t5) + j2(t5)`.
pub fn reduce_to_4d(
    phi1: &FifthProfile,
    phi2: &FifthProfile,
    j1: &FifthProfile,
    j2: &FifthProfile,
    t5: f64,
) -> Result<(Complex64, Complex64)> {
    let tol = 1e-12 * t5.abs().max(1.0);
    for p in [phi1, phi2, j1, j2] {
        if (p.grid.t5 - t5).abs() > tol {
            return Err(Error::AnchorMismatch { left: t5, right: p.grid.t5 });
        }
    }
    Ok((
        phi1.anchor_value() + phi2.anchor_value(),
        j1.anchor_value() + j2.anchor_value(),
    ))
}

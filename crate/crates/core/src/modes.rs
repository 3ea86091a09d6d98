//! Klein–Gordon mode functions in a periodic box: inner products,
//! coefficient extraction and invariance of coefficients under four-momentum
//! translations.
//!
//! Positive-frequency modes are `f_{p-h}(x) = e^{-i(p0-h0)x0 + i(p-h)·x}`, so
//! the inner product of a mode with itself is `+2(p0 - h0) L³`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::momentum::FourMomentum;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance for deciding that a spatial vector sits on the momentum
/// lattice, in units of the lattice spacing.
pub const LATTICE_TOL: f64 = 1e-9;

/// Periodic cube of side `length` sampled with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxGrid {
    length: f64,
    n: usize,
}

impl BoxGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {length}")));
        }
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("points per axis must be even and >= 16, got {n}")));
        }
        Ok(BoxGrid { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Lattice momentum `2π n / L`.
    pub fn momentum(&self, index: [i32; 3]) -> [f64; 3] {
        index.map(|i| 2.0 * PI * i as f64 / self.length)
    }

    /// Inverse of [`BoxGrid::momentum`]; fails off the lattice.
    pub fn lattice_index(&self, k: [f64; 3]) -> Result<[i32; 3]> {
        let mut out = [0; 3];
        for (o, c) in out.iter_mut().zip(k) {
            let x = c * self.length / (2.0 * PI);
            let r = x.round();
            if (x - r).abs() > LATTICE_TOL || !x.is_finite() {
                return Err(Error::OffLatticeShift(k));
            }
            *o = r as i32;
        }
        Ok(out)
    }

    fn sites(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let n = self.n;
        let dx = self.spacing();
        (0..n * n * n).map(move |idx| {
            let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
            [i as f64 * dx, j as f64 * dx, k as f64 * dx]
        })
    }

    fn site_count(&self) -> usize {
        self.n * self.n * self.n
    }
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `ω_p = √(p² + m²)`.
pub fn omega(k: [f64; 3], mass: f64) -> f64 {
    (dot3(k, k) + mass * mass).sqrt()
}

/// Field samples and their time derivatives on every site at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: BoxGrid,
    pub x0: f64,
    pub values: Vec<Complex64>,
    pub dt: Vec<Complex64>,
}

impl Snapshot {
    pub fn zeros(grid: BoxGrid, x0: f64) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.site_count()];
        Snapshot { grid, x0, values: z.clone(), dt: z }
    }

    fn add_wave(&mut self, w: &PlaneWave) {
        let e = w.energy;
        for ((v, d), x) in self.values.iter_mut().zip(self.dt.iter_mut()).zip(self.grid.sites()) {
            let phase = -e * self.x0 + dot3(w.k, x);
            let f = w.amplitude * Complex64::from_polar(1.0, phase);
            *v += f;
            *d += f * (-I * e);
        }
    }

    /// Largest `|Im φ|` over the sites.
    pub fn max_imaginary(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `amplitude · e^{-i E x0 + i k·x}`. Negative `energy` gives a
/// negative-frequency wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneWave {
    pub energy: f64,
    pub k: [f64; 3],
    pub amplitude: Complex64,
}

impl PlaneWave {
    pub fn snapshot(&self, grid: BoxGrid, x0: f64) -> Snapshot {
        let mut s = Snapshot::zeros(grid, x0);
        s.add_wave(self);
        s
    }
}

/// On-shell mode `f_{p-h}` with `p0 = ω_p` and a lattice momentum `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneMode {
    pub p: FourMomentum,
    pub h: FourMomentum,
    pub amplitude: Complex64,
}

impl PlaneMode {
    pub fn new(grid: &BoxGrid, index: [i32; 3], mass: f64, h: FourMomentum, amplitude: Complex64) -> Result<Self> {
        let k = grid.momentum(index);
        grid.lattice_index(h.spatial())?;
        let p = FourMomentum::new(omega(k, mass), k[0], k[1], k[2]);
        Ok(PlaneMode { p, h, amplitude })
    }

    /// `p0 - h0`.
    pub fn energy(&self) -> f64 {
        self.p.q0() - self.h.q0()
    }

    pub fn wave(&self) -> PlaneWave {
        let (p, h) = (self.p.spatial(), self.h.spatial());
        PlaneWave {
            energy: self.energy(),
            k: [p[0] - h[0], p[1] - h[1], p[2] - h[2]],
            amplitude: self.amplitude,
        }
    }

    pub fn snapshot(&self, grid: BoxGrid, x0: f64) -> Snapshot {
        self.wave().snapshot(grid, x0)
    }
}

fn check_same_grid(f: &Snapshot, g: &Snapshot) -> Result<()> {
    if f.grid != g.grid || f.values.len() != g.values.len() || f.x0 != g.x0 {
        return Err(Error::InvalidGrid("snapshots live on different grids or times".into()));
    }
    Ok(())
}

fn pairing<A, B>(f: &Snapshot, g: &Snapshot, cf: A, cg: B) -> Result<Complex64>
where
    A: Fn(Complex64) -> Complex64,
    B: Fn(Complex64) -> Complex64,
{
    check_same_grid(f, g)?;
    let dv = f.grid.spacing().powi(3);
    let s: Complex64 = f
        .values
        .iter()
        .zip(&f.dt)
        .zip(g.values.iter().zip(&g.dt))
        .map(|((fv, fd), (gv, gd))| cf(*fv) * cg(*gd) - cf(*fd) * cg(*gv))
        .sum();
    Ok(I * s * dv)
}

/// `i ∫ f* ∂0↔ g d³x`, periodic trapezoidal rule.
pub fn kg_inner_product(f: &Snapshot, g: &Snapshot) -> Result<Complex64> {
    pairing(f, g, |z| z.conj(), |z| z)
}

/// `i ∫ f ∂0↔ g d³x` without conjugation.
pub fn plain_pairing(f: &Snapshot, g: &Snapshot) -> Result<Complex64> {
    pairing(f, g, |z| z, |z| z)
}

/// `i ∫ f* ∂0↔ g* d³x`.
pub fn conjugate_pairing(f: &Snapshot, g: &Snapshot) -> Result<Complex64> {
    pairing(f, g, |z| z.conj(), |z| z.conj())
}

/// Inner product of two modes evaluated on the grid at time `x0`.
pub fn mode_inner_product(f: &PlaneMode, g: &PlaneMode, grid: BoxGrid, x0: f64) -> Result<Complex64> {
    kg_inner_product(&f.snapshot(grid, x0), &g.snapshot(grid, x0))
}

/// Coefficient of `f_{p-h}` in `field`, normalized by `2(p0 - h0) L³`.
pub fn extract_shifted(field: &Snapshot, p: &FourMomentum, h: &FourMomentum) -> Result<Complex64> {
    let grid = field.grid;
    grid.lattice_index(p.spatial())?;
    grid.lattice_index(h.spatial())?;
    let mode = PlaneMode { p: *p, h: *h, amplitude: Complex64::new(1.0, 0.0) };
    let norm = 2.0 * mode.energy() * grid.volume();
    if norm.abs() <= f64::EPSILON * grid.volume() * p.q0().abs().max(1.0) {
        return Err(Error::DegenerateNormalization);
    }
    Ok(kg_inner_product(&mode.snapshot(grid, field.x0), field)? / norm)
}

/// Coefficient of the positive-frequency mode with lattice momentum `p`
/// (energy `p0`) in `field`.
pub fn extract_coefficient(field: &Snapshot, p: &FourMomentum) -> Result<Complex64> {
    extract_shifted(field, p, &FourMomentum::ZERO)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// Independent particle and antiparticle amplitudes.
    Charged,
    /// Real field: negative frequencies are conjugates of positive ones.
    Neutral,
}

/// Superposition of on-shell lattice modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeField {
    pub kind: FieldKind,
    pub mass: f64,
    /// `(lattice index, a_p)`.
    pub particles: Vec<([i32; 3], Complex64)>,
    /// `(lattice index, b_p)`, charged fields only; contributes
    /// `b_p* e^{iω_p x0 - i p·x}`.
    pub antiparticles: Vec<([i32; 3], Complex64)>,
}

impl ModeField {
    pub fn charged(mass: f64, particles: Vec<([i32; 3], Complex64)>, antiparticles: Vec<([i32; 3], Complex64)>) -> Self {
        ModeField { kind: FieldKind::Charged, mass, particles, antiparticles }
    }

    pub fn neutral(mass: f64, particles: Vec<([i32; 3], Complex64)>) -> Self {
        ModeField { kind: FieldKind::Neutral, mass, particles, antiparticles: Vec::new() }
    }

    fn waves(&self, grid: &BoxGrid) -> Vec<PlaneWave> {
        let mut out = Vec::new();
        for (idx, a) in &self.particles {
            let k = grid.momentum(*idx);
            let w = omega(k, self.mass);
            out.push(PlaneWave { energy: w, k, amplitude: *a });
            if self.kind == FieldKind::Neutral {
                out.push(PlaneWave { energy: -w, k: k.map(|c| -c), amplitude: a.conj() });
            }
        }
        if self.kind == FieldKind::Charged {
            for (idx, b) in &self.antiparticles {
                let k = grid.momentum(*idx);
                out.push(PlaneWave { energy: -omega(k, self.mass), k: k.map(|c| -c), amplitude: b.conj() });
            }
        }
        out
    }

    pub fn snapshot(&self, grid: BoxGrid, x0: f64) -> Snapshot {
        let mut s = Snapshot::zeros(grid, x0);
        for w in self.waves(&grid) {
            s.add_wave(&w);
        }
        s
    }

    /// Field after the momentum translation `q -> q + h`.
    ///
    /// Charged: `e^{ihx} φ(x)`. Neutral: positive-frequency waves pick up
    /// `e^{ihx}` and negative-frequency waves `e^{-ihx}`, so the field stays
    /// real.
    pub fn translated_snapshot(&self, h: &FourMomentum, grid: BoxGrid, x0: f64) -> Result<Snapshot> {
        grid.lattice_index(h.spatial())?;
        let hs = h.spatial();
        let mut s = Snapshot::zeros(grid, x0);
        for w in self.waves(&grid) {
            let sign = match self.kind {
                FieldKind::Charged => 1.0,
                FieldKind::Neutral => w.energy.signum(),
            };
            s.add_wave(&PlaneWave {
                energy: w.energy - sign * h.q0(),
                k: [w.k[0] - sign * hs[0], w.k[1] - sign * hs[1], w.k[2] - sign * hs[2]],
                amplitude: w.amplitude,
            });
        }
        Ok(s)
    }

    /// On-shell four-momentum of a lattice index.
    pub fn momentum(&self, grid: &BoxGrid, index: [i32; 3]) -> FourMomentum {
        let k = grid.momentum(index);
        FourMomentum::new(omega(k, self.mass), k[0], k[1], k[2])
    }
}

/// Translates `field` by `h` and extracts the coefficient of `f_{p-h}`.
/// Equals [`extract_coefficient`] of the untranslated field at `p` whenever
/// no other wave of the translated field shares the wave vector `p - h`.
pub fn translate_and_extract(field: &ModeField, h: &FourMomentum, p: &FourMomentum, grid: BoxGrid, x0: f64) -> Result<Complex64> {
    let shifted = field.translated_snapshot(h, grid, x0)?;
    extract_shifted(&shifted, p, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> BoxGrid {
        BoxGrid::new(3.0, 16).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(BoxGrid::new(1.0, 15).is_err());
        assert!(BoxGrid::new(1.0, 8).is_err());
        assert!(BoxGrid::new(0.0, 16).is_err());
        let g = grid();
        assert_eq!(g.lattice_index(g.momentum([1, -2, 3])).unwrap(), [1, -2, 3]);
        assert!(matches!(g.lattice_index([0.1, 0.0, 0.0]), Err(Error::OffLatticeShift(_))));
    }

    #[test]
    fn rest_mode_norm() {
        let g = grid();
        let f = PlaneMode::new(&g, [0, 0, 0], 1.0, FourMomentum::ZERO, c(1.0, 0.0)).unwrap();
        let ip = mode_inner_product(&f, &f, g, 0.3).unwrap();
        assert!((ip - c(2.0 * g.volume(), 0.0)).norm() < 1e-10 * g.volume());
    }

    #[test]
    fn shifted_mode_norm() {
        let g = grid();
        let h = FourMomentum::new(0.4, 0.0, 0.0, 0.0);
        let f = PlaneMode::new(&g, [1, 0, -1], 0.7, h, c(1.0, 0.0)).unwrap();
        let ip = mode_inner_product(&f, &f, g, 1.1).unwrap();
        let expected = 2.0 * (f.p.q0() - 0.4) * g.volume();
        assert!((ip - expected).norm() <= 1e-10 * expected.abs());
    }

    #[test]
    fn unconjugated_pairings_vanish_without_spatial_shift() {
        let g = grid();
        let h = FourMomentum::new(0.3, 0.0, 0.0, 0.0);
        let a = PlaneMode::new(&g, [1, 2, 0], 0.5, h, c(1.0, 0.0)).unwrap();
        let b = PlaneMode::new(&g, [-1, -2, 0], 0.5, h, c(1.0, 0.0)).unwrap();
        let (sa, sb) = (a.snapshot(g, 0.2), b.snapshot(g, 0.2));
        let scale = 2.0 * a.energy() * g.volume();
        assert!(plain_pairing(&sa, &sb).unwrap().norm() <= 1e-10 * scale);
        assert!(conjugate_pairing(&sa, &sb).unwrap().norm() <= 1e-10 * scale);
        assert!(plain_pairing(&sa, &sa).unwrap().norm() <= 1e-10 * scale);
    }

    #[test]
    fn unconjugated_pairing_antipodal_exception() {
        // With a spatial shift, p' = 2h - p pairs with p unless |p'| = |p|.
        let g = grid();
        let h = FourMomentum(std::array::from_fn(|i| if i == 1 { g.momentum([1, 0, 0])[0] } else { 0.0 }));
        let p = PlaneMode::new(&g, [0, 1, 0], 0.5, h, c(1.0, 0.0)).unwrap();
        let q = PlaneMode::new(&g, [2, -1, 0], 0.5, h, c(1.0, 0.0)).unwrap();
        let v = plain_pairing(&p.snapshot(g, 0.0), &q.snapshot(g, 0.0)).unwrap();
        let expected = (q.energy() - p.energy()) * g.volume();
        assert!((v - expected).norm() < 1e-10 * g.volume());
        assert!(expected.abs() > 1e-3);
    }

    #[test]
    fn extraction_examples() {
        let g = grid();
        let m = 0.8;
        let field = ModeField::charged(m, vec![([1, 0, 0], c(0.3, -0.2)), ([0, -2, 1], c(-1.0, 0.5))], vec![]);
        let s = field.snapshot(g, 0.7);
        for (idx, a) in &field.particles {
            let got = extract_coefficient(&s, &field.momentum(&g, *idx)).unwrap();
            assert!((got - a).norm() < 1e-10);
        }
        let zero = Snapshot::zeros(g, 0.0);
        assert_eq!(extract_coefficient(&zero, &field.momentum(&g, [1, 1, 1])).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn degenerate_normalization() {
        let g = grid();
        let p = FourMomentum::new(1.0, 0.0, 0.0, 0.0);
        let h = FourMomentum::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(extract_shifted(&Snapshot::zeros(g, 0.0), &p, &h), Err(Error::DegenerateNormalization));
    }

    #[test]
    fn translation_examples() {
        let g = grid();
        let m = 1.0;
        let field = ModeField::charged(m, vec![([1, 0, 0], c(0.4, 0.1))], vec![]);
        let p = field.momentum(&g, [1, 0, 0]);
        let a0 = extract_coefficient(&field.snapshot(g, 0.0), &p).unwrap();
        let same = translate_and_extract(&field, &FourMomentum::ZERO, &p, g, 0.0).unwrap();
        assert_eq!(same, a0);
        let step = g.momentum([0, 1, 0]);
        let h = FourMomentum::new(0.2, step[0], step[1], step[2]);
        let moved = translate_and_extract(&field, &h, &p, g, 0.5).unwrap();
        assert!((moved - c(0.4, 0.1)).norm() < 1e-10);
        assert!(matches!(
            translate_and_extract(&field, &FourMomentum::new(0.0, 0.1, 0.0, 0.0), &p, g, 0.0),
            Err(Error::OffLatticeShift(_))
        ));
    }

    #[test]
    fn neutral_translation_stays_real() {
        let g = grid();
        let field = ModeField::neutral(0.5, vec![([1, 0, 0], c(0.4, 0.1)), ([0, 2, -1], c(-0.2, 0.3))]);
        assert!(field.snapshot(g, 0.3).max_imaginary() < 1e-12);
        let step = g.momentum([1, 1, 0]);
        let h = FourMomentum::new(0.3, step[0], step[1], step[2]);
        let s = field.translated_snapshot(&h, g, 0.3).unwrap();
        assert!(s.max_imaginary() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn distinct_lattice_modes_are_orthogonal(a in prop::array::uniform3(-3i32..4), b in prop::array::uniform3(-3i32..4), x0 in -2.0f64..2.0) {
            prop_assume!(a != b);
            let g = grid();
            let fa = PlaneMode::new(&g, a, 1.0, FourMomentum::ZERO, c(1.0, 0.0)).unwrap();
            let fb = PlaneMode::new(&g, b, 1.0, FourMomentum::ZERO, c(1.0, 0.0)).unwrap();
            let v = mode_inner_product(&fa, &fb, g, x0).unwrap();
            prop_assert!(v.norm() <= 1e-10 * 2.0 * fa.p.q0() * g.volume());
        }
    }
}

//! Seeded random inputs shared by the verification suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atlas::Branch;
use crate::conformal::{ConformalElement, ElementKind};
use crate::momentum::{FourMomentum, LorentzMatrix, ScaleM};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn int(&mut self, lo: i32, hi: i32) -> i32 {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    pub fn branch(&mut self) -> Branch {
        if self.coin() {
            Branch::Internal
        } else {
            Branch::External
        }
    }

    pub fn scale(&mut self) -> ScaleM {
        ScaleM::new(self.uniform(0.5, 2.0)).expect("positive")
    }

    /// Components uniform in `[-r, r]`.
    pub fn momentum(&mut self, r: f64) -> FourMomentum {
        FourMomentum(std::array::from_fn(|_| self.uniform(-r, r)))
    }

    pub fn complex(&mut self, r: f64) -> Complex64 {
        Complex64::new(self.uniform(-r, r), self.uniform(-r, r))
    }

    pub fn index(&mut self, r: i32) -> [i32; 3] {
        std::array::from_fn(|_| self.int(-r, r))
    }

    /// Boost along a random axis followed by a rotation about another.
    pub fn lorentz(&mut self) -> LorentzMatrix {
        let b = LorentzMatrix::boost(self.int(1, 3) as usize, self.uniform(-1.0, 1.0)).expect("valid axis");
        let r = LorentzMatrix::rotation(self.int(1, 3) as usize, self.uniform(-3.0, 3.0)).expect("valid axis");
        r.compose(&b)
    }

    /// Element of the given kind with parameters scaled to `m`.
    pub fn element(&mut self, kind: ElementKind, m: ScaleM) -> ConformalElement {
        let mv = m.value();
        match kind {
            ElementKind::Translation => ConformalElement::Translation { h: self.momentum(mv) },
            ElementKind::Lorentz => ConformalElement::Lorentz(self.lorentz()),
            ElementKind::Dilatation => ConformalElement::Dilatation { lambda: self.uniform(-1.0, 1.0) },
            ElementKind::Inversion => ConformalElement::Inversion,
            ElementKind::SpecialConformal => ConformalElement::SpecialConformal { b: self.momentum(0.3 * mv) },
        }
    }
}

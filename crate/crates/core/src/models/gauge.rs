//! Charged-scalar source in a background gauge field,
//! `j = (ie ∂·A + ie A·∂ - e² A·A) φ`, for plane waves `a e^{-iqx}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::fifth::SpectralMode;
use crate::momentum::FourMomentum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceTerm {
    /// Power of the charge.
    pub order: u32,
    pub mode: SpectralMode,
}

/// Output modes of the source for scalar `phi` and gauge mode `a` with
/// polarization `eps`. The linear term sits at `q + k` with amplitude
/// `e (k + 2q)·ε a_A a_φ`, the quadratic one at `q + 2k` with
/// `-e² ε·ε a_A² a_φ`.
pub fn sed_source(phi: &SpectralMode, a: &SpectralMode, eps: &FourMomentum, e: f64) -> Vec<SourceTerm> {
    if e == 0.0 {
        return Vec::new();
    }
    let (q, k) = (phi.q, a.q);
    let linear = Complex64::from(e * (k + q * 2.0).dot(eps)) * a.amplitude * phi.amplitude;
    let quadratic = Complex64::from(-e * e * eps.dot(eps)) * a.amplitude * a.amplitude * phi.amplitude;
    vec![
        SourceTerm {
            order: 1,
            mode: SpectralMode { q: q + k, q5: phi.q5 + a.q5, amplitude: linear, branch: phi.branch },
        },
        SourceTerm {
            order: 2,
            mode: SpectralMode { q: q + k * 2.0, q5: phi.q5 + 2.0 * a.q5, amplitude: quadratic, branch: phi.branch },
        },
    ]
}

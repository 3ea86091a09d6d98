use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scale parameter must be finite and strictly positive, got {0}")]
    InvalidScale(f64),

    #[error("inversion of a lightlike momentum (q^2 = {q_sq:e})")]
    LightlikeInversion { q_sq: f64 },

    #[error("special conformal denominator vanishes ({denominator:e})")]
    SingularSpecialConformal { denominator: f64 },

    #[error("matrix is not a Lorentz transformation (residual {residual:e})")]
    NotLorentz { residual: f64 },

    #[error("matrix does not preserve the (2,4) metric (residual {residual:e})")]
    NotPseudoOrthogonal { residual: f64 },

    #[error("generator is not antisymmetric (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },

    #[error("word step {index} failed: {source}")]
    AtStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("lift requires a nonzero projective scale kappa_plus")]
    ZeroKappaPlus,

    #[error("cone vector is at projective infinity (kappa_5 + kappa_6 = {sum:e})")]
    ProjectiveInfinity { sum: f64 },

    #[error("dilatation parameter is undefined at q^2 = 0")]
    LambdaUndefined,

    #[error("momentum is off the {branch} shell: radicand {radicand:e}")]
    OffShell { branch: &'static str, radicand: f64 },

    #[error("profile integration diverged at x5 = {x5}")]
    StepDiverged { x5: f64 },

    #[error("resonant pole of the source relation at q5 = {q5}")]
    ResonantPole { q5: f64 },

    #[error("profiles are anchored at different points ({left} vs {right})")]
    AnchorMismatch { left: f64, right: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shift {0:?} is not on the momentum lattice")]
    OffLatticeShift([f64; 3]),

    #[error("mode normalization 2(p0 - h0) vanishes")]
    DegenerateNormalization,

    #[error("no real branch: |pi| = {pi_norm} exceeds f_pi = {f_pi}")]
    NoRealBranch { pi_norm: f64, f_pi: f64 },

    #[error("pion field too close to the 1/pi^2 pole (|pi| = {pi_norm:e})")]
    PionPole { pi_norm: f64 },

    #[error("sigma field vanishes; the source is singular at |pi| = f_pi")]
    SigmaZero,

    #[error("least-squares fit is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_step(index: usize, source: Error) -> Self {
        Error::AtStep {
            index,
            source: Box::new(source),
        }
    }
}

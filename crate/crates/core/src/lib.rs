//! Momentum-space conformal group, its six-dimensional cone realization, the
//! two-hyperboloid atlas, fifth-coordinate constraint dynamics, mode
//! normalization checks and three symmetry-breaking potentials.

pub mod atlas;
pub mod cone;
pub mod conformal;
pub mod error;
pub mod fifth;
pub mod models;
pub mod modes;
pub mod momentum;
pub mod numeric;
pub mod sample;
pub mod verify;

pub use atlas::{attach, classify, invert_point, Branch, HyperboloidPoint, Region};
pub use cone::{lift, project, rotation_matrix, ConeVector, SixRotation};
pub use conformal::{apply, apply_word, conjugate_by_inversion, ConformalElement, ConformalWord};
pub use error::{Error, Result};
pub use momentum::{FourMomentum, LorentzMatrix, ScaleM};

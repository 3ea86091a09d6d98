//! Symmetry-breaking interaction terms built on the fifth-coordinate
//! constraint.

pub mod gauge;
pub mod higgs;
pub mod phi4;
pub mod sigma;
mod stationary;

use serde::Serialize;

pub use gauge::{sed_source, SourceTerm};
pub use higgs::HiggsParams;
pub use phi4::Phi4Params;
pub use sigma::{PionVector, SigmaParams};
pub use stationary::{Classification, StationaryPoint};

use crate::atlas::Branch;
use crate::error::Result;

/// A located stationary point together with the statement it is compared
/// against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub statement: &'static str,
    pub location: f64,
    /// What the numerics find at `location`.
    pub finding: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryReport {
    pub points: Vec<StationaryPoint>,
    /// Zeros of the interaction Lagrangian in the search window.
    pub zeros: Vec<f64>,
    pub claims: Vec<Claim>,
}

/// Any of the three scalar models, for scans over a single field value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum PotentialModel {
    Phi4(Phi4Params),
    Sigma(SigmaParams),
    Higgs(HiggsParams),
}

impl PotentialModel {
    /// Interaction Lagrangian on `branch` at field value `x`. For the
    /// σ-model `x` is `|π|`.
    pub fn l_int(&self, x: f64, branch: Branch) -> Result<f64> {
        match self {
            PotentialModel::Phi4(p) => Ok(p.on_branch(branch).l_int(x)),
            PotentialModel::Sigma(p) => p.on_branch(branch).l_int(&PionVector([x, 0.0, 0.0])),
            PotentialModel::Higgs(p) => Ok(p.on_branch(branch).l_int(x)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialModel::Phi4(_) => "phi4",
            PotentialModel::Sigma(_) => "sigma",
            PotentialModel::Higgs(_) => "higgs",
        }
    }
}

//! Orbits and finite-data diagnostics for unique ergodicity.
//!
//! Nothing here decides unique ergodicity; every routine reports a
//! quantitative statistic (discrepancy, Birkhoff deviation, fitted growth
//! exponent, distinct-orbit depth, partition gaps) computed from finite
//! orbits.

mod birkhoff;
mod diagnostic;
mod discrepancy;
mod idoc;
mod orbit;
mod partition;

pub use birkhoff::{
    birkhoff_ladder, deviation_exponent_fit, DeviationFit, LadderSum, TestFunction,
};
pub use diagnostic::{
    default_ladder, minimality_heuristic, orbit_diagnostics, ue_diagnostic, DiagnosticConfig,
    LadderEntry, OrbitDiagnostics, Thresholds, UeReport, UeSummary,
};
pub use discrepancy::{star_discrepancy, star_discrepancy_f64};
pub use idoc::{idoc_check, IdocVerdict};
pub use orbit::{orbit, Orbit, Stepper};
pub use partition::{property_p_profile, PropertyPReport, PropertyPRow};

use crate::iet::IetError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("orbit length must be at least 1")]
    EmptyOrbit,
    #[error("no points given")]
    EmptyInput,
    #[error("start point {0} lies outside [0, 1)")]
    StartOutOfRange(String),
    #[error("ladder must be non-empty, positive and strictly increasing")]
    BadLadder,
    #[error("a deviation fit needs at least 4 ladder points, got {0}")]
    ShortLadder(usize),
    #[error("at least 2 distinct starts are required, got {0}")]
    TooFewStarts(usize),
    #[error("bins must be at least 2, got {0}")]
    TooFewBins(usize),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error(transparent)]
    Iet(#[from] IetError),
}

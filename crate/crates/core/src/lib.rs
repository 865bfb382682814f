//! Vanishing of central values of quartic and sextic twists of elliptic
//! curve L-functions.
//!
//! The pipeline runs `characters` → `gauss` → `lfun` → `discretize` →
//! `census`, with `rmt` supplying the predicted counts.

pub mod arith;
pub mod census;
pub mod characters;
pub mod discretize;
pub mod gauss;
pub mod lfun;
pub mod rings;
pub mod rmt;
pub mod verify;

pub use census::{run_census, CensusConfig, CensusError, CensusSummary};
pub use characters::{DirichletCharacter, FamilySpec, Variant};
pub use discretize::TwistRecord;
pub use lfun::{CoefficientTable, EllipticCurveData, LValue};
pub use num_complex::Complex64;
pub use rings::{EisensteinInt, GaussianInt};

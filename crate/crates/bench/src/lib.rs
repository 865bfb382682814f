//! Shared inputs for the criterion benches.

use ltwist::characters::{enumerate_family, DirichletCharacter, FamilySpec, Variant};
use ltwist::lfun::{terms_needed, CoefficientTable, EllipticCurveData};

pub fn curve() -> EllipticCurveData {
    EllipticCurveData::cremona_11a1()
}

/// Every `step`-th member of a family up to `x`.
pub fn sample(order: u8, variant: Variant, x: u64, step: usize) -> Vec<DirichletCharacter> {
    let spec = FamilySpec::new(order, variant).coprime_to(11);
    enumerate_family(spec, x).step_by(step.max(1)).collect()
}

/// Coefficients long enough for conductors up to `q` at `tol`.
pub fn coefficients(q: u64, tol: f64) -> CoefficientTable {
    let e = curve();
    CoefficientTable::build(&e, terms_needed(&e, q, tol))
}

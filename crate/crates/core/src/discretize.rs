//! From `L(E, 1, χ)` to the algebraic value `L^alg`, the constant `k_E`,
//! and the rational integer `n_E(χ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::gcd;
use crate::characters::{variant_tag, DirichletCharacter, Variant};
use crate::lfun::{EllipticCurveData, LValue, LfunError};
use crate::rings::root_of_unity;

/// Records whose `n_E` is further than this from an integer are rejected.
pub const QUALITY_GATE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum DiscretizeError {
    #[error("no period available for curve {0}")]
    PeriodMissing(String),
    #[error("k_E degenerates for w_E = -1 and chi(N_E) = 1 ({0})")]
    DegenerateK(String),
    #[error("conductor {q} shares a factor with N_E = {n}")]
    ConductorNotCoprime { q: u64, n: u64 },
    #[error("order {0} is not even")]
    OddOrder(u8),
    #[error("n_E for {label} is {value:.6} with quality {quality:.3e}")]
    IntegralityFailure { label: String, value: f64, quality: f64 },
    #[error(transparent)]
    Lfun(#[from] LfunError),
}

/// `Ω₊` for even `χ`, `Ω₋ = i|Ω₋|` for odd `χ`.
pub fn omega_epsilon(periods: (f64, f64), parity: i8) -> Complex64 {
    if parity >= 0 {
        Complex64::new(periods.0, 0.0)
    } else {
        Complex64::new(0.0, periods.1)
    }
}

/// `u = w_E χ(-1) χ(N_E)` as a power of `ζ_12`; `L^alg = u conj(L^alg)`.
pub fn reflection_exponent(e: &EllipticCurveData, chi: &DirichletCharacter) -> Option<u8> {
    let mut u = chi.value12(e.conductor as i64)?;
    if e.root_number < 0 {
        u += 6;
    }
    if chi.parity() < 0 {
        u += 6;
    }
    Some(u % 12)
}

/// Both sides of the definition of `L^alg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicValue {
    /// `L q / (τ(χ) Ω_ε)`
    pub value: Complex64,
    /// `ε L τ(χ̄) / Ω_ε`
    pub check: Complex64,
}

impl AlgebraicValue {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.value.norm().max(self.check.norm());
        if scale == 0.0 {
            0.0
        } else {
            (self.value - self.check).norm() / scale
        }
    }
}

pub fn algebraic_l_value(
    chi: &DirichletCharacter,
    l: Complex64,
    tau: Complex64,
    tau_conj: Complex64,
    periods: (f64, f64),
) -> AlgebraicValue {
    let omega = omega_epsilon(periods, chi.parity());
    let q = chi.conductor() as f64;
    AlgebraicValue {
        value: l * q / (tau * omega),
        check: l * tau_conj * chi.parity() as f64 / omega,
    }
}

/// `k_E` exactly as tabulated for even order, with `u = w_E χ(N_E)`:
/// `1 + u` for `u ≠ -1`, `ζ^{ℓ/4}` or `ζ - ζ^{-1}` for `u = -1` and
/// `w_E = 1`, `ζ + ζ^{-1}` or `1 - χ(N_E)` for `w_E = -1`.
pub fn k_e_constant(e: &EllipticCurveData, chi: &DirichletCharacter) -> Result<Complex64, DiscretizeError> {
    let q = chi.conductor();
    if gcd(q, e.conductor) != 1 {
        return Err(DiscretizeError::ConductorNotCoprime { q, n: e.conductor });
    }
    let ell = chi.order();
    if ell % 2 == 1 {
        return Err(DiscretizeError::OddOrder(ell));
    }
    let at_n = chi.value(e.conductor as i64);
    let minus_one = chi.value12(e.conductor as i64) == Some(6);
    let zeta = root_of_unity(ell as u32, 1);
    let one = Complex64::new(1.0, 0.0);
    let k = match (e.root_number, minus_one) {
        (1, false) => one + at_n,
        (1, true) if ell.is_multiple_of(4) => root_of_unity(ell as u32, ell as u32 / 4),
        (1, true) => zeta - zeta.inv(),
        (_, true) => zeta + zeta.inv(),
        (_, false) => one - at_n,
    };
    if k.norm() < 1e-9 {
        return Err(DiscretizeError::DegenerateK(chi.label().to_string()));
    }
    Ok(k)
}

/// Generator of `{z ∈ ℤ[ζ_ℓ] : z = u conj(z)}` with `u` from
/// [`reflection_exponent`].
///
/// For even `χ` this agrees with [`k_e_constant`] up to a real factor,
/// except at `u = 1`, where the table gives 2 and the generator is 1.
pub fn k_e_generator(e: &EllipticCurveData, chi: &DirichletCharacter) -> Result<Complex64, DiscretizeError> {
    let q = chi.conductor();
    if gcd(q, e.conductor) != 1 {
        return Err(DiscretizeError::ConductorNotCoprime { q, n: e.conductor });
    }
    let ell = chi.order();
    if ell % 2 == 1 {
        return Err(DiscretizeError::OddOrder(ell));
    }
    let u = reflection_exponent(e, chi).expect("coprime");
    let zeta = root_of_unity(ell as u32, 1);
    Ok(match u {
        0 => Complex64::new(1.0, 0.0),
        6 if ell.is_multiple_of(4) => root_of_unity(ell as u32, ell as u32 / 4),
        6 => zeta - zeta.inv(),
        _ => Complex64::new(1.0, 0.0) + root_of_unity(12, u as u32),
    })
}

/// `(Re(L^alg/k), nearest integer, distance to it + |Im(L^alg/k)|)`.
pub fn n_e_of(l_alg: Complex64, k: Complex64) -> (f64, i64, f64) {
    let r = l_alg / k;
    let n = r.re.round();
    (r.re, n as i64, (r.re - n).abs() + r.im.abs())
}

/// One `(E, χ)` pair after discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistRecord {
    pub curve_label: String,
    pub conductor: u64,
    pub conrey_index: u64,
    pub order: u8,
    pub variant: Variant,
    pub parity: i8,
    pub l_value: Complex64,
    pub epsilon_sign: Complex64,
    pub l_alg: Complex64,
    /// Relative gap between the two expressions for `L^alg`.
    pub alg_gap: f64,
    /// `τ(χ)²/q`.
    pub gauss_phase: Complex64,
    /// Generator `k` with `L^alg = k n_E`.
    pub k_e: Complex64,
    /// The tabulated constant, when it does not degenerate.
    pub k_e_table: Option<Complex64>,
    pub n_e_real: f64,
    pub n_e_int: i64,
    pub vanished: bool,
    pub quality: f64,
    pub truncation_bound: f64,
    pub terms_used: usize,
}

impl TwistRecord {
    pub fn accepted(&self) -> bool {
        self.quality <= QUALITY_GATE
    }

    /// `c_{E,ℓ} = |Ω_ε k_E|`; below `c/(2√q)` a value must vanish.
    pub fn vanishing_threshold(&self, periods: (f64, f64)) -> f64 {
        omega_epsilon(periods, self.parity).norm() * self.k_e.norm() / (2.0 * (self.conductor as f64).sqrt())
    }
}

pub fn is_vanishing(record: &TwistRecord) -> bool {
    record.n_e_int == 0
}

/// Builds the record for `χ` from its L-value and Gauss sums.
pub fn discretize_twist(
    e: &EllipticCurveData,
    chi: &DirichletCharacter,
    l: &LValue,
    epsilon_sign: Complex64,
    tau: Complex64,
    tau_conj: Complex64,
    periods: (f64, f64),
) -> Result<TwistRecord, DiscretizeError> {
    let alg = algebraic_l_value(chi, l.value, tau, tau_conj, periods);
    let k_e = k_e_generator(e, chi)?;
    let k_e_table = match k_e_constant(e, chi) {
        Ok(k) => Some(k),
        Err(DiscretizeError::DegenerateK(_)) => None,
        Err(other) => return Err(other),
    };
    let (n_real, n_int, quality) = n_e_of(alg.value, k_e);
    Ok(TwistRecord {
        curve_label: e.label.clone(),
        conductor: chi.conductor(),
        conrey_index: chi.conrey_index(),
        order: chi.order(),
        variant: variant_tag(chi),
        parity: chi.parity(),
        l_value: l.value,
        epsilon_sign,
        l_alg: alg.value,
        alg_gap: alg.relative_gap(),
        gauss_phase: tau * tau / chi.conductor() as f64,
        k_e,
        k_e_table,
        n_e_real: n_real,
        n_e_int: n_int,
        vanished: n_int == 0,
        quality,
        truncation_bound: l.truncation_bound,
        terms_used: l.terms_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_family, FamilySpec};
    use crate::gauss::GaussEngine;
    use crate::lfun::{l_value_with_table, terms_needed, twist_sign, CoefficientTable};

    #[test]
    fn k_constants() {
        let e = EllipticCurveData::cremona_11a1();
        let spec4 = FamilySpec::new(4, Variant::All).coprime_to(11);
        let spec6 = FamilySpec::new(6, Variant::All).coprime_to(11);
        let mut seen = [false; 3];
        for chi in enumerate_family(spec4, 200).chain(enumerate_family(spec6, 200)) {
            let k = k_e_constant(&e, &chi).unwrap();
            assert!(k.norm() <= 2.0 + 1e-12);
            match chi.value12(11) {
                Some(6) if chi.order() == 4 => {
                    assert!((k - Complex64::new(0.0, 1.0)).norm() < 1e-12);
                    seen[0] = true;
                }
                Some(6) => {
                    assert!((k - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
                    seen[1] = true;
                }
                Some(0) => {
                    assert!((k - Complex64::new(2.0, 0.0)).norm() < 1e-12);
                    seen[2] = true;
                }
                _ => {}
            }
        }
        assert_eq!(seen, [true; 3]);
        let bad = DirichletCharacter::from_conrey(11, 10).unwrap();
        assert!(matches!(
            k_e_constant(&e, &bad),
            Err(DiscretizeError::ConductorNotCoprime { .. })
        ));
        let rank_one = EllipticCurveData::cremona_37a1();
        let chi = enumerate_family(FamilySpec::new(4, Variant::All).coprime_to(37), 2000)
            .find(|c| c.value12(37) == Some(0))
            .unwrap();
        assert!(matches!(
            k_e_constant(&rank_one, &chi),
            Err(DiscretizeError::DegenerateK(_))
        ));
    }

    #[test]
    fn generator_against_table() {
        for e in [EllipticCurveData::cremona_11a1(), EllipticCurveData::cremona_37a1()] {
            for ell in [4u8, 6] {
                let spec = FamilySpec::new(ell, Variant::All).coprime_to(e.conductor);
                for chi in enumerate_family(spec, 300) {
                    let g = k_e_generator(&e, &chi).unwrap();
                    let u = root_of_unity(12, reflection_exponent(&e, &chi).unwrap() as u32);
                    assert!((g - u * g.conj()).norm() < 1e-12);
                    assert!(g.norm() <= 2.0);
                    if chi.parity() < 0 {
                        continue;
                    }
                    match k_e_constant(&e, &chi) {
                        Ok(k) if (u - 1.0).norm() < 1e-9 && e.root_number == 1 => {
                            assert!((k - 2.0 * g).norm() < 1e-12)
                        }
                        Ok(k) if e.root_number == 1 => assert!((k - g).norm() < 1e-12),
                        Ok(k) => assert!((k / g).im.abs() < 1e-12),
                        Err(_) => assert!((u + 1.0).norm() < 1e-9 || (ell == 4 && (u - 1.0).norm() < 1e-9)),
                    }
                }
            }
        }
    }

    #[test]
    fn zero_l_value() {
        let alg = algebraic_l_value(
            &DirichletCharacter::from_conrey(5, 2).unwrap(),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(1.0, -2.0),
            (1.0, 1.0),
        );
        assert_eq!(alg.value, Complex64::new(0.0, 0.0));
        let (r, n, q) = n_e_of(alg.value, Complex64::new(2.0, 0.0));
        assert_eq!((r, n, q), (0.0, 0, 0.0));
    }

    #[test]
    fn small_twists_are_integral() {
        let e = EllipticCurveData::cremona_11a1();
        let periods = e.periods().unwrap();
        let engine = GaussEngine::new();
        let tol = 1e-12;
        let coeffs = CoefficientTable::build(&e, terms_needed(&e, 200, tol));
        for ell in [4u8, 6] {
            for chi in enumerate_family(FamilySpec::new(ell, Variant::All).coprime_to(11), 200) {
                let tau = engine.tau(&chi);
                let tau_conj = engine.tau(&chi.conj());
                let eps = twist_sign(&e, &chi, tau * tau);
                let l = l_value_with_table(&e, &chi, &chi.table(), &coeffs, eps, tol).unwrap();
                let rec = discretize_twist(&e, &chi, &l, eps, tau, tau_conj, periods).unwrap();
                let alg = algebraic_l_value(&chi, l.value, tau, tau_conj, periods);
                assert!(alg.relative_gap() < 1e-8);
                let scaled = l.value.norm() * (chi.conductor() as f64).sqrt() / periods_for(&rec, periods);
                assert!((scaled - alg.value.norm()).abs() < 1e-8 * scaled.max(1.0));
                assert!(rec.accepted(), "{chi}: n_E = {} quality {}", rec.n_e_real, rec.quality);
                if rec.vanished {
                    assert!(l.value.norm() < rec.vanishing_threshold(periods));
                }
            }
        }
    }

    fn periods_for(rec: &TwistRecord, periods: (f64, f64)) -> f64 {
        omega_epsilon(periods, rec.parity).norm()
    }
}

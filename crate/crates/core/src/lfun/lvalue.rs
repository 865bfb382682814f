use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CoefficientTable, EllipticCurveData, LfunError};
use crate::arith::gcd;
use crate::characters::{DirichletCharacter, ZERO};
use crate::rings::root_of_unity;

/// Hard cap on the series length per twist.
pub const N_MAX_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub value: Complex64,
    pub truncation_bound: f64,
    pub terms_used: usize,
}

/// `A = q √N / 2π`.
pub fn afe_scale(e: &EllipticCurveData, q: u64) -> f64 {
    q as f64 * (e.conductor as f64).sqrt() / TAU
}

/// Bound on `(1 + |ε|) Σ_{n > m} (|a_n|/n) e^{-n/A}` using `|a_n| ≤ n`.
fn tail_bound(a: f64, m: usize) -> f64 {
    2.0 * (-(m as f64 + 1.0) / a).exp() / (1.0 - (-1.0 / a).exp())
}

fn terms_for(a: f64, tol: f64) -> usize {
    let mut m = (a * (2.0 * a.max(1.0) / tol).ln()).ceil().max(1.0) as usize;
    while tail_bound(a, m) >= tol {
        m += (a.ceil() as usize).max(1);
    }
    m
}

/// `S = Σ_{n ≤ m} a_n χ(n) n^{-1} e^{-n/A}`, summed per value class of χ.
fn smoothed_sum(coeffs: &CoefficientTable, table: &[u8], a: f64, m: usize) -> Complex64 {
    let q = table.len();
    let mut class = [0f64; 12];
    let mut comp = [0f64; 12];
    let r = (-1.0 / a).exp();
    let mut w = 1.0;
    let mut residue = 0usize;
    for n in 1..=m {
        if n % 256 == 0 {
            w = (-(n as f64) / a).exp();
        } else {
            w *= r;
        }
        residue += 1;
        if residue == q {
            residue = 0;
        }
        let t = table[residue];
        let an = coeffs.a[n];
        if t == ZERO || an == 0 {
            continue;
        }
        let k = t as usize;
        let y = an as f64 * w / n as f64 - comp[k];
        let s = class[k] + y;
        comp[k] = (s - class[k]) - y;
        class[k] = s;
    }
    class
        .iter()
        .enumerate()
        .map(|(k, &c)| root_of_unity(12, k as u32) * c)
        .sum()
}

/// `L(E, 1, χ) = S + ε·conj(S)` with `ε = w_E χ(N_E) τ(χ)²/q`, where the
/// `χ̄` half equals `conj(S)` because the `a_n` are real.
pub fn l_value_with_table(
    e: &EllipticCurveData,
    chi: &DirichletCharacter,
    table: &[u8],
    coeffs: &CoefficientTable,
    epsilon: Complex64,
    tol: f64,
) -> Result<LValue, LfunError> {
    let q = chi.conductor();
    if gcd(q, e.conductor) != 1 {
        return Err(LfunError::ConductorNotCoprime { q, n: e.conductor });
    }
    let a = afe_scale(e, q);
    let m = terms_for(a, tol);
    if m > N_MAX_CAP {
        return Err(LfunError::ToleranceUnreachable { needed: m, cap: N_MAX_CAP });
    }
    if m > coeffs.n_max {
        return Err(LfunError::TableTooShort { needed: m, have: coeffs.n_max });
    }
    let s = smoothed_sum(coeffs, table, a, m);
    Ok(LValue {
        value: s + epsilon * s.conj(),
        truncation_bound: tail_bound(a, m),
        terms_used: m,
    })
}

/// The root number of the twist, `w_E χ(N_E) τ(χ)²/q`.
pub fn twist_sign(e: &EllipticCurveData, chi: &DirichletCharacter, tau_sq: Complex64) -> Complex64 {
    chi.value(e.conductor as i64) * tau_sq * (e.root_number as f64 / chi.conductor() as f64)
}

/// Convenience wrapper: builds the value table and Gauss sum itself.
pub fn l_value_afe(
    e: &EllipticCurveData,
    chi: &DirichletCharacter,
    coeffs: &CoefficientTable,
    tol: f64,
) -> Result<LValue, LfunError> {
    let table = chi.table();
    let roots = crate::gauss::additive_roots(chi.conductor());
    let tau = crate::gauss::direct_from_table(&table, &roots);
    let eps = twist_sign(e, chi, tau * tau);
    l_value_with_table(e, chi, &table, coeffs, eps, tol)
}

/// Series length for a twist of conductor `q` at tolerance `tol`.
pub fn terms_needed(e: &EllipticCurveData, q: u64, tol: f64) -> usize {
    terms_for(afe_scale(e, q), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    // L(11a1, 1) at 28 digits, from an independent mpmath evaluation.
    const L_11A1: f64 = 0.253_841_860_855_910_7;

    #[test]
    fn untwisted_value_11a1() {
        let e = EllipticCurveData::cremona_11a1();
        let coeffs = CoefficientTable::build(&e, terms_needed(&e, 1, 1e-14));
        let l = l_value_afe(&e, &DirichletCharacter::trivial(), &coeffs, 1e-14).unwrap();
        assert!((l.value.re - L_11A1).abs() < 1e-13, "{}", l.value);
        assert!(l.value.im.abs() < 1e-15);
        let (omega, _) = super::super::compute_periods(&e).unwrap();
        assert!((l.value.re / omega - 0.2).abs() < 1e-12);
    }

    #[test]
    fn untwisted_rank_one_vanishes() {
        let e = EllipticCurveData::cremona_37a1();
        let coeffs = CoefficientTable::build(&e, terms_needed(&e, 1, 1e-12));
        let l = l_value_afe(&e, &DirichletCharacter::trivial(), &coeffs, 1e-12).unwrap();
        assert!(l.value.norm() < 1e-12);
    }

    #[test]
    fn errors() {
        let e = EllipticCurveData::cremona_11a1();
        let coeffs = CoefficientTable::build(&e, 20);
        let chi = DirichletCharacter::from_conrey(5, 2).unwrap();
        assert!(matches!(
            l_value_afe(&e, &chi, &coeffs, 1e-12),
            Err(LfunError::TableTooShort { .. })
        ));
        let chi = DirichletCharacter::from_conrey(11, 10).unwrap();
        assert!(matches!(
            l_value_afe(&e, &chi, &coeffs, 1e-12),
            Err(LfunError::ConductorNotCoprime { .. })
        ));
    }

    #[test]
    fn truncation_grows_like_a_log() {
        let e = EllipticCurveData::cremona_11a1();
        for q in [5u64, 50, 500, 5000] {
            for tol in [1e-6, 1e-10, 1e-14] {
                let a = afe_scale(&e, q);
                let m = terms_needed(&e, q, tol) as f64;
                let model = a * (1.0 / tol).ln();
                assert!(m / model < 3.0 && model / m < 3.0, "q={q} tol={tol}");
                assert!(tail_bound(a, m as usize) < tol);
            }
        }
    }
}

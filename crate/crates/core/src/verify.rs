//! Invariant sweeps over every layer, sized to run in seconds (`quick`) or
//! minutes. Used by the `verify` command.

use std::collections::HashSet;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{is_prime, SpfSieve};
use crate::characters::{
    characters_of_conductor, count_family, enumerate_family, quartic_from_beta, DirichletCharacter, FamilySpec,
    Variant,
};
use crate::discretize::{discretize_twist, QUALITY_GATE};
use crate::gauss::{direct_from_table, additive_roots, parity_by_evaluation, GaussEngine};
use crate::lfun::{
    ap_brute_force, ap_point_count, l_value_afe, l_value_with_table, terms_needed, twist_sign, CoefficientTable,
    EllipticCurveData,
};
use crate::rings::{quartic_residue_symbol, split_prime_gaussian, GaussianInt};
use crate::rmt::{barnes_g_half, m_u, zeta_prime_minus_one};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn(bool) -> Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("residue-symbols", residue_symbols),
    ("families", families),
    ("gauss-sums", gauss_sums),
    ("coefficients", coefficients),
    ("l-values", l_values),
    ("discretization", discretization),
    ("rmt", rmt),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs the checks whose names contain `filter` (all when `None`).
pub fn run_checks(quick: bool, filter: Option<&str>) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .filter(|(name, _)| filter.is_none_or(|f| name.contains(f)))
        .map(|&(name, check)| {
            let t = Instant::now();
            let r = check(quick);
            CheckOutcome {
                name,
                passed: r.is_ok(),
                detail: r.unwrap_or_else(|e| e),
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn residue_symbols(quick: bool) -> Result<String, String> {
    let limit = if quick { 400 } else { 3000 };
    let mut n = 0;
    for p in (5..limit).filter(|&p| p % 4 == 1 && is_prime(p)) {
        let (pi, _) = split_prime_gaussian(p).map_err(|e| e.to_string())?;
        let chi = quartic_from_beta(pi).map_err(|e| e.to_string())?;
        ensure(chi.conductor() == p && chi.order() == 4, || format!("χ_π for p = {p}"))?;
        for a in 1..p.min(60) as i64 {
            let s = quartic_residue_symbol(GaussianInt::new(a as i128, 0), pi).map_err(|e| e.to_string())?;
            ensure((s.to_complex() - chi.value(a)).norm() < 1e-12, || format!("[{a}/π] for p = {p}"))?;
        }
        n += 1;
    }
    Ok(format!("{n} split primes"))
}

fn families(quick: bool) -> Result<String, String> {
    let x = if quick { 1000 } else { 5000 };
    let sieve = SpfSieve::new(x);
    let mut total = 0;
    for order in [4u8, 6] {
        let specs = [Variant::Prime, Variant::Totally, Variant::All].map(|v| FamilySpec::new(order, v));
        let sets: Vec<HashSet<(u64, u64)>> = specs
            .iter()
            .map(|s| {
                enumerate_family(*s, x)
                    .map(|c| (c.conductor(), c.conrey_index()))
                    .collect()
            })
            .collect();
        ensure(sets[0].is_subset(&sets[1]) && sets[1].is_subset(&sets[2]), || {
            format!("nesting fails for order {order}")
        })?;
        for (spec, set) in specs.iter().zip(&sets) {
            ensure(count_family(spec, &[x])[0] == set.len() as u64, || {
                format!("{spec}: count formula disagrees with enumeration")
            })?;
            total += set.len();
        }
        for q in 2..=x {
            for chi in characters_of_conductor(&specs[2], q, &sieve.factor(q)) {
                ensure(parity_by_evaluation(&chi) == chi.parity(), || format!("parity of {}", chi.label()))?;
                ensure(sets[2].contains(&(q, chi.conj().conrey_index())), || {
                    format!("conjugate of {} missing", chi.label())
                })?;
                let again = DirichletCharacter::from_conrey(q, chi.conrey_index()).map_err(|e| e.to_string())?;
                ensure(again == chi, || format!("Conrey round trip of {}", chi.label()))?;
            }
        }
    }
    Ok(format!("{total} characters up to {x}"))
}

fn gauss_sums(quick: bool) -> Result<String, String> {
    let x = if quick { 600 } else { 3000 };
    let engine = GaussEngine::new();
    let chars: Vec<DirichletCharacter> = enumerate_family(FamilySpec::new(4, Variant::All), x)
        .chain(enumerate_family(FamilySpec::new(6, Variant::All).with_sextic_nine(true), x))
        .collect();
    let worst = chars
        .par_iter()
        .map(|chi| {
            let direct = direct_from_table(&chi.table(), &additive_roots(chi.conductor()));
            let closed = engine.tau_sq(chi);
            let q = chi.conductor() as f64;
            let err = (closed - direct * direct).norm() / q;
            let modulus = (direct.norm_sqr() - q).abs() / q;
            err.max(modulus)
        })
        .reduce(|| 0.0, f64::max);
    ensure(worst < 1e-8, || format!("worst relative error {worst:.2e}"))?;
    Ok(format!("{} characters, worst {worst:.1e}", chars.len()))
}

fn coefficients(quick: bool) -> Result<String, String> {
    let n = if quick { 20_000 } else { 200_000 };
    for e in [EllipticCurveData::cremona_11a1(), EllipticCurveData::cremona_37a1()] {
        let t = CoefficientTable::build(&e, n);
        t.check_invariants(e.conductor, 5000)?;
        for p in (2..400).filter(|&p| is_prime(p)) {
            ensure(ap_point_count(&e, p) == ap_brute_force(&e, p), || format!("{} a_{p}", e.label))?;
        }
    }
    Ok(format!("a_n to {n} for 11a1 and 37a1"))
}

fn l_values(quick: bool) -> Result<String, String> {
    let tol = 1e-12;
    let e = EllipticCurveData::cremona_11a1();
    let (omega, _) = e.periods().map_err(|x| x.to_string())?;
    let x = if quick { 150 } else { 400 };
    let coeffs = CoefficientTable::build(&e, terms_needed(&e, x, tol / 100.0));
    let l = l_value_afe(&e, &DirichletCharacter::trivial(), &coeffs, tol).map_err(|x| x.to_string())?;
    ensure((l.value.re / omega - 0.2).abs() < 1e-10, || format!("L(11a1,1)/Ω₊ = {}", l.value.re / omega))?;
    let spec = FamilySpec::new(4, Variant::All).coprime_to(11);
    let chars: Vec<DirichletCharacter> = enumerate_family(spec, x).collect();
    let worst = chars
        .par_iter()
        .map(|chi| -> Result<f64, String> {
            let a = l_value_afe(&e, chi, &coeffs, tol).map_err(|x| x.to_string())?;
            let b = l_value_afe(&e, &chi.conj(), &coeffs, tol).map_err(|x| x.to_string())?;
            let c = l_value_afe(&e, chi, &coeffs, tol / 100.0).map_err(|x| x.to_string())?;
            Ok(((b.value - a.value.conj()).norm()).max((c.value - a.value).norm()) / tol)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    ensure(worst < 10.0, || format!("worst residual {worst:.2} tol"))?;
    Ok(format!("{} twists, worst residual {worst:.2} tol", chars.len()))
}

fn discretization(quick: bool) -> Result<String, String> {
    let tol = 1e-12;
    let e = EllipticCurveData::cremona_11a1();
    let periods = e.periods().map_err(|x| x.to_string())?;
    let x = if quick { 200 } else { 1000 };
    let coeffs = CoefficientTable::build(&e, terms_needed(&e, x, tol));
    let engine = GaussEngine::new();
    let chars: Vec<DirichletCharacter> = [4u8, 6]
        .iter()
        .flat_map(|&o| enumerate_family(FamilySpec::new(o, Variant::All).coprime_to(11), x))
        .collect();
    let recs = chars
        .par_iter()
        .map(|chi| {
            let tau = engine.tau(chi);
            let eps = twist_sign(&e, chi, tau * tau);
            let l = l_value_with_table(&e, chi, &chi.table(), &coeffs, eps, tol).map_err(|x| x.to_string())?;
            let tau_bar = tau.conj() * chi.parity() as f64;
            discretize_twist(&e, chi, &l, eps, tau, tau_bar, periods).map_err(|x| x.to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    let vanished: HashSet<(u64, u64)> = recs
        .iter()
        .filter(|r| r.vanished)
        .map(|r| (r.conductor, r.conrey_index))
        .collect();
    for (r, chi) in recs.iter().zip(&chars) {
        let tag = || format!("{}.{}", r.conductor, r.conrey_index);
        ensure(r.quality <= QUALITY_GATE, || format!("{} quality {:.3}", tag(), r.quality))?;
        ensure(r.alg_gap < 1e-8, || format!("{} L^alg gap {:.1e}", tag(), r.alg_gap))?;
        ensure(vanished.contains(&(r.conductor, chi.conj().conrey_index())) == r.vanished, || {
            format!("{} and its conjugate disagree", tag())
        })?;
        let scaled = r.l_value.norm() * (r.conductor as f64).sqrt()
            / (crate::discretize::omega_epsilon(periods, r.parity) * r.k_e).norm();
        ensure(scaled == 0.0 || scaled >= 0.5 || r.vanished, || format!("{} inside the gap", tag()))?;
    }
    Ok(format!("{} twists, {} vanish", recs.len(), vanished.len()))
}

fn rmt(quick: bool) -> Result<String, String> {
    let n_max = if quick { 200 } else { 1000 };
    for n in 1..=n_max {
        let m0 = m_u(Complex64::new(0.0, 0.0), n).map_err(|x| x.to_string())?;
        let m2 = m_u(Complex64::new(2.0, 0.0), n).map_err(|x| x.to_string())?;
        ensure((m0 - 1.0).norm() < 1e-9, || format!("M_U(0,{n}) = {m0}"))?;
        let want = n as f64 + 1.0;
        ensure((m2 - want).norm() / want < 1e-9, || format!("M_U(2,{n}) = {m2}"))?;
    }
    let g = barnes_g_half();
    let want = (1.5 * zeta_prime_minus_one()).exp() * 2f64.powf(1.0 / 24.0) / std::f64::consts::PI.powf(0.25);
    ensure((g - want).abs() < 1e-12, || format!("G(1/2) = {g}"))?;
    Ok(format!("M_U to N = {n_max}, G(1/2) = {g:.15}"))
}

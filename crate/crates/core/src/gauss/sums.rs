use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GaussError;
use crate::arith::jacobi;
use crate::characters::{
    cubic_beta_of, cubic_from_beta, quartic_beta_of, quartic_from_beta, DirichletCharacter,
    LocalCharacter, ZERO,
};
use crate::rings::{
    quartic_residue_symbol, root_of_unity, split_prime_gaussian, EisensteinInt, GaussianInt,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    Factored,
    ClosedForm,
}

/// A Gauss sum, or the square of one for the closed forms that produce
/// `τ(χ)²` directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussSumValue {
    pub value: Complex64,
    pub conductor: u64,
    pub method: Method,
    pub abs_error_bound: f64,
}

/// `e(r/q)` for `r` in `0..q`.
pub fn additive_roots(q: u64) -> Vec<Complex64> {
    (0..q)
        .map(|r| {
            let (s, c) = (TAU * r as f64 / q as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

fn twelfth_roots() -> [Complex64; 12] {
    std::array::from_fn(|k| root_of_unity(12, k as u32))
}

/// Compensated `Σ_r ζ_12^{t[r]} e(r/q)` over a value table.
pub fn direct_from_table(table: &[u8], roots: &[Complex64]) -> Complex64 {
    debug_assert_eq!(table.len(), roots.len());
    let z = twelfth_roots();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for (&t, &e) in table.iter().zip(roots) {
        if t == ZERO {
            continue;
        }
        let y = z[t as usize] * e - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum
}

fn direct_error_bound(q: u64) -> f64 {
    8.0 * q as f64 * f64::EPSILON
}

/// `τ(χ) = Σ_{r mod q} χ(r) e(r/q)` by O(q) summation.
pub fn gauss_sum_direct(chi: &DirichletCharacter) -> GaussSumValue {
    let q = chi.conductor();
    let value = direct_from_table(&chi.table(), &additive_roots(q));
    GaussSumValue {
        value,
        conductor: q,
        method: Method::Direct,
        abs_error_bound: direct_error_bound(q),
    }
}

fn local_direct(c: &LocalCharacter) -> Complex64 {
    direct_from_table(&c.table(), &additive_roots(c.modulus()))
}

fn twist_factor(chi: &DirichletCharacter, c: &LocalCharacter, power: u32) -> Complex64 {
    let cofactor = chi.conductor() / c.modulus();
    let e = c.value12(cofactor).expect("cofactor is prime to p") as u32;
    root_of_unity(12, e * power % 12)
}

/// `τ(χ) = ∏ χ_i(q/q_i) τ(χ_i)` over the local factors.
pub fn gauss_sum_factored(chi: &DirichletCharacter) -> GaussSumValue {
    let mut value = Complex64::new(1.0, 0.0);
    let mut bound = 0.0;
    for c in chi.locals() {
        value *= twist_factor(chi, c, 1) * local_direct(c);
        bound += direct_error_bound(c.modulus()) / (c.modulus() as f64).sqrt();
    }
    GaussSumValue {
        value,
        conductor: chi.conductor(),
        method: Method::Factored,
        abs_error_bound: bound * (chi.conductor() as f64).sqrt() + 4.0 * f64::EPSILON,
    }
}

/// `(-1)^k` for `β` with `k` distinct prime factors.
fn mu_of(chi: &DirichletCharacter) -> f64 {
    if chi.locals().len().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `τ(χ_β)² = μ(β) χ_β(-1) √N(β) β`.
pub fn tau_sq_closed_totally_quartic(beta: GaussianInt) -> Result<GaussSumValue, GaussError> {
    let chi = quartic_from_beta(beta)?;
    let n = chi.conductor() as f64;
    let sign = mu_of(&chi) * chi.parity() as f64;
    Ok(GaussSumValue {
        value: beta.to_complex() * (sign * n.sqrt()),
        conductor: chi.conductor(),
        method: Method::ClosedForm,
        abs_error_bound: 4.0 * n * f64::EPSILON,
    })
}

/// `τ(χ)² = (-q₄/q₂) q₂ τ(χ_β)²` for `χ = χ₂χ₄` of odd conductor.
pub fn tau_sq_all_quartic(chi: &DirichletCharacter) -> Result<GaussSumValue, GaussError> {
    if chi.order() != 4 {
        return Err(GaussError::WrongOrder(chi.order()));
    }
    if chi.conductor().is_multiple_of(2) {
        return Err(GaussError::EvenConductor(chi.conductor()));
    }
    let chi4 = chi.restrict(|c| c.order() == 4);
    let q2 = chi.conductor() / chi4.conductor();
    let beta = quartic_beta_of(&chi4);
    let base = tau_sq_closed_totally_quartic(beta)?;
    let sym = if q2 == 1 {
        1
    } else {
        jacobi(-(chi4.conductor() as i64), q2)
    };
    Ok(GaussSumValue {
        value: base.value * (sym as f64 * q2 as f64),
        conductor: chi.conductor(),
        method: Method::ClosedForm,
        abs_error_bound: base.abs_error_bound * q2 as f64,
    })
}

/// Both sextic closed forms for a totally sextic `χ = (·/q) χ_β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SexticClosed {
    pub beta: EisensteinInt,
    /// `μ(q) χ₃(2) τ(χ₂) τ(χ₃) β̄ / q`
    pub tau: GaussSumValue,
    /// `χ₃(4) (-1/q) τ(χ_β)² β̄² / q²`, the value of `τ(χ)²/q`.
    pub tau_sq_over_q: Complex64,
}

pub fn tau_sextic_closed(chi: &DirichletCharacter) -> Result<SexticClosed, GaussError> {
    let q = chi.conductor();
    if chi.order() != 6 || !chi.is_totally(6) || q.is_multiple_of(2) || q.is_multiple_of(3) {
        return Err(GaussError::NotTotallySextic(chi.label().to_string()));
    }
    let beta = cubic_beta_of(chi);
    let chi3 = cubic_from_beta(beta)?;
    debug_assert_eq!(chi3.conductor(), q);
    let tau3 = gauss_sum_factored(&chi3).value;
    let tau2 = if q % 4 == 1 {
        Complex64::new((q as f64).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (q as f64).sqrt())
    };
    let mu = mu_of(chi);
    let bbar = beta.conj().to_complex();
    let qf = q as f64;
    let tau = chi3.value(2) * tau2 * tau3 * bbar * (mu / qf);
    let minus_one_over_q = jacobi(-1, q) as f64;
    let tau_sq_over_q = chi3.value(4) * tau3 * tau3 * bbar * bbar * (minus_one_over_q / (qf * qf));
    Ok(SexticClosed {
        beta,
        tau: GaussSumValue {
            value: tau,
            conductor: q,
            method: Method::ClosedForm,
            abs_error_bound: 16.0 * qf * f64::EPSILON * qf.sqrt(),
        },
        tau_sq_over_q,
    })
}

/// Local Gauss sums with caching, and the fast route to `τ(χ)²` through
/// local closed forms.
#[derive(Default)]
pub struct GaussEngine {
    cache: Mutex<HashMap<(u64, u32, u8, u8), Complex64>>,
}

impl GaussEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// `τ(χ_p)` by direct summation, cached per local character.
    pub fn local_tau(&self, c: &LocalCharacter) -> Complex64 {
        let key = (c.prime(), c.exponent(), c.neg_exp(), c.gen_exp());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return *v;
        }
        let v = local_direct(c);
        self.cache.lock().unwrap().insert(key, v);
        v
    }

    /// `τ(χ_p)²`, in closed form for quadratic and odd quartic locals.
    pub fn local_tau_sq(&self, c: &LocalCharacter) -> Complex64 {
        let p = c.prime();
        let parity = if c.parity_exp() == 0 { 1.0 } else { -1.0 };
        match c.order() {
            2 => Complex64::new(parity * c.modulus() as f64, 0.0),
            4 if p % 2 == 1 => {
                let (pi, bar) = split_prime_gaussian(p).expect("order 4 forces p ≡ 1 mod 4");
                let g = GaussianInt::new(c.generator() as i128, 0);
                let e = quartic_residue_symbol(g, pi).unwrap().exponent().unwrap();
                let pick = if 3 * e == c.gen_exp() { pi } else { bar };
                pick.to_complex() * (-parity * (p as f64).sqrt())
            }
            _ => {
                let t = self.local_tau(c);
                t * t
            }
        }
    }

    /// `τ(χ)²` from `τ(χ₁χ₂) = χ₁(q₂) χ₂(q₁) τ(χ₁) τ(χ₂)` and local closed forms.
    pub fn tau_sq(&self, chi: &DirichletCharacter) -> Complex64 {
        chi.locals()
            .iter()
            .map(|c| twist_factor(chi, c, 2) * self.local_tau_sq(c))
            .product()
    }

    /// `τ(χ)` from the same product over cached local sums.
    pub fn tau(&self, chi: &DirichletCharacter) -> Complex64 {
        chi.locals()
            .iter()
            .map(|c| twist_factor(chi, c, 1) * self.local_tau(c))
            .product()
    }

    /// `τ(χ)²/q`, a point on the unit circle.
    pub fn normalized_tau_sq(&self, chi: &DirichletCharacter) -> Complex64 {
        self.tau_sq(chi) / chi.conductor() as f64
    }
}

/// `χ(-1)` from a direct evaluation at `q - 1`.
pub fn parity_by_evaluation(chi: &DirichletCharacter) -> i8 {
    let q = chi.conductor();
    match chi.value12(q as i64 - 1) {
        Some(0) => 1,
        Some(6) => -1,
        _ if q == 1 => 1,
        other => panic!("χ(-1) = ζ_12^{other:?}"),
    }
}

/// Quick consistency check used by sweeps: `|τ|² = q`.
pub fn has_expected_modulus(tau: Complex64, q: u64, tol: f64) -> bool {
    (tau.norm_sqr() / q as f64 - 1.0).abs() < tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_family, sextic_from_beta, FamilySpec, Variant};
    use crate::rings::{split_prime_eisenstein, split_prime_gaussian};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn trivial_character() {
        let t = gauss_sum_direct(&DirichletCharacter::trivial());
        assert!((t.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quadratic_mod_five() {
        let chi = DirichletCharacter::from_conrey(5, 4).unwrap();
        assert_eq!(chi.order(), 2);
        let t = gauss_sum_direct(&chi).value;
        assert!((t * t - Complex64::new(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn conductor_65_modulus_and_factorization() {
        let chars: Vec<_> = enumerate_family(FamilySpec::new(4, Variant::All), 65)
            .filter(|c| c.conductor() == 65)
            .collect();
        assert_eq!(chars.len(), 8);
        for chi in &chars {
            let d = gauss_sum_direct(chi);
            assert!((d.value.norm() - 65f64.sqrt()).abs() < 1e-10);
            let f = gauss_sum_factored(chi);
            assert!(rel(f.value, d.value) < 1e-9);
        }
    }

    #[test]
    fn quartic_prime_formula() {
        for p in [5u64, 13, 17] {
            let (pi, bar) = split_prime_gaussian(p).unwrap();
            for b in [pi, bar] {
                let chi = quartic_from_beta(b).unwrap();
                let direct = gauss_sum_direct(&chi).value;
                let expect = b.to_complex() * (-(chi.parity() as f64) * (p as f64).sqrt());
                assert!(rel(direct * direct, expect) < 1e-10, "p = {p}");
                let closed = tau_sq_closed_totally_quartic(b).unwrap();
                assert!(rel(closed.value, expect) < 1e-12);
                assert!((closed.value.norm() - p as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quartic_product_formula() {
        let (p5, _) = split_prime_gaussian(5).unwrap();
        let (p13, q13) = split_prime_gaussian(13).unwrap();
        for beta in [p5 * p13, p5 * q13] {
            let chi = quartic_from_beta(beta).unwrap();
            let d = gauss_sum_direct(&chi).value;
            let c = tau_sq_closed_totally_quartic(beta).unwrap().value;
            assert!(rel(d * d, c) < 1e-9);
        }
    }

    #[test]
    fn all_quartic_conductor_15() {
        let chars: Vec<_> = enumerate_family(FamilySpec::new(4, Variant::All), 15)
            .filter(|c| c.conductor() == 15)
            .collect();
        assert!(!chars.is_empty());
        for chi in chars {
            let d = gauss_sum_direct(&chi).value;
            let c = tau_sq_all_quartic(&chi).unwrap().value;
            assert!(rel(d * d, c) < 1e-9);
        }
        let even = DirichletCharacter::from_conrey(16, 3).unwrap();
        assert!(matches!(tau_sq_all_quartic(&even), Err(GaussError::EvenConductor(16))));
    }

    #[test]
    fn sextic_small_primes() {
        for p in [7u64, 13, 19, 31, 37] {
            let (pi, bar) = split_prime_eisenstein(p).unwrap();
            for b in [pi, bar] {
                let chi = sextic_from_beta(b).unwrap();
                let d = gauss_sum_direct(&chi).value;
                let s = tau_sextic_closed(&chi).unwrap();
                assert_eq!(s.beta, b);
                assert!(rel(s.tau.value, d) < 1e-9, "p = {p}: {} vs {}", s.tau.value, d);
                let n = d * d / p as f64;
                assert!(rel(s.tau_sq_over_q, n) < 1e-9);
                assert!((s.tau_sq_over_q.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn engine_agrees_with_direct() {
        let engine = GaussEngine::new();
        for spec in [FamilySpec::new(4, Variant::All), FamilySpec::new(6, Variant::All)] {
            for chi in enumerate_family(spec, 400) {
                let d = gauss_sum_direct(&chi).value;
                assert!(rel(engine.tau_sq(&chi), d * d) < 1e-9, "{chi}");
                assert!(rel(engine.tau(&chi), d) < 1e-9, "{chi}");
                assert_eq!(parity_by_evaluation(&chi), chi.parity());
            }
        }
    }
}

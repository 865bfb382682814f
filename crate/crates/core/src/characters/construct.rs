use super::{CharacterError, DirichletCharacter, LocalCharacter};
use crate::arith::factor;
use crate::rings::{
    cubic_residue_symbol, quartic_residue_symbol, split_prime_eisenstein, split_prime_gaussian,
    EisensteinInt, GaussianInt,
};

/// Primary prime factors of a primary `β ∈ ℤ[i]`, one per split rational prime.
fn gaussian_prime_factors(beta: GaussianInt) -> Result<Vec<(u64, GaussianInt)>, CharacterError> {
    if !beta.is_odd() || !beta.is_primary() {
        return Err(CharacterError::NotPrimary);
    }
    let n = beta.norm() as u64;
    let mut out = Vec::new();
    for (p, e) in factor(n) {
        let pz = GaussianInt::new(p as i128, 0);
        if p % 4 == 3 {
            return Err(if (pz * pz).divides(&beta) {
                CharacterError::NotSquarefree
            } else {
                CharacterError::ConjugateOverlap
            });
        }
        let (pi, bar) = split_prime_gaussian(p)?;
        if e > 1 {
            return Err(if (pi * pi).divides(&beta) || (bar * bar).divides(&beta) {
                CharacterError::NotSquarefree
            } else {
                CharacterError::ConjugateOverlap
            });
        }
        out.push((p, if pi.divides(&beta) { pi } else { bar }));
    }
    Ok(out)
}

fn eisenstein_prime_factors(
    beta: EisensteinInt,
) -> Result<Vec<(u64, EisensteinInt)>, CharacterError> {
    if beta.is_zero() || beta.is_ramified() || !beta.is_primary() {
        return Err(CharacterError::NotPrimary);
    }
    let n = beta.norm() as u64;
    let mut out = Vec::new();
    for (p, e) in factor(n) {
        let pz = EisensteinInt::new(p as i128, 0);
        if p % 3 == 2 {
            return Err(if (pz * pz).divides(&beta) {
                CharacterError::NotSquarefree
            } else {
                CharacterError::ConjugateOverlap
            });
        }
        let (pi, bar) = split_prime_eisenstein(p)?;
        if e > 1 {
            return Err(if (pi * pi).divides(&beta) || (bar * bar).divides(&beta) {
                CharacterError::NotSquarefree
            } else {
                CharacterError::ConjugateOverlap
            });
        }
        out.push((p, if pi.divides(&beta) { pi } else { bar }));
    }
    Ok(out)
}

fn quartic_local(p: u64, pi: GaussianInt) -> LocalCharacter {
    let g = LocalCharacter::new(p, 1, 0, 6).unwrap().generator();
    let e = quartic_residue_symbol(GaussianInt::new(g as i128, 0), pi)
        .unwrap()
        .exponent()
        .unwrap();
    LocalCharacter::new(p, 1, 0, 3 * e).unwrap()
}

fn cubic_local_exp(p: u64, pi: EisensteinInt) -> u8 {
    let g = LocalCharacter::new(p, 1, 0, 6).unwrap().generator();
    let e = cubic_residue_symbol(EisensteinInt::new(g as i128, 0), pi)
        .unwrap()
        .exponent()
        .unwrap();
    4 * e
}

/// `χ_β(n) = ∏ [n/π_i]` for `β = ∏ π_i` primary and squarefree with
/// `(β, 2β̄) = 1`. Totally quartic of conductor `N(β)`.
pub fn quartic_from_beta(beta: GaussianInt) -> Result<DirichletCharacter, CharacterError> {
    let locals = gaussian_prime_factors(beta)?
        .into_iter()
        .map(|(p, pi)| quartic_local(p, pi))
        .collect();
    Ok(DirichletCharacter::from_locals(locals))
}

/// The cubic character `n ↦ ∏ (n/π_i)_3` of conductor `N(β)`.
pub fn cubic_from_beta(beta: EisensteinInt) -> Result<DirichletCharacter, CharacterError> {
    let locals = eisenstein_prime_factors(beta)?
        .into_iter()
        .map(|(p, pi)| LocalCharacter::new(p, 1, 0, cubic_local_exp(p, pi)).unwrap())
        .collect();
    Ok(DirichletCharacter::from_locals(locals))
}

/// Cubic `χ_β` times the Jacobi symbol `(·/N(β))`: totally sextic.
pub fn sextic_from_beta(beta: EisensteinInt) -> Result<DirichletCharacter, CharacterError> {
    let locals = eisenstein_prime_factors(beta)?
        .into_iter()
        .map(|(p, pi)| LocalCharacter::new(p, 1, 0, (cubic_local_exp(p, pi) + 6) % 12).unwrap())
        .collect();
    Ok(DirichletCharacter::from_locals(locals))
}

/// The primary `β` with `χ = χ_β`, for the product of the quartic locals of
/// `χ` at odd primes.
pub fn quartic_beta_of(chi: &DirichletCharacter) -> GaussianInt {
    let mut beta = GaussianInt::ONE;
    for c in chi.locals() {
        if c.prime() == 2 || c.order() != 4 {
            continue;
        }
        let (pi, bar) = split_prime_gaussian(c.prime()).expect("order 4 forces p ≡ 1 mod 4");
        let pick = if quartic_local(c.prime(), pi) == *c { pi } else { bar };
        beta = beta * pick;
    }
    beta
}

/// The primary `β` whose cubic character is the cubic part of the locals of
/// order 3 or 6 at primes `p ≡ 1 (mod 3)`.
pub fn cubic_beta_of(chi: &DirichletCharacter) -> EisensteinInt {
    let mut beta = EisensteinInt::ONE;
    for c in chi.locals() {
        if c.prime() % 3 != 1 || c.order() % 3 != 0 {
            continue;
        }
        let cubic = (c.gen_exp() as u32 * 4 % 12) as u8;
        let (pi, bar) = split_prime_eisenstein(c.prime()).expect("order 3 forces p ≡ 1 mod 3");
        let pick = if cubic_local_exp(c.prime(), pi) == cubic { pi } else { bar };
        beta = beta * pick;
    }
    beta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::jacobi;

    #[test]
    fn quartic_of_prime_above_five() {
        let (pi, _) = split_prime_gaussian(5).unwrap();
        let chi = quartic_from_beta(pi).unwrap();
        assert_eq!(chi.conductor(), 5);
        assert_eq!(chi.order(), 4);
        for n in 0..5i64 {
            let sq = chi.value12(n).map(|e| (2 * e) % 12);
            let leg = match jacobi(n, 5) {
                0 => None,
                1 => Some(0),
                _ => Some(6),
            };
            assert_eq!(sq, leg);
        }
        assert_eq!(quartic_beta_of(&chi), pi);
    }

    #[test]
    fn quartic_values_are_residue_symbols() {
        let (p5, _) = split_prime_gaussian(5).unwrap();
        let (_, q13) = split_prime_gaussian(13).unwrap();
        let beta = p5 * q13;
        let chi = quartic_from_beta(beta).unwrap();
        assert_eq!(chi.conductor(), 65);
        assert!(chi.is_totally(4));
        for n in 0..65i64 {
            let a = GaussianInt::new(n as i128, 0);
            let s = quartic_residue_symbol(a, p5).unwrap() * quartic_residue_symbol(a, q13).unwrap();
            assert_eq!(chi.evaluate(n), s);
        }
        assert_eq!(quartic_beta_of(&chi), beta);
    }

    #[test]
    fn quartic_errors() {
        let (pi, bar) = split_prime_gaussian(5).unwrap();
        assert_eq!(quartic_from_beta(pi * bar), Err(CharacterError::ConjugateOverlap));
        assert_eq!(quartic_from_beta(pi * pi), Err(CharacterError::NotSquarefree));
        assert_eq!(quartic_from_beta(GaussianInt::new(2, 1)), Err(CharacterError::NotPrimary));
        assert_eq!(
            quartic_from_beta(GaussianInt::new(-3, 0)),
            Err(CharacterError::ConjugateOverlap)
        );
        assert_eq!(quartic_from_beta(GaussianInt::ONE), Ok(DirichletCharacter::trivial()));
    }

    #[test]
    fn sextic_of_small_primes() {
        for p in [7u64, 13] {
            let (pi, _) = split_prime_eisenstein(p).unwrap();
            let chi = sextic_from_beta(pi).unwrap();
            assert_eq!(chi.conductor(), p);
            // exact order 6 on a generator of (ℤ/p)^×
            let g = chi.locals()[0].generator() as i64;
            assert_eq!(chi.evaluate(g).multiplicative_order(), 6);
            let cubic = cubic_from_beta(pi).unwrap();
            for n in 0..p as i64 {
                let a = EisensteinInt::new(n as i128, 0);
                assert_eq!(cubic.evaluate(n), cubic_residue_symbol(a, pi).unwrap());
                let lhs = chi.value12(n);
                let rhs = cubic.value12(n).map(|e| (e + if jacobi(n, p) == 1 { 0 } else { 6 }) % 12);
                assert_eq!(lhs, rhs);
            }
            assert_eq!(cubic_beta_of(&chi), pi);
            assert_eq!(cubic_beta_of(&cubic.conj()), pi.conj());
        }
        assert_eq!(sextic_from_beta(EisensteinInt::ONE), Ok(DirichletCharacter::trivial()));
    }
}

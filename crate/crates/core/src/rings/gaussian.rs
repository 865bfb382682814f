use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{RingError, ZetaPower};
use crate::arith::{cornacchia, inv_mod, is_prime, mul_mod, pow_mod, reduce_signed};

/// An element `re + im·i` of ℤ[i].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussianInt {
    pub re: i128,
    pub im: i128,
}

impl GaussianInt {
    pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };
    pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
    pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: i128, im: i128) -> Self {
        GaussianInt { re, im }
    }

    pub fn norm(&self) -> i128 {
        self.re * self.re + self.im * self.im
    }

    pub fn conj(&self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    /// Not divisible by `1+i`, i.e. of odd norm.
    pub fn is_odd(&self) -> bool {
        (self.re + self.im).rem_euclid(2) == 1
    }

    /// Multiply by `i^k`.
    pub fn mul_i_pow(&self, k: u32) -> Self {
        match k % 4 {
            0 => *self,
            1 => GaussianInt::new(-self.im, self.re),
            2 => GaussianInt::new(-self.re, -self.im),
            _ => GaussianInt::new(self.im, -self.re),
        }
    }

    /// `≡ 1 (mod (1+i)^3)`.
    pub fn is_primary(&self) -> bool {
        let a = self.re.rem_euclid(4);
        let b = self.im.rem_euclid(4);
        (a == 1 && b == 0) || (a == 3 && b == 2)
    }

    /// Exact quotient `self / d`, if `d` divides `self`.
    pub fn div_exact(&self, d: &GaussianInt) -> Option<GaussianInt> {
        let n = d.norm();
        if n == 0 {
            return None;
        }
        let num = *self * d.conj();
        (num.re % n == 0 && num.im % n == 0).then(|| GaussianInt::new(num.re / n, num.im / n))
    }

    pub fn divides(&self, other: &GaussianInt) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re as f64, self.im as f64)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im >= 0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

impl Add for GaussianInt {
    type Output = GaussianInt;
    fn add(self, o: GaussianInt) -> GaussianInt {
        GaussianInt::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussianInt {
    type Output = GaussianInt;
    fn sub(self, o: GaussianInt) -> GaussianInt {
        GaussianInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussianInt {
    type Output = GaussianInt;
    fn mul(self, o: GaussianInt) -> GaussianInt {
        GaussianInt::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt::new(-self.re, -self.im)
    }
}

/// The unique associate `u·z`, `u ∈ {±1, ±i}`, with `u·z ≡ 1 (mod (1+i)^3)`.
pub fn primary_associate_gaussian(z: GaussianInt) -> Result<GaussianInt, RingError> {
    if z.is_zero() {
        return Err(RingError::Zero);
    }
    if !z.is_odd() {
        return Err(RingError::EvenElement(z.to_string()));
    }
    (0..4)
        .map(|k| z.mul_i_pow(k))
        .find(GaussianInt::is_primary)
        .ok_or_else(|| unreachable!("an odd element always has a primary associate"))
}

/// Primary primes `(π, π̄)` above a rational prime `p ≡ 1 (mod 4)`; the
/// first has positive imaginary part.
pub fn split_prime_gaussian(p: u64) -> Result<(GaussianInt, GaussianInt), RingError> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(RingError::NonSplitPrime(p));
    }
    let (x, y) = cornacchia(1, p).ok_or(RingError::NonSplitPrime(p))?;
    let pi = primary_associate_gaussian(GaussianInt::new(x as i128, y as i128))?;
    let (pi, bar) = if pi.im > 0 {
        (pi, pi.conj())
    } else {
        (pi.conj(), pi)
    };
    Ok((pi, bar))
}

/// Image of `i` under ℤ[i]/(π) ≅ 𝔽_p, for `π = a + bi` of prime norm.
pub(crate) fn sqrt_minus_one_for(pi: &GaussianInt, p: u64) -> u64 {
    let a = reduce_signed(pi.re, p);
    let b = reduce_signed(pi.im, p);
    let b_inv = inv_mod(b, p).expect("a prime of split norm has a unit imaginary part");
    (p - mul_mod(a, b_inv, p)) % p
}

/// Reduction ℤ[i] → 𝔽_p given the image `s` of `i`.
#[inline]
pub(crate) fn reduce_gaussian(alpha: &GaussianInt, s: u64, p: u64) -> u64 {
    let x = reduce_signed(alpha.re, p);
    let y = reduce_signed(alpha.im, p);
    (x + mul_mod(y, s, p)) % p
}

/// Quartic residue symbol `[α/π] = i^e ≡ α^{(p-1)/4} (mod π)`.
pub fn quartic_residue_symbol(alpha: GaussianInt, pi: GaussianInt) -> Result<ZetaPower, RingError> {
    let n = pi.norm();
    if n <= 0 || n > u64::MAX as i128 || n % 4 != 1 || !is_prime(n as u64) {
        return Err(RingError::BadModulus(pi.to_string()));
    }
    let p = n as u64;
    let s = sqrt_minus_one_for(&pi, p);
    let v = reduce_gaussian(&alpha, s, p);
    if v == 0 {
        return Ok(ZetaPower::zero(4));
    }
    let t = pow_mod(v, (p - 1) / 4, p);
    let e = if t == 1 {
        0
    } else if t == s {
        1
    } else if t == p - 1 {
        2
    } else {
        debug_assert_eq!(t, p - s);
        3
    };
    Ok(ZetaPower::root(4, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{jacobi, primes_up_to};

    fn elements_of_norm(n: i128) -> Vec<GaussianInt> {
        let r = (n as f64).sqrt() as i128 + 1;
        let mut out = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                if a * a + b * b == n {
                    out.push(GaussianInt::new(a, b));
                }
            }
        }
        out
    }

    #[test]
    fn one_is_primary() {
        assert_eq!(primary_associate_gaussian(GaussianInt::ONE), Ok(GaussianInt::ONE));
    }

    #[test]
    fn exactly_one_primary_associate() {
        for a in -100i128..=100 {
            for b in -100i128..=100 {
                let z = GaussianInt::new(a, b);
                if z.is_zero() || !z.is_odd() || z.norm() > 10_000 {
                    continue;
                }
                let count = (0..4).filter(|&k| z.mul_i_pow(k).is_primary()).count();
                assert_eq!(count, 1, "z = {z}");
                let p = primary_associate_gaussian(z).unwrap();
                assert!(p.is_primary());
            }
        }
    }

    #[test]
    fn primary_above_five_from_brute_force() {
        let primaries: Vec<_> = elements_of_norm(5)
            .into_iter()
            .filter(GaussianInt::is_primary)
            .collect();
        assert_eq!(primaries.len(), 2);
        let (pi, bar) = split_prime_gaussian(5).unwrap();
        assert!(primaries.contains(&pi) && primaries.contains(&bar));
        assert_eq!(pi, GaussianInt::new(-1, 2));
        assert_eq!(bar, GaussianInt::new(-1, -2));
    }

    #[test]
    fn errors() {
        assert_eq!(primary_associate_gaussian(GaussianInt::ZERO), Err(RingError::Zero));
        assert!(matches!(
            primary_associate_gaussian(GaussianInt::new(1, 1)),
            Err(RingError::EvenElement(_))
        ));
        assert_eq!(split_prime_gaussian(7), Err(RingError::NonSplitPrime(7)));
        assert!(matches!(
            quartic_residue_symbol(GaussianInt::ONE, GaussianInt::new(3, 0)),
            Err(RingError::BadModulus(_))
        ));
    }

    #[test]
    fn split_thirteen() {
        let (pi, bar) = split_prime_gaussian(13).unwrap();
        assert_eq!(pi.norm(), 13);
        assert_eq!(bar.norm(), 13);
        assert!(pi.is_primary() && bar.is_primary() && pi.im > 0);
        let prod = pi * bar;
        assert_eq!(prod, GaussianInt::new(13, 0));
    }

    #[test]
    fn splitting_up_to_ten_thousand() {
        for p in primes_up_to(10_000).into_iter().filter(|p| p % 4 == 1) {
            let (pi, bar) = split_prime_gaussian(p).unwrap();
            assert_eq!(pi.norm(), p as i128);
            assert_eq!(bar, pi.conj());
            let prod = pi * bar;
            assert!((0..4).any(|k| prod.mul_i_pow(k) == GaussianInt::new(p as i128, 0)));
        }
    }

    #[test]
    fn symbol_squares_to_legendre() {
        for p in primes_up_to(200).into_iter().filter(|p| p % 4 == 1) {
            let (pi, _) = split_prime_gaussian(p).unwrap();
            assert_eq!(quartic_residue_symbol(GaussianInt::ONE, pi).unwrap(), ZetaPower::one(4));
            for a in 0..p as i128 {
                let sym = quartic_residue_symbol(GaussianInt::new(a, 0), pi).unwrap();
                let leg = jacobi(a as i64, p);
                match leg {
                    0 => assert!(sym.is_zero()),
                    1 => assert_eq!(sym.pow(2), ZetaPower::one(4)),
                    _ => assert_eq!(sym.pow(2), ZetaPower::root(4, 2)),
                }
                if !sym.is_zero() {
                    assert_eq!(4 % sym.multiplicative_order(), 0);
                }
            }
        }
    }

    #[test]
    fn symbol_is_multiplicative_mod_thirteen() {
        let (pi, _) = split_prime_gaussian(13).unwrap();
        let residues: Vec<GaussianInt> = (0..13)
            .flat_map(|a| (0..13).map(move |b| GaussianInt::new(a, b)))
            .collect();
        for x in &residues {
            for y in &residues {
                let lhs = quartic_residue_symbol(*x * *y, pi).unwrap();
                let rhs = quartic_residue_symbol(*x, pi).unwrap() * quartic_residue_symbol(*y, pi).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn symbol_depends_on_residue_only() {
        let (pi, _) = split_prime_gaussian(29).unwrap();
        for a in -5i128..5 {
            for b in -5i128..5 {
                let x = GaussianInt::new(a, b);
                let y = x + pi * GaussianInt::new(b - 2, a + 3);
                assert_eq!(
                    quartic_residue_symbol(x, pi).unwrap(),
                    quartic_residue_symbol(y, pi).unwrap()
                );
            }
        }
    }
}

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{RingError, ZetaPower};
use crate::arith::{cornacchia, inv_mod, is_prime, mul_mod, pow_mod, reduce_signed};

/// An element `a + b·ω` of ℤ[ω], `ω = e^{2πi/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EisensteinInt {
    pub a: i128,
    pub b: i128,
}

impl EisensteinInt {
    pub const ZERO: EisensteinInt = EisensteinInt { a: 0, b: 0 };
    pub const ONE: EisensteinInt = EisensteinInt { a: 1, b: 0 };
    pub const OMEGA: EisensteinInt = EisensteinInt { a: 0, b: 1 };

    pub const fn new(a: i128, b: i128) -> Self {
        EisensteinInt { a, b }
    }

    pub fn norm(&self) -> i128 {
        self.a * self.a - self.a * self.b + self.b * self.b
    }

    /// Complex conjugate; `ω̄ = ω² = -1 - ω`.
    pub fn conj(&self) -> Self {
        EisensteinInt::new(self.a - self.b, -self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Divisible by the ramified prime `1 - ω`.
    pub fn is_ramified(&self) -> bool {
        (self.a + self.b).rem_euclid(3) == 0
    }

    /// Multiply by `ω^k`.
    pub fn mul_omega_pow(&self, k: u32) -> Self {
        let mut z = *self;
        for _ in 0..k % 3 {
            z = EisensteinInt::new(-z.b, z.a - z.b);
        }
        z
    }

    /// `≡ 1 (mod 3)`.
    pub fn is_primary(&self) -> bool {
        self.a.rem_euclid(3) == 1 && self.b.rem_euclid(3) == 0
    }

    pub fn div_exact(&self, d: &EisensteinInt) -> Option<EisensteinInt> {
        let n = d.norm();
        if n == 0 {
            return None;
        }
        let num = *self * d.conj();
        (num.a % n == 0 && num.b % n == 0).then(|| EisensteinInt::new(num.a / n, num.b / n))
    }

    pub fn divides(&self, other: &EisensteinInt) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn to_complex(&self) -> Complex64 {
        let h = 3f64.sqrt() / 2.0;
        Complex64::new(self.a as f64 - 0.5 * self.b as f64, h * self.b as f64)
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b >= 0 {
            write!(f, "{}+{}w", self.a, self.b)
        } else {
            write!(f, "{}{}w", self.a, self.b)
        }
    }
}

impl Add for EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, o: EisensteinInt) -> EisensteinInt {
        EisensteinInt::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, o: EisensteinInt) -> EisensteinInt {
        EisensteinInt::new(self.a - o.a, self.b - o.b)
    }
}

impl Mul for EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, o: EisensteinInt) -> EisensteinInt {
        let bd = self.b * o.b;
        EisensteinInt::new(self.a * o.a - bd, self.a * o.b + self.b * o.a - bd)
    }
}

impl Neg for EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt::new(-self.a, -self.b)
    }
}

/// The unique associate of `z` congruent to 1 mod 3.
///
/// Note this is the negative of the "primary" element in the convention
/// where primary means `≡ 2 (mod 3)`.
pub fn primary_associate_eisenstein(z: EisensteinInt) -> Result<EisensteinInt, RingError> {
    if z.is_zero() {
        return Err(RingError::Zero);
    }
    if z.is_ramified() {
        return Err(RingError::RamifiedElement(z.to_string()));
    }
    for k in 0..3 {
        let w = z.mul_omega_pow(k);
        if w.is_primary() {
            return Ok(w);
        }
        if (-w).is_primary() {
            return Ok(-w);
        }
    }
    unreachable!("an element prime to 3 always has a primary associate")
}

/// Primary primes `(π, π̄)` above `p ≡ 1 (mod 3)`; the first has positive
/// ω-coefficient.
pub fn split_prime_eisenstein(p: u64) -> Result<(EisensteinInt, EisensteinInt), RingError> {
    if p % 3 != 1 || !is_prime(p) {
        return Err(RingError::NonSplitPrime(p));
    }
    let (x, y) = cornacchia(3, p).ok_or(RingError::NonSplitPrime(p))?;
    let z = EisensteinInt::new((x + y) as i128, 2 * y as i128);
    let pi = primary_associate_eisenstein(z)?;
    let (pi, bar) = if pi.b > 0 {
        (pi, pi.conj())
    } else {
        (pi.conj(), pi)
    };
    Ok((pi, bar))
}

/// Image of `ω` in 𝔽_p under ℤ[ω]/(π) ≅ 𝔽_p.
pub(crate) fn omega_image_for(pi: &EisensteinInt, p: u64) -> u64 {
    let a = reduce_signed(pi.a, p);
    let b = reduce_signed(pi.b, p);
    let b_inv = inv_mod(b, p).expect("a prime of split norm has a unit ω-coefficient");
    (p - mul_mod(a, b_inv, p)) % p
}

#[inline]
pub(crate) fn reduce_eisenstein(alpha: &EisensteinInt, r: u64, p: u64) -> u64 {
    let x = reduce_signed(alpha.a, p);
    let y = reduce_signed(alpha.b, p);
    (x + mul_mod(y, r, p)) % p
}

/// Cubic residue symbol `(α/π)_3 = ω^e ≡ α^{(p-1)/3} (mod π)`.
pub fn cubic_residue_symbol(alpha: EisensteinInt, pi: EisensteinInt) -> Result<ZetaPower, RingError> {
    let n = pi.norm();
    if n <= 0 || n > u64::MAX as i128 || n % 3 != 1 || !is_prime(n as u64) {
        return Err(RingError::BadModulus(pi.to_string()));
    }
    let p = n as u64;
    let r = omega_image_for(&pi, p);
    let v = reduce_eisenstein(&alpha, r, p);
    if v == 0 {
        return Ok(ZetaPower::zero(3));
    }
    let t = pow_mod(v, (p - 1) / 3, p);
    let e = if t == 1 {
        0
    } else if t == r {
        1
    } else {
        debug_assert_eq!(t, mul_mod(r, r, p));
        2
    };
    Ok(ZetaPower::root(3, e))
}

use crate::arith::{conrey_generator, gcd, mul_mod, pow_mod};

/// Sentinel for "not a unit" in exponent tables.
pub const ZERO: u8 = u8::MAX;

/// Order of `ζ_12^e`.
#[inline]
pub fn order12(e: u8) -> u8 {
    12 / gcd(12, e as u64 % 12) as u8
}

/// A primitive character modulo a prime power, with values in μ_12.
///
/// At odd `p` the character is fixed by `χ(g) = ζ_12^gen_exp` where `g` is
/// the Conrey generator. Modulo 4 the generator is 3. Modulo `2^e`, `e ≥ 3`,
/// the group is `{±1} × ⟨5⟩` and `neg_exp` carries `χ(-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCharacter {
    prime: u64,
    exponent: u32,
    modulus: u64,
    generator: u64,
    gen_order: u64,
    gen_exp: u8,
    neg_exp: u8,
    order: u8,
    // Discrete logs are only needed modulo d = gcd(12, gen_order):
    // n^cofactor lands in ⟨h⟩, h = generator^cofactor of order d.
    d: u8,
    cofactor: u64,
    h_pows: [u64; 12],
}

impl LocalCharacter {
    /// Build and validate. Returns `None` unless the data defines a
    /// character of order dividing 12 that is primitive mod `prime^exponent`.
    pub fn new(prime: u64, exponent: u32, neg_exp: u8, gen_exp: u8) -> Option<Self> {
        let modulus = prime.checked_pow(exponent)?;
        let (generator, gen_order) = if prime == 2 {
            match exponent {
                0 | 1 => return None,
                2 => (3, 2),
                _ => (5, 1u64 << (exponent - 2)),
            }
        } else {
            (conrey_generator(prime), modulus / prime * (prime - 1))
        };
        let gen_exp = gen_exp % 12;
        let neg_exp = neg_exp % 12;
        if !(gen_exp as u64 * gen_order).is_multiple_of(12) {
            return None;
        }
        if (prime != 2 || exponent < 3) && neg_exp != 0 {
            return None;
        }
        if neg_exp != 0 && neg_exp != 6 {
            return None;
        }
        let d = gcd(12, gen_order) as u8;
        let cofactor = gen_order / d as u64;
        let h = pow_mod(generator, cofactor, modulus);
        let mut h_pows = [0u64; 12];
        let mut x = 1 % modulus;
        for slot in h_pows.iter_mut().take(d as usize) {
            *slot = x;
            x = mul_mod(x, h, modulus);
        }
        let order = {
            let a = order12(gen_exp) as u64;
            let b = order12(neg_exp) as u64;
            (a * b / gcd(a, b)) as u8
        };
        let chi = LocalCharacter {
            prime,
            exponent,
            modulus,
            generator,
            gen_order,
            gen_exp,
            neg_exp,
            order,
            d,
            cofactor,
            h_pows,
        };
        chi.is_primitive().then_some(chi)
    }

    fn is_primitive(&self) -> bool {
        if self.exponent == 1 || (self.prime == 2 && self.exponent == 2) {
            return self.order > 1;
        }
        let probe = 1 + self.modulus / self.prime;
        self.value12(probe) != Some(0)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// `χ(generator)` as a 12th-root exponent.
    pub fn gen_exp(&self) -> u8 {
        self.gen_exp
    }

    pub fn neg_exp(&self) -> u8 {
        self.neg_exp
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `χ(-1)` as a 12th-root exponent (0 or 6).
    pub fn parity_exp(&self) -> u8 {
        if self.prime == 2 && self.exponent >= 3 {
            self.neg_exp
        } else {
            // -1 = generator^{gen_order/2}
            ((self.gen_exp as u64 * (self.gen_order / 2)) % 12) as u8
        }
    }

    pub fn conj(&self) -> Self {
        LocalCharacter::new(
            self.prime,
            self.exponent,
            (12 - self.neg_exp) % 12,
            (12 - self.gen_exp) % 12,
        )
        .expect("conjugate of a primitive character is primitive")
    }

    fn dlog_mod_d(&self, x: u64) -> u8 {
        let t = pow_mod(x, self.cofactor, self.modulus);
        self.h_pows[..self.d as usize]
            .iter()
            .position(|&h| h == t)
            .expect("unit lands in the subgroup generated by h") as u8
    }

    /// `χ(n)` as an exponent of `ζ_12`, `None` when `p | n`.
    pub fn value12(&self, n: u64) -> Option<u8> {
        if n.is_multiple_of(self.prime) {
            return None;
        }
        let x = n % self.modulus;
        if self.prime == 2 {
            if self.exponent == 2 {
                return Some(if x == 3 { self.gen_exp } else { 0 });
            }
            let (x, extra) = if x % 4 == 3 {
                (self.modulus - x, self.neg_exp)
            } else {
                (x, 0)
            };
            let k = self.dlog_mod_d(x);
            return Some(((self.gen_exp as u32 * k as u32 + extra as u32) % 12) as u8);
        }
        let k = self.dlog_mod_d(x);
        Some(((self.gen_exp as u32 * k as u32) % 12) as u8)
    }

    /// Values on `0..modulus`, `ZERO` off the units.
    pub fn table(&self) -> Vec<u8> {
        let m = self.modulus as usize;
        let mut t = vec![ZERO; m];
        if self.prime == 2 && self.exponent == 2 {
            t[1] = 0;
            t[3] = self.gen_exp;
            return t;
        }
        let mut x = 1u64;
        let mut e = 0u8;
        for _ in 0..self.gen_order {
            if self.prime == 2 {
                t[x as usize] = e;
                t[m - x as usize] = (e + self.neg_exp) % 12;
            } else {
                t[x as usize] = e;
            }
            x = mul_mod(x, self.generator, self.modulus);
            e = (e + self.gen_exp) % 12;
        }
        t
    }

    /// Conrey index of this character modulo `p^e`.
    pub fn conrey_index(&self) -> u64 {
        if self.prime == 2 && self.exponent == 2 {
            return if self.gen_exp == 0 { 1 } else { 3 };
        }
        let a = self.gen_exp as u64 * self.gen_order / 12;
        let m = pow_mod(self.generator, a, self.modulus);
        if self.prime == 2 && self.neg_exp == 6 {
            self.modulus - m
        } else {
            m
        }
    }

    /// Inverse of [`conrey_index`](Self::conrey_index); `None` if `m` is not
    /// a unit, has order not dividing 12, or the character is imprimitive.
    pub fn from_conrey(prime: u64, exponent: u32, m: u64) -> Option<Self> {
        let modulus = prime.pow(exponent);
        let m = m % modulus;
        if m.is_multiple_of(prime) {
            return None;
        }
        if prime == 2 && exponent == 2 {
            return LocalCharacter::new(2, 2, 0, if m == 3 { 6 } else { 0 });
        }
        let (neg_exp, target) = if prime == 2 && m % 4 == 3 {
            (6, modulus - m)
        } else {
            (0, m)
        };
        let (generator, gen_order) = if prime == 2 {
            (5, modulus / 4)
        } else {
            (conrey_generator(prime), modulus / prime * (prime - 1))
        };
        (0u8..12)
            .filter(|&g| (g as u64 * gen_order).is_multiple_of(12))
            .find(|&g| pow_mod(generator, g as u64 * gen_order / 12, modulus) == target)
            .and_then(|g| LocalCharacter::new(prime, exponent, neg_exp, g))
    }
}

/// All primitive characters modulo `p^e` whose order divides `ell`.
pub fn local_options(prime: u64, exponent: u32, ell: u8) -> Vec<LocalCharacter> {
    let max_exp = match prime {
        2 => 4,
        3 => 2,
        _ => 1,
    };
    if exponent == 0 || exponent > max_exp {
        return Vec::new();
    }
    let negs: &[u8] = if prime == 2 && exponent >= 3 { &[0, 6] } else { &[0] };
    let mut out = Vec::new();
    for &neg in negs {
        for gen in 0..12u8 {
            if let Some(chi) = LocalCharacter::new(prime, exponent, neg, gen) {
                if ell.is_multiple_of(chi.order()) {
                    out.push(chi);
                }
            }
        }
    }
    out.sort_by_key(LocalCharacter::conrey_index);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_agree_with_pointwise_values() {
        for (p, e) in [(5, 1), (13, 1), (7, 1), (3, 1), (3, 2), (2, 2), (2, 3), (2, 4)] {
            for chi in local_options(p, e, 12) {
                let t = chi.table();
                for n in 0..chi.modulus() {
                    assert_eq!(chi.value12(n).unwrap_or(ZERO), t[n as usize]);
                }
                for a in 1..chi.modulus() {
                    for b in 1..chi.modulus() {
                        let (x, y) = (t[a as usize], t[b as usize]);
                        let z = t[(a * b % chi.modulus()) as usize];
                        if x != ZERO && y != ZERO {
                            assert_eq!((x + y) % 12, z);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn local_option_counts() {
        assert_eq!(local_options(2, 2, 4).len(), 1);
        assert_eq!(local_options(2, 3, 4).len(), 2);
        let sixteen: Vec<_> = local_options(2, 4, 4).into_iter().filter(|c| c.order() == 4).collect();
        assert_eq!(sixteen.len(), 4);
        assert!(local_options(2, 4, 6).is_empty());
        assert!(local_options(2, 5, 4).is_empty());
        let nine: Vec<_> = local_options(3, 2, 6).iter().map(|c| c.order()).collect();
        assert_eq!(nine.iter().filter(|&&o| o == 3).count(), 2);
        assert_eq!(nine.iter().filter(|&&o| o == 6).count(), 2);
        assert_eq!(local_options(13, 1, 4).len(), 3);
        assert_eq!(local_options(13, 1, 6).len(), 5);
        assert_eq!(local_options(11, 1, 4).len(), 1);
    }

    #[test]
    fn conrey_round_trip() {
        for (p, e) in [(5, 1), (13, 1), (37, 1), (3, 2), (3, 1), (2, 2), (2, 3), (2, 4)] {
            for chi in local_options(p, e, 12) {
                let m = chi.conrey_index();
                assert_eq!(LocalCharacter::from_conrey(p, e, m), Some(chi.clone()));
                assert_eq!(chi.conj().conj(), chi);
            }
        }
    }

    #[test]
    fn imprimitive_rejected() {
        assert!(LocalCharacter::new(5, 1, 0, 0).is_none());
        assert!(LocalCharacter::new(5, 2, 0, 6).is_none());
        assert!(LocalCharacter::new(2, 3, 6, 0).is_none());
        assert!(LocalCharacter::new(3, 2, 0, 6).is_none());
        assert!(LocalCharacter::new(7, 1, 0, 3).is_none());
    }
}

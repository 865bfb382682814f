//! Primitive Dirichlet characters of order dividing 12, stored in factored
//! form as a list of local characters at distinct primes.
//!
//! Values are exponents of `ζ_12`; a character of order ℓ only takes
//! exponents divisible by `12/ℓ`.

mod construct;
mod family;
mod local;

pub use construct::{
    cubic_beta_of, cubic_from_beta, quartic_beta_of, quartic_from_beta, sextic_from_beta,
};
pub use family::{
    characters_of_conductor, count_family, count_of_conductor, enumerate_family,
    sum_inverse_sqrt_conductor, variant_tag, write_characters_csv, FamilySpec, Variant,
};
pub use local::{local_options, order12, LocalCharacter, ZERO};

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{crt, factor, gcd, lcm, pow_mod};
use crate::rings::{root_of_unity, RingError, ZetaPower};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("β is not primary")]
    NotPrimary,
    #[error("β is not squarefree")]
    NotSquarefree,
    #[error("β shares a factor with its conjugate")]
    ConjugateOverlap,
    #[error("index {index} is not coprime to modulus {modulus}")]
    NotCoprime { modulus: u64, index: u64 },
    #[error("{modulus}.{index} is not primitive")]
    NotPrimitive { modulus: u64, index: u64 },
    #[error("{modulus}.{index} has order not dividing 12")]
    UnsupportedOrder { modulus: u64, index: u64 },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// `modulus.index` in the Conrey numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConreyLabel {
    pub modulus: u64,
    pub index: u64,
}

impl fmt::Display for ConreyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.modulus, self.index)
    }
}

/// A primitive Dirichlet character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    conductor: u64,
    order: u8,
    parity: i8,
    index: u64,
    locals: Vec<LocalCharacter>,
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        DirichletCharacter {
            conductor: 1,
            order: 1,
            parity: 1,
            index: 1,
            locals: Vec::new(),
        }
    }

    /// Assemble from local factors at distinct primes.
    pub fn from_locals(mut locals: Vec<LocalCharacter>) -> Self {
        if locals.is_empty() {
            return Self::trivial();
        }
        locals.sort_by_key(LocalCharacter::prime);
        debug_assert!(locals.windows(2).all(|w| w[0].prime() < w[1].prime()));
        let conductor = locals.iter().map(LocalCharacter::modulus).product();
        let order = locals
            .iter()
            .fold(1u64, |acc, c| lcm(acc, c.order() as u64)) as u8;
        let parity_exp = locals.iter().map(|c| c.parity_exp() as u32).sum::<u32>() % 12;
        let index = crt(&locals
            .iter()
            .map(|c| (c.conrey_index(), c.modulus()))
            .collect::<Vec<_>>());
        DirichletCharacter {
            conductor,
            order,
            parity: if parity_exp == 0 { 1 } else { -1 },
            index,
            locals,
        }
    }

    /// The character with Conrey label `modulus.index`; it must be primitive.
    pub fn from_conrey(modulus: u64, index: u64) -> Result<Self, CharacterError> {
        if modulus == 0 || gcd(index, modulus) != 1 {
            return Err(CharacterError::NotCoprime { modulus, index });
        }
        if modulus == 1 {
            return Ok(Self::trivial());
        }
        if pow_mod(index, 12, modulus) != 1 {
            return Err(CharacterError::UnsupportedOrder { modulus, index });
        }
        let locals = factor(modulus)
            .into_iter()
            .map(|(p, e)| {
                LocalCharacter::from_conrey(p, e, index)
                    .ok_or(CharacterError::NotPrimitive { modulus, index })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_locals(locals))
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// `χ(-1) ∈ {1, -1}`.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_even(&self) -> bool {
        self.parity == 1
    }

    pub fn locals(&self) -> &[LocalCharacter] {
        &self.locals
    }

    pub fn conrey_index(&self) -> u64 {
        self.index
    }

    pub fn label(&self) -> ConreyLabel {
        ConreyLabel {
            modulus: self.conductor,
            index: self.index,
        }
    }

    pub fn conj(&self) -> Self {
        Self::from_locals(self.locals.iter().map(LocalCharacter::conj).collect())
    }

    /// True when every local factor has order exactly `ell`.
    pub fn is_totally(&self, ell: u8) -> bool {
        self.locals.iter().all(|c| c.order() == ell)
    }

    /// Sub-character made of the locals satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&LocalCharacter) -> bool) -> Self {
        Self::from_locals(self.locals.iter().filter(|c| keep(c)).cloned().collect())
    }

    /// Product with a character of coprime conductor.
    pub fn mul_coprime(&self, other: &DirichletCharacter) -> Self {
        assert_eq!(gcd(self.conductor, other.conductor), 1);
        Self::from_locals(self.locals.iter().chain(other.locals.iter()).cloned().collect())
    }

    /// `χ(n)` as a `ζ_12` exponent; `None` off the units.
    pub fn value12(&self, n: i64) -> Option<u8> {
        let n = n.rem_euclid(self.conductor as i64) as u64;
        let mut e = 0u32;
        for c in &self.locals {
            e += c.value12(n)? as u32;
        }
        Some((e % 12) as u8)
    }

    /// `χ(n)` as an exponent of `ζ_ℓ`.
    pub fn evaluate(&self, n: i64) -> ZetaPower {
        let step = 12 / self.order;
        match self.value12(n) {
            Some(e) => ZetaPower::root(self.order, (e / step) as i64),
            None => ZetaPower::zero(self.order),
        }
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.value12(n) {
            Some(e) => root_of_unity(12, e as u32),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// All values on `0..q` as `ζ_12` exponents, [`ZERO`] off the units.
    pub fn table(&self) -> Vec<u8> {
        let q = self.conductor as usize;
        if self.locals.is_empty() {
            return vec![0; q];
        }
        if self.locals.len() == 1 {
            return self.locals[0].table();
        }
        let locals: Vec<(usize, Vec<u8>)> = self
            .locals
            .iter()
            .map(|c| (c.modulus() as usize, c.table()))
            .collect();
        let mut out = vec![0u8; q];
        let mut residues = vec![0usize; locals.len()];
        for slot in out.iter_mut() {
            let mut e = 0u8;
            for (r, (m, t)) in residues.iter_mut().zip(&locals) {
                let v = t[*r];
                if v == ZERO || e == ZERO {
                    e = ZERO;
                } else {
                    e = (e + v) % 12;
                }
                *r += 1;
                if *r == *m {
                    *r = 0;
                }
            }
            *slot = e;
        }
        out
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.label().fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conrey_65() {
        for m in [8u64, 18, 47, 57] {
            let chi = DirichletCharacter::from_conrey(65, m).unwrap();
            assert_eq!(chi.order(), 4);
            assert!(chi.is_totally(4));
            assert_eq!(chi.conrey_index(), m);
        }
    }

    #[test]
    fn conrey_errors() {
        assert!(matches!(
            DirichletCharacter::from_conrey(65, 5),
            Err(CharacterError::NotCoprime { .. })
        ));
        assert!(matches!(
            DirichletCharacter::from_conrey(25, 7),
            Err(CharacterError::NotPrimitive { .. })
        ));
        assert!(matches!(
            DirichletCharacter::from_conrey(11, 2),
            Err(CharacterError::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn table_matches_pointwise() {
        for (q, m) in [(65u64, 8u64), (80, 3), (63, 2), (144, 7), (1, 1)] {
            let Ok(chi) = DirichletCharacter::from_conrey(q, m) else {
                continue;
            };
            let t = chi.table();
            for n in 0..q {
                assert_eq!(chi.value12(n as i64).unwrap_or(ZERO), t[n as usize]);
            }
            assert_eq!(chi.value12(-1).map(|e| e == 0), Some(chi.is_even()));
        }
    }

    #[test]
    fn sixteen_has_four_quartic_characters() {
        let quartic: Vec<_> = (1..16)
            .step_by(2)
            .filter_map(|m| DirichletCharacter::from_conrey(16, m).ok())
            .filter(|c| c.order() == 4)
            .collect();
        assert_eq!(quartic.len(), 4);
    }
}

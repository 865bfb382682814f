//! Exact arithmetic in the Gaussian integers ℤ[i] and the Eisenstein
//! integers ℤ[ω], together with the quartic and cubic residue symbols.
//!
//! Residue symbols are carried as exponents of a root of unity (see
//! [`ZetaPower`]); conversion to `Complex64` only happens at the numeric
//! boundary.

mod eisenstein;
mod gaussian;

pub use eisenstein::{
    cubic_residue_symbol, primary_associate_eisenstein, split_prime_eisenstein, EisensteinInt,
};
pub use gaussian::{
    primary_associate_gaussian, quartic_residue_symbol, split_prime_gaussian, GaussianInt,
};

use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("zero has no primary associate")]
    Zero,
    #[error("{0} is divisible by 1+i")]
    EvenElement(String),
    #[error("{0} is divisible by the ramified prime 1-ω")]
    RamifiedElement(String),
    #[error("{0} does not split in this ring")]
    NonSplitPrime(u64),
    #[error("modulus {0} is not a prime of split norm")]
    BadModulus(String),
}

/// `ζ_order^exponent`, or zero.
///
/// Used for residue symbols (order 3 or 4) and for character values
/// (order ℓ). `exponent` is reduced into `[0, order)`; `None` is the
/// distinguished zero value taken when the argument is not a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZetaPower {
    order: u8,
    exponent: Option<u8>,
}

impl ZetaPower {
    pub fn root(order: u8, exponent: i64) -> Self {
        assert!(order > 0);
        ZetaPower {
            order,
            exponent: Some(exponent.rem_euclid(order as i64) as u8),
        }
    }

    pub fn zero(order: u8) -> Self {
        ZetaPower {
            order,
            exponent: None,
        }
    }

    pub fn one(order: u8) -> Self {
        Self::root(order, 0)
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn exponent(&self) -> Option<u8> {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.exponent.is_none()
    }

    pub fn pow(self, k: i64) -> ZetaPower {
        match self.exponent {
            Some(a) => ZetaPower::root(self.order, a as i64 * k),
            None if k == 0 => ZetaPower::one(self.order),
            None => self,
        }
    }

    pub fn conj(self) -> ZetaPower {
        self.pow(-1)
    }

    /// Multiplicative order of the value (1 for ζ^0); 0 for the zero value.
    pub fn multiplicative_order(&self) -> u8 {
        match self.exponent {
            None => 0,
            Some(e) => self.order / gcd_u8(self.order, e),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self.exponent {
            None => Complex64::new(0.0, 0.0),
            Some(e) => root_of_unity(self.order as u32, e as u32),
        }
    }
}

fn gcd_u8(a: u8, b: u8) -> u8 {
    if b == 0 {
        a
    } else {
        gcd_u8(b, a % b)
    }
}

/// Product of two values of the same order.
impl std::ops::Mul for ZetaPower {
    type Output = ZetaPower;

    fn mul(self, other: ZetaPower) -> ZetaPower {
        assert_eq!(self.order, other.order, "orders must agree");
        match (self.exponent, other.exponent) {
            (Some(a), Some(b)) => ZetaPower::root(self.order, a as i64 + b as i64),
            _ => ZetaPower::zero(self.order),
        }
    }
}

/// `exp(2πi k / n)` with the axis points returned exactly.
pub fn root_of_unity(n: u32, k: u32) -> Complex64 {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (TAU * k as f64 / n as f64).sin_cos();
    Complex64::new(c, s)
}

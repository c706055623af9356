use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::ExactError;

/// A field element. Over a prime field the canonical representative is an
/// integer in `[0, p)`; over the rationals it is an arbitrary reduced fraction.
pub type Elem = BigRational;

/// A prime modulus, validated by trial division.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, ExactError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(ExactError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientField {
    Rationals,
    PrimeField(Prime),
}

impl CoefficientField {
    /// Convenience constructor for `F_p`.
    pub fn prime(p: u64) -> Result<Self, ExactError> {
        Prime::new(p).map(CoefficientField::PrimeField)
    }

    pub fn characteristic(self) -> u64 {
        match self {
            CoefficientField::Rationals => 0,
            CoefficientField::PrimeField(p) => p.get(),
        }
    }

    pub fn zero(self) -> Elem {
        Elem::zero()
    }

    pub fn one(self) -> Elem {
        Elem::one()
    }

    pub fn from_int(self, n: impl Into<BigInt>) -> Elem {
        let n: BigInt = n.into();
        match self {
            CoefficientField::Rationals => Elem::from_integer(n),
            CoefficientField::PrimeField(p) => Elem::from_integer(n.mod_floor(&BigInt::from(p.get()))),
        }
    }

    /// Maps a rational number into this field. Fails over `F_p` when the
    /// denominator is divisible by `p`.
    pub fn reduce(self, x: &BigRational) -> Result<Elem, ExactError> {
        match self {
            CoefficientField::Rationals => Ok(x.clone()),
            CoefficientField::PrimeField(p) => {
                let modulus = BigInt::from(p.get());
                let num = x.numer().mod_floor(&modulus);
                let den = x.denom().mod_floor(&modulus);
                if den.is_zero() {
                    return Err(ExactError::NonInvertible {
                        value: x.to_string(),
                        field: self,
                    });
                }
                let inv = mod_inverse(&den, &modulus);
                Ok(Elem::from_integer((num * inv).mod_floor(&modulus)))
            }
        }
    }

    fn normalize(self, x: Elem) -> Elem {
        match self {
            CoefficientField::Rationals => x,
            CoefficientField::PrimeField(p) => {
                debug_assert!(x.is_integer());
                Elem::from_integer(x.to_integer().mod_floor(&BigInt::from(p.get())))
            }
        }
    }

    pub fn add(self, a: &Elem, b: &Elem) -> Elem {
        self.normalize(a + b)
    }

    pub fn sub(self, a: &Elem, b: &Elem) -> Elem {
        self.normalize(a - b)
    }

    pub fn mul(self, a: &Elem, b: &Elem) -> Elem {
        self.normalize(a * b)
    }

    pub fn neg(self, a: &Elem) -> Elem {
        self.normalize(-a)
    }

    pub fn inv(self, a: &Elem) -> Result<Elem, ExactError> {
        if a.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        match self {
            CoefficientField::Rationals => Ok(a.recip()),
            CoefficientField::PrimeField(p) => {
                let modulus = BigInt::from(p.get());
                Ok(Elem::from_integer(mod_inverse(&a.to_integer(), &modulus)))
            }
        }
    }

    pub fn div(self, a: &Elem, b: &Elem) -> Result<Elem, ExactError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Canonical `u64` residue of an integer-valued element (prime fields only).
    pub(crate) fn residue(self, a: &Elem) -> u64 {
        match self {
            CoefficientField::Rationals => panic!("residue requested over the rationals"),
            CoefficientField::PrimeField(_) => a
                .to_integer()
                .to_u64()
                .expect("prime-field element is a canonical residue"),
        }
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Rationals => write!(f, "Q"),
            CoefficientField::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

impl Serialize for CoefficientField {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    let egcd = a.extended_gcd(modulus);
    debug_assert!(egcd.gcd.abs().is_one());
    egcd.x.mod_floor(modulus)
}

/// `C(n, k)` by the multiplicative formula; zero outside `0 <= k <= n`.
pub fn binom(n: i64, k: i64) -> Result<BigInt, ExactError> {
    if n < 0 {
        return Err(ExactError::NegativeBinomial(n));
    }
    Ok(choose(n as u64, k))
}

pub(crate) fn choose(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binom_examples() {
        assert_eq!(binom(3, 1).unwrap(), BigInt::from(3));
        assert_eq!(binom(3, 2).unwrap(), BigInt::from(3));
        assert_eq!(binom(5, -1).unwrap(), BigInt::zero());
        assert_eq!(binom(5, 6).unwrap(), BigInt::zero());
        assert!(matches!(binom(-1, 0), Err(ExactError::NegativeBinomial(-1))));
    }

    #[test]
    fn binom_large_is_exact() {
        // C(200, 100) has 59 digits.
        let c = binom(200, 100).unwrap();
        assert_eq!(
            c.to_string(),
            "90548514656103281165404177077484163874504589675413336841320"
        );
    }

    #[test]
    fn primes_are_checked() {
        assert!(CoefficientField::prime(7).is_ok());
        assert!(matches!(CoefficientField::prime(9), Err(ExactError::NotPrime(9))));
        assert!(CoefficientField::prime(1).is_err());
        assert!(CoefficientField::prime(0).is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = CoefficientField::prime(5).unwrap();
        let a = f.from_int(3);
        let b = f.from_int(4);
        assert_eq!(f.add(&a, &b), f.from_int(2));
        assert_eq!(f.mul(&a, &b), f.from_int(2));
        assert_eq!(f.neg(&a), f.from_int(2));
        assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        assert_eq!(f.from_int(-1), f.from_int(4));
        let half = Elem::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(f.reduce(&half).unwrap(), f.from_int(3));
        let fifth = Elem::new(BigInt::from(1), BigInt::from(5));
        assert!(f.reduce(&fifth).is_err());
        assert!(f.inv(&f.zero()).is_err());
    }

    proptest! {
        #[test]
        fn pascal_identity(n in 1i64..=60, k in 0i64..=60) {
            prop_assume!(k <= n);
            let lhs = binom(n, k).unwrap();
            let rhs = binom(n - 1, k - 1).unwrap() + binom(n - 1, k).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

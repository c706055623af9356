use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::field::{choose, CoefficientField, Elem};
use super::ExactError;

/// Dense univariate polynomial over a [`CoefficientField`]; `coeffs[i]` is the
/// coefficient of `x^i` and the leading coefficient is never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    field: CoefficientField,
    coeffs: Vec<Elem>,
}

impl UniPoly {
    pub fn new(field: CoefficientField, coeffs: Vec<Elem>) -> Result<Self, ExactError> {
        let coeffs = coeffs
            .iter()
            .map(|c| field.reduce(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::trimmed(field, coeffs))
    }

    pub fn from_integers<T: Into<BigInt> + Clone>(field: CoefficientField, coeffs: &[T]) -> Self {
        let coeffs = coeffs.iter().map(|c| field.from_int(c.clone())).collect();
        Self::trimmed(field, coeffs)
    }

    fn trimmed(field: CoefficientField, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn zero(field: CoefficientField) -> Self {
        UniPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: CoefficientField, c: impl Into<BigInt>) -> Self {
        Self::trimmed(field, vec![field.from_int(c)])
    }

    /// `c·x^k`.
    pub fn monomial(field: CoefficientField, c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![Elem::zero(); k + 1];
        coeffs[k] = field.from_int(c);
        Self::trimmed(field, coeffs)
    }

    /// `(1 + x)^n`, built from binomial coefficients.
    pub fn one_plus_x_pow(field: CoefficientField, n: usize) -> Self {
        let coeffs = (0..=n).map(|k| field.from_int(choose(n as u64, k as i64))).collect();
        Self::trimmed(field, coeffs)
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Elem {
        self.coeffs.get(k).cloned().unwrap_or_else(Elem::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn check_field(&self, other: &UniPoly) -> Result<(), ExactError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(ExactError::FieldMismatch(self.field, other.field))
        }
    }

    pub fn add(&self, other: &UniPoly) -> Result<Self, ExactError> {
        self.check_field(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.field.add(&self.coeff(k), &other.coeff(k)))
            .collect();
        Ok(Self::trimmed(self.field, coeffs))
    }

    pub fn sub(&self, other: &UniPoly) -> Result<Self, ExactError> {
        self.check_field(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.field.sub(&self.coeff(k), &other.coeff(k)))
            .collect();
        Ok(Self::trimmed(self.field, coeffs))
    }

    pub fn mul(&self, other: &UniPoly) -> Result<Self, ExactError> {
        self.check_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.field));
        }
        let mut coeffs = vec![Elem::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = self.field.add(&coeffs[i + j], &self.field.mul(a, b));
            }
        }
        Ok(Self::trimmed(self.field, coeffs))
    }

    pub fn scale(&self, c: &Elem) -> Result<Self, ExactError> {
        let c = self.field.reduce(c)?;
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, &c)).collect();
        Ok(Self::trimmed(self.field, coeffs))
    }

    /// Euclidean division: `self = q·g + r` with `deg r < deg g`.
    pub fn divrem(&self, g: &UniPoly) -> Result<(UniPoly, UniPoly), ExactError> {
        self.check_field(g)?;
        let Some(dg) = g.degree() else {
            return Err(ExactError::DivisionByZero);
        };
        let f = self.field;
        let lead_inv = f.inv(&g.coeffs[dg])?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Elem::zero(); rem.len().saturating_sub(dg)];
        while rem.len() > dg {
            let k = rem.len() - 1;
            let c = f.mul(&rem[k], &lead_inv);
            if !c.is_zero() {
                let shift = k - dg;
                for (i, gc) in g.coeffs.iter().enumerate() {
                    rem[shift + i] = f.sub(&rem[shift + i], &f.mul(&c, gc));
                }
                quot[shift] = c;
            }
            rem.pop();
        }
        Ok((Self::trimmed(f, quot), Self::trimmed(f, rem)))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c < &Elem::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            let sep = match (first, negative) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            f.write_str(sep)?;
            let coef = if abs.is_one() && k > 0 {
                String::new()
            } else if k > 0 {
                format!("{abs}*")
            } else {
                abs.to_string()
            };
            match k {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

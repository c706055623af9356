//! Truncated polynomial rings `k[x_1..x_m]/(x_1^{t_1}, .., x_m^{t_m})`.
//!
//! These model the cohomology of a product of projective spaces: a factor
//! `P^{t-1}` contributes a generator `x` with `x^t = 0`. Degrees are polynomial
//! degrees; the cohomological degree is twice that.
//!
//! Polynomials keep their terms in a sorted map keyed by dense exponent
//! vectors, so equality is structural and printing is canonical.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{CoefficientField, Elem, ExactError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` has truncation order 0")]
    ZeroTruncation(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("exponent {exponent} of `{var}` is not below its truncation order {truncation}")]
    ExponentOutOfRange {
        var: String,
        exponent: u32,
        truncation: u16,
    },
    #[error("constant term {0} is not invertible")]
    NotAUnit(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Coefficient domain of a truncated ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffDomain {
    Integers,
    Field(CoefficientField),
}

impl CoeffDomain {
    fn arithmetic(self) -> CoefficientField {
        match self {
            CoeffDomain::Integers => CoefficientField::Rationals,
            CoeffDomain::Field(f) => f,
        }
    }
}

impl fmt::Display for CoeffDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffDomain::Integers => f.write_str("Z"),
            CoeffDomain::Field(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    names: Vec<String>,
    truncations: Vec<u16>,
    domain: CoeffDomain,
}

pub type Ring = Arc<RingSpec>;

/// Integer ring with the given `(name, truncation order)` generators, in order.
pub fn make_ring<S: AsRef<str>>(spec: &[(S, u16)]) -> Result<Ring, RingError> {
    make_ring_over(spec, CoeffDomain::Integers)
}

pub fn make_ring_over<S: AsRef<str>>(spec: &[(S, u16)], domain: CoeffDomain) -> Result<Ring, RingError> {
    let mut seen = HashSet::new();
    for (name, t) in spec {
        let name = name.as_ref();
        if !seen.insert(name) {
            return Err(RingError::DuplicateVariable(name.to_string()));
        }
        if *t == 0 {
            return Err(RingError::ZeroTruncation(name.to_string()));
        }
    }
    Ok(Arc::new(RingSpec {
        names: spec.iter().map(|(n, _)| n.as_ref().to_string()).collect(),
        truncations: spec.iter().map(|(_, t)| *t).collect(),
        domain,
    }))
}

impl RingSpec {
    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn truncations(&self) -> &[u16] {
        &self.truncations
    }

    pub fn domain(&self) -> CoeffDomain {
        self.domain
    }

    pub fn var_index(&self, name: &str) -> Result<usize, RingError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| RingError::UnknownVariable(name.to_string()))
    }

    /// Degree of the top monomial `∏ x_i^{t_i - 1}`.
    pub fn top_degree(&self) -> usize {
        self.truncations.iter().map(|&t| t as usize - 1).sum()
    }

    pub fn top_exponents(&self) -> Vec<u16> {
        self.truncations.iter().map(|&t| t - 1).collect()
    }

    /// Same generators over another coefficient domain.
    pub fn base_change(&self, domain: CoeffDomain) -> Ring {
        Arc::new(RingSpec {
            domain,
            ..self.clone()
        })
    }

    /// Canonical text of a monomial, e.g. `w^2*a1`; `1` for the empty product.
    pub fn monomial_text(&self, exponents: &[u16]) -> String {
        let parts: Vec<String> = self
            .names
            .iter()
            .zip(exponents)
            .filter(|(_, &e)| e > 0)
            .map(|(n, &e)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// All exponent vectors of total degree `degree`, each exponent below its
/// truncation order, in descending lexicographic order (`w^2, w*z, z^2`).
pub fn monomial_basis(ring: &RingSpec, degree: usize) -> Vec<Vec<u16>> {
    fn extend(truncs: &[u16], remaining: usize, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        let Some((&t, rest)) = truncs.split_first() else {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        };
        let capacity: usize = rest.iter().map(|&t| t as usize - 1).sum();
        let hi = remaining.min(t as usize - 1);
        for e in (0..=hi).rev() {
            if remaining - e > capacity {
                break;
            }
            prefix.push(e as u16);
            extend(rest, remaining - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&ring.truncations, degree, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPoly {
    ring: Ring,
    terms: BTreeMap<Vec<u16>, Elem>,
}

impl TruncatedPoly {
    pub fn zero(ring: &Ring) -> Self {
        TruncatedPoly {
            ring: Arc::clone(ring),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, 1)
    }

    pub fn constant(ring: &Ring, c: impl Into<BigInt>) -> Self {
        let c = ring.domain.arithmetic().from_int(c);
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(vec![0; ring.num_vars()], c);
        }
        p
    }

    /// `c · ∏ x_i^{e_i}`; zero if any exponent reaches its truncation order.
    pub fn monomial(ring: &Ring, exponents: &[u32], c: impl Into<BigInt>) -> Result<Self, RingError> {
        if exponents.len() != ring.num_vars() {
            return Err(RingError::RingMismatch);
        }
        let c = ring.domain.arithmetic().from_int(c);
        let mut p = Self::zero(ring);
        if c.is_zero() || exponents.iter().zip(&ring.truncations).any(|(&e, &t)| e >= t as u32) {
            return Ok(p);
        }
        p.terms.insert(exponents.iter().map(|&e| e as u16).collect(), c);
        Ok(p)
    }

    pub fn var(ring: &Ring, name: &str) -> Result<Self, RingError> {
        let i = ring.var_index(name)?;
        let mut e = vec![0u32; ring.num_vars()];
        e[i] = 1;
        Self::monomial(ring, &e, 1)
    }

    /// Builds a polynomial from explicit terms, rejecting out-of-range exponents.
    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Vec<u16>, Elem)>) -> Result<Self, RingError> {
        let k = ring.domain.arithmetic();
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            if e.len() != ring.num_vars() {
                return Err(RingError::RingMismatch);
            }
            for (i, (&x, &t)) in e.iter().zip(&ring.truncations).enumerate() {
                if x >= t {
                    return Err(RingError::ExponentOutOfRange {
                        var: ring.names[i].clone(),
                        exponent: x as u32,
                        truncation: t,
                    });
                }
            }
            let c = k.reduce(&c)?;
            p.accumulate(e, &c);
        }
        Ok(p)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, Elem> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u16]) -> Elem {
        self.terms.get(exponents).cloned().unwrap_or_else(Elem::zero)
    }

    pub fn constant_term(&self) -> Elem {
        self.coefficient(&vec![0; self.ring.num_vars()])
    }

    fn accumulate(&mut self, e: Vec<u16>, c: &Elem) {
        let k = self.ring.domain.arithmetic();
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                if !c.is_zero() {
                    slot.insert(c.clone());
                }
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = k.add(slot.get(), c);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    fn same_ring(&self, other: &TruncatedPoly) -> Result<(), RingError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(RingError::RingMismatch)
        }
    }

    pub fn add(&self, other: &TruncatedPoly) -> Result<Self, RingError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let k = self.ring.domain.arithmetic();
        TruncatedPoly {
            ring: Arc::clone(&self.ring),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), k.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &TruncatedPoly) -> Result<Self, RingError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Elem) -> Result<Self, RingError> {
        let k = self.ring.domain.arithmetic();
        let c = k.reduce(c)?;
        let mut out = Self::zero(&self.ring);
        for (e, x) in &self.terms {
            out.accumulate(e.clone(), &k.mul(x, &c));
        }
        Ok(out)
    }

    /// Truncated product: any exponent reaching its truncation order is dropped.
    pub fn multiply(&self, other: &TruncatedPoly) -> Result<Self, RingError> {
        self.same_ring(other)?;
        let k = self.ring.domain.arithmetic();
        let truncs = &self.ring.truncations;
        let mut out = Self::zero(&self.ring);
        let mut e = vec![0u16; truncs.len()];
        for (e1, c1) in &self.terms {
            'pair: for (e2, c2) in &other.terms {
                for i in 0..truncs.len() {
                    let s = e1[i] + e2[i];
                    if s >= truncs[i] {
                        continue 'pair;
                    }
                    e[i] = s;
                }
                out.accumulate(e.clone(), &k.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self, RingError> {
        let mut acc = Self::one(&self.ring);
        for _ in 0..n {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Coefficient of the top monomial `∏ x_i^{t_i - 1}`: evaluation against the
    /// fundamental class.
    pub fn top_integral(&self) -> Elem {
        self.coefficient(&self.ring.top_exponents())
    }

    /// Multiplicative inverse; requires an invertible constant term. Over the
    /// integers that means `±1`.
    pub fn inverse_unit(&self) -> Result<Self, RingError> {
        let c0 = self.constant_term();
        let invertible = match self.ring.domain {
            CoeffDomain::Integers => c0.abs().is_one(),
            CoeffDomain::Field(_) => !c0.is_zero(),
        };
        if !invertible {
            return Err(RingError::NotAUnit(c0.to_string()));
        }
        let k = self.ring.domain.arithmetic();
        let c0_inv = k.inv(&c0)?;
        // self = c0 (1 + n) with n nilpotent; (1 + n)^{-1} = Σ (-n)^j.
        let mut minus_n = self.scale(&k.neg(&c0_inv))?;
        minus_n.terms.remove(&vec![0; self.ring.num_vars()]);
        let mut sum = Self::one(&self.ring);
        let mut power = Self::one(&self.ring);
        loop {
            power = power.multiply(&minus_n)?;
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power)?;
        }
        sum.scale(&c0_inv)
    }

    /// Degree-`d` homogeneous component.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        TruncatedPoly {
            ring: Arc::clone(&self.ring),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| degree_of(e) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when every term has degree `d`; the zero polynomial qualifies for every `d`.
    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|e| degree_of(e) == d)
    }

    /// The common degree of all terms; `None` for zero or inhomogeneous polynomials.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let d = degree_of(self.terms.keys().next()?);
        self.is_homogeneous_of(d).then_some(d)
    }

    /// Reinterprets the coefficients in another ring with the same generators.
    pub fn base_change(&self, target: &Ring) -> Result<Self, RingError> {
        if self.ring.names != target.names || self.ring.truncations != target.truncations {
            return Err(RingError::RingMismatch);
        }
        let k = target.domain.arithmetic();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            out.accumulate(e.clone(), &k.reduce(c)?);
        }
        Ok(out)
    }

    /// Exponent-permuted copy: variable `i` is renamed to variable `perm[i]`.
    pub fn permute_variables(&self, perm: &[usize]) -> Result<Self, RingError> {
        let n = self.ring.num_vars();
        if perm.len() != n || (0..n).any(|i| !perm.contains(&i)) {
            return Err(RingError::RingMismatch);
        }
        if (0..n).any(|i| self.ring.truncations[i] != self.ring.truncations[perm[i]]) {
            return Err(RingError::RingMismatch);
        }
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            let mut f = vec![0u16; n];
            for i in 0..n {
                f[perm[i]] = e[i];
            }
            out.accumulate(f, c);
        }
        Ok(out)
    }
}

pub(crate) fn degree_of(e: &[u16]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

/// Canonical text: terms in descending lexicographic exponent order, each
/// with an explicit coefficient, e.g. `3*w^2*z + 1*a1 - 2`.
impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if e.iter().all(|&x| x == 0) {
                write!(f, "{abs}")?;
            } else {
                write!(f, "{abs}*{}", self.ring.monomial_text(e))?;
            }
        }
        Ok(())
    }
}

//! Chern and Euler classes, represented only through their coefficient lists
//! in a truncated cohomology ring.

use thiserror::Error;

use crate::ring::{Ring, RingError, TruncatedPoly};
use crate::slice::SliceParams;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChernError {
    #[error("c_0 must be 1")]
    NonUnitConstant,
    #[error("expected {expected} Chern classes for rank {rank}, got {got}")]
    WrongLength {
        rank: usize,
        expected: usize,
        got: usize,
    },
    #[error("c_{0} is not homogeneous of degree {0}")]
    Inhomogeneous(usize),
    #[error("first Chern class of a line bundle must be homogeneous of degree 1")]
    InhomogeneousLineClass,
    #[error("variable `{var}` has truncation {actual}, expected {expected}")]
    TruncationMismatch {
        var: String,
        expected: u16,
        actual: u16,
    },
    #[error("ring does not match the slice parameters: {0}")]
    NotCanonicalRing(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A vector bundle known only through its total Chern class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSpec {
    rank: usize,
    chern: Vec<TruncatedPoly>,
}

impl BundleSpec {
    pub fn new(rank: usize, chern: Vec<TruncatedPoly>) -> Result<Self, ChernError> {
        if chern.len() != rank + 1 {
            return Err(ChernError::WrongLength {
                rank,
                expected: rank + 1,
                got: chern.len(),
            });
        }
        if chern[0] != TruncatedPoly::one(chern[0].ring()) {
            return Err(ChernError::NonUnitConstant);
        }
        for (i, c) in chern.iter().enumerate() {
            if !c.is_homogeneous_of(i) {
                return Err(ChernError::Inhomogeneous(i));
            }
        }
        Ok(BundleSpec { rank, chern })
    }

    pub fn trivial(ring: &Ring, rank: usize) -> Self {
        let mut chern = vec![TruncatedPoly::zero(ring); rank + 1];
        chern[0] = TruncatedPoly::one(ring);
        BundleSpec { rank, chern }
    }

    pub fn line(c1: TruncatedPoly) -> Result<Self, ChernError> {
        let one = TruncatedPoly::one(c1.ring());
        Self::new(1, vec![one, c1])
    }

    /// Direct sum of line bundles with the given first Chern classes: `c_i` is the
    /// `i`-th elementary symmetric polynomial of the roots.
    pub fn split(ring: &Ring, roots: &[TruncatedPoly]) -> Result<Self, ChernError> {
        let mut elem = vec![TruncatedPoly::one(ring)];
        for r in roots {
            let mut next = vec![TruncatedPoly::zero(ring); elem.len() + 1];
            for (i, e) in elem.iter().enumerate() {
                next[i] = next[i].add(e)?;
                next[i + 1] = next[i + 1].add(&e.multiply(r)?)?;
            }
            elem = next;
        }
        Self::new(roots.len(), elem)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn chern(&self) -> &[TruncatedPoly] {
        &self.chern
    }

    pub fn total_chern(&self) -> Result<TruncatedPoly, ChernError> {
        let ring = self.chern[0].ring().clone();
        Ok(self
            .chern
            .iter()
            .try_fold(TruncatedPoly::zero(&ring), |acc, c| acc.add(c))?)
    }

    /// Top Chern class.
    pub fn euler(&self) -> &TruncatedPoly {
        &self.chern[self.rank]
    }
}

/// Euler class of `V ⊗ L` from the Chern classes of `V` and `c_1(L)`:
/// `Σ_i c_i(V) c_1(L)^{n-i}`.
pub fn twist_euler(bundle: &BundleSpec, c1_line: &TruncatedPoly) -> Result<TruncatedPoly, ChernError> {
    if !c1_line.is_homogeneous_of(1) {
        return Err(ChernError::InhomogeneousLineClass);
    }
    let n = bundle.rank;
    let ring = c1_line.ring().clone();
    // Horner in c1(L): ((c_0 L + c_1) L + c_2) ...
    let mut acc = TruncatedPoly::zero(&ring);
    for c in &bundle.chern[..=n] {
        acc = acc.multiply(c1_line)?.add(c)?;
    }
    Ok(acc)
}

/// Euler class of `(⊕ L_k) ⊗ L` by the splitting principle: `∏ (r_k + c_1(L))`.
pub fn splitting_oracle(roots: &[TruncatedPoly], c1_line: &TruncatedPoly) -> Result<TruncatedPoly, ChernError> {
    if roots.iter().any(|r| !r.is_homogeneous_of(1)) {
        return Err(ChernError::InhomogeneousLineClass);
    }
    let ring = c1_line.ring().clone();
    roots.iter().try_fold(TruncatedPoly::one(&ring), |acc, r| {
        Ok(acc.multiply(&r.add(c1_line)?)?)
    })
}

/// Dual of the tautological quotient bundle on `P^{q-1}` with hyperplane
/// class `var`: rank `q - 1`, with `c((T/L)^*)` the inverse of `1 - var`, i.e.
/// `c_j = var^j` for `0 <= j < q`.
pub fn quotient_dual_chern(ring: &Ring, q: u16, var: &str) -> Result<BundleSpec, ChernError> {
    let i = ring.var_index(var)?;
    let actual = ring.truncations()[i];
    if actual != q {
        return Err(ChernError::TruncationMismatch {
            var: var.to_string(),
            expected: q,
            actual,
        });
    }
    let x = TruncatedPoly::var(ring, var)?;
    let total = TruncatedPoly::one(ring).sub(&x)?.inverse_unit()?;
    let rank = q as usize - 1;
    let chern = (0..=rank).map(|j| total.homogeneous_part(j)).collect();
    BundleSpec::new(rank, chern)
}

/// Checks that `ring` has generators `w, a1..al, z`, all truncated at `q`.
pub fn check_canonical_ring(params: &SliceParams, ring: &Ring) -> Result<(), ChernError> {
    let expected = params.variable_names();
    if ring.names() != expected.as_slice() {
        return Err(ChernError::NotCanonicalRing(format!(
            "expected variables {expected:?}, found {:?}",
            ring.names()
        )));
    }
    if let Some((name, &t)) = ring
        .names()
        .iter()
        .zip(ring.truncations())
        .find(|(_, &t)| t as u64 != params.q)
    {
        return Err(ChernError::TruncationMismatch {
            var: name.clone(),
            expected: params.q as u16,
            actual: t,
        });
    }
    Ok(())
}

/// The `2l` Euler classes `e(A_i) = a_i + w` and
/// `e(B_i) = e((T/L)^*_{a_i} ⊗ L_z)`, interleaved as `A_1, B_1, A_2, ..`.
pub fn factor_euler_classes(params: &SliceParams, ring: &Ring) -> Result<Vec<TruncatedPoly>, ChernError> {
    check_canonical_ring(params, ring)?;
    let q = params.q as u16;
    let w = TruncatedPoly::var(ring, "w")?;
    let z = TruncatedPoly::var(ring, "z")?;
    let mut out = Vec::with_capacity(2 * params.l as usize);
    for i in 1..=params.l {
        let name = format!("a{i}");
        let a = TruncatedPoly::var(ring, &name)?;
        let line_a = BundleSpec::line(a.add(&w)?)?;
        out.push(line_a.euler().clone());
        let quotient = quotient_dual_chern(ring, q, &name)?;
        out.push(twist_euler(&quotient, &z)?);
    }
    Ok(out)
}

/// Euler class of the resolution bundle:
/// `e(E) = ∏_{i=1}^{l} (a_i + w) · Σ_{j<q} a_i^j z^{q-1-j}`.
pub fn euler_e(params: &SliceParams, ring: &Ring) -> Result<TruncatedPoly, ChernError> {
    let factors = factor_euler_classes(params, ring)?;
    factors
        .iter()
        .try_fold(TruncatedPoly::one(ring), |acc, f| Ok(acc.multiply(f)?))
}

//! The banded binomial matrix `M` with entries `C(l, j - i + 1)`, its
//! polynomial-row model, and the rank drop from `q - l + 1` over `Q` to
//! `q - l` over `F_p` when `q = p^d`.
//!
//! Row `i` of `M` is the coefficient list (from `x^1` to `x^{q-1}`) of
//! `x^i (1 + x)^l`, with the constant term of the first row and the `x^q`
//! term of the last row removed. A left-kernel vector `c` therefore exists
//! exactly when `(1 + x)^l` divides some `A + B x^q`, which happens over `F_p`
//! because `(1 + x)^q = 1 + x^q` there.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{choose, CoefficientField, Elem, ExactError, Label, LabeledMatrix, UniPoly};
use crate::slice::ParamError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LemmaError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("q = {q} is not a power of p = {p}")]
    NotPrimePower { q: u64, p: u64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn check_q_l(q: u64, l: u64, min_l: u64) -> Result<(), ParamError> {
    if l < min_l {
        return Err(ParamError::LTooSmall { l, min: min_l });
    }
    if l > q {
        return Err(ParamError::LExceedsQ { l, q });
    }
    Ok(())
}

/// `Some(d)` when `q = p^d` with `d >= 1`.
pub fn prime_power_exponent(q: u64, p: u64) -> Option<u32> {
    if p < 2 || q < p {
        return None;
    }
    let mut d = 0;
    let mut x = q;
    while x % p == 0 {
        x /= p;
        d += 1;
    }
    (x == 1).then_some(d)
}

/// `(q - l + 1) × (q - 1)` matrix with entry `(i, j) = C(l, j - i + 1)`.
/// Rows are labelled by the `w`-power `i`; column `j` by the `w`-power `q - 2 - j`.
pub fn build_m(q: u64, l: u64, field: CoefficientField) -> Result<LabeledMatrix, LemmaError> {
    check_q_l(q, l, 3)?;
    let nrows = (q - l + 1) as usize;
    let ncols = (q - 1) as usize;
    let rows: Vec<Vec<Elem>> = (0..nrows)
        .map(|i| {
            (0..ncols)
                .map(|j| Elem::from_integer(choose(l, j as i64 - i as i64 + 1)))
                .collect()
        })
        .collect();
    let row_labels = (0..nrows).map(Label::WPower).collect();
    let col_labels = (0..ncols).map(|j| Label::WPower(ncols - 1 - j)).collect();
    Ok(LabeledMatrix::new(field, rows, row_labels, col_labels)?)
}

/// Polynomials over `Q` whose coefficients of `x^1 .. x^{q-1}` are the rows of `M`:
/// `(1+x)^l - 1`, `x(1+x)^l`, .., `x^{q-l}(1+x)^l - x^q`. When `q = l` both
/// corrections apply to the single row.
pub fn row_polynomials(q: u64, l: u64) -> Result<Vec<UniPoly>, LemmaError> {
    check_q_l(q, l, 3)?;
    let f = CoefficientField::Rationals;
    let base = UniPoly::one_plus_x_pow(f, l as usize);
    let last = (q - l) as usize;
    (0..=last)
        .map(|i| {
            let mut row = UniPoly::monomial(f, 1, i).mul(&base)?;
            if i == 0 {
                row = row.sub(&UniPoly::constant(f, 1))?;
            }
            if i == last {
                row = row.sub(&UniPoly::monomial(f, 1, q as usize))?;
            }
            Ok(row)
        })
        .collect()
}

/// Outcome of checking the ranks of `M` over `Q` and `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankLemmaCheck {
    pub p: u64,
    pub d: u32,
    pub l: u64,
    pub q: u64,
    pub rank_q: usize,
    pub rank_fp: usize,
    pub expected_q: usize,
    pub expected_fp: usize,
    /// The weaker bound `q - l - 2` that a counting argument gives directly.
    pub loose_lower_bound: i64,
    pub pass: bool,
}

impl RankLemmaCheck {
    pub const CSV_HEADER: &'static str = "p,d,l,q,rank_Q,rank_Fp,expected_Q,expected_Fp,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.p, self.d, self.l, self.q, self.rank_q, self.rank_fp, self.expected_q, self.expected_fp, self.pass
        )
    }
}

pub fn verify_rank_lemma(q: u64, l: u64, p: u64) -> Result<RankLemmaCheck, LemmaError> {
    let field = CoefficientField::prime(p).map_err(|_| ParamError::NotPrime(p))?;
    let d = prime_power_exponent(q, p).ok_or(LemmaError::NotPrimePower { q, p })?;
    let m = build_m(q, l, CoefficientField::Rationals)?;
    let rank_q = m.rank();
    let rank_fp = m.change_field(field)?.rank();
    let expected_q = (q - l + 1) as usize;
    let expected_fp = (q - l) as usize;
    Ok(RankLemmaCheck {
        p,
        d,
        l,
        q,
        rank_q,
        rank_fp,
        expected_q,
        expected_fp,
        loose_lower_bound: q as i64 - l as i64 - 2,
        pass: rank_q == expected_q && rank_fp == expected_fp,
    })
}

/// Constants with `(1 + x)^l | A + B x^q`, and the cofactor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dependence {
    pub a: Elem,
    pub b: Elem,
    pub cofactor: UniPoly,
}

/// Searches for `(A, B) != (0, 0)` with `(1 + x)^l | A + B x^q` over `field`.
///
/// Both `1` and `x^q` are reduced modulo `(1 + x)^l`; a dependence is a
/// left-kernel vector of the two remainders. The result is normalized so the
/// first nonzero of `(A, B)` is one.
pub fn dependence_search(q: u64, l: u64, field: CoefficientField) -> Result<Option<Dependence>, LemmaError> {
    check_q_l(q, l, 2)?;
    let divisor = UniPoly::one_plus_x_pow(field, l as usize);
    let one = UniPoly::constant(field, 1);
    let x_q = UniPoly::monomial(field, 1, q as usize);
    let (_, r0) = one.divrem(&divisor)?;
    let (_, r1) = x_q.divrem(&divisor)?;
    let width = l as usize;
    let rows = vec![
        (0..width).map(|k| r0.coeff(k)).collect(),
        (0..width).map(|k| r1.coeff(k)).collect(),
    ];
    let system = LabeledMatrix::new(
        field,
        rows,
        vec![Label::Index(0), Label::Index(1)],
        (0..width).map(Label::Index).collect(),
    )?;
    let Some(v) = system.left_kernel().into_iter().next() else {
        return Ok(None);
    };
    let lead = v.iter().find(|x| !x.is_zero()).expect("kernel vector is nonzero");
    let s = field.inv(lead)?;
    let a = field.mul(&v[0], &s);
    let b = field.mul(&v[1], &s);
    let target = one.scale(&a)?.add(&x_q.scale(&b)?)?;
    let (cofactor, rem) = target.divrem(&divisor)?;
    debug_assert!(rem.is_zero());
    Ok(Some(Dependence { a, b, cofactor }))
}

/// The vector `c_i = C(q - l, i)`, `0 <= i <= q - l`. Since
/// `Σ c_i x^i (1+x)^l = (1+x)^q = 1 + x^q` over `F_p`, it annihilates `M` mod `p`.
/// For `q = l` this is the single scalar `1`, the row itself vanishing mod `p`.
pub fn kernel_witness(q: u64, l: u64, p: u64) -> Result<Vec<BigInt>, LemmaError> {
    CoefficientField::prime(p).map_err(|_| ParamError::NotPrime(p))?;
    prime_power_exponent(q, p).ok_or(LemmaError::NotPrimePower { q, p })?;
    check_q_l(q, l, 3)?;
    let k = q - l;
    let c: Vec<BigInt> = (0..=k).map(|i| choose(k, i as i64)).collect();
    debug_assert!(c[0].is_one());
    Ok(c)
}

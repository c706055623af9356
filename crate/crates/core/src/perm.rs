//! Permutations in one-line notation: the Schubert parameter `y`, the
//! block-antidiagonal point `x`, Coxeter length, Bruhat comparison, and the
//! slice equations `B_i J A_i = 0`.
//!
//! Permutation matrices follow the convention `entry (i, σ(i)) = 1`.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exact::{CoefficientField, Elem, ExactError, LabeledMatrix};
use crate::slice::SliceParams;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("not a permutation: duplicates {duplicates:?}, missing {missing:?}")]
    Invalid {
        duplicates: Vec<usize>,
        missing: Vec<usize>,
    },
    #[error("permutations of different sizes: {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("matrix {name} is {rows}x{cols}, expected {q}x{q}")]
    Dimension {
        name: String,
        rows: usize,
        cols: usize,
        q: usize,
    },
    #[error("slice point has {a} A-matrices and {b} B-matrices")]
    Arity { a: usize, b: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum Validity {
    Valid,
    Invalid {
        duplicates: Vec<usize>,
        missing: Vec<usize>,
    },
}

/// One-line notation `images[j - 1] = σ(j)` together with its bijectivity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermutationWord {
    images: Vec<usize>,
    validity: Validity,
}

impl PermutationWord {
    /// Wraps arbitrary images and records whether they form a bijection of `1..=N`.
    pub fn new(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &images {
            *counts.entry(v).or_default() += 1;
        }
        let duplicates: Vec<usize> = counts.iter().filter(|(_, &c)| c > 1).map(|(&v, _)| v).collect();
        let missing: Vec<usize> = (1..=n).filter(|v| !counts.contains_key(v)).collect();
        let validity = if duplicates.is_empty() && missing.is_empty() {
            Validity::Valid
        } else {
            Validity::Invalid { duplicates, missing }
        };
        PermutationWord { images, validity }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((1..=n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn validity(&self) -> &Validity {
        &self.validity
    }

    pub fn is_valid(&self) -> bool {
        self.validity == Validity::Valid
    }

    /// `σ(j)` for `1 <= j <= N`.
    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    fn require_valid(&self) -> Result<(), PermError> {
        match &self.validity {
            Validity::Valid => Ok(()),
            Validity::Invalid { duplicates, missing } => Err(PermError::Invalid {
                duplicates: duplicates.clone(),
                missing: missing.clone(),
            }),
        }
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &PermutationWord) -> Result<Self, PermError> {
        self.require_valid()?;
        other.require_valid()?;
        if self.len() != other.len() {
            return Err(PermError::SizeMismatch(self.len(), other.len()));
        }
        Ok(Self::new(other.images.iter().map(|&j| self.apply(j)).collect()))
    }

    pub fn inverse(&self) -> Result<Self, PermError> {
        self.require_valid()?;
        let mut inv = vec![0; self.len()];
        for (j, &v) in self.images.iter().enumerate() {
            inv[v - 1] = j + 1;
        }
        Ok(Self::new(inv))
    }

    pub fn to_json(&self) -> Value {
        json!({ "one_line": self.images, "validity": self.validity })
    }
}

/// Which reading of the defining case table to use for `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YVariant {
    /// The case table exactly as printed; it is not a bijection.
    Verbatim,
    /// Second case `q + 1 - j` replaced by `q + 2 - j`; everything else unchanged.
    RepairedCase2,
}

impl YVariant {
    pub fn label(self) -> &'static str {
        match self {
            YVariant::Verbatim => "verbatim (as printed)",
            YVariant::RepairedCase2 => "repaired case 2 (not as printed)",
        }
    }
}

/// `y ∈ S_{q(l+2)}` evaluated case by case.
pub fn build_y(params: &SliceParams, variant: YVariant) -> PermutationWord {
    let q = params.q as usize;
    let l = params.l as usize;
    let n = q * (l + 2);
    let images = (1..=n)
        .map(|j| {
            if j == 1 {
                (l + 1) * q
            } else if j <= q {
                match variant {
                    YVariant::Verbatim => q + 1 - j,
                    YVariant::RepairedCase2 => q + 2 - j,
                }
            } else if j == q + 1 {
                (l + 2) * q
            } else if j < (l + 1) * q {
                match j % q {
                    0 => (l + 2) * q - j,
                    1 => (l + 2) * q + 2 - j,
                    _ => (l + 2) * q + 1 - j,
                }
            } else if j == (l + 1) * q {
                1
            } else if j < (l + 2) * q {
                (2 * l + 3) * q - j
            } else {
                q + 1
            }
        })
        .collect();
    PermutationWord::new(images)
}

/// The point `x`: block row 1 to block column 1, block rows `2..=l+1` to
/// columns `l+1` down to `2`, block row `l+2` to column `l+2`; every block is
/// the `q × q` antidiagonal `J`.
pub fn build_x(params: &SliceParams) -> PermutationWord {
    let q = params.q as usize;
    let l = params.l as usize;
    let blocks = l + 2;
    let block_col = |b: usize| match b {
        1 => 1,
        b if b == blocks => blocks,
        b => l + 3 - b,
    };
    let images = (1..=blocks)
        .flat_map(|b| {
            let c = block_col(b);
            (1..=q).map(move |i| (c - 1) * q + q + 1 - i)
        })
        .collect();
    PermutationWord::new(images)
}

/// Coxeter length, the number of inversions.
pub fn length(w: &PermutationWord) -> Result<u64, PermError> {
    w.require_valid()?;
    // Fenwick tree over values.
    let n = w.len();
    let mut tree = vec![0u64; n + 1];
    let mut inversions = 0u64;
    for (seen, &v) in w.images.iter().enumerate() {
        let mut i = v;
        let mut below = 0;
        while i > 0 {
            below += tree[i];
            i &= i - 1;
        }
        inversions += seen as u64 - below;
        let mut i = v;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    Ok(inversions)
}

/// Bruhat order by the rank-matrix criterion: `u <= w` iff
/// `#{k <= i : u(k) <= j} >= #{k <= i : w(k) <= j}` for all `i, j`.
pub fn bruhat_leq(u: &PermutationWord, w: &PermutationWord) -> Result<bool, PermError> {
    u.require_valid()?;
    w.require_valid()?;
    if u.len() != w.len() {
        return Err(PermError::SizeMismatch(u.len(), w.len()));
    }
    let n = u.len();
    // Running column counts: cu[j] = #{k <= i : u(k) <= j}.
    let mut cu = vec![0i64; n + 1];
    let mut cw = vec![0i64; n + 1];
    for i in 0..n {
        for j in u.images[i]..=n {
            cu[j] += 1;
        }
        for j in w.images[i]..=n {
            cw[j] += 1;
        }
        if (1..=n).any(|j| cu[j] < cw[j]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The `q × q` antidiagonal matrix.
pub fn antidiagonal(q: usize, field: CoefficientField) -> LabeledMatrix {
    let mut j = LabeledMatrix::zeros(field, q, q);
    for i in 0..q {
        j.set(i, q - 1 - i, &Elem::one()).expect("0 and 1 live in every field");
    }
    j
}

/// Matrices `(A_1..A_l, B_1..B_l)` of a candidate point of the slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePoint {
    pub a: Vec<LabeledMatrix>,
    pub b: Vec<LabeledMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// `B_i J A_i` for each `i`.
    pub residuals: Vec<LabeledMatrix>,
}

/// Checks `B_i J A_i = 0` for every `i`.
pub fn slice_membership(pt: &SlicePoint, q: usize) -> Result<Membership, PermError> {
    if pt.a.len() != pt.b.len() {
        return Err(PermError::Arity {
            a: pt.a.len(),
            b: pt.b.len(),
        });
    }
    let check = |name: String, m: &LabeledMatrix| {
        if m.nrows() == q && m.ncols() == q {
            Ok(())
        } else {
            Err(PermError::Dimension {
                name,
                rows: m.nrows(),
                cols: m.ncols(),
                q,
            })
        }
    };
    let mut residuals = Vec::with_capacity(pt.a.len());
    for (i, (a, b)) in pt.a.iter().zip(&pt.b).enumerate() {
        check(format!("A_{}", i + 1), a)?;
        check(format!("B_{}", i + 1), b)?;
        let j = antidiagonal(q, a.field());
        residuals.push(b.mul(&j)?.mul(a)?);
    }
    Ok(Membership {
        member: residuals.iter().all(LabeledMatrix::is_zero),
        residuals,
    })
}

/// Row-major integer view of a permutation matrix, for serialization.
pub fn permutation_matrix(w: &PermutationWord) -> Vec<Vec<u8>> {
    let n = w.len();
    (0..n)
        .map(|i| {
            let mut row = vec![0u8; n];
            if let Some(&c) = w.images.get(i) {
                if (1..=n).contains(&c) {
                    row[c - 1] = 1;
                }
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slice::derive_dims;
    use proptest::prelude::*;

    fn params(p: u64, d: u32, l: u64) -> SliceParams {
        derive_dims(p, d, l).unwrap()
    }

    #[test]
    fn build_y_examples() {
        let p = params(3, 1, 3);
        let y = build_y(&p, YVariant::Verbatim);
        assert_eq!(y.images(), &[12, 2, 1, 15, 11, 9, 10, 8, 6, 7, 5, 1, 14, 13, 4]);
        assert_eq!(
            y.validity(),
            &Validity::Invalid {
                duplicates: vec![1],
                missing: vec![3]
            }
        );
        let y = build_y(&p, YVariant::RepairedCase2);
        assert_eq!(y.images(), &[12, 3, 2, 15, 11, 9, 10, 8, 6, 7, 5, 1, 14, 13, 4]);
        assert!(y.is_valid());
    }

    #[test]
    fn verbatim_collision_pattern() {
        for (p, d, l) in [(2, 2, 3), (2, 2, 4), (3, 2, 5), (5, 1, 4), (7, 1, 7)] {
            let ps = params(p, d, l);
            let q = ps.q as usize;
            let y = build_y(&ps, YVariant::Verbatim);
            assert_eq!(y.apply(q), 1);
            assert_eq!(y.apply((l as usize + 1) * q), 1);
            assert!(!y.images().contains(&q));
        }
    }

    #[test]
    fn build_x_examples() {
        let x = build_x(&params(3, 1, 3));
        assert_eq!(x.images(), &[3, 2, 1, 12, 11, 10, 9, 8, 7, 6, 5, 4, 15, 14, 13]);
        assert!(x.is_valid());
        assert_eq!(length(&x).unwrap(), 42);
        let x = build_x(&params(2, 2, 3));
        assert_eq!(&x.images()[..4], &[4, 3, 2, 1]);
    }

    #[test]
    fn x_is_an_involution() {
        for (p, d, l) in [(3, 1, 3), (2, 2, 3), (2, 3, 8), (5, 1, 4), (3, 2, 9)] {
            let x = build_x(&params(p, d, l));
            let sq = x.compose(&x).unwrap();
            assert_eq!(sq, PermutationWord::identity(x.len()));
            assert_eq!(x.inverse().unwrap(), x);
        }
    }

    #[test]
    fn length_examples() {
        assert_eq!(length(&PermutationWord::identity(5)).unwrap(), 0);
        assert_eq!(length(&PermutationWord::new(vec![3, 2, 1])).unwrap(), 3);
        let bad = PermutationWord::new(vec![1, 1, 2]);
        assert!(matches!(length(&bad), Err(PermError::Invalid { .. })));
    }

    #[test]
    fn bruhat_examples() {
        let e = PermutationWord::identity(4);
        let w = PermutationWord::new(vec![3, 1, 4, 2]);
        assert!(bruhat_leq(&e, &w).unwrap());
        assert!(bruhat_leq(&w, &w).unwrap());
        assert!(!bruhat_leq(&w, &e).unwrap());
        // s1 = 2134 and s2 = 1324 are incomparable.
        let s1 = PermutationWord::new(vec![2, 1, 3, 4]);
        let s2 = PermutationWord::new(vec![1, 3, 2, 4]);
        assert!(!bruhat_leq(&s1, &s2).unwrap());
        assert!(!bruhat_leq(&s2, &s1).unwrap());
        assert!(bruhat_leq(&s1, &PermutationWord::new(vec![4, 3, 2, 1])).unwrap());
        assert!(matches!(
            bruhat_leq(&e, &PermutationWord::identity(3)),
            Err(PermError::SizeMismatch(4, 3))
        ));
    }

    #[test]
    fn slice_membership_examples() {
        let f = CoefficientField::Rationals;
        let z = LabeledMatrix::zeros(f, 3, 3);
        let pt = SlicePoint {
            a: vec![z.clone(); 2],
            b: vec![z.clone(); 2],
        };
        assert!(slice_membership(&pt, 3).unwrap().member);

        let pt = SlicePoint {
            a: vec![antidiagonal(3, f); 3],
            b: vec![z.clone(); 3],
        };
        assert!(slice_membership(&pt, 3).unwrap().member);

        let mut a1 = z.clone();
        a1.set(2, 0, &Elem::one()).unwrap();
        let mut b1 = z.clone();
        b1.set(0, 0, &Elem::one()).unwrap();
        let pt = SlicePoint {
            a: vec![a1],
            b: vec![b1],
        };
        let m = slice_membership(&pt, 3).unwrap();
        assert!(!m.member);
        let mut expected = z.clone();
        expected.set(0, 0, &Elem::one()).unwrap();
        assert_eq!(m.residuals[0], expected);

        let pt = SlicePoint {
            a: vec![LabeledMatrix::zeros(f, 2, 3)],
            b: vec![z.clone()],
        };
        assert!(matches!(slice_membership(&pt, 3), Err(PermError::Dimension { .. })));
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = PermutationWord> {
        Just((1..=n).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(PermutationWord::new)
    }

    proptest! {
        #[test]
        fn validity_witnesses_are_sound(images in proptest::collection::vec(1usize..8, 0..8)) {
            let w = PermutationWord::new(images.clone());
            let mut sorted = images.clone();
            sorted.sort_unstable();
            let bijective = sorted == (1..=images.len()).collect::<Vec<_>>();
            prop_assert_eq!(w.is_valid(), bijective);
            if let Validity::Invalid { duplicates, missing } = w.validity() {
                for d in duplicates {
                    prop_assert!(images.iter().filter(|&&v| v == *d).count() >= 2);
                }
                for m in missing {
                    prop_assert!(!images.contains(m));
                }
            }
        }

        #[test]
        fn bruhat_is_a_partial_order_graded_by_length(u in arb_perm(6), w in arb_perm(6)) {
            prop_assert!(bruhat_leq(&u, &u).unwrap());
            let uw = bruhat_leq(&u, &w).unwrap();
            let wu = bruhat_leq(&w, &u).unwrap();
            if uw && wu {
                prop_assert_eq!(&u, &w);
            }
            if uw && u != w {
                prop_assert!(length(&u).unwrap() < length(&w).unwrap());
            }
        }

        #[test]
        fn membership_is_scale_invariant(
            entries in proptest::collection::vec(-3i64..=3, 9),
            t in -3i64..=3,
            s in -3i64..=3,
        ) {
            let f = CoefficientField::Rationals;
            let rows: Vec<Vec<i64>> = entries.chunks(3).map(<[i64]>::to_vec).collect();
            let a = LabeledMatrix::from_integers(f, &rows).unwrap();
            // Rows of B taken from the left kernel of J·A, so B·J·A = 0.
            let ja = antidiagonal(3, f).mul(&a).unwrap();
            let kernel = ja.left_kernel();
            let b_rows: Vec<Vec<Elem>> = (0..3)
                .map(|i| {
                    kernel
                        .get(i % kernel.len().max(1))
                        .cloned()
                        .unwrap_or_else(|| vec![Elem::from_integer(0.into()); 3])
                })
                .collect();
            let b = LabeledMatrix::new(f, b_rows, a.row_labels().to_vec(), a.col_labels().to_vec()).unwrap();
            let pt = SlicePoint { a: vec![a.clone()], b: vec![b.clone()] };
            prop_assert!(slice_membership(&pt, 3).unwrap().member);
            let ts = Elem::from_integer(t.into());
            let ss = Elem::from_integer(s.into());
            let scaled = SlicePoint { a: vec![a.scale(&ts).unwrap()], b: vec![b.scale(&ss).unwrap()] };
            prop_assert!(slice_membership(&scaled, 3).unwrap().member);
        }
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::field::{CoefficientField, Elem};
use super::ExactError;

/// Row or column label of a [`LabeledMatrix`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum Label {
    Index(usize),
    /// A monomial of a truncated ring; `exponents` follows the ring's variable order.
    Monomial { text: String, exponents: Vec<u16> },
    /// A power of the distinguished variable `w`.
    WPower(usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Monomial { text, .. } => f.write_str(text),
            Label::WPower(0) => f.write_str("1"),
            Label::WPower(1) => f.write_str("w"),
            Label::WPower(k) => write!(f, "w^{k}"),
        }
    }
}

/// Dense matrix over an exact field, with labelled rows and columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledMatrix {
    field: CoefficientField,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
    row_labels: Vec<Label>,
    col_labels: Vec<Label>,
}

impl LabeledMatrix {
    /// Builds a matrix from rows of rationals, reducing each entry into `field`.
    pub fn new(
        field: CoefficientField,
        rows: Vec<Vec<Elem>>,
        row_labels: Vec<Label>,
        col_labels: Vec<Label>,
    ) -> Result<Self, ExactError> {
        let nrows = rows.len();
        let ncols = col_labels.len();
        if row_labels.len() != nrows {
            return Err(ExactError::LabelMismatch {
                axis: "row",
                labels: row_labels.len(),
                dim: nrows,
            });
        }
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            if row.len() != ncols {
                return Err(ExactError::LabelMismatch {
                    axis: "column",
                    labels: ncols,
                    dim: row.len(),
                });
            }
            for x in row {
                entries.push(field.reduce(x)?);
            }
        }
        Ok(LabeledMatrix {
            field,
            rows: nrows,
            cols: ncols,
            entries,
            row_labels,
            col_labels,
        })
    }

    /// Index-labelled matrix from integer rows. All rows must have equal length.
    pub fn from_integers<T: Into<BigInt> + Clone>(
        field: CoefficientField,
        rows: &[Vec<T>],
    ) -> Result<Self, ExactError> {
        let ncols = rows.first().map_or(0, Vec::len);
        let elems = rows
            .iter()
            .map(|r| r.iter().map(|x| Elem::from_integer(x.clone().into())).collect())
            .collect();
        Self::new(
            field,
            elems,
            (0..rows.len()).map(Label::Index).collect(),
            (0..ncols).map(Label::Index).collect(),
        )
    }

    pub fn zeros(field: CoefficientField, rows: usize, cols: usize) -> Self {
        LabeledMatrix {
            field,
            rows,
            cols,
            entries: vec![Elem::zero(); rows * cols],
            row_labels: (0..rows).map(Label::Index).collect(),
            col_labels: (0..cols).map(Label::Index).collect(),
        }
    }

    pub fn identity(field: CoefficientField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Elem::one();
        }
        m
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: &Elem) -> Result<(), ExactError> {
        self.entries[i * self.cols + j] = self.field.reduce(value)?;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Elem]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Replaces both label lists; lengths must match the dimensions.
    pub fn with_labels(mut self, row_labels: Vec<Label>, col_labels: Vec<Label>) -> Result<Self, ExactError> {
        if row_labels.len() != self.rows {
            return Err(ExactError::LabelMismatch {
                axis: "row",
                labels: row_labels.len(),
                dim: self.rows,
            });
        }
        if col_labels.len() != self.cols {
            return Err(ExactError::LabelMismatch {
                axis: "column",
                labels: col_labels.len(),
                dim: self.cols,
            });
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    /// Same entries (lifted to integers or rationals) viewed over another field.
    pub fn change_field(&self, field: CoefficientField) -> Result<Self, ExactError> {
        let entries = self
            .entries
            .iter()
            .map(|x| field.reduce(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LabeledMatrix {
            field,
            entries,
            ..self.clone()
        })
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        LabeledMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            entries,
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
        }
    }

    pub fn mul(&self, other: &LabeledMatrix) -> Result<Self, ExactError> {
        if self.field != other.field {
            return Err(ExactError::FieldMismatch(self.field, other.field));
        }
        if self.cols != other.rows {
            return Err(ExactError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let f = self.field;
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Elem::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                entries.push(f.reduce(&acc)?);
            }
        }
        Ok(LabeledMatrix {
            field: f,
            rows: self.rows,
            cols: other.cols,
            entries,
            row_labels: self.row_labels.clone(),
            col_labels: other.col_labels.clone(),
        })
    }

    pub fn scale(&self, s: &Elem) -> Result<Self, ExactError> {
        let s = self.field.reduce(s)?;
        let entries = self.entries.iter().map(|x| self.field.mul(x, &s)).collect();
        Ok(LabeledMatrix {
            entries,
            ..self.clone()
        })
    }

    /// Row vector times matrix, `v·M`.
    pub fn left_mul_vec(&self, v: &[Elem]) -> Result<Vec<Elem>, ExactError> {
        if v.len() != self.rows {
            return Err(ExactError::ShapeMismatch {
                left: (1, v.len()),
                right: (self.rows, self.cols),
            });
        }
        (0..self.cols)
            .map(|j| {
                let acc = v
                    .iter()
                    .enumerate()
                    .fold(Elem::zero(), |acc, (i, x)| acc + x * self.get(i, j));
                self.field.reduce(&acc)
            })
            .collect()
    }

    /// Exact rank over `self.field`.
    pub fn rank(&self) -> usize {
        match self.field {
            CoefficientField::Rationals => bareiss_rank(self.integer_rows()),
            CoefficientField::PrimeField(p) => {
                let rows = self
                    .rows()
                    .map(|r| r.iter().map(|x| self.field.residue(x)).collect())
                    .collect();
                modular_rank(rows, p.get())
            }
        }
    }

    /// Basis of `{v : v·M = 0}`, one vector per free row of the reduced
    /// transpose; each vector has its last nonzero coordinate equal to one.
    pub fn left_kernel(&self) -> Vec<Vec<Elem>> {
        let f = self.field;
        // Kernel of M^T: solve M^T v = 0 by Gauss-Jordan on an (cols x rows) system.
        let n = self.rows;
        let m = self.cols;
        let mut a: Vec<Vec<Elem>> = (0..m).map(|j| self.column(j)).collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(piv) = (r..m).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, piv);
            let inv = f.inv(&a[r][c]).expect("pivot is nonzero");
            for x in a[r].iter_mut() {
                *x = f.mul(x, &inv);
            }
            let pivot_row = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = f.sub(x, &f.mul(&factor, p));
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Elem::zero(); n];
                v[fc] = Elem::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(&a[row][fc]);
                }
                v
            })
            .collect()
    }

    /// Each row scaled by the lcm of its denominators; rank-preserving over Q.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for LabeledMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .rows()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        let width = cells
            .iter()
            .flatten()
            .map(String::len)
            .max()
            .unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// Fraction-free Gaussian elimination. Every intermediate entry is a minor of
/// the input, so growth is bounded by Hadamard's inequality.
fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..n {
        if rank == m {
            break;
        }
        let Some(piv) = (rank..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            for j in c + 1..n {
                let num = &row[j] * pivot - &row[c] * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero());
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot.clone();
        rank += 1;
    }
    rank
}

fn modular_rank(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mulmod = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut rank = 0;
    for c in 0..n {
        if rank == m {
            break;
        }
        let Some(piv) = (rank..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], p - 2, p);
        let pivot_row: Vec<u64> = a[rank].iter().map(|&x| mulmod(x, inv)).collect();
        for row in a.iter_mut().skip(rank + 1) {
            let factor = row[c];
            if factor == 0 {
                continue;
            }
            for j in c..n {
                let sub = mulmod(factor, pivot_row[j]);
                row[j] = (row[j] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> CoefficientField {
        CoefficientField::Rationals
    }

    fn fp(p: u64) -> CoefficientField {
        CoefficientField::prime(p).unwrap()
    }

    fn int(n: i64) -> Elem {
        Elem::from_integer(BigInt::from(n))
    }

    #[test]
    fn rank_examples() {
        assert_eq!(LabeledMatrix::identity(fp(2), 3).rank(), 3);
        assert_eq!(LabeledMatrix::zeros(q(), 2, 4).rank(), 0);
        let m = LabeledMatrix::from_integers(fp(3), &[vec![3, 3], vec![3, 3]]).unwrap();
        assert_eq!(m.rank(), 0);
        assert!(m.is_zero());
        let m = LabeledMatrix::from_integers(q(), &[vec![3, 3], vec![3, 3]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_with_rational_entries() {
        let half = Elem::new(BigInt::from(1), BigInt::from(2));
        let m = LabeledMatrix::new(
            q(),
            vec![vec![half.clone(), int(1)], vec![int(1), int(2)]],
            vec![Label::Index(0), Label::Index(1)],
            vec![Label::Index(0), Label::Index(1)],
        )
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn left_kernel_examples() {
        assert!(LabeledMatrix::identity(q(), 4).left_kernel().is_empty());
        let m = LabeledMatrix::from_integers(q(), &[vec![1, 1], vec![1, 1]]).unwrap();
        let k = m.left_kernel();
        assert_eq!(k, vec![vec![int(-1), int(1)]]);
        let m = LabeledMatrix::zeros(q(), 2, 3);
        assert_eq!(m.left_kernel().len(), 2);
    }

    #[test]
    fn left_kernel_of_banded_matrix_mod_five() {
        // Entries binom(3, j - i + 1) for a 3x4 band.
        let rows = vec![vec![3, 3, 1, 0], vec![1, 3, 3, 1], vec![0, 1, 3, 3]];
        let m = LabeledMatrix::from_integers(fp(5), &rows).unwrap();
        let k = m.left_kernel();
        assert_eq!(k.len(), 1);
        // (1, 2, 1) up to scalar.
        let v = &k[0];
        let f = fp(5);
        let s = f.inv(&v[0]).unwrap();
        let scaled: Vec<Elem> = v.iter().map(|x| f.mul(x, &s)).collect();
        assert_eq!(scaled, vec![int(1), int(2), int(1)]);
        assert_eq!(m.left_mul_vec(&[int(1), int(2), int(1)]).unwrap(), vec![int(0); 4]);
    }

    #[test]
    fn shape_and_label_errors() {
        let err = LabeledMatrix::new(q(), vec![vec![int(1)]], vec![], vec![Label::Index(0)]);
        assert!(matches!(err, Err(ExactError::LabelMismatch { .. })));
        let a = LabeledMatrix::identity(q(), 2);
        let b = LabeledMatrix::identity(q(), 3);
        assert!(matches!(a.mul(&b), Err(ExactError::ShapeMismatch { .. })));
        let c = LabeledMatrix::identity(fp(2), 2);
        assert!(matches!(a.mul(&c), Err(ExactError::FieldMismatch(..))));
    }

    #[test]
    fn bareiss_handles_skipped_columns() {
        let rows = vec![
            vec![0, 2, 4, 1],
            vec![0, 1, 2, 7],
            vec![0, 3, 6, 8],
            vec![5, 0, 1, 0],
        ];
        let m = LabeledMatrix::from_integers(q(), &rows).unwrap();
        assert_eq!(m.rank(), 3);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-4i64..=4, c), r)
        })
    }

    proptest! {
        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            rows in small_matrix(),
            seed in any::<u64>(),
            scalar in 1i64..7,
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
        ) {
            for field in [q(), fp(p)] {
                let m = LabeledMatrix::from_integers(field, &rows).unwrap();
                let r = m.rank();
                let mut permuted = rows.clone();
                let k = (seed as usize) % permuted.len();
                permuted.rotate_left(k);
                for row in permuted.iter_mut() {
                    let shift = (seed as usize / 7) % row.len();
                    row.rotate_right(shift);
                }
                let pm = LabeledMatrix::from_integers(field, &permuted).unwrap();
                prop_assert_eq!(pm.rank(), r);
                if field.characteristic() == 0 || scalar as u64 % p != 0 {
                    let mut scaled = rows.clone();
                    for x in scaled[0].iter_mut() {
                        *x *= scalar;
                    }
                    let sm = LabeledMatrix::from_integers(field, &scaled).unwrap();
                    prop_assert_eq!(sm.rank(), r);
                }
            }
        }

        #[test]
        fn left_kernel_annihilates(rows in small_matrix(), p in prop::sample::select(vec![2u64, 3, 5])) {
            for field in [q(), fp(p)] {
                let m = LabeledMatrix::from_integers(field, &rows).unwrap();
                let kernel = m.left_kernel();
                prop_assert_eq!(kernel.len(), m.nrows() - m.rank());
                for v in &kernel {
                    let prod = m.left_mul_vec(v).unwrap();
                    prop_assert!(prod.iter().all(Zero::is_zero));
                }
            }
        }

        #[test]
        fn rank_over_q_dominates_rank_mod_p(rows in small_matrix(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let rq = LabeledMatrix::from_integers(q(), &rows).unwrap().rank();
            let rp = LabeledMatrix::from_integers(fp(p), &rows).unwrap().rank();
            prop_assert!(rq >= rp);
        }
    }
}

//! Exact arithmetic: binomial coefficients, the coefficient fields `Q` and
//! `F_p`, dense linear algebra (rank, left kernel) and univariate polynomials.
//!
//! Field elements are [`num_rational::BigRational`] values kept in canonical
//! form for their field, so a single matrix type serves every characteristic.
//! Rank over `Q` uses fraction-free elimination; rank over `F_p` works on
//! machine-word residues.

mod field;
mod matrix;
mod poly;

use thiserror::Error;

pub use field::{binom, is_prime, CoefficientField, Elem, Prime};
pub(crate) use field::choose;
pub use matrix::{Label, LabeledMatrix};
pub use poly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("binomial coefficient with negative upper index {0}")]
    NegativeBinomial(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{value} is not invertible in {field}")]
    NonInvertible { value: String, field: CoefficientField },
    #[error("{axis} labels: {labels} labels for dimension {dim}")]
    LabelMismatch {
        axis: &'static str,
        labels: usize,
        dim: usize,
    },
    #[error("shape mismatch: {left:?} against {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("field mismatch: {0} against {1}")]
    FieldMismatch(CoefficientField, CoefficientField),
}

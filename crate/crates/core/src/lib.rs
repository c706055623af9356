//! Exact computations behind the non-perversity of a family of parity sheaves
//! on Schubert varieties.
//!
//! The pipeline: [`slice::SliceParams`] fixes `(p, d, l)`; [`ring`] models
//! `H^*(Z)` for `Z = (P^{q-1})^{l+2}`; [`chern`] produces the Euler class of the
//! resolution bundle; [`slice`] assembles the intersection form and compares
//! its rank over `Q` and `F_p`; [`lemma`] studies the banded binomial matrix the
//! form collapses to; [`perm`] handles the permutations `y` and `x`.

pub mod chern;
pub mod cli;
pub mod exact;
pub mod lemma;
pub mod perm;
pub mod ring;
pub mod slice;

//! Dimension bookkeeping for the slice and its resolution, the intersection
//! form on `H^*(Z)`, its collapse to the banded matrix by `w`-power, and the
//! multiplicity comparison between characteristic zero and `p`.
//!
//! `Z = (P^{q-1})^{l+2}` has cohomology `Z[w, a_1..a_l, z]` truncated at `q`
//! in every variable. The form pairs polynomial degree `q - l` against
//! `q - 2` through `σ·τ·e(E)` followed by evaluation on the top class.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chern::{euler_e, ChernError};
use crate::exact::{is_prime, CoefficientField, Elem, ExactError, Label, LabeledMatrix};
use crate::lemma::{build_m, LemmaError};
use crate::ring::{make_ring, monomial_basis, Ring, TruncatedPoly};

pub const REPORT_SCHEMA: &str = "parity-slice/perversity-report/v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("d must be at least 1")]
    ZeroExponent,
    #[error("l < {min} (l = {l})")]
    LTooSmall { l: u64, min: u64 },
    #[error("l > q (l = {l}, q = {q})")]
    LExceedsQ { l: u64, q: u64 },
    #[error("q = p^d is too large (p = {p}, d = {d})")]
    TooLarge { p: u64, d: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SliceError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("{axis} labels must be monomials in w, a_i, z")]
    UnexpectedLabel { axis: &'static str },
    #[error("{axis}s with w-power {w_power} are not all equal")]
    ClassConstancy { axis: &'static str, w_power: usize },
    #[error("no {axis} with w-power {w_power}")]
    MissingClass { axis: &'static str, w_power: usize },
    #[error("stratum exponent s = {s} out of range 0..={q}")]
    StratumExponent { s: u64, q: u64 },
    #[error("full and reduced oracles disagree over {field}: {full} vs {reduced}")]
    OracleMismatch {
        field: CoefficientField,
        full: usize,
        reduced: usize,
    },
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `(p, d, l)` with every derived dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[non_exhaustive]
pub struct SliceParams {
    pub p: u64,
    pub d: u32,
    pub l: u64,
    /// `p^d`.
    pub q: u64,
    /// Size `q(l + 2)` of the symmetric group containing `y`.
    pub n_perm: u64,
    /// `dim Z = (l + 2)(q - 1)`.
    pub dim_z: u64,
    /// `rank E = l·q`: `l` line bundles and `l` bundles of rank `q - 1`.
    pub rank_e: u64,
    /// `dim Ỹ = dim Z + rank E`.
    pub n: u64,
    /// Dimension of the fibre over the origin, which is `Z` itself.
    pub d_f: u64,
    /// Shift `l - 2` of the skyscraper summand.
    pub m: i64,
}

impl SliceParams {
    /// Validates `p` prime, `d >= 1`, `3 <= l <= p^d` and derives the rest.
    pub fn new(p: u64, d: u32, l: u64) -> Result<Self, ParamError> {
        if !is_prime(p) {
            return Err(ParamError::NotPrime(p));
        }
        if d == 0 {
            return Err(ParamError::ZeroExponent);
        }
        let q = p
            .checked_pow(d)
            .filter(|&q| q <= u16::MAX as u64)
            .ok_or(ParamError::TooLarge { p, d })?;
        if l < 3 {
            return Err(ParamError::LTooSmall { l, min: 3 });
        }
        if l > q {
            return Err(ParamError::LExceedsQ { l, q });
        }
        let dim_z = (l + 2) * (q - 1);
        let rank_e = l * q;
        let params = SliceParams {
            p,
            d,
            l,
            q,
            n_perm: q * (l + 2),
            dim_z,
            rank_e,
            n: dim_z + rank_e,
            d_f: dim_z,
            m: l as i64 - 2,
        };
        debug_assert!(params.degrees_consistent());
        Ok(params)
    }

    /// Cohomological degree `2 d_F - n - m` of the row space.
    pub fn row_degree(&self) -> i64 {
        2 * self.d_f as i64 - self.n as i64 - self.m
    }

    /// Cohomological degree `2 d_F - n + m` of the column space.
    pub fn col_degree(&self) -> i64 {
        2 * self.d_f as i64 - self.n as i64 + self.m
    }

    /// `row_degree = 2(q - l)` and `col_degree = 2(q - 2)`.
    pub fn degrees_consistent(&self) -> bool {
        let (q, l) = (self.q as i64, self.l as i64);
        self.row_degree() == 2 * (q - l) && self.col_degree() == 2 * (q - 2)
    }

    pub fn field_char0(&self) -> CoefficientField {
        CoefficientField::Rationals
    }

    pub fn field_charp(&self) -> CoefficientField {
        CoefficientField::prime(self.p).expect("p validated at construction")
    }

    /// `["w", "a1", .., "al", "z"]`.
    pub fn variable_names(&self) -> Vec<String> {
        std::iter::once("w".to_string())
            .chain((1..=self.l).map(|i| format!("a{i}")))
            .chain(std::iter::once("z".to_string()))
            .collect()
    }

    /// `Z[w, a_1..a_l, z]` with every generator truncated at `q`.
    pub fn canonical_ring(&self) -> Ring {
        let spec: Vec<(String, u16)> = self
            .variable_names()
            .into_iter()
            .map(|n| (n, self.q as u16))
            .collect();
        make_ring(&spec).expect("canonical variable names are distinct")
    }
}

/// Alias matching the operation name used in reports.
pub fn derive_dims(p: u64, d: u32, l: u64) -> Result<SliceParams, ParamError> {
    SliceParams::new(p, d, l)
}

fn monomial_label(ring: &Ring, e: &[u16]) -> Label {
    Label::Monomial {
        text: ring.monomial_text(e),
        exponents: e.to_vec(),
    }
}

/// `∫ m · e` for a monomial `m`: the coefficient of `e` at the complement of `m`.
fn pair_monomial(e: &TruncatedPoly, truncs: &[u16], m: &[u16]) -> Elem {
    let mut complement = Vec::with_capacity(m.len());
    for (&x, &t) in m.iter().zip(truncs) {
        if x >= t {
            return Elem::default();
        }
        complement.push(t - 1 - x);
    }
    e.coefficient(&complement)
}

/// The intersection form `⟨σ, τ⟩ = ∫ σ·τ·e(E)` on monomial bases of degrees
/// `q - l` (rows) and `q - 2` (columns), reduced into `field`.
pub fn pairing_matrix(params: &SliceParams, field: CoefficientField) -> Result<LabeledMatrix, SliceError> {
    let ring = params.canonical_ring();
    let e = euler_e(params, &ring)?;
    pairing_matrix_from(params, &ring, &e, field)
}

/// As [`pairing_matrix`], with a precomputed `e(E)`.
pub fn pairing_matrix_from(
    params: &SliceParams,
    ring: &Ring,
    euler: &TruncatedPoly,
    field: CoefficientField,
) -> Result<LabeledMatrix, SliceError> {
    let rows = monomial_basis(ring, (params.q - params.l) as usize);
    let cols = monomial_basis(ring, (params.q - 2) as usize);
    let truncs = ring.truncations();
    let entries: Vec<Vec<Elem>> = rows
        .par_iter()
        .map(|r| {
            cols.iter()
                .map(|c| {
                    let m: Vec<u16> = r.iter().zip(c).map(|(a, b)| a + b).collect();
                    pair_monomial(euler, truncs, &m)
                })
                .collect()
        })
        .collect();
    Ok(LabeledMatrix::new(
        field,
        entries,
        rows.iter().map(|e| monomial_label(ring, e)).collect(),
        cols.iter().map(|e| monomial_label(ring, e)).collect(),
    )?)
}

fn w_power(label: &Label, axis: &'static str) -> Result<usize, SliceError> {
    match label {
        Label::Monomial { exponents, .. } if !exponents.is_empty() => Ok(exponents[0] as usize),
        _ => Err(SliceError::UnexpectedLabel { axis }),
    }
}

/// Groups indices by `w`-power and checks that every group is constant.
fn class_representatives(
    labels: &[Label],
    count: usize,
    line: impl Fn(usize) -> Vec<Elem>,
    axis: &'static str,
) -> Result<Vec<usize>, SliceError> {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        classes.entry(w_power(label, axis)?).or_default().push(i);
    }
    (0..count)
        .map(|w| {
            let members = classes.get(&w).ok_or(SliceError::MissingClass { axis, w_power: w })?;
            let first = line(members[0]);
            if members[1..].iter().any(|&i| line(i) != first) {
                return Err(SliceError::ClassConstancy { axis, w_power: w });
            }
            Ok(members[0])
        })
        .collect()
}

/// Collapses the full pairing matrix to the `(q - l + 1) × (q - 1)` matrix
/// indexed by `w`-powers, after checking that rows (and columns) sharing a
/// `w`-power agree. Columns come out in decreasing `w`-power so the result
/// has entries `C(l, j - i + 1)`.
pub fn reduce_by_w(b: &LabeledMatrix, params: &SliceParams) -> Result<LabeledMatrix, SliceError> {
    let nrows = (params.q - params.l + 1) as usize;
    let ncols = (params.q - 1) as usize;
    let row_reps = class_representatives(b.row_labels(), nrows, |i| b.row(i).to_vec(), "row")?;
    let col_reps = class_representatives(b.col_labels(), ncols, |j| b.column(j), "column")?;
    let entries = row_reps
        .iter()
        .map(|&i| {
            (0..ncols)
                .map(|j| b.get(i, col_reps[ncols - 1 - j]).clone())
                .collect()
        })
        .collect();
    Ok(LabeledMatrix::new(
        b.field(),
        entries,
        (0..nrows).map(Label::WPower).collect(),
        (0..ncols).map(|j| Label::WPower(ncols - 1 - j)).collect(),
    )?)
}

/// Multiplicity of the skyscraper summand in shift `l - 2`: the rank of the
/// full intersection form over `field`.
pub fn multiplicity(params: &SliceParams, field: CoefficientField) -> Result<usize, SliceError> {
    Ok(pairing_matrix(params, field)?.rank())
}

/// Which matrix a multiplicity is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    /// The banded binomial matrix.
    Reduced,
    /// The full monomial pairing matrix built from `e(E)`.
    Full,
    /// Both, cross-checked.
    Both,
}

/// The intersection form restricted to an intermediate stratum, resolved over
/// `P^{q-1}` with Euler class `w^s`: entry `(r, c)` is `∫ w^{r+c+s}`, so
/// one exactly when `r + c = q - 1 - s`.
pub fn stratum_matrix(q: u64, s: u64, field: CoefficientField) -> Result<LabeledMatrix, SliceError> {
    if s > q {
        return Err(SliceError::StratumExponent { s, q });
    }
    let ring = make_ring(&[("w", q as u16)]).expect("single generator");
    let n = q as usize;
    let entries = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let e = (r + c) as u32 + s as u32;
                    TruncatedPoly::monomial(&ring, &[e], 1)
                        .expect("one generator")
                        .top_integral()
                })
                .collect()
        })
        .collect();
    Ok(LabeledMatrix::new(
        field,
        entries,
        (0..n).map(Label::WPower).collect(),
        (0..n).map(Label::WPower).collect(),
    )?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NotPerverse,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerversityReport {
    pub params: SliceParams,
    pub mult_char0: usize,
    pub mult_charp: usize,
    pub stalk_degree: i64,
    pub verdict: Verdict,
    pub expected_char0: usize,
    pub expected_charp: usize,
    /// Computed multiplicities equal `(q - l + 1, q - l)`.
    pub matches_expected: bool,
    pub oracle: Oracle,
    /// Full and reduced ranks agree over both fields; `None` unless both were computed.
    pub oracle_agreement: Option<bool>,
}

impl PerversityReport {
    /// A report passes verification when the multiplicities match the
    /// predicted values and, if cross-checked, both oracles agree.
    pub fn verified(&self) -> bool {
        self.matches_expected && self.oracle_agreement != Some(false)
    }

    /// Stable JSON object; every number is wrapped with the source it comes from.
    pub fn to_json(&self) -> Value {
        let p = &self.params;
        let anchored = |value: Value, anchor: &str| json!({ "value": value, "paper_anchor": anchor });
        json!({
            "schema": REPORT_SCHEMA,
            "params": {
                "p": anchored(p.p.into(), "theorem parameters: p prime"),
                "d": anchored(p.d.into(), "theorem parameters: q = p^d"),
                "l": anchored(p.l.into(), "theorem parameters: p^d >= l >= 3"),
                "q": anchored(p.q.into(), "theorem parameters: q = p^d"),
                "N": anchored(p.n_perm.into(), "permutation y in S_{q(l+2)}"),
                "dim_Z": anchored(p.dim_z.into(), "Z = (P^{q-1})^{l+2}"),
                "rank_E": anchored(p.rank_e.into(), "E = sum of A_i and B_i"),
                "n": anchored(p.n.into(), "dimension of the resolution"),
                "d_F": anchored(p.d_f.into(), "fibre over the origin is Z"),
                "m": anchored(p.m.into(), "skyscraper shift l - 2"),
                "row_degree": anchored(p.row_degree().into(), "pairing source degree 2d - n - m"),
                "col_degree": anchored(p.col_degree().into(), "pairing source degree 2d - n + m"),
            },
            "mult_char0": anchored(self.mult_char0.into(), "multiplicity = rank of intersection form over Q"),
            "mult_charp": anchored(self.mult_charp.into(), "multiplicity = rank of intersection form over F_p"),
            "stalk_degree": anchored(self.stalk_degree.into(), "nonzero stalk at 0 in degree l - 2"),
            "verdict": format!("{:?}", self.verdict),
            "expected_char0": anchored(self.expected_char0.into(), "rank lemma: q - l + 1 over Q"),
            "expected_charp": anchored(self.expected_charp.into(), "rank lemma: q - l over F_p"),
            "matches_expected": self.matches_expected,
            "oracle": self.oracle,
            "oracle_agreement": self.oracle_agreement,
            "notes": [
                "row space degree H^{2(q-k)} is read with k = l",
                "Z = (P^{q-1})^{k+2} is read with k = l",
            ],
        })
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<24}{v}\n"));
        line("(p, d, l)", format!("({}, {}, {})", p.p, p.d, p.l));
        line("q = p^d", p.q.to_string());
        line("N = q(l+2)", p.n_perm.to_string());
        line("dim Z", p.dim_z.to_string());
        line("rank E", p.rank_e.to_string());
        line("n = dim Z + rank E", p.n.to_string());
        line("pairing degrees", format!("H^{} x H^{}", p.row_degree(), p.col_degree()));
        line("oracle", format!("{:?}", self.oracle).to_lowercase());
        line(
            "multiplicity over Q",
            format!("{} (expected {})", self.mult_char0, self.expected_char0),
        );
        line(
            &format!("multiplicity over F_{}", p.p),
            format!("{} (expected {})", self.mult_charp, self.expected_charp),
        );
        if let Some(agree) = self.oracle_agreement {
            line("full = reduced", agree.to_string());
        }
        line("stalk degree", self.stalk_degree.to_string());
        line("verdict", format!("{:?}", self.verdict));
        out
    }
}

/// Multiplicities over `Q` and `F_p` from the banded matrix.
pub fn perversity_report(params: &SliceParams) -> Result<PerversityReport, SliceError> {
    perversity_report_with(params, Oracle::Reduced)
}

pub fn perversity_report_with(params: &SliceParams, oracle: Oracle) -> Result<PerversityReport, SliceError> {
    let fields = [params.field_char0(), params.field_charp()];
    let reduced = |f: CoefficientField| -> Result<usize, SliceError> {
        Ok(build_m(params.q, params.l, f)?.rank())
    };
    let full = |f: CoefficientField| -> Result<Vec<usize>, SliceError> {
        let ring = params.canonical_ring();
        let e = euler_e(params, &ring)?;
        let b = pairing_matrix_from(params, &ring, &e, f)?;
        Ok(vec![b.rank(), b.change_field(fields[1])?.rank()])
    };
    let (ranks, agreement) = match oracle {
        Oracle::Reduced => (vec![reduced(fields[0])?, reduced(fields[1])?], None),
        Oracle::Full => (full(fields[0])?, None),
        Oracle::Both => {
            let r = vec![reduced(fields[0])?, reduced(fields[1])?];
            let f = full(fields[0])?;
            let agree = r == f;
            (f, Some(agree))
        }
    };
    let (mult_char0, mult_charp) = (ranks[0], ranks[1]);
    let stalk_degree = params.m;
    let verdict = if mult_char0 > mult_charp && stalk_degree > 0 {
        Verdict::NotPerverse
    } else {
        Verdict::Inconclusive
    };
    let expected_char0 = (params.q - params.l + 1) as usize;
    let expected_charp = (params.q - params.l) as usize;
    Ok(PerversityReport {
        params: *params,
        mult_char0,
        mult_charp,
        stalk_degree,
        verdict,
        expected_char0,
        expected_charp,
        matches_expected: mult_char0 == expected_char0 && mult_charp == expected_charp,
        oracle,
        oracle_agreement: agreement,
    })
}

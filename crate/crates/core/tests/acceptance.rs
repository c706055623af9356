//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! target exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use parity_slice::chern::{quotient_dual_chern, splitting_oracle, twist_euler, BundleSpec};
use parity_slice::exact::{binom, CoefficientField, Elem, Label, UniPoly};
use parity_slice::lemma::{build_m, dependence_search, kernel_witness, verify_rank_lemma};
use parity_slice::perm::{build_y, Validity, YVariant};
use parity_slice::ring::{make_ring, TruncatedPoly};
use parity_slice::slice::{pairing_matrix, perversity_report, stratum_matrix, SliceParams};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

fn grid() -> Vec<SliceParams> {
    let mut triples = vec![(2, 2, 3), (2, 2, 4), (3, 1, 3)];
    triples.extend((3..=8).map(|l| (2, 3, l)));
    triples.extend((3..=9).map(|l| (3, 2, l)));
    triples.extend((3..=5).map(|l| (5, 1, l)));
    triples.extend((3..=7).map(|l| (7, 1, l)));
    triples
        .into_iter()
        .map(|(p, d, l)| SliceParams::new(p, d, l).expect("grid point is valid"))
        .collect()
}

fn tag(p: &SliceParams) -> String {
    format!("({}, {}, {})", p.p, p.d, p.l)
}

type Outcome = Result<String, String>;

fn rank_reproduction() -> Outcome {
    for p in grid() {
        let c = verify_rank_lemma(p.q, p.l, p.p).map_err(|e| e.to_string())?;
        if c.rank_q != (p.q - p.l + 1) as usize || c.rank_fp != (p.q - p.l) as usize {
            return Err(format!("{}: rank Q {} rank F_p {}", tag(&p), c.rank_q, c.rank_fp));
        }
    }
    Ok(format!("{} grid points", grid().len()))
}

fn multiplicity_gap() -> Outcome {
    for p in grid() {
        let r = perversity_report(&p).map_err(|e| e.to_string())?;
        if r.mult_char0 as i64 - r.mult_charp as i64 != 1 || r.mult_charp as u64 != p.q - p.l {
            return Err(format!("{}: {} vs {}", tag(&p), r.mult_char0, r.mult_charp));
        }
    }
    Ok("gap 1 everywhere".into())
}

fn oracle_equivalence() -> Outcome {
    for (pp, d, l) in [(3, 1, 3), (2, 2, 3), (5, 1, 3), (5, 1, 5), (7, 1, 3)] {
        let p = SliceParams::new(pp, d, l).unwrap();
        let b = pairing_matrix(&p, CoefficientField::Rationals).map_err(|e| e.to_string())?;
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                let w = |lab: &Label| match lab {
                    Label::Monomial { exponents, .. } => exponents[0] as i64,
                    _ => panic!("monomial labels expected"),
                };
                let jw = w(&b.row_labels()[i]) + w(&b.col_labels()[j]);
                let want = binom(l as i64, p.q as i64 - 1 - jw).unwrap();
                if b.get(i, j) != &Elem::from_integer(want) {
                    return Err(format!("{}: entry ({i}, {j})", tag(&p)));
                }
            }
        }
        let fp = p.field_charp();
        let m = build_m(p.q, l, CoefficientField::Rationals).unwrap();
        let full = (b.rank(), b.change_field(fp).unwrap().rank());
        let reduced = (m.rank(), m.change_field(fp).unwrap().rank());
        if full != reduced {
            return Err(format!("{}: full {:?} reduced {:?}", tag(&p), full, reduced));
        }
    }
    Ok("5 points, value law entrywise".into())
}

fn euler_formulas() -> Outcome {
    for q in [3u16, 4, 5, 8, 9] {
        let ring = make_ring(&[("a", q), ("z", q)]).unwrap();
        let bundle = quotient_dual_chern(&ring, q, "a").map_err(|e| e.to_string())?;
        let z = TruncatedPoly::var(&ring, "z").unwrap();
        let got = twist_euler(&bundle, &z).map_err(|e| e.to_string())?;
        let mut want = TruncatedPoly::zero(&ring);
        for j in 0..q as u32 {
            want = want
                .add(&TruncatedPoly::monomial(&ring, &[j, q as u32 - 1 - j], 1).unwrap())
                .unwrap();
        }
        if got != want {
            return Err(format!("q = {q}: {got} vs {want}"));
        }
    }
    let names: Vec<(String, u16)> = (1..=6).map(|i| (format!("x{i}"), 4)).collect();
    let ring = make_ring(&names).unwrap();
    let linear = proptest::collection::vec(-3i64..=3, 6);
    let case = (proptest::collection::vec(linear.clone(), 1..=5), linear);
    let mut runner = TestRunner::deterministic();
    let form = |coeffs: &[i64]| {
        coeffs.iter().enumerate().fold(TruncatedPoly::zero(&ring), |acc, (k, &c)| {
            let mut e = vec![0u32; 6];
            e[k] = 1;
            acc.add(&TruncatedPoly::monomial(&ring, &e, c).unwrap()).unwrap()
        })
    };
    for n in 0..100 {
        let (roots, line) = case.new_tree(&mut runner).unwrap().current();
        let roots: Vec<TruncatedPoly> = roots.iter().map(|r| form(r)).collect();
        let line = form(&line);
        if line.is_zero() || roots.iter().any(TruncatedPoly::is_zero) {
            continue;
        }
        let bundle = BundleSpec::split(&ring, &roots).map_err(|e| e.to_string())?;
        let a = twist_euler(&bundle, &line).map_err(|e| e.to_string())?;
        let b = splitting_oracle(&roots, &line).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("random bundle {n}: {a} vs {b}"));
        }
    }
    Ok("q in {3,4,5,8,9}; 100 random split bundles".into())
}

fn kernel_witness_check() -> Outcome {
    for p in grid().into_iter().filter(|p| p.q > p.l) {
        let fp = p.field_charp();
        let m = build_m(p.q, p.l, fp).unwrap();
        let c = kernel_witness(p.q, p.l, p.p).map_err(|e| e.to_string())?;
        let expect: Vec<BigInt> = (0..=p.q - p.l).map(|i| binom((p.q - p.l) as i64, i as i64).unwrap()).collect();
        if c != expect {
            return Err(format!("{}: witness {:?}", tag(&p), c));
        }
        let v: Vec<Elem> = c.iter().map(|x| fp.from_int(x.clone())).collect();
        if !m.left_mul_vec(&v).unwrap().iter().all(Zero::is_zero) {
            return Err(format!("{}: witness does not annihilate", tag(&p)));
        }
        if m.left_kernel().len() != 1 {
            return Err(format!("{}: kernel dimension {}", tag(&p), m.left_kernel().len()));
        }
    }
    Ok("all points with q > l".into())
}

fn frobenius_factorization() -> Outcome {
    for p in grid() {
        let fp = p.field_charp();
        let lhs = UniPoly::one_plus_x_pow(fp, p.l as usize)
            .mul(&UniPoly::one_plus_x_pow(fp, (p.q - p.l) as usize))
            .unwrap();
        let rhs = UniPoly::constant(fp, 1).add(&UniPoly::monomial(fp, 1, p.q as usize)).unwrap();
        if lhs != rhs {
            return Err(format!("{}: {lhs}", tag(&p)));
        }
        let over_q = dependence_search(p.q, p.l, CoefficientField::Rationals).map_err(|e| e.to_string())?;
        if over_q.is_some() {
            return Err(format!("{}: dependence over Q", tag(&p)));
        }
    }
    Ok("divides 1 + x^q over F_p only".into())
}

fn permutation_validation() -> Outcome {
    for p in grid() {
        let verbatim = build_y(&p, YVariant::Verbatim);
        let expected = Validity::Invalid {
            duplicates: vec![1],
            missing: vec![p.q as usize],
        };
        if verbatim.validity() != &expected {
            return Err(format!("{}: verbatim {:?}", tag(&p), verbatim.validity()));
        }
        if !build_y(&p, YVariant::RepairedCase2).is_valid() {
            return Err(format!("{}: repaired not bijective", tag(&p)));
        }
    }
    Ok("verbatim: duplicate 1, missing q; repaired bijective".into())
}

fn stratum_check() -> Outcome {
    for p in grid() {
        for s in 0..=p.q {
            let m = stratum_matrix(p.q, s, CoefficientField::Rationals).map_err(|e| e.to_string())?;
            let rq = m.rank();
            let rp = m.change_field(p.field_charp()).unwrap().rank();
            if rq != rp || rq as u64 != p.q - s {
                return Err(format!("{} s = {s}: {rq} vs {rp}", tag(&p)));
            }
        }
    }
    Ok("0 <= s <= q".into())
}

fn degree_bookkeeping() -> Outcome {
    for p in grid() {
        let base = 2 * p.dim_z as i64 - p.n as i64;
        let (q, l) = (p.q as i64, p.l as i64);
        if base - (l - 2) != 2 * (q - l) || base + (l - 2) != 2 * (q - 2) {
            return Err(format!("{}: 2 dimZ - n = {base}", tag(&p)));
        }
    }
    Ok("row 2(q-l), column 2(q-2)".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 9] = [
        ("1 rank reproduction", rank_reproduction, Some(Duration::from_secs(5))),
        ("2 multiplicity gap", multiplicity_gap, Some(Duration::from_secs(5))),
        ("3 oracle equivalence", oracle_equivalence, Some(Duration::from_secs(60))),
        ("4 Euler-class formulas", euler_formulas, None),
        ("5 kernel witness", kernel_witness_check, None),
        ("6 Frobenius factorization", frobenius_factorization, None),
        ("7 permutation validation", permutation_validation, None),
        ("8 stratum check", stratum_check, None),
        ("9 degree bookkeeping", degree_bookkeeping, None),
    ];
    let mut failed = Vec::new();
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let mut outcome = f();
        let took = start.elapsed();
        if let (Ok(_), Some(b)) = (&outcome, budget) {
            if took > b {
                outcome = Err(format!("took {took:?}, budget {b:?}"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS  criterion {name}: {msg} [{took:.2?}]"),
            Err(msg) => {
                println!("FAIL  criterion {name}: {msg} [{took:.2?}]");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria pass", criteria.len());
}

//! Acceptance suites. Each check recomputes known values or identities and
//! reports the first mismatch as a validation error.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::characters::{
    cross_validate_blocks, mn_central_character, nakayama_blocks, sym_central_character_content, sym_congruence_blocks,
    wreath_blocks, wreath_central_character_bruteforce, wreath_central_character_content, wreath_irrep_labels,
};
use crate::error::{Error, Result};
use crate::fh::{psi_r, to_elementary_basis, FhAlgebra, FhElement};
use crate::groupdata::{builtin_document, builtin_group, mod_p, GroupData, Rational, BUILTIN_GROUPS};
use crate::intpoly::{binomial_i64, IntValuedPoly};
use crate::lambdagamma::{basis_product as monomial_product, hopf_check, indecomposables, WeightedSymFn};
use crate::partitions::{multipartitions_of, partitions_of, reduce_cycle_type, Multipartition, Partition};
use crate::rgamma::{
    b_qr_mod_p, base_p_digits, class_power_mod, ev_r, ev_r_element, leading_monomial, modular_hom, modular_hom_element,
    omega_expand, rg_multiply, rg_power_mod, ExponentVector, RGammaElement,
};
use crate::wreath::{element_cap_from_env, CentreElement};

/// One acceptance criterion.
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub summary: &'static str,
    check: fn() -> Result<()>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "transposition-square", summary: "X'_(2,1^{n-2})^2 in S_n for n = 4,5,6", check: transposition_square },
    Criterion { id: 2, name: "structure-polynomials", summary: "structure polynomials of K_(1)^2", check: structure_polynomials },
    Criterion { id: 3, name: "character-functions", summary: "f_(1), f_(2), f_(1,1) in the e-basis", check: character_functions },
    Criterion { id: 4, name: "jucys", summary: "e_r at the JM elements, n <= 6, r <= 3", check: jucys },
    Criterion { id: 5, name: "murphy", summary: "leading term of m_mu at the JM elements", check: murphy },
    Criterion { id: 6, name: "content-evaluation", summary: "content evaluation against Murnaghan-Nakayama, n <= 6", check: content_evaluation },
    Criterion { id: 7, name: "nakayama", summary: "p-cores against central-character congruence", check: nakayama },
    Criterion { id: 8, name: "indecomposables", summary: "degree-2 products and indecomposables for C2", check: c2_indecomposables },
    Criterion { id: 9, name: "hopf", summary: "Hopf identities up to degree 4", check: hopf },
    Criterion { id: 10, name: "rgamma", summary: "ring laws, specialisation and leading terms in R_Gamma", check: rgamma },
    Criterion { id: 11, name: "triangularity", summary: "triangularity of psi_m and freeness over R_Gamma", check: triangularity },
    Criterion { id: 12, name: "wreath-characters", summary: "content evaluation against induced characters", check: wreath_characters },
    Criterion { id: 13, name: "wreath-blocks", summary: "blocks of wreath products", check: wreath_block_suite },
    Criterion { id: 14, name: "frobenius", summary: "B_{q,r}^p = B_{q^p,r} mod p", check: frobenius },
    Criterion { id: 15, name: "modular-homomorphisms", summary: "digit extraction and multiplicativity", check: modular_homomorphisms },
    Criterion { id: 16, name: "group-validation", summary: "character tables and group axioms", check: group_validation },
];

/// Criteria selected by `all`, an id, or a name.
pub fn select(suite: &str) -> Result<Vec<&'static Criterion>> {
    if suite == "all" {
        return Ok(CRITERIA.iter().collect());
    }
    CRITERIA
        .iter()
        .find(|c| c.name == suite || c.id.to_string() == suite)
        .map(|c| vec![c])
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {suite}")))
}

pub fn run(criterion: &Criterion) -> Outcome {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(criterion.check));
    let (passed, detail) = match result {
        Ok(Ok(())) => (true, String::new()),
        Ok(Err(e)) => (false, e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panic: {msg}"))
        }
    };
    Outcome { id: criterion.id, name: criterion.name.to_string(), passed, detail, millis: start.elapsed().as_millis() }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}

/// One algebra per group, shared between suites.
fn algebra(name: &str) -> Result<Arc<FhAlgebra>> {
    static ALGEBRAS: OnceLock<Mutex<HashMap<String, Arc<FhAlgebra>>>> = OnceLock::new();
    let map = ALGEBRAS.get_or_init(Mutex::default);
    if let Some(a) = map.lock().unwrap().get(name) {
        return Ok(a.clone());
    }
    let a = Arc::new(FhAlgebra::for_group(Arc::new(builtin_group(name)?)));
    map.lock().unwrap().insert(name.to_string(), a.clone());
    Ok(a)
}

fn mp(s: &str) -> Multipartition {
    s.parse().expect("well-formed label")
}

fn sym_type(parts: &[usize]) -> Multipartition {
    Multipartition::single(0, Partition::from_parts(parts.to_vec()))
}

fn with_ones(head: &[usize], n: usize) -> Multipartition {
    let mut parts = head.to_vec();
    parts.resize(head.len() + n - head.iter().sum::<usize>(), 1);
    sym_type(&parts)
}

fn transposition_square() -> Result<()> {
    let fh = algebra("trivial")?;
    let engine = fh.engine();
    for n in 4..=6 {
        let t = with_ones(&[2], n);
        let mut want = CentreElement::zero(n);
        want.add_term(with_ones(&[2, 2], n), BigInt::from(2));
        want.add_term(with_ones(&[3], n), BigInt::from(3));
        want.add_term(with_ones(&[], n), binomial_i64(n as i64, 2));
        let local = engine.centre_product(&t, &t, n)?;
        ensure(local == want, || format!("n={n}: got {local:?}"))?;
        let naive = engine.wreath(n).centre_product_naive(&t, &t, engine.cap())?;
        ensure(naive == want, || format!("n={n}: naive count gives {naive:?}"))?;
    }
    Ok(())
}

fn structure_polynomials() -> Result<()> {
    let fh = algebra("trivial")?;
    let one = mp("(1)");
    for (lambda, want) in [("()", IntValuedPoly::binom(2)), ("(2)", IntValuedPoly::constant(3)), ("(1,1)", IntValuedPoly::constant(2))] {
        let got = fh.structure_poly(&one, &one, &mp(lambda))?;
        ensure(got == want, || format!("phi[(1);(1);{lambda}] = {got}, expected {want}"))?;
        for n in 2..=6 {
            let full = with_ones(&[2], n);
            let Some(target) = mp(lambda).unreduce(n) else { continue };
            let direct = fh.engine().wreath(n).centre_product_naive(&full, &full, fh.engine().cap())?.coefficient(&target);
            ensure(got.evaluate(n as i64) == direct, || format!("phi[(1);(1);{lambda}] at {n}"))?;
        }
    }
    Ok(())
}

fn character_functions() -> Result<()> {
    let fh = algebra("trivial")?;
    let e = |parts: &[usize]| Partition::from_parts(parts.to_vec());
    let expected = [
        ("(1)", vec![(e(&[1]), IntValuedPoly::one())]),
        ("(2)", vec![(e(&[1, 1]), IntValuedPoly::one()), (e(&[2]), IntValuedPoly::constant(-2)), (Partition::empty(), IntValuedPoly::binom(2).scale(&BigInt::from(-1)))]),
        ("(1,1)", vec![(e(&[1, 1]), IntValuedPoly::constant(-1)), (e(&[2]), IntValuedPoly::constant(3)), (Partition::empty(), IntValuedPoly::binom(2))]),
    ];
    for (mu, want) in expected {
        let f = fh.char_sym_fn(&mp(mu))?;
        let got = to_elementary_basis(&f, fh.group())?;
        ensure(got == want, || format!("f[{mu}] = {got:?}"))?;
    }
    Ok(())
}

/// `Σ_{μ ⊢ r} X_μ` at `n`, reduced labels.
fn class_sum_total(r: usize, n: usize) -> CentreElement {
    let mut out = CentreElement::zero(n);
    for mu in partitions_of(r) {
        if let Some(full) = Multipartition::single(0, mu).unreduce(n) {
            out.add_term(full, BigInt::one());
        }
    }
    out
}

fn jucys() -> Result<()> {
    let fh = algebra("trivial")?;
    for n in 0..=6 {
        let w = fh.engine().wreath(n);
        for r in 1..=3 {
            let got = w.to_centre(&w.evaluate_weighted_monomial(&sym_type(&vec![1; r]), element_cap_from_env())?)?;
            ensure(got == class_sum_total(r, n), || format!("e_{r} at n={n}"))?;
        }
    }
    Ok(())
}

fn murphy() -> Result<()> {
    let fh = algebra("trivial")?;
    for n in 0..=6 {
        let w = fh.engine().wreath(n);
        for size in 0..=3 {
            for mu in partitions_of(size) {
                let label = Multipartition::single(0, mu.clone());
                let mut image = w.to_centre(&w.evaluate_weighted_monomial(&label, element_cap_from_env())?)?.by_reduced_label();
                if label.unreduce(n).is_some() {
                    let lead = image.remove(&label).unwrap_or_default();
                    ensure(lead.is_one(), || format!("m{label} at n={n}: leading coefficient {lead}"))?;
                }
                for (nu, c) in image {
                    let lower = nu.size() < mu.size() || (nu.size() == mu.size() && nu.len() < mu.len());
                    ensure(c.is_zero() || lower, || format!("m{label} at n={n} has term X{nu}"))?;
                }
            }
        }
    }
    Ok(())
}

fn content_evaluation() -> Result<()> {
    let fh = algebra("trivial")?;
    for n in 0..=6 {
        for lambda in partitions_of(n) {
            for mu in partitions_of(n) {
                let got = sym_central_character_content(&fh, &lambda, &reduce_cycle_type(&mu))?;
                let want = mn_central_character(&lambda, &mu)?;
                ensure(BigRational::from_integer(got.clone()) == want, || format!("{lambda} on {mu}: {got} vs {want}"))?;
            }
        }
    }
    let example = sym_central_character_content(&fh, &Partition::from_parts(vec![5, 2, 1]), &Partition::from_parts(vec![1]))?;
    ensure(example == BigInt::from(7), || format!("(5,2,1) on transpositions: {example}"))
}

fn nakayama() -> Result<()> {
    let fh = algebra("trivial")?;
    for p in [2, 3] {
        for n in 0..=6 {
            let cores = nakayama_blocks(n, p)?;
            ensure(cores.same_blocks(&sym_congruence_blocks(n, p)?), || format!("n={n} p={p}: {cores}"))?;
            let content = cross_validate_blocks(&fh, n, p)?;
            ensure(content.agrees == Some(true), || format!("n={n} p={p}: {content}"))?;
        }
    }
    let b = nakayama_blocks(3, 2)?;
    ensure(b.blocks == vec![vec![sym_type(&[3]), sym_type(&[1, 1, 1])], vec![sym_type(&[2, 1])]], || b.to_string())
}

fn c2_indecomposables() -> Result<()> {
    let g = builtin_group("C2")?;
    let m = |s: &str| WeightedSymFn::basis(mp(s));
    let two = BigInt::from(2);
    let cases = [
        ("[(1)@0]", "[(1)@0]", m("[(2)@0]").add(&m("[(1,1)@0]").scale(&two))),
        ("[(1)@0]", "[(1)@1]", m("[(2)@1]").add(&m("[(1)@0;(1)@1]"))),
        ("[(1)@1]", "[(1)@1]", m("[(2)@0]").add(&m("[(1,1)@1]").scale(&two))),
    ];
    for (a, b, want) in cases {
        let got = monomial_product(&mp(a), &mp(b), &g);
        ensure(got == want, || format!("m{a} m{b} = {got}"))?;
    }
    let r = indecomposables(&g, 2)?;
    ensure(r.free_rank == 2 && r.torsion == vec![two], || format!("{r:?}"))
}

fn hopf() -> Result<()> {
    for name in ["trivial", "C2"] {
        let r = hopf_check(&builtin_group(name)?, 4);
        ensure(r.passed(), || format!("{name}: {r:?}"))?;
    }
    Ok(())
}

fn basis_element(n: &ExponentVector) -> RGammaElement {
    RGammaElement::basis(n.clone())
}

fn rgamma() -> Result<()> {
    for name in ["C2", "S3"] {
        let fh = algebra(name)?;
        let g = fh.group();
        let l = g.num_classes();
        let basis = ExponentVector::all_up_to(l, 3);
        let mut products = HashMap::new();
        for x in &basis {
            for y in &basis {
                let xy = rg_multiply(&basis_element(x), &basis_element(y), g);
                ensure(xy == rg_multiply(&basis_element(y), &basis_element(x), g), || format!("{name}: B{x} B{y}"))?;
                products.insert((x.clone(), y.clone()), xy);
            }
        }
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let left = rg_multiply(&products[&(x.clone(), y.clone())], &basis_element(z), g);
                    let right = rg_multiply(&basis_element(x), &products[&(y.clone(), z.clone())], g);
                    ensure(left == right, || format!("{name}: (B{x} B{y}) B{z}"))?;
                }
            }
        }
        let small = ExponentVector::all_up_to(l, 2);
        for n in 0..=4 {
            for x in &small {
                for y in &small {
                    let lhs = fh.engine().centre_multiply(&ev_r(x, n), &ev_r(y, n))?;
                    let rhs = ev_r_element(&products[&(x.clone(), y.clone())], n);
                    ensure(lhs == rhs, || format!("{name}: specialisation of B{x} B{y} at n={n}"))?;
                }
            }
        }
        for (n, poly) in omega_expand(g, 3) {
            ensure(poly.homogeneous_part(n.total()) == leading_monomial(&n), || format!("{name}: leading term of B{n}"))?;
        }
    }
    Ok(())
}

fn triangularity() -> Result<()> {
    let fh = algebra("C2")?;
    let l = fh.group().num_classes();
    let order = |k: &Multipartition| (k.transposition_degree(), k.moving_degree());
    for size in 0..=3 {
        for mu in multipartitions_of(size, l) {
            let image = fh.psi_m(&mu)?;
            let hat = mu.hat();
            ensure(image.coefficient(&hat) == IntValuedPoly::one(), || format!("psi(m{mu}) at K{hat}"))?;
            for (k, _) in image.terms().filter(|(k, _)| **k != hat) {
                ensure(order(k) < order(&hat), || format!("psi(m{mu}) has K{k} not below K{hat}"))?;
            }
        }
    }
    // K_hat(μ) Ψ(B_M) = K_ν + terms of fewer affected points, ν = hat(μ) ∪ (1^M).
    let mut leads = BTreeSet::new();
    for size in 0..=3 {
        for mu in multipartitions_of(size, l) {
            for m in ExponentVector::all_up_to(l, 3 - size) {
                if m.get(0) != 0 {
                    continue;
                }
                let prod = fh.multiply(&FhElement::basis(mu.hat()), &psi_r(&m))?;
                let mut ones = std::collections::BTreeMap::new();
                for c in 1..l {
                    if m.get(c) > 0 {
                        ones.insert(c, Partition::ones(m.get(c)));
                    }
                }
                let nu = mu.hat().union(&Multipartition::from_map(ones));
                ensure(prod.coefficient(&nu) == IntValuedPoly::one(), || format!("K{} B{m} at K{nu}", mu.hat()))?;
                for (k, _) in prod.terms().filter(|(k, _)| **k != nu) {
                    ensure(k.affected_points() < nu.affected_points(), || format!("K{} B{m} has K{k}", mu.hat()))?;
                }
                ensure(leads.insert(nu.clone()), || format!("K{nu} is the leading term twice"))?;
            }
        }
    }
    Ok(())
}

fn wreath_characters() -> Result<()> {
    for name in ["C2", "S3"] {
        let fh = algebra(name)?;
        let g = fh.group();
        for n in 0..=3 {
            let classes: Vec<Multipartition> = fh.engine().wreath(n).all_types().iter().map(|t| t.partially_reduce()).collect();
            for lambda in wreath_irrep_labels(g, n)? {
                for mu in &classes {
                    let got = wreath_central_character_content(&fh, &lambda, mu)?;
                    let want = wreath_central_character_bruteforce(g, &lambda, mu)?;
                    ensure(got == want, || format!("{name}: {lambda} on {mu}: {got} vs {want}"))?;
                }
            }
        }
    }
    Ok(())
}

fn wreath_block_suite() -> Result<()> {
    let c2 = builtin_group("C2")?;
    for n in 1..=4 {
        let b = wreath_blocks(&c2, n, 2)?;
        ensure(b.blocks.len() == 1, || format!("C2 n={n}: {b}"))?;
    }
    let s3 = algebra("S3")?;
    for p in [2, 3] {
        let r = cross_validate_blocks(&s3, 2, p)?;
        ensure(r.agrees == Some(true), || format!("S3 n=2 p={p}: {r}"))?;
    }
    let trivial = builtin_group("trivial")?;
    for n in 0..=5 {
        for p in [2, 3, 5] {
            ensure(wreath_blocks(&trivial, n, p)?.same_blocks(&nakayama_blocks(n, p)?), || format!("trivial n={n} p={p}"))?;
        }
    }
    Ok(())
}

/// Every vector in `F_p^l`.
fn all_vectors(l: usize, p: u64) -> Vec<Vec<u64>> {
    (0..p.pow(l as u32))
        .map(|mut x| {
            (0..l)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        })
        .collect()
}

fn frobenius() -> Result<()> {
    for name in ["C2", "S3"] {
        let g = builtin_group(name)?;
        for p in [2u64, 3] {
            for r in 0..=1u32 {
                for q in all_vectors(g.num_classes(), p) {
                    let lhs = rg_power_mod(&b_qr_mod_p(&q, r, p)?, p as usize, &g, p);
                    let rhs = b_qr_mod_p(&class_power_mod(&g, &q, p as usize, p), r, p)?;
                    ensure(lhs == rhs, || format!("{name} p={p} r={r} q={q:?}"))?;
                }
            }
        }
    }
    Ok(())
}

fn modular_homomorphisms() -> Result<()> {
    let trivial = builtin_group("trivial")?;
    for p in [2u64, 3] {
        for t in 0..p.pow(4) {
            let mut digits = base_p_digits(t, p);
            digits.resize(4, 0);
            for r in 0..=2u32 {
                let k = p.pow(r) as usize;
                let v = modular_hom(&trivial, p, std::slice::from_ref(&digits), &ExponentVector::new(vec![k]))?;
                let lucas = mod_p(&binomial_i64(t as i64, k), p);
                ensure(v == digits[r as usize] && v == lucas, || format!("p={p} t={t} r={r}: {v}"))?;
            }
        }
    }
    for (name, p) in [("trivial", 2u64), ("C2", 2), ("C2", 3), ("S3", 2), ("S3", 3)] {
        let g = builtin_group(name)?;
        let blocks = g.p_blocks(p)?.len();
        let digits: Vec<Vec<u64>> = (0..blocks).map(|u| vec![(u as u64 + 1) % p, 1, u as u64 % p]).collect();
        let basis = ExponentVector::all_up_to(g.num_classes(), 2);
        for x in &basis {
            for y in &basis {
                let prod = rg_multiply(&basis_element(x), &basis_element(y), &g);
                let lhs = modular_hom(&g, p, &digits, x)? * modular_hom(&g, p, &digits, y)? % p;
                let rhs = modular_hom_element(&g, p, &digits, &prod)?;
                ensure(lhs == rhs, || format!("{name} p={p}: B{x} B{y}"))?;
            }
        }
    }
    Ok(())
}

fn orthogonality(g: &GroupData) -> Result<()> {
    let irreps = g.irreps()?;
    let l = g.num_classes();
    let order = Rational::from_integer(g.order().into());
    for (a, x) in irreps.iter().enumerate() {
        for (b, y) in irreps.iter().enumerate() {
            let s: Rational = (0..l).map(|c| Rational::from_integer(g.class_size(c).into()) * &x.values[c] * &y.values[c]).sum();
            ensure(s == if a == b { order.clone() } else { Rational::zero() }, || format!("{}: rows {a},{b}", g.name))?;
        }
    }
    for c in 0..l {
        for d in 0..l {
            let s: Rational = irreps.iter().map(|x| &x.values[c] * &x.values[d]).sum();
            let want = if c == d { &order / Rational::from_integer(g.class_size(c).into()) } else { Rational::zero() };
            ensure(s == want, || format!("{}: columns {c},{d}", g.name))?;
        }
    }
    Ok(())
}

fn group_validation() -> Result<()> {
    for name in BUILTIN_GROUPS {
        let g = builtin_group(name)?;
        if g.has_char_table() {
            orthogonality(&g)?;
        }
    }
    let base = builtin_document("S3").expect("built-in");
    let mut broken = Vec::new();
    let mut doc = base.clone();
    doc.mult[1].swap(0, 1);
    broken.push(("identity", doc));
    let mut doc = base.clone();
    // Relabel two rows only: still a Latin square, no longer associative.
    doc.mult.swap(3, 4);
    doc.mult[3][0] = 3;
    doc.mult[4][0] = 4;
    broken.push(("rows swapped", doc));
    let mut doc = base.clone();
    doc.mult[2][2] = doc.mult[2][1];
    broken.push(("repeated entry", doc));
    let mut doc = base.clone();
    doc.mult.pop();
    broken.push(("short table", doc));
    let mut doc = base.clone();
    if let Some(t) = doc.char_table.as_mut() {
        t.irreps[1].values[1] = "1".into();
    }
    broken.push(("character table", doc));
    let cyclic: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect();
    let mut doc = base.clone();
    doc.order = 4;
    doc.mult = cyclic;
    broken.push(("table of the wrong group", doc));
    for (what, doc) in broken {
        ensure(GroupData::load(&doc).is_err(), || format!("{what}: accepted"))?;
    }
    GroupData::load(&base).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection() {
        assert_eq!(select("all").unwrap().len(), 16);
        assert_eq!(select("7").unwrap()[0].name, "nakayama");
        assert_eq!(select("hopf").unwrap()[0].id, 9);
        assert!(select("nope").is_err());
        let ids: Vec<u32> = CRITERIA.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=16).collect::<Vec<_>>());
    }

    #[test]
    fn helpers() {
        assert_eq!(with_ones(&[2], 4), sym_type(&[2, 1, 1]));
        assert_eq!(with_ones(&[2, 2], 4), sym_type(&[2, 2]));
        assert_eq!(with_ones(&[], 3), sym_type(&[1, 1, 1]));
        assert_eq!(all_vectors(2, 3).len(), 9);
    }
}

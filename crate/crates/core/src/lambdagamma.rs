//! The ring `Λ(Γ*)` of class-weighted symmetric functions in the monomial
//! basis `m_λ`, with its Hopf structure and the indecomposables `I/I²`.
//!
//! A part `r` in component `c` of `λ` stands for a variable power `x^r(c)`;
//! `m_λ` is the sum of the distinct monomials obtained by placing these
//! factors in distinct slots, and `x^r(c) x^s(c') = x^{r+s}(c c')` with the
//! class product expanded through the class coefficients.
//!
//! A product of two degree-one monomials of distinct classes has coefficient
//! one on `m_{(1)_c (1)_c'}`: each monomial `x_i(c) x_j(c')` with `i != j`
//! arises from exactly one pair of factors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groupdata::GroupData;
use crate::partitions::{multipartitions_of, Multipartition, Partition};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WeightedSymFn {
    terms: BTreeMap<Multipartition, BigInt>,
}

impl WeightedSymFn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::basis(Multipartition::empty())
    }

    pub fn basis(lambda: Multipartition) -> Self {
        let mut f = Self::zero();
        f.add_term(lambda, BigInt::one());
        f
    }

    pub fn add_term(&mut self, lambda: Multipartition, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(lambda.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&lambda);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multipartition, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, lambda: &Multipartition) -> BigInt {
        self.terms.get(lambda).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&self, other: &WeightedSymFn, c: &BigInt) -> WeightedSymFn {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &WeightedSymFn) -> WeightedSymFn {
        self.add_scaled(other, &BigInt::one())
    }

    pub fn sub(&self, other: &WeightedSymFn) -> WeightedSymFn {
        self.add_scaled(other, &-BigInt::one())
    }

    pub fn scale(&self, c: &BigInt) -> WeightedSymFn {
        Self::zero().add_scaled(self, c)
    }

    /// Degrees of the nonzero homogeneous components.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(Multipartition::size).collect();
        d.sort();
        d.dedup();
        d
    }

    /// Coefficient of the empty monomial.
    pub fn counit(&self) -> BigInt {
        self.coefficient(&Multipartition::empty())
    }
}

impl fmt::Display for WeightedSymFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match i {
                0 if c.is_negative() => write!(f, "-")?,
                0 => {}
                _ => write!(f, " {sign} ")?,
            }
            let abs = c.abs();
            if abs.is_one() {
                write!(f, "m{k}")?;
            } else {
                write!(f, "{abs}*m{k}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for WeightedSymFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut out = WeightedSymFn::zero();
        if s == "0" {
            return Ok(out);
        }
        let (mut sign, mut rest) = match s.strip_prefix('-') {
            Some(r) => (-BigInt::one(), r.trim_start()),
            None => (BigInt::one(), s),
        };
        loop {
            let end = rest.find(" + ").into_iter().chain(rest.find(" - ")).min().unwrap_or(rest.len());
            let term = rest[..end].trim();
            let (coeff, key) = match term.split_once('*') {
                Some((c, k)) => (c.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?, k.trim()),
                None => (BigInt::one(), term),
            };
            let key = key.strip_prefix('m').ok_or_else(|| Error::Parse(format!("expected m[...], got {key:?}")))?;
            out.add_term(key.parse()?, sign * coeff);
            if end == rest.len() {
                break;
            }
            sign = if &rest[end..end + 3] == " - " { -BigInt::one() } else { BigInt::one() };
            rest = &rest[end + 3..];
        }
        Ok(out)
    }
}

impl Serialize for WeightedSymFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WeightedSymFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Labelled parts `(exponent, class)` of `λ`, in canonical order.
fn labelled_parts(lambda: &Multipartition) -> Vec<(usize, usize)> {
    lambda.iter().flat_map(|(c, p)| p.parts().iter().map(move |&r| (r, c))).collect()
}

/// Number of labelled placements giving one distinct monomial.
fn symmetry_factor(lambda: &Multipartition) -> BigInt {
    lambda
        .iter()
        .flat_map(|(_, p)| p.multiplicities().into_values().collect::<Vec<_>>())
        .map(|m| (1..=m).fold(BigInt::one(), |a, k| a * k))
        .product()
}

/// `m_λ m_μ`: placements of both part lists into `L` slots covering every
/// slot, multiplied slot-wise; only monomials already in canonical slot
/// order (class ascending, exponent descending) are collected.
pub fn basis_product(lambda: &Multipartition, mu: &Multipartition, group: &GroupData) -> WeightedSymFn {
    let (a, b) = (labelled_parts(lambda), labelled_parts(mu));
    let mut raw: BTreeMap<Multipartition, BigInt> = BTreeMap::new();
    for slots in a.len().max(b.len())..=a.len() + b.len() {
        let mut place_a = vec![None; slots];
        place(&a, 0, &mut place_a, &mut |pa| {
            let mut place_b = vec![None; slots];
            place(&b, 0, &mut place_b, &mut |pb| {
                if (0..slots).any(|s| pa[s].is_none() && pb[s].is_none()) {
                    return;
                }
                collect_products(pa, pb, 0, &mut Vec::new(), BigInt::one(), group, &mut raw);
            });
        });
    }
    let denom = symmetry_factor(lambda) * symmetry_factor(mu);
    let mut out = WeightedSymFn::zero();
    for (k, v) in raw {
        let (q, r) = v.div_rem(&denom);
        debug_assert!(r.is_zero(), "orbit count not divisible");
        out.add_term(k, q);
    }
    out
}

fn place(parts: &[(usize, usize)], i: usize, slots: &mut Vec<Option<(usize, usize)>>, f: &mut dyn FnMut(&[Option<(usize, usize)>])) {
    if i == parts.len() {
        f(slots);
        return;
    }
    for s in 0..slots.len() {
        if slots[s].is_none() {
            slots[s] = Some(parts[i]);
            place(parts, i + 1, slots, f);
            slots[s] = None;
        }
    }
}

fn collect_products(
    pa: &[Option<(usize, usize)>],
    pb: &[Option<(usize, usize)>],
    s: usize,
    acc: &mut Vec<(usize, usize)>,
    weight: BigInt,
    group: &GroupData,
    out: &mut BTreeMap<Multipartition, BigInt>,
) {
    if let Some(&(r, c)) = acc.last() {
        if acc.len() >= 2 {
            let (pr, pc) = acc[acc.len() - 2];
            if (pc, std::cmp::Reverse(pr)) > (c, std::cmp::Reverse(r)) {
                return;
            }
        }
    }
    if s == pa.len() {
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(r, c) in acc.iter() {
            comps.entry(c).or_default().push(r);
        }
        let key = Multipartition::from_map(comps.into_iter().map(|(c, v)| (c, Partition::from_parts(v))).collect());
        *out.entry(key).or_default() += weight;
        return;
    }
    match (pa[s], pb[s]) {
        (Some(x), None) | (None, Some(x)) => {
            acc.push(x);
            collect_products(pa, pb, s + 1, acc, weight, group, out);
            acc.pop();
        }
        (Some((r, c)), Some((q, d))) => {
            for k in 0..group.num_classes() {
                let a = group.class_coefficient(c, d, k);
                if a != 0 {
                    acc.push((r + q, k));
                    collect_products(pa, pb, s + 1, acc, &weight * a, group, out);
                    acc.pop();
                }
            }
        }
        (None, None) => unreachable!("slots are covered"),
    }
}

pub fn wsf_multiply(f: &WeightedSymFn, g: &WeightedSymFn, group: &GroupData) -> WeightedSymFn {
    let mut out = WeightedSymFn::zero();
    for (a, ca) in f.terms() {
        for (b, cb) in g.terms() {
            out = out.add_scaled(&basis_product(a, b, group), &(ca * cb));
        }
    }
    out
}

/// Formal sums of `m_μ ⊗ m_ν`.
pub type TensorSquare = BTreeMap<(Multipartition, Multipartition), BigInt>;

fn add_pair(t: &mut TensorSquare, key: (Multipartition, Multipartition), c: BigInt) {
    if c.is_zero() {
        return;
    }
    let slot = t.entry(key.clone()).or_default();
    *slot += c;
    if slot.is_zero() {
        t.remove(&key);
    }
}

/// `Δ(m_λ) = Σ m_μ ⊗ m_ν` over all ways of splitting each multiplicity
/// `m_i(λ(c)) = m_i(μ(c)) + m_i(ν(c))`, each split once.
pub fn coproduct(lambda: &Multipartition) -> TensorSquare {
    let slots: Vec<(usize, usize, usize)> = lambda
        .iter()
        .flat_map(|(c, p)| p.multiplicities().into_iter().map(move |(i, m)| (c, i, m)))
        .collect();
    let mut out = TensorSquare::new();
    let mut choice = vec![0usize; slots.len()];
    loop {
        let mut left: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut right: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(c, i, m), &k) in slots.iter().zip(&choice) {
            left.entry(c).or_default().extend(std::iter::repeat(i).take(k));
            right.entry(c).or_default().extend(std::iter::repeat(i).take(m - k));
        }
        let build = |map: BTreeMap<usize, Vec<usize>>| {
            Multipartition::from_map(map.into_iter().map(|(c, v)| (c, Partition::from_parts(v))).collect())
        };
        add_pair(&mut out, (build(left), build(right)), BigInt::one());
        // Next choice vector, odometer style.
        let mut pos = 0;
        while pos < slots.len() && choice[pos] == slots[pos].2 {
            choice[pos] = 0;
            pos += 1;
        }
        if pos == slots.len() {
            break;
        }
        choice[pos] += 1;
    }
    out
}

pub fn coproduct_element(f: &WeightedSymFn) -> TensorSquare {
    let mut out = TensorSquare::new();
    for (k, c) in f.terms() {
        for (pair, v) in coproduct(k) {
            add_pair(&mut out, pair, c * v);
        }
    }
    out
}

/// `(a ⊗ b)(c ⊗ d) = ac ⊗ bd`.
pub fn tensor_multiply(x: &TensorSquare, y: &TensorSquare, group: &GroupData) -> TensorSquare {
    let mut out = TensorSquare::new();
    for ((a, b), cx) in x {
        for ((c, d), cy) in y {
            let left = basis_product(a, c, group);
            let right = basis_product(b, d, group);
            for (l, cl) in left.terms() {
                for (r, cr) in right.terms() {
                    add_pair(&mut out, (l.clone(), r.clone()), cx * cy * cl * cr);
                }
            }
        }
    }
    out
}

/// Antipode, by induction on degree from `m∘(S⊗id)∘Δ = η∘ε`.
pub fn antipode(lambda: &Multipartition, group: &GroupData) -> WeightedSymFn {
    let mut memo = HashMap::new();
    antipode_memo(lambda, group, &mut memo)
}

fn antipode_memo(lambda: &Multipartition, group: &GroupData, memo: &mut HashMap<Multipartition, WeightedSymFn>) -> WeightedSymFn {
    if lambda.is_empty() {
        return WeightedSymFn::one();
    }
    if let Some(v) = memo.get(lambda) {
        return v.clone();
    }
    let mut sum = WeightedSymFn::zero();
    for ((mu, nu), c) in coproduct(lambda) {
        if mu == *lambda {
            continue;
        }
        let s = antipode_memo(&mu, group, memo);
        sum = sum.add_scaled(&wsf_multiply(&s, &WeightedSymFn::basis(nu), group), &c);
    }
    let out = sum.scale(&-BigInt::one());
    memo.insert(lambda.clone(), out.clone());
    out
}

pub fn antipode_element(f: &WeightedSymFn, group: &GroupData) -> WeightedSymFn {
    let mut memo = HashMap::new();
    let mut out = WeightedSymFn::zero();
    for (k, c) in f.terms() {
        out = out.add_scaled(&antipode_memo(k, group, &mut memo), c);
    }
    out
}

/// Diagonal of the Smith normal form of an integer matrix: the nonzero
/// invariant factors, each dividing the next.
pub fn smith_invariant_factors(matrix: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // Pivot of minimal absolute value in the remaining block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let pivot = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&pivot);
                if !q.is_zero() {
                    for j in t..cols {
                        let v = &a[t][j] * &q;
                        a[i][j] -= v;
                    }
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&pivot);
                if !q.is_zero() {
                    for i in t..rows {
                        let v = &a[i][t] * &q;
                        a[i][j] -= v;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // The pivot must divide the rest of the block.
            if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot))) {
                for j in t..cols {
                    let v = a[i][j].clone();
                    a[t][j] += v;
                }
                continue;
            }
            diag.push(pivot.abs());
            break;
        }
    }
    diag
}

/// Degree-`d` component of `I/I²` as an abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndecomposablesReport {
    pub degree: usize,
    /// Rank of the degree-`d` lattice.
    pub basis_size: usize,
    pub free_rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
    /// All nonzero invariant factors of the relation matrix.
    pub invariant_factors: Vec<BigInt>,
}

/// Products of lower-degree basis elements landing in degree `d`, one row each.
pub fn decomposable_products(group: &GroupData, d: usize) -> Vec<(Multipartition, Multipartition, WeightedSymFn)> {
    let l = group.num_classes();
    let mut out = Vec::new();
    for i in 1..=d / 2 {
        for a in multipartitions_of(i, l) {
            for b in multipartitions_of(d - i, l) {
                if i == d - i && b < a {
                    continue;
                }
                let prod = basis_product(&a, &b, group);
                out.push((a.clone(), b, prod));
            }
        }
    }
    out
}

pub fn indecomposables(group: &GroupData, d: usize) -> Result<IndecomposablesReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("indecomposables start in degree 1".into()));
    }
    let basis = multipartitions_of(d, group.num_classes());
    let index: HashMap<&Multipartition, usize> = basis.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let rows: Vec<Vec<BigInt>> = decomposable_products(group, d)
        .into_iter()
        .map(|(_, _, f)| {
            let mut row = vec![BigInt::zero(); basis.len()];
            for (k, c) in f.terms() {
                row[index[k]] = c.clone();
            }
            row
        })
        .collect();
    let factors = smith_invariant_factors(&rows);
    Ok(IndecomposablesReport {
        degree: d,
        basis_size: basis.len(),
        free_rank: basis.len() - factors.len(),
        torsion: factors.iter().filter(|f| !f.is_one()).cloned().collect(),
        invariant_factors: factors,
    })
}

type TensorCube = BTreeMap<(Multipartition, Multipartition, Multipartition), BigInt>;

fn coproduct_on_left(t: &TensorSquare) -> TensorCube {
    let mut out = TensorCube::new();
    for ((a, b), c) in t {
        for ((x, y), v) in coproduct(a) {
            *out.entry((x, y, b.clone())).or_default() += c * v;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn coproduct_on_right(t: &TensorSquare) -> TensorCube {
    let mut out = TensorCube::new();
    for ((a, b), c) in t {
        for ((x, y), v) in coproduct(b) {
            *out.entry((a.clone(), x, y)).or_default() += c * v;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Which Hopf identities fail, checked on every basis element up to a degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopfReport {
    pub max_degree: usize,
    pub basis_elements: usize,
    pub products: usize,
    pub coassociativity_failures: Vec<Multipartition>,
    pub counit_failures: Vec<Multipartition>,
    pub antipode_failures: Vec<Multipartition>,
    /// Pairs `(λ, μ)` with `Δ(m_λ m_μ) != Δ(m_λ) Δ(m_μ)`.
    pub multiplicativity_failures: Vec<(Multipartition, Multipartition)>,
}

impl HopfReport {
    pub fn passed(&self) -> bool {
        self.coassociativity_failures.is_empty()
            && self.counit_failures.is_empty()
            && self.antipode_failures.is_empty()
            && self.multiplicativity_failures.is_empty()
    }
}

/// Coassociativity, both counit laws and the antipode axiom on `m_λ` with
/// `|λ| <= max_degree`, and multiplicativity of `Δ` on pairs of total degree
/// at most `max_degree`.
pub fn hopf_check(group: &GroupData, max_degree: usize) -> HopfReport {
    let basis: Vec<Multipartition> = (0..=max_degree).flat_map(|k| multipartitions_of(k, group.num_classes())).collect();
    let mut report = HopfReport { max_degree, basis_elements: basis.len(), ..HopfReport::default() };
    for lam in &basis {
        let d = coproduct(lam);
        if coproduct_on_left(&d) != coproduct_on_right(&d) {
            report.coassociativity_failures.push(lam.clone());
        }
        let one_side = |keep_left: bool| {
            d.iter()
                .filter(|((a, b), _)| if keep_left { b.is_empty() } else { a.is_empty() })
                .fold(WeightedSymFn::zero(), |acc, ((a, b), c)| {
                    acc.add_scaled(&WeightedSymFn::basis(if keep_left { a.clone() } else { b.clone() }), c)
                })
        };
        let expected = WeightedSymFn::basis(lam.clone());
        if one_side(true) != expected || one_side(false) != expected {
            report.counit_failures.push(lam.clone());
        }
        let mut total = WeightedSymFn::zero();
        for ((a, b), c) in &d {
            total = total.add_scaled(&wsf_multiply(&antipode(a, group), &WeightedSymFn::basis(b.clone()), group), c);
        }
        let unit = if lam.is_empty() { WeightedSymFn::one() } else { WeightedSymFn::zero() };
        if total != unit {
            report.antipode_failures.push(lam.clone());
        }
    }
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i..] {
            if a.size() + b.size() > max_degree {
                continue;
            }
            report.products += 1;
            let lhs = coproduct_element(&basis_product(a, b, group));
            if lhs != tensor_multiply(&coproduct(a), &coproduct(b), group) {
                report.multiplicativity_failures.push((a.clone(), b.clone()));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupdata::{builtin_group, trivial_group};

    fn mp(s: &str) -> Multipartition {
        s.parse().unwrap()
    }

    fn m(s: &str) -> WeightedSymFn {
        WeightedSymFn::basis(mp(s))
    }

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn all_up_to(l: usize, d: usize) -> Vec<Multipartition> {
        (0..=d).flat_map(|k| multipartitions_of(k, l)).collect()
    }

    #[test]
    fn degree_two_products() {
        let c2 = builtin_group("C2").unwrap();
        assert_eq!(
            basis_product(&mp("[(1)@0]"), &mp("[(1)@0]"), &c2),
            m("[(2)@0]").add(&m("[(1,1)@0]").scale(&int(2)))
        );
        assert_eq!(basis_product(&mp("[(1)@0]"), &mp("[(1)@1]"), &c2), m("[(2)@1]").add(&m("[(1)@0;(1)@1]")));
        assert_eq!(
            basis_product(&mp("[(1)@1]"), &mp("[(1)@1]"), &c2),
            m("[(2)@0]").add(&m("[(1,1)@1]").scale(&int(2)))
        );
        let s3 = builtin_group("S3").unwrap();
        // m_{(1)_t}² = Σ_s A_{t,t}^s m_{(2)_s} + 2 m_{(1,1)_t}.
        let got = basis_product(&mp("[(1)@1]"), &mp("[(1)@1]"), &s3);
        let want = m("[(2)@0]").scale(&int(3)).add(&m("[(2)@2]").scale(&int(3))).add(&m("[(1,1)@1]").scale(&int(2)));
        assert_eq!(got, want);
        assert_eq!(wsf_multiply(&WeightedSymFn::one(), &want, &s3), want);
    }

    #[test]
    fn commutative_associative_graded() {
        for name in ["trivial", "C2", "S3"] {
            let g = builtin_group(name).unwrap();
            let l = g.num_classes();
            let basis = all_up_to(l, 3);
            for a in &basis {
                for b in &basis {
                    let ab = basis_product(a, b, &g);
                    assert_eq!(ab, basis_product(b, a, &g));
                    assert!(ab.degrees().iter().all(|&d| d == a.size() + b.size()));
                }
            }
            let small = all_up_to(l, 1);
            let mid = all_up_to(l, 2);
            for a in &small {
                for b in &mid {
                    for c in &basis {
                        let (fa, fb, fc) = (WeightedSymFn::basis(a.clone()), WeightedSymFn::basis(b.clone()), WeightedSymFn::basis(c.clone()));
                        assert_eq!(
                            wsf_multiply(&wsf_multiply(&fa, &fb, &g), &fc, &g),
                            wsf_multiply(&fa, &wsf_multiply(&fb, &fc, &g), &g)
                        );
                    }
                }
            }
        }
    }

    /// `m_λ` in `k` variables as a polynomial: exponent vector -> coefficient.
    fn expand_classical(lambda: &Partition, k: usize) -> BTreeMap<Vec<usize>, i64> {
        let mut out = BTreeMap::new();
        let parts = lambda.parts().to_vec();
        fn go(parts: &[usize], i: usize, cur: &mut Vec<usize>, out: &mut BTreeMap<Vec<usize>, i64>) {
            if i == parts.len() {
                out.insert(cur.clone(), 1);
                return;
            }
            for s in 0..cur.len() {
                if cur[s] == 0 {
                    cur[s] = parts[i];
                    go(parts, i + 1, cur, out);
                    cur[s] = 0;
                }
            }
        }
        go(&parts, 0, &mut vec![0; k], &mut out);
        out
    }

    #[test]
    fn trivial_group_matches_classical_expansion() {
        let t = trivial_group();
        let k = 6;
        let parts: Vec<Partition> = (0..=4).flat_map(crate::partitions::partitions_of).collect();
        for a in &parts {
            for b in &parts {
                if a.size() + b.size() > 5 {
                    continue;
                }
                let (pa, pb) = (expand_classical(a, k), expand_classical(b, k));
                let mut direct: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
                for (x, cx) in &pa {
                    for (y, cy) in &pb {
                        let z: Vec<usize> = x.iter().zip(y).map(|(u, v)| u + v).collect();
                        *direct.entry(z).or_default() += cx * cy;
                    }
                }
                let prod = basis_product(&Multipartition::single(0, a.clone()), &Multipartition::single(0, b.clone()), &t);
                let mut via: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
                for (key, c) in prod.terms() {
                    for (x, v) in expand_classical(&key.component(0), k) {
                        *via.entry(x).or_default() += v * i64::try_from(c).unwrap();
                    }
                }
                direct.retain(|_, v| *v != 0);
                assert_eq!(direct, via, "{a} * {b}");
            }
        }
    }

    #[test]
    fn coproduct_examples() {
        let e = Multipartition::empty();
        assert_eq!(coproduct(&e), TensorSquare::from([((e.clone(), e.clone()), int(1))]));
        let c = mp("[(1)@1]");
        assert_eq!(coproduct(&c), TensorSquare::from([((c.clone(), e.clone()), int(1)), ((e.clone(), c.clone()), int(1))]));
        assert_eq!(coproduct(&mp("[(1,1)@1]")).len(), 3);
        assert_eq!(coproduct(&mp("[(2,1,1)@0;(1)@1]")).len(), 2 * 3 * 2);
    }

    #[test]
    fn antipode_examples() {
        let c2 = builtin_group("C2").unwrap();
        assert_eq!(antipode(&Multipartition::empty(), &c2), WeightedSymFn::one());
        assert_eq!(antipode(&mp("[(1)@1]"), &c2), m("[(1)@1]").scale(&int(-1)));
        let sq = wsf_multiply(&m("[(1)@1]"), &m("[(1)@1]"), &c2);
        assert_eq!(antipode(&mp("[(1,1)@1]"), &c2), sq.sub(&m("[(1,1)@1]")));
    }

    #[test]
    fn hopf_axioms() {
        for name in ["trivial", "C2"] {
            let g = builtin_group(name).unwrap();
            let r = hopf_check(&g, 4);
            assert!(r.passed(), "{name}: {r:?}");
            assert_eq!(r.basis_elements, all_up_to(g.num_classes(), 4).len());
        }
        let r = hopf_check(&builtin_group("S3").unwrap(), 2);
        assert!(r.passed());
    }

    #[test]
    fn smith_form_examples() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> { rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect() };
        assert_eq!(smith_invariant_factors(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])), vec![int(2), int(6), int(12)]);
        assert_eq!(smith_invariant_factors(&m(&[&[0, 0], &[0, 0]])), Vec::<BigInt>::new());
        assert_eq!(smith_invariant_factors(&m(&[&[2, 0], &[0, 3]])), vec![int(1), int(6)]);
    }

    #[test]
    fn indecomposable_examples() {
        let t = trivial_group();
        let r = indecomposables(&t, 2).unwrap();
        assert_eq!((r.free_rank, r.torsion.clone(), r.invariant_factors.clone()), (1, vec![], vec![int(1)]));
        let c2 = builtin_group("C2").unwrap();
        let r = indecomposables(&c2, 2).unwrap();
        assert_eq!((r.free_rank, r.torsion), (2, vec![int(2)]));
        for name in ["trivial", "C2", "S3"] {
            let g = builtin_group(name).unwrap();
            let r = indecomposables(&g, 1).unwrap();
            assert_eq!((r.free_rank, r.basis_size), (g.num_classes(), g.num_classes()));
        }
    }

    #[test]
    fn text_round_trip() {
        let f = m("[(2)@1]").scale(&int(-3)).add(&m("[(1)@0;(1)@1]")).add(&WeightedSymFn::one());
        assert_eq!(f.to_string().parse::<WeightedSymFn>().unwrap(), f);
        assert_eq!(serde_json::from_str::<WeightedSymFn>(&serde_json::to_string(&f).unwrap()).unwrap(), f);
    }
}

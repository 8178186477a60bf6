//! Exact arithmetic in `Z[Γ≀S_n]` and its centre: element products, cycle
//! types, class sums, centre products, Jucys–Murphy elements and evaluation
//! of weighted monomials.
//!
//! Elements are `(colors, perm)` with `perm` in zero-based one-line notation,
//! `perm[i] = σ(i)`, and product `(g,σ)(h,ρ) = (g·σ(h), σρ)` where
//! `σ(h)_i = h_{σ⁻¹(i)}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupdata::GroupData;
use crate::intpoly::binomial_i64;
use crate::partitions::{multipartitions_of, Multipartition, Partition};

/// Default bound on the number of group elements a single call may enumerate.
pub const DEFAULT_ELEMENT_CAP: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_ELEMENT_CAP`].
pub const CAP_ENV_VAR: &str = "FHGAMMA_MAX_ELEMENTS";

/// Element cap from the environment, falling back to the default.
pub fn element_cap_from_env() -> u128 {
    std::env::var(CAP_ENV_VAR).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ELEMENT_CAP)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct WreathElement {
    colors: Vec<u16>,
    perm: Vec<u8>,
}

impl WreathElement {
    pub fn new(colors: &[usize], perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        if colors.len() != n || perm.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::InvalidParameter(format!("bad wreath element {colors:?} {perm:?}")));
        }
        Ok(WreathElement {
            colors: colors.iter().map(|&c| c as u16).collect(),
            perm: perm.iter().map(|&p| p as u8).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        WreathElement { colors: vec![0; n], perm: (0..n as u8).collect() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn color(&self, i: usize) -> usize {
        self.colors[i] as usize
    }

    pub fn image(&self, i: usize) -> usize {
        self.perm[i] as usize
    }

    /// Points moved by the permutation or carrying a non-identity color.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.perm[i] as usize != i || self.colors[i] != 0).collect()
    }

    /// `g^{(i)}` in `Γ≀S_n`.
    pub fn color_at(n: usize, i: usize, g: usize) -> Self {
        let mut e = Self::identity(n);
        e.colors[i] = g as u16;
        e
    }

    /// Transposition `(i j)` with identity colors.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut e = Self::identity(n);
        e.perm.swap(i, j);
        e
    }
}

/// Element of `Z[Γ≀S_n]`: sparse map element -> coefficient, no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraElement {
    n: usize,
    terms: HashMap<WreathElement, BigInt>,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        AlgebraElement { n, terms: HashMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_element(WreathElement::identity(n))
    }

    pub fn from_element(e: WreathElement) -> Self {
        let mut a = Self::zero(e.n());
        a.add_term(e, BigInt::one());
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, e: WreathElement, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coefficient(&self, e: &WreathElement) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WreathElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add_scaled(other, &BigInt::one())
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add_scaled(other, &-BigInt::one())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &AlgebraElement, c: &BigInt) -> AlgebraElement {
        let mut out = self.terms.clone();
        for (e, v) in &other.terms {
            *out.entry(e.clone()).or_default() += v * c;
        }
        out.retain(|_, v| !v.is_zero());
        AlgebraElement { n: self.n, terms: out }
    }

    pub fn scale(&self, c: &BigInt) -> AlgebraElement {
        AlgebraElement::zero(self.n).add_scaled(self, c)
    }
}

/// Element of the centre in the class-sum basis, keyed by full cycle type.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CentreElement {
    pub n: usize,
    pub terms: BTreeMap<Multipartition, BigInt>,
}

impl CentreElement {
    pub fn zero(n: usize) -> Self {
        CentreElement { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut c = Self::zero(n);
        c.add_term(Multipartition::single(0, Partition::ones(n)), BigInt::one());
        c
    }

    pub fn add_term(&mut self, key: Multipartition, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, key: &Multipartition) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn add_scaled(&self, other: &CentreElement, c: &BigInt) -> CentreElement {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same element keyed by partially-reduced labels.
    pub fn by_reduced_label(&self) -> BTreeMap<Multipartition, BigInt> {
        self.terms.iter().map(|(k, v)| (k.partially_reduce(), v.clone())).collect()
    }
}

impl fmt::Display for CentreElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, c.is_negative()) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                _ => write!(f, " {sign} ")?,
            }
            let abs = c.abs();
            if abs.is_one() {
                write!(f, "X{k}")?;
            } else {
                write!(f, "{abs}*X{k}")?;
            }
        }
        Ok(())
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `Γ≀S_n` for a fixed group and `n`.
#[derive(Clone, Copy)]
pub struct Wreath<'g> {
    pub group: &'g GroupData,
    pub n: usize,
}

impl<'g> Wreath<'g> {
    pub fn new(group: &'g GroupData, n: usize) -> Self {
        Wreath { group, n }
    }

    pub fn order(&self) -> BigInt {
        BigInt::from(self.group.order()).pow(self.n as u32) * factorial(self.n)
    }

    pub fn multiply(&self, a: &WreathElement, b: &WreathElement) -> WreathElement {
        let n = a.n();
        let mut inv = vec![0u8; n];
        for i in 0..n {
            inv[a.perm[i] as usize] = i as u8;
        }
        let colors = (0..n)
            .map(|i| self.group.multiply(a.colors[i] as usize, b.colors[inv[i] as usize] as usize) as u16)
            .collect();
        let perm = (0..n).map(|i| a.perm[b.perm[i] as usize]).collect();
        WreathElement { colors, perm }
    }

    pub fn inverse(&self, a: &WreathElement) -> WreathElement {
        let n = a.n();
        let mut perm = vec![0u8; n];
        for i in 0..n {
            perm[a.perm[i] as usize] = i as u8;
        }
        let colors = (0..n).map(|j| self.group.inverse(a.colors[a.perm[j] as usize] as usize) as u16).collect();
        WreathElement { colors, perm }
    }

    /// Cycle type: each cycle `(i1 … ir)` with `σ(i_j) = i_{j+1}` adds a part
    /// `r` to the component of the class of `g_{ir}···g_{i1}`.
    pub fn cycle_type(&self, a: &WreathElement) -> Multipartition {
        let n = a.n();
        let mut seen = vec![false; n];
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut acc = 0usize;
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                acc = self.group.multiply(a.colors[x] as usize, acc);
                x = a.perm[x] as usize;
                len += 1;
            }
            comps.entry(self.group.class_of(acc)).or_default().push(len);
        }
        Multipartition::from_map(comps.into_iter().map(|(c, parts)| (c, Partition::from_parts(parts))).collect())
    }

    /// Size of the class of full cycle type `ty`.
    pub fn class_size(&self, ty: &Multipartition) -> BigInt {
        let order = self.group.order();
        let mut z = BigInt::one();
        for (c, p) in ty.iter() {
            for (i, m) in p.multiplicities() {
                let factor = BigInt::from(i * order) / BigInt::from(self.group.class_size(c));
                z *= factor.pow(m as u32) * factorial(m);
            }
        }
        self.order() / z
    }

    fn check_type(&self, ty: &Multipartition) -> Result<()> {
        if ty.size() != self.n {
            return Err(Error::InvalidParameter(format!("cycle type {ty} does not have size {}", self.n)));
        }
        if ty.max_index().is_some_and(|c| c >= self.group.num_classes()) {
            return Err(Error::InvalidParameter(format!("cycle type {ty} uses an unknown class")));
        }
        Ok(())
    }

    /// Calls `f` on every element of full cycle type `ty`.
    pub fn for_each_class_element(&self, ty: &Multipartition, f: &mut dyn FnMut(&WreathElement)) {
        let mut parts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut trivial = 0;
        for (c, p) in ty.iter() {
            for &len in p.parts() {
                if len == 1 && c == 0 {
                    trivial += 1;
                } else {
                    *parts.entry((len, c)).or_default() += 1;
                }
            }
        }
        let n = self.n;
        let mut st = GenState {
            wreath: *self,
            elem: WreathElement::identity(n),
            decided: vec![false; n],
            parts,
            trivial,
        };
        st.recurse(f);
    }

    /// All elements of full cycle type `ty`.
    pub fn class_elements(&self, ty: &Multipartition) -> Vec<WreathElement> {
        let mut out = Vec::new();
        self.for_each_class_element(ty, &mut |e| out.push(e.clone()));
        out
    }

    /// A fixed element of partially-reduced type `label`, supported on the
    /// first `label.affected_points()` points.
    pub fn representative(&self, label: &Multipartition) -> Option<WreathElement> {
        label.unreduce(self.n)?;
        let mut colors = vec![0usize; self.n];
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut next = 0;
        for (c, p) in label.iter() {
            for &part in p.parts() {
                let len = if c == 0 { part + 1 } else { part };
                colors[next] = self.group.representative(c);
                for k in 0..len {
                    perm[next + k] = next + (k + 1) % len;
                }
                next += len;
            }
        }
        Some(WreathElement::new(&colors, &perm).expect("valid representative"))
    }

    pub fn multiply_elements(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let mut out: HashMap<WreathElement, BigInt> = HashMap::with_capacity(a.len().max(b.len()));
        for (x, cx) in &a.terms {
            for (y, cy) in &b.terms {
                *out.entry(self.multiply(x, y)).or_default() += cx * cy;
            }
        }
        out.retain(|_, v| !v.is_zero());
        AlgebraElement { n: self.n, terms: out }
    }

    /// Sum of all elements of full cycle type `ty`.
    pub fn class_sum(&self, ty: &Multipartition, cap: u128) -> Result<AlgebraElement> {
        self.check_type(ty)?;
        guard(&self.class_size(ty), cap)?;
        let mut a = AlgebraElement::zero(self.n);
        self.for_each_class_element(ty, &mut |e| {
            a.terms.insert(e.clone(), BigInt::one());
        });
        Ok(a)
    }

    /// Class-sum expansion of a class-constant element.
    pub fn to_centre(&self, a: &AlgebraElement) -> Result<CentreElement> {
        let mut seen: BTreeMap<Multipartition, (BigInt, BigInt)> = BTreeMap::new();
        for (e, c) in &a.terms {
            let ty = self.cycle_type(e);
            let entry = seen.entry(ty.clone()).or_insert_with(|| (c.clone(), BigInt::zero()));
            if entry.0 != *c {
                return Err(Error::NotCentral(format!("coefficients differ on class {ty}")));
            }
            entry.1 += 1;
        }
        let mut out = CentreElement::zero(self.n);
        for (ty, (c, count)) in seen {
            if count != self.class_size(&ty) {
                return Err(Error::NotCentral(format!("class {ty} only partly present")));
            }
            out.add_term(ty, c);
        }
        Ok(out)
    }

    /// Expands a centre element back into the group algebra.
    pub fn from_centre(&self, c: &CentreElement, cap: u128) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(self.n);
        for (ty, v) in &c.terms {
            out = out.add_scaled(&self.class_sum(ty, cap)?, v);
        }
        Ok(out)
    }

    /// Full cycle types of `Γ≀S_n`.
    pub fn all_types(&self) -> Vec<Multipartition> {
        multipartitions_of(self.n, self.group.num_classes())
    }

    /// `X'_μ X'_ν` by representative counting over the whole class `C_μ`.
    pub fn centre_product_naive(&self, mu: &Multipartition, nu: &Multipartition, cap: u128) -> Result<CentreElement> {
        self.check_type(mu)?;
        self.check_type(nu)?;
        let types = self.all_types();
        guard(&(self.class_size(mu) * BigInt::from(types.len())), cap)?;
        let members = self.class_elements(mu);
        let mut out = CentreElement::zero(self.n);
        for lambda in types {
            let g0 = self.representative(&lambda.partially_reduce()).expect("type exists at n");
            let count = members
                .iter()
                .filter(|a| self.cycle_type(&self.multiply(&self.inverse(a), &g0)) == *nu)
                .count();
            out.add_term(lambda, BigInt::from(count));
        }
        Ok(out)
    }

    fn slot_class_sum(&self, d: usize, c: &[BigInt]) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.n);
        for (cls, coeff) in c.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for &g in self.group.class(cls) {
                out.add_term(WreathElement::color_at(self.n, d, g), coeff.clone());
            }
        }
        out
    }

    /// `c^{(d)}` for a class-indexed coefficient vector `c`, zero-based slot `d`.
    pub fn class_at_slot(&self, d: usize, c: &[BigInt]) -> AlgebraElement {
        self.slot_class_sum(d, c)
    }

    /// `L_j(c) = Σ_{i<j} Σ_{g2 g1 ∈ c} g1^{(i)} g2^{(j)} (i,j)` with one-based `j`
    /// and `c` a class-indexed coefficient vector.
    pub fn jm_element_combination(&self, j: usize, c: &[BigInt]) -> Result<AlgebraElement> {
        if j == 0 || j > self.n {
            return Err(Error::InvalidParameter(format!("JM index {j} outside 1..={}", self.n)));
        }
        let (jz, order) = (j - 1, self.group.order());
        let mut out = AlgebraElement::zero(self.n);
        for i in 0..jz {
            for g1 in 0..order {
                for g2 in 0..order {
                    let coeff = &c[self.group.class_of(self.group.multiply(g2, g1))];
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut e = WreathElement::transposition(self.n, i, jz);
                    e.colors[i] = g1 as u16;
                    e.colors[jz] = g2 as u16;
                    out.add_term(e, coeff.clone());
                }
            }
        }
        Ok(out)
    }

    /// `L_j(c)` for a single class `c`.
    pub fn jm_element(&self, j: usize, c: usize) -> Result<AlgebraElement> {
        self.jm_element_combination(j, &unit_vector(self.group.num_classes(), c))
    }

    /// `M_c^{(i,i+1)} = Σ_{hg ∈ c} g^{(i)} h^{(i+1)}` with one-based `i`.
    pub fn swap_correction(&self, i: usize, c: usize) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.n);
        let order = self.group.order();
        for g in 0..order {
            for h in 0..order {
                if self.group.class_of(self.group.multiply(h, g)) == c {
                    let mut e = WreathElement::identity(self.n);
                    e.colors[i - 1] = g as u16;
                    e.colors[i] = h as u16;
                    out.add_term(e, BigInt::one());
                }
            }
        }
        out
    }

    fn power(&self, a: &AlgebraElement, r: usize) -> AlgebraElement {
        let mut acc = AlgebraElement::identity(self.n);
        for _ in 0..r {
            acc = self.multiply_elements(&acc, a);
        }
        acc
    }

    /// `L_d(1)^r c^{(d)}` with one-based `d`.
    fn slot_monomial(&self, d: usize, r: usize, c: usize, budget: &mut Budget) -> Result<AlgebraElement> {
        let l = self.jm_element(d, 0)?;
        budget.spend((l.len() as u128 + 1).pow(r as u32) * self.group.class_size(c) as u128)?;
        let lp = self.power(&l, r);
        Ok(self.multiply_elements(&lp, &self.slot_class_sum(d - 1, &unit_vector(self.group.num_classes(), c))))
    }

    /// Image of the weighted monomial `m_λ` at the JM elements: the sum over
    /// distinct monomials `∏ L_d(1)^r c^{(d)}`.
    pub fn evaluate_weighted_monomial(&self, lambda: &Multipartition, cap: u128) -> Result<AlgebraElement> {
        if lambda.max_index().is_some_and(|c| c >= self.group.num_classes()) {
            return Err(Error::InvalidParameter(format!("{lambda} uses an unknown class")));
        }
        let mut budget = Budget::new(cap);
        let parts: Vec<(usize, usize)> =
            lambda.iter().flat_map(|(c, p)| p.parts().iter().map(move |&r| (r, c))).collect();
        let k = parts.len();
        if k > self.n {
            return Ok(AlgebraElement::zero(self.n));
        }
        let mut cache: HashMap<(usize, usize, usize), AlgebraElement> = HashMap::new();
        for &(r, c) in &parts {
            for d in 1..=self.n {
                if let std::collections::hash_map::Entry::Vacant(v) = cache.entry((d, r, c)) {
                    v.insert(self.slot_monomial(d, r, c, &mut budget)?);
                }
            }
        }
        // Dynamic programme over the set of used slots; JM elements commute.
        let mut layer: HashMap<u32, AlgebraElement> = HashMap::from([(0, AlgebraElement::identity(self.n))]);
        for &(r, c) in &parts {
            let mut next: HashMap<u32, AlgebraElement> = HashMap::new();
            for (used, acc) in &layer {
                for d in 1..=self.n {
                    if used & (1 << d) != 0 {
                        continue;
                    }
                    budget.spend(acc.len() as u128 * cache[&(d, r, c)].len() as u128)?;
                    let prod = self.multiply_elements(acc, &cache[&(d, r, c)]);
                    let slot = next.entry(used | (1 << d)).or_insert_with(|| AlgebraElement::zero(self.n));
                    *slot = slot.add(&prod);
                }
            }
            layer = next;
        }
        let mut total = AlgebraElement::zero(self.n);
        for acc in layer.values() {
            total = total.add(acc);
        }
        let symmetry: BigInt = lambda
            .iter()
            .flat_map(|(_, p)| p.multiplicities().into_values().collect::<Vec<_>>())
            .map(factorial)
            .product();
        let mut out = AlgebraElement::zero(self.n);
        for (e, v) in total.terms {
            out.add_term(e, v / &symmetry);
        }
        Ok(out)
    }

    /// `Σ_d L_d(1)^r c^{(d)}` as a centre element.
    pub fn power_sum(&self, r: usize, c: usize, cap: u128) -> Result<CentreElement> {
        let mut budget = Budget::new(cap);
        let mut total = AlgebraElement::zero(self.n);
        for d in 1..=self.n {
            total = total.add(&self.slot_monomial(d, r, c, &mut budget)?);
        }
        self.to_centre(&total)
    }
}

struct GenState<'g> {
    wreath: Wreath<'g>,
    elem: WreathElement,
    decided: Vec<bool>,
    parts: BTreeMap<(usize, usize), usize>,
    trivial: usize,
}

impl GenState<'_> {
    fn recurse(&mut self, f: &mut dyn FnMut(&WreathElement)) {
        let Some(p) = self.decided.iter().position(|d| !d) else {
            f(&self.elem);
            return;
        };
        if self.trivial > 0 {
            self.trivial -= 1;
            self.decided[p] = true;
            self.recurse(f);
            self.decided[p] = false;
            self.trivial += 1;
        }
        let kinds: Vec<(usize, usize)> = self.parts.iter().filter(|(_, &m)| m > 0).map(|(&k, _)| k).collect();
        for (len, c) in kinds {
            *self.parts.get_mut(&(len, c)).unwrap() -= 1;
            self.decided[p] = true;
            let mut cycle = vec![p];
            self.choose_points(len, c, &mut cycle, f);
            self.decided[p] = false;
            *self.parts.get_mut(&(len, c)).unwrap() += 1;
        }
    }

    fn choose_points(&mut self, len: usize, c: usize, cycle: &mut Vec<usize>, f: &mut dyn FnMut(&WreathElement)) {
        if cycle.len() == len {
            for k in 0..len {
                self.elem.perm[cycle[k]] = cycle[(k + 1) % len] as u8;
            }
            self.choose_colors(c, cycle, 1, 0, f);
            for &x in cycle.iter() {
                self.elem.perm[x] = x as u8;
                self.elem.colors[x] = 0;
            }
            return;
        }
        for x in 0..self.decided.len() {
            if self.decided[x] {
                continue;
            }
            self.decided[x] = true;
            cycle.push(x);
            self.choose_points(len, c, cycle, f);
            cycle.pop();
            self.decided[x] = false;
        }
    }

    /// `prod` is `g_{i_k}···g_{i_2}` for the colors chosen so far.
    fn choose_colors(&mut self, c: usize, cycle: &[usize], k: usize, prod: usize, f: &mut dyn FnMut(&WreathElement)) {
        let group = self.wreath.group;
        if k == cycle.len() {
            let inv = group.inverse(prod);
            for &target in group.class(c) {
                self.elem.colors[cycle[0]] = group.multiply(inv, target) as u16;
                self.recurse(f);
            }
            return;
        }
        for g in 0..group.order() {
            self.elem.colors[cycle[k]] = g as u16;
            self.choose_colors(c, cycle, k + 1, group.multiply(g, prod), f);
        }
    }
}

fn unit_vector(l: usize, c: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); l];
    v[c] = BigInt::one();
    v
}

fn guard(needed: &BigInt, cap: u128) -> Result<()> {
    let needed_u: u128 = needed.try_into().unwrap_or(u128::MAX);
    if needed_u > cap {
        return Err(Error::ResourceLimit { needed: needed_u, cap });
    }
    Ok(())
}

/// Running count of elementary operations against a cap.
struct Budget {
    spent: u128,
    cap: u128,
}

impl Budget {
    fn new(cap: u128) -> Self {
        Budget { spent: 0, cap }
    }

    fn spend(&mut self, amount: u128) -> Result<()> {
        self.spent = self.spent.saturating_add(amount);
        if self.spent > self.cap {
            return Err(Error::ResourceLimit { needed: self.spent, cap: self.cap });
        }
        Ok(())
    }
}

/// Partially-reduced labels that can occur in a product of classes with the
/// given labels: bounded affected points, transposition and moving degree,
/// and matching permutation sign.
pub fn product_candidates(mu: &Multipartition, nu: &Multipartition, num_classes: usize) -> Vec<Multipartition> {
    let aff = mu.affected_points() + nu.affected_points();
    let tsp = mu.transposition_degree() + nu.transposition_degree();
    let mov = mu.moving_degree() + nu.moving_degree();
    let mut out = Vec::new();
    for size in 0..=aff {
        for lambda in multipartitions_of(size, num_classes) {
            if lambda.affected_points() <= aff
                && lambda.transposition_degree() <= tsp
                && lambda.transposition_degree() % 2 == tsp % 2
                && lambda.moving_degree() <= mov
            {
                out.push(lambda);
            }
        }
    }
    out
}

type LocalKey = (Multipartition, Multipartition, Multipartition);

/// Shared state for centre products of one group: the element cap and a
/// cache of local pair counts.
pub struct WreathEngine {
    group: Arc<GroupData>,
    cap: u128,
    local: Mutex<HashMap<LocalKey, Arc<Vec<BigInt>>>>,
}

impl WreathEngine {
    pub fn new(group: Arc<GroupData>, cap: u128) -> Self {
        WreathEngine { group, cap, local: Mutex::new(HashMap::new()) }
    }

    pub fn group(&self) -> &GroupData {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<GroupData> {
        self.group.clone()
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    pub fn wreath(&self, n: usize) -> Wreath<'_> {
        Wreath::new(&self.group, n)
    }

    /// Counts `N_e` of pairs `(a, b)` with `a ∈ C_μ`, `b ∈ C_ν`, `ab = g0` for a
    /// fixed `g0` of type `λ` on points `A`, such that the points affected by
    /// `a` or `b` outside `A` form one fixed set of size `e`. Labels are
    /// partially reduced. The coefficient of `X_λ` in `X_μ X_ν` at `n` is
    /// `Σ_e N_e C(n - |A|, e)`.
    pub fn local_counts(&self, mu: &Multipartition, nu: &Multipartition, lambda: &Multipartition) -> Result<Arc<Vec<BigInt>>> {
        let key = (mu.clone(), nu.clone(), lambda.clone());
        if let Some(v) = self.local.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let counts = Arc::new(self.compute_local_counts(mu, nu, lambda)?);
        self.local.lock().unwrap().insert(key, counts.clone());
        Ok(counts)
    }

    fn compute_local_counts(&self, mu: &Multipartition, nu: &Multipartition, lambda: &Multipartition) -> Result<Vec<BigInt>> {
        let (am, an, al) = (mu.affected_points(), nu.affected_points(), lambda.affected_points());
        let mut counts = Vec::new();
        if al > am + an {
            return Ok(counts);
        }
        // Enumerate the class with fewer affected points.
        let (small, other, small_is_left) = if am <= an { (mu, nu, true) } else { (nu, mu, false) };
        let max_e = am.min(an).min(am + an - al);
        let mut budget = Budget::new(self.cap);
        for e in 0..=max_e {
            let w = al + e;
            let wr = Wreath::new(&self.group, w);
            let (Some(small_full), Some(_)) = (small.unreduce(w), other.unreduce(w)) else {
                counts.push(BigInt::zero());
                continue;
            };
            budget.spend(wr.class_size(&small_full).try_into().unwrap_or(u128::MAX))?;
            let g0 = wr.representative(lambda).expect("w >= affected points of lambda");
            let other_full = other.unreduce(w).unwrap();
            let mut count = 0u64;
            wr.for_each_class_element(&small_full, &mut |x| {
                if (al..w).any(|p| x.image(p) == p && x.color(p) == 0) {
                    return;
                }
                let y = if small_is_left {
                    wr.multiply(&wr.inverse(x), &g0)
                } else {
                    wr.multiply(&g0, &wr.inverse(x))
                };
                if wr.cycle_type(&y) == other_full {
                    count += 1;
                }
            });
            counts.push(BigInt::from(count));
        }
        while counts.last().is_some_and(Zero::is_zero) {
            counts.pop();
        }
        Ok(counts)
    }

    /// Coefficient of `X_λ` in `X_μ X_ν` in `Z(Z[Γ≀S_n])`, partially-reduced labels.
    pub fn centre_coefficient(&self, mu: &Multipartition, nu: &Multipartition, lambda: &Multipartition, n: i64) -> Result<BigInt> {
        let al = lambda.affected_points() as i64;
        if n < al {
            return Ok(BigInt::zero());
        }
        let counts = self.local_counts(mu, nu, lambda)?;
        Ok(counts.iter().enumerate().map(|(e, c)| c * binomial_i64(n - al, e)).sum())
    }

    /// `X'_μ X'_ν` for full cycle types of size `n`, by representative counting
    /// restricted to the points a product can touch.
    pub fn centre_product(&self, mu: &Multipartition, nu: &Multipartition, n: usize) -> Result<CentreElement> {
        let wr = self.wreath(n);
        wr.check_type(mu)?;
        wr.check_type(nu)?;
        let (mp, np) = (mu.partially_reduce(), nu.partially_reduce());
        let candidates: Vec<Multipartition> = product_candidates(&mp, &np, self.group.num_classes())
            .into_iter()
            .filter(|l| l.affected_points() <= n)
            .collect();
        let coeffs = candidates
            .par_iter()
            .map(|l| self.centre_coefficient(&mp, &np, l, n as i64))
            .collect::<Result<Vec<_>>>()?;
        let mut out = CentreElement::zero(n);
        for (l, c) in candidates.into_iter().zip(coeffs) {
            out.add_term(l.unreduce(n).expect("affected points fit"), c);
        }
        Ok(out)
    }

    /// Product of two centre elements.
    pub fn centre_multiply(&self, a: &CentreElement, b: &CentreElement) -> Result<CentreElement> {
        let mut out = CentreElement::zero(a.n);
        for (x, cx) in &a.terms {
            for (y, cy) in &b.terms {
                out = out.add_scaled(&self.centre_product(x, y, a.n)?, &(cx * cy));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupdata::{builtin_group, trivial_group};

    fn mp(s: &str) -> Multipartition {
        s.parse().unwrap()
    }

    fn el(colors: &[usize], perm: &[usize]) -> WreathElement {
        WreathElement::new(colors, perm).unwrap()
    }

    /// Every element of `Γ≀S_n`.
    fn all_elements(w: &Wreath) -> Vec<WreathElement> {
        let mut out = Vec::new();
        for ty in w.all_types() {
            out.extend(w.class_elements(&ty));
        }
        out
    }

    #[test]
    fn cycle_type_examples() {
        let c2 = builtin_group("C2").unwrap();
        let w = Wreath::new(&c2, 2);
        assert_eq!(w.cycle_type(&el(&[1, 0], &[1, 0])), mp("[(2)@1]"));
        assert_eq!(w.cycle_type(&el(&[1, 1], &[1, 0])), mp("[(2)@0]"));
        let w3 = Wreath::new(&c2, 3);
        assert_eq!(w3.cycle_type(&WreathElement::identity(3)), mp("[(1,1,1)@0]"));
    }

    #[test]
    fn group_axioms_and_conjugation_invariance() {
        for (name, n) in [("C2", 3), ("S3", 2), ("trivial", 4)] {
            let g = builtin_group(name).unwrap();
            let w = Wreath::new(&g, n);
            let elems = all_elements(&w);
            assert_eq!(BigInt::from(elems.len()), w.order());
            let id = WreathElement::identity(n);
            let step = (elems.len() / 23).max(1);
            for a in elems.iter().step_by(step) {
                assert_eq!(w.multiply(a, &w.inverse(a)), id);
                assert_eq!(w.multiply(&w.inverse(a), a), id);
                for b in elems.iter().step_by(step) {
                    let conj = w.multiply(&w.multiply(b, a), &w.inverse(b));
                    assert_eq!(w.cycle_type(&conj), w.cycle_type(a));
                    for c in elems.iter().step_by(step * 3) {
                        assert_eq!(w.multiply(&w.multiply(a, b), c), w.multiply(a, &w.multiply(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn classes_are_conjugacy_classes() {
        let s3 = builtin_group("S3").unwrap();
        let w = Wreath::new(&s3, 2);
        let elems = all_elements(&w);
        for ty in w.all_types() {
            let members = w.class_elements(&ty);
            assert_eq!(BigInt::from(members.len()), w.class_size(&ty));
            let orbit: std::collections::BTreeSet<WreathElement> = elems
                .iter()
                .map(|x| w.multiply(&w.multiply(x, &members[0]), &w.inverse(x)))
                .collect();
            let listed: std::collections::BTreeSet<WreathElement> = members.into_iter().collect();
            assert_eq!(orbit, listed, "{ty}");
        }
    }

    #[test]
    fn class_sum_examples() {
        let t = trivial_group();
        let w = Wreath::new(&t, 4);
        assert_eq!(w.class_sum(&mp("(1,1,1,1)"), DEFAULT_ELEMENT_CAP).unwrap(), AlgebraElement::identity(4));
        assert_eq!(w.class_sum(&mp("(2,1,1)"), DEFAULT_ELEMENT_CAP).unwrap().len(), 6);
        let c2 = builtin_group("C2").unwrap();
        let w = Wreath::new(&c2, 2);
        assert_eq!(w.class_sum(&mp("[(1)@0;(1)@1]"), DEFAULT_ELEMENT_CAP).unwrap().len(), 2);
        assert!(matches!(w.class_sum(&mp("[(1)@0]"), DEFAULT_ELEMENT_CAP), Err(Error::InvalidParameter(_))));
        let big = Wreath::new(&t, 11);
        assert!(matches!(big.class_sum(&mp("(11)"), 1000), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn transposition_square() {
        let t = trivial_group();
        let w = Wreath::new(&t, 4);
        let got = w.centre_product_naive(&mp("(2,1,1)"), &mp("(2,1,1)"), DEFAULT_ELEMENT_CAP).unwrap();
        let mut want = CentreElement::zero(4);
        want.add_term(mp("(2,2)"), BigInt::from(2));
        want.add_term(mp("(3,1)"), BigInt::from(3));
        want.add_term(mp("(1,1,1,1)"), BigInt::from(6));
        assert_eq!(got, want);
    }

    #[test]
    fn local_counting_matches_naive_products() {
        for (name, nmax) in [("trivial", 5), ("C2", 4), ("S3", 3)] {
            let g = Arc::new(builtin_group(name).unwrap());
            let engine = WreathEngine::new(g.clone(), DEFAULT_ELEMENT_CAP);
            for n in 0..=nmax {
                let w = Wreath::new(&g, n);
                let types = w.all_types();
                for mu in &types {
                    for nu in &types {
                        let fast = engine.centre_product(mu, nu, n).unwrap();
                        let slow = w.centre_product_naive(mu, nu, DEFAULT_ELEMENT_CAP).unwrap();
                        assert_eq!(fast, slow, "{name} n={n} {mu} {nu}");
                    }
                }
            }
        }
    }

    #[test]
    fn centre_round_trip_and_identity() {
        let c2 = builtin_group("C2").unwrap();
        let w = Wreath::new(&c2, 3);
        for ty in w.all_types() {
            let s = w.class_sum(&ty, DEFAULT_ELEMENT_CAP).unwrap();
            let c = w.to_centre(&s).unwrap();
            assert_eq!(c.terms.len(), 1);
            assert_eq!(c.coefficient(&ty), BigInt::one());
            assert_eq!(w.from_centre(&c, DEFAULT_ELEMENT_CAP).unwrap(), s);
            let engine = WreathEngine::new(Arc::new(c2.clone()), DEFAULT_ELEMENT_CAP);
            let id = mp("[(1,1,1)@0]");
            assert_eq!(engine.centre_product(&id, &ty, 3).unwrap(), c);
        }
        let id = w.to_centre(&AlgebraElement::identity(3)).unwrap();
        assert_eq!(id, CentreElement::identity(3));
    }

    #[test]
    fn jm_examples() {
        let t = trivial_group();
        let w = Wreath::new(&t, 3);
        assert!(w.jm_element(1, 0).unwrap().is_zero());
        let l3 = w.jm_element(3, 0).unwrap();
        let want = AlgebraElement::from_element(WreathElement::transposition(3, 0, 2))
            .add(&AlgebraElement::from_element(WreathElement::transposition(3, 1, 2)));
        assert_eq!(l3, want);
        assert!(matches!(w.to_centre(&w.jm_element(2, 0).unwrap()), Err(Error::NotCentral(_))));

        let c2 = builtin_group("C2").unwrap();
        let w = Wreath::new(&c2, 2);
        let got = w.jm_element(2, 1).unwrap();
        let want = AlgebraElement::from_element(el(&[1, 0], &[1, 0]))
            .add(&AlgebraElement::from_element(el(&[0, 1], &[1, 0])));
        assert_eq!(got, want);
    }

    #[test]
    fn jm_relations() {
        for name in ["C2", "S3"] {
            let g = builtin_group(name).unwrap();
            let l = g.num_classes();
            let n = if name == "S3" { 3 } else { 4 };
            let w = Wreath::new(&g, n);
            for j in 1..=n {
                let base = w.jm_element(j, 0).unwrap();
                for c in 0..l {
                    let slot = w.class_at_slot(j - 1, &unit_vector(l, c));
                    let lc = w.jm_element(j, c).unwrap();
                    assert_eq!(lc, w.multiply_elements(&slot, &base));
                    assert_eq!(lc, w.multiply_elements(&base, &slot));
                }
                for k in 1..=n {
                    let other = w.jm_element(k, 0).unwrap();
                    assert_eq!(w.multiply_elements(&base, &other), w.multiply_elements(&other, &base));
                }
            }
        }
    }

    #[test]
    fn swap_identities() {
        for (name, n) in [("trivial", 4), ("C2", 4), ("S3", 3)] {
            let g = builtin_group(name).unwrap();
            let w = Wreath::new(&g, n);
            for i in 1..n {
                let s = AlgebraElement::from_element(WreathElement::transposition(n, i - 1, i));
                let li = w.jm_element(i, 0).unwrap();
                let lj = w.jm_element(i + 1, 0).unwrap();
                let m1 = w.swap_correction(i, 0);
                for r in 1..=3 {
                    let lhs = w.multiply_elements(&s, &w.power(&li, r));
                    let mut rhs = w.multiply_elements(&w.power(&lj, r), &s);
                    let lhs2 = w.multiply_elements(&s, &w.power(&lj, r));
                    let mut rhs2 = w.multiply_elements(&w.power(&li, r), &s);
                    for p in 0..r {
                        let t = w.multiply_elements(&w.multiply_elements(&w.power(&lj, p), &m1), &w.power(&li, r - 1 - p));
                        rhs = rhs.sub(&t);
                        rhs2 = rhs2.add(&t);
                    }
                    assert_eq!(lhs, rhs, "{name} i={i} r={r}");
                    assert_eq!(lhs2, rhs2, "{name} i={i} r={r}");
                }
            }
        }
    }

    /// `X_σ(c)`: sum over colorings of the cycle `σ` (identity elsewhere) whose
    /// color product lies in `c`.
    fn cycle_label_sum(w: &Wreath, cycle: &[usize], c: &[BigInt]) -> AlgebraElement {
        let n = w.n;
        let mut out = AlgebraElement::zero(n);
        let order = w.group.order();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..cycle.len() {
            perm[cycle[k]] = cycle[(k + 1) % cycle.len()];
        }
        let total = order.pow(cycle.len() as u32);
        for code in 0..total {
            let mut colors = vec![0; n];
            let mut x = code;
            for &p in cycle {
                colors[p] = x % order;
                x /= order;
            }
            let e = el(&colors, &perm);
            let ty = w.cycle_type(&e);
            let cls = ty.iter().find(|(_, p)| p.parts().contains(&cycle.len())).map(|(i, _)| i).unwrap();
            // Only one cycle of this length is non-trivial.
            let coeff = &c[cls];
            if !coeff.is_zero() {
                out.add_term(e, coeff.clone());
            }
        }
        out
    }

    #[test]
    fn cycle_label_lemmas() {
        for name in ["C2", "S3"] {
            let g = builtin_group(name).unwrap();
            let l = g.num_classes();
            let w = Wreath::new(&g, 4);
            for cycle in [vec![0, 1], vec![0, 1, 2], vec![2, 0, 3]] {
                let base = cycle_label_sum(&w, &cycle, &unit_vector(l, 0));
                for c in 0..l {
                    let xc = cycle_label_sum(&w, &cycle, &unit_vector(l, c));
                    for &i in &cycle {
                        let slot = w.class_at_slot(i, &unit_vector(l, c));
                        assert_eq!(xc, w.multiply_elements(&slot, &base));
                        assert_eq!(xc, w.multiply_elements(&base, &slot));
                    }
                }
            }
            // Cycles meeting in one point: (0 1) and (1 2).
            let (sigma, rho) = (vec![0, 1], vec![1, 2]);
            let mut prod_perm: Vec<usize> = (0..4).collect();
            // σρ as a permutation, then read its cycle starting at 0.
            let s = |x: usize| if x == 0 { 1 } else if x == 1 { 0 } else { x };
            let r = |x: usize| if x == 1 { 2 } else if x == 2 { 1 } else { x };
            for (x, slot) in prod_perm.iter_mut().enumerate() {
                *slot = s(r(x));
            }
            let mut sr_cycle = vec![0];
            while prod_perm[*sr_cycle.last().unwrap()] != 0 {
                sr_cycle.push(prod_perm[*sr_cycle.last().unwrap()]);
            }
            for i in 0..l {
                for j in 0..l {
                    let lhs = w.multiply_elements(
                        &cycle_label_sum(&w, &sigma, &unit_vector(l, i)),
                        &cycle_label_sum(&w, &rho, &unit_vector(l, j)),
                    );
                    let coeffs: Vec<BigInt> = (0..l).map(|k| BigInt::from(g.class_coefficient(i, j, k))).collect();
                    assert_eq!(lhs, cycle_label_sum(&w, &sr_cycle, &coeffs));
                }
            }
        }
    }

    #[test]
    fn weighted_monomial_examples() {
        let t = trivial_group();
        let w = Wreath::new(&t, 3);
        let e1 = w.evaluate_weighted_monomial(&mp("(1)"), DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(e1, w.class_sum(&mp("(2,1)"), DEFAULT_ELEMENT_CAP).unwrap());
        let one = w.evaluate_weighted_monomial(&Multipartition::empty(), DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(one, AlgebraElement::identity(3));
        let w4 = Wreath::new(&t, 4);
        let e2 = w4.evaluate_weighted_monomial(&mp("(1,1)"), DEFAULT_ELEMENT_CAP).unwrap();
        let c = w4.to_centre(&e2).unwrap();
        assert_eq!(c.coefficient(&mp("(2,2)")), BigInt::one());
        // Weighted monomials are central for C2 too.
        let c2 = builtin_group("C2").unwrap();
        let w = Wreath::new(&c2, 3);
        for lam in ["[(1)@1]", "[(2)@0]", "[(1)@0;(1)@1]", "[(1,1)@1]"] {
            let a = w.evaluate_weighted_monomial(&mp(lam), DEFAULT_ELEMENT_CAP).unwrap();
            w.to_centre(&a).unwrap();
        }
    }

    #[test]
    fn power_sums_are_weighted_monomials() {
        let c2 = builtin_group("C2").unwrap();
        let w = Wreath::new(&c2, 3);
        for (r, c) in [(1, 0), (2, 1), (3, 0)] {
            let lam = Multipartition::single(c, Partition::new(vec![r]).unwrap());
            let direct = w.to_centre(&w.evaluate_weighted_monomial(&lam, DEFAULT_ELEMENT_CAP).unwrap()).unwrap();
            assert_eq!(w.power_sum(r, c, DEFAULT_ELEMENT_CAP).unwrap(), direct);
        }
    }
}

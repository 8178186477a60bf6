//! Partitions and multipartitions: contents, border strips, p-cores,
//! cycle-type reductions and enumeration.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite non-increasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition from parts that must already be positive and non-increasing.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidParameter(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!("parts not non-increasing: {parts:?}")));
        }
        Ok(Partition(parts))
    }

    /// Sorts the parts and drops zeros.
    pub fn from_parts(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// `(1^n)`.
    pub fn ones(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of parts equal to `i`.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.0.iter().filter(|&&p| p == i).count()
    }

    /// Map part size -> multiplicity.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((1..=first).map(|j| self.0.iter().filter(|&&p| p >= j).count()).collect())
    }

    /// Boxes `(row, column)`, zero-based, row by row.
    pub fn boxes(&self) -> Vec<(usize, usize)> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i, j)))
            .collect()
    }

    /// Disjoint union of the parts of two partitions.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        Partition::from_parts(parts)
    }

    /// Adds `delta` to every part.
    pub fn shift_parts(&self, delta: usize) -> Partition {
        Partition(self.0.iter().map(|p| p + delta).collect())
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.size(), self.len(), &self.0).cmp(&(other.size(), other.len(), &other.0))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "∅" || t.is_empty() {
            return Ok(Partition::empty());
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("partition must look like (3,2,1): {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts = inner
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Multiset of contents `j - i` over the boxes of `lambda`.
pub fn contents(lambda: &Partition) -> Vec<i64> {
    lambda.boxes().into_iter().map(|(i, j)| j as i64 - i as i64).collect()
}

/// Beta-set (first-column hook lengths) of `lambda` using `len(lambda)` beads.
fn beta_set(lambda: &Partition) -> Vec<usize> {
    let l = lambda.len();
    lambda.parts().iter().enumerate().map(|(i, &p)| p + (l - 1 - i)).collect()
}

fn from_beta_set(mut beta: Vec<usize>) -> Partition {
    beta.sort_unstable_by(|a, b| b.cmp(a));
    let l = beta.len();
    Partition::from_parts(beta.iter().enumerate().map(|(i, &b)| b - (l - 1 - i)).collect())
}

/// Removes border strips of size `p` until none is left.
pub fn p_core(lambda: &Partition, p: usize) -> Result<Partition> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p-core needs p >= 2, got {p}")));
    }
    let mut beta = beta_set(lambda);
    loop {
        let mv = beta.iter().position(|&b| b >= p && !beta.contains(&(b - p)));
        match mv {
            Some(i) => beta[i] -= p,
            None => break,
        }
    }
    Ok(from_beta_set(beta))
}

/// A removable border strip.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorderStrip {
    /// Boxes `(row, column)` of the strip, zero-based.
    pub boxes: Vec<(usize, usize)>,
    /// Rows spanned minus one.
    pub height: usize,
    /// Partition left after removal.
    pub result: Partition,
}

/// All removable border strips of size exactly `k`.
pub fn border_strips(lambda: &Partition, k: usize) -> Vec<BorderStrip> {
    if k == 0 {
        return Vec::new();
    }
    let beta = beta_set(lambda);
    let mut out = Vec::new();
    for (idx, &b) in beta.iter().enumerate() {
        if b < k || beta.contains(&(b - k)) {
            continue;
        }
        let height = beta.iter().filter(|&&x| x > b - k && x < b).count();
        let mut nb = beta.clone();
        nb[idx] = b - k;
        let result = from_beta_set(nb);
        let boxes = lambda
            .boxes()
            .into_iter()
            .filter(|&(i, j)| j >= result.parts().get(i).copied().unwrap_or(0))
            .collect();
        out.push(BorderStrip { boxes, height, result });
    }
    out.sort_by(|a, b| a.result.cmp(&b.result));
    out
}

/// Subtracts 1 from every part and drops zeros.
pub fn reduce_cycle_type(lambda: &Partition) -> Partition {
    Partition::from_parts(lambda.parts().iter().map(|p| p - 1).collect())
}

/// Adds 1 to every part and pads with 1s up to size `n`; `None` when `n < |mu| + l(mu)`.
pub fn unreduce_cycle_type(mu: &Partition, n: usize) -> Option<Partition> {
    let used = mu.size() + mu.len();
    if n < used {
        return None;
    }
    let mut parts: Vec<usize> = mu.parts().iter().map(|p| p + 1).collect();
    parts.extend(std::iter::repeat(1).take(n - used));
    Some(Partition(parts))
}

/// All partitions of `n`, in decreasing lexicographic order.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=max.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Size of the conjugacy class of cycle type `mu` in `S_n`.
pub fn sym_class_size(mu: &Partition, n: usize) -> Result<BigInt> {
    if mu.size() != n {
        return Err(Error::InvalidParameter(format!("cycle type {mu} is not of size {n}")));
    }
    let mut z = BigInt::one();
    for (i, m) in mu.multiplicities() {
        z *= BigInt::from(i).pow(m as u32) * factorial(m);
    }
    Ok(factorial(n) / z)
}

/// A family of partitions indexed by conjugacy-class (or irrep) indices.
/// Empty components are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Multipartition(BTreeMap<usize, Partition>);

impl Multipartition {
    pub fn empty() -> Self {
        Multipartition(BTreeMap::new())
    }

    pub fn from_map(map: BTreeMap<usize, Partition>) -> Self {
        Multipartition(map.into_iter().filter(|(_, p)| !p.is_empty()).collect())
    }

    /// Component `i` is `comps[i]`.
    pub fn from_components(comps: Vec<Partition>) -> Self {
        Self::from_map(comps.into_iter().enumerate().collect())
    }

    /// A multipartition concentrated in one component.
    pub fn single(index: usize, p: Partition) -> Self {
        Self::from_map(BTreeMap::from([(index, p)]))
    }

    pub fn component(&self, index: usize) -> Partition {
        self.0.get(&index).cloned().unwrap_or_default()
    }

    /// Non-empty components in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Partition)> {
        self.0.iter().map(|(&i, p)| (i, p))
    }

    pub fn size(&self) -> usize {
        self.0.values().map(Partition::size).sum()
    }

    pub fn len(&self) -> usize {
        self.0.values().map(Partition::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest index with a non-empty component.
    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    fn map_components(&self, f: impl Fn(usize, &Partition) -> Partition) -> Self {
        Self::from_map(self.0.iter().map(|(&i, p)| (i, f(i, p))).collect())
    }

    /// Reduces component 0 only.
    pub fn partially_reduce(&self) -> Self {
        self.map_components(|i, p| if i == 0 { reduce_cycle_type(p) } else { p.clone() })
    }

    /// Reduces every component.
    pub fn fully_reduce(&self) -> Self {
        self.map_components(|_, p| reduce_cycle_type(p))
    }

    /// Adds 1 to each part of every non-identity component.
    pub fn hat(&self) -> Self {
        self.map_components(|i, p| if i == 0 { p.clone() } else { p.shift_parts(1) })
    }

    /// Componentwise disjoint union of parts.
    pub fn union(&self, other: &Multipartition) -> Self {
        let mut map = self.0.clone();
        for (&i, p) in &other.0 {
            let merged = map.get(&i).map(|q| q.union(p)).unwrap_or_else(|| p.clone());
            map.insert(i, merged);
        }
        Self::from_map(map)
    }

    /// Points affected by an element whose partially-reduced type is `self`:
    /// moved points plus fixed points carrying a non-identity color.
    pub fn affected_points(&self) -> usize {
        self.size() + self.component(0).len()
    }

    /// Minimal number of transpositions in the permutation part, for a
    /// partially-reduced label.
    pub fn transposition_degree(&self) -> usize {
        self.iter()
            .map(|(i, p)| if i == 0 { p.size() } else { p.size() - p.len() })
            .sum()
    }

    /// Number of points moved by the permutation part, for a partially-reduced label.
    pub fn moving_degree(&self) -> usize {
        self.iter()
            .map(|(i, p)| {
                if i == 0 {
                    p.size() + p.len()
                } else {
                    p.parts().iter().filter(|&&x| x >= 2).sum()
                }
            })
            .sum()
    }

    /// Full cycle type in `Γ≀S_n` for a partially-reduced label, or `None`
    /// when no element of that type exists.
    pub fn unreduce(&self, n: usize) -> Option<Multipartition> {
        let rest: usize = self.iter().filter(|(i, _)| *i != 0).map(|(_, p)| p.size()).sum();
        if rest > n {
            return None;
        }
        let id = unreduce_cycle_type(&self.component(0), n - rest)?;
        let mut map = self.0.clone();
        map.insert(0, id);
        Some(Self::from_map(map))
    }

    fn sort_key(&self) -> (usize, usize, Vec<(usize, &[usize])>) {
        (self.size(), self.len(), self.0.iter().map(|(&i, p)| (i, p.parts())).collect())
    }
}

impl Ord for Multipartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Multipartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Multipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (i, p)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ";")?;
            }
            write!(f, "{p}@{i}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Multipartition {
    type Err = Error;

    /// Accepts `[(2,1)@0;(1)@1]`, `[]`, or a bare partition meaning component 0.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let Some(inner) = t.strip_prefix('[') else {
            return Ok(Multipartition::single(0, t.parse()?));
        };
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::Parse(format!("unterminated multipartition {s:?}")))?;
        let mut map = BTreeMap::new();
        for item in inner.split(';').map(str::trim).filter(|x| !x.is_empty()) {
            let (part, idx) = item
                .rsplit_once('@')
                .ok_or_else(|| Error::Parse(format!("missing '@index' in {item:?}")))?;
            let idx: usize = idx.trim().parse().map_err(|e| Error::Parse(format!("{idx:?}: {e}")))?;
            if map.insert(idx, part.parse::<Partition>()?).is_some() {
                return Err(Error::Parse(format!("component {idx} given twice in {s:?}")));
            }
        }
        Ok(Multipartition::from_map(map))
    }
}

impl Serialize for Multipartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Multipartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All multipartitions of size `k` over `l` components, in canonical order.
pub fn multipartitions_of(k: usize, l: usize) -> Vec<Multipartition> {
    fn rec(k: usize, idx: usize, l: usize, cur: &mut Vec<Partition>, out: &mut Vec<Multipartition>) {
        if idx + 1 == l {
            for p in partitions_of(k) {
                cur.push(p);
                out.push(Multipartition::from_components(cur.clone()));
                cur.pop();
            }
            return;
        }
        for s in 0..=k {
            for p in partitions_of(s) {
                cur.push(p);
                rec(k - s, idx + 1, l, cur, out);
                cur.pop();
            }
        }
    }
    if l == 0 {
        return if k == 0 { vec![Multipartition::empty()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(k, 0, l, &mut Vec::new(), &mut out);
    out.sort();
    out
}

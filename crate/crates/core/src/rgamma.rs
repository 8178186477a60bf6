//! The ring `R_Γ` with basis `B_N`, the coefficients of
//! `Ω = exp(T(log(1 + Σ_c c x_c)))`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groupdata::{check_prime, mod_p, GroupData};
use crate::intpoly::binomial_i64;
use crate::partitions::{Multipartition, Partition};
use crate::wreath::CentreElement;

/// Class-indexed exponent vector `N`, one entry per class.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVector(Vec<usize>);

impl ExponentVector {
    pub fn new(entries: Vec<usize>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(l: usize) -> Self {
        ExponentVector(vec![0; l])
    }

    /// `k` at class `c`, zero elsewhere.
    pub fn unit(l: usize, c: usize, k: usize) -> Self {
        let mut v = vec![0; l];
        v[c] = k;
        ExponentVector(v)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, c: usize) -> usize {
        self.0[c]
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Same vector with the identity-class entry set to zero.
    pub fn without_identity(&self) -> ExponentVector {
        let mut v = self.0.clone();
        v[0] = 0;
        ExponentVector(v)
    }

    /// All vectors over `l` classes with entry sum `k`.
    pub fn all_of_total(l: usize, k: usize) -> Vec<ExponentVector> {
        fn go(l: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<ExponentVector>) {
            if cur.len() + 1 == l {
                cur.push(k);
                out.push(ExponentVector(cur.clone()));
                cur.pop();
                return;
            }
            for a in (0..=k).rev() {
                cur.push(a);
                go(l, k - a, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if l == 0 {
            if k == 0 {
                out.push(ExponentVector(Vec::new()));
            }
            return out;
        }
        go(l, k, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// All vectors over `l` classes with entry sum at most `d`.
    pub fn all_up_to(l: usize, d: usize) -> Vec<ExponentVector> {
        (0..=d).flat_map(|k| Self::all_of_total(l, k)).collect()
    }

    fn fits_in(&self, bound: &ExponentVector) -> bool {
        self.0.iter().zip(&bound.0).all(|(a, b)| a <= b)
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total(), &self.0).cmp(&(other.total(), &other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for ExponentVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("exponent vector must look like [1,0]: {s:?}")))?;
        let entries = inner
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent {x:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExponentVector(entries))
    }
}

/// Element of `R_Γ`: integer combination of the `B_N`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RGammaElement {
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl RGammaElement {
    pub fn zero() -> Self {
        RGammaElement::default()
    }

    pub fn basis(n: ExponentVector) -> Self {
        Self::term(n, BigInt::one())
    }

    pub fn term(n: ExponentVector, c: BigInt) -> Self {
        let mut r = Self::zero();
        r.add_term(n, c);
        r
    }

    /// `B_0`, the identity, for `l` classes.
    pub fn one(l: usize) -> Self {
        Self::basis(ExponentVector::zero(l))
    }

    pub fn add_term(&mut self, n: ExponentVector, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(n.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&n);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, n: &ExponentVector) -> BigInt {
        self.terms.get(n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_scaled(&self, other: &RGammaElement, c: &BigInt) -> RGammaElement {
        let mut out = self.clone();
        for (n, v) in &other.terms {
            out.add_term(n.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &RGammaElement) -> RGammaElement {
        self.add_scaled(other, &BigInt::one())
    }

    pub fn sub(&self, other: &RGammaElement) -> RGammaElement {
        self.add_scaled(other, &-BigInt::one())
    }

    pub fn scale(&self, c: &BigInt) -> RGammaElement {
        Self::zero().add_scaled(self, c)
    }

    /// Coefficients reduced to `0..p`.
    pub fn reduce_mod(&self, p: u64) -> RGammaElement {
        let mut out = Self::zero();
        for (n, v) in &self.terms {
            out.add_term(n.clone(), BigInt::from(mod_p(v, p)));
        }
        out
    }

    /// The single coefficient when `self` is a multiple of `B_0`.
    pub fn as_scalar(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.iter().next().filter(|(n, _)| n.is_zero()).map(|(_, c)| c.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for RGammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.terms.iter().enumerate() {
            let (neg, abs) = (c.is_negative(), c.abs());
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if abs.is_one() {
                write!(f, "B{n}")?;
            } else {
                write!(f, "{abs}*B{n}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for RGammaElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut out = RGammaElement::zero();
        if s == "0" {
            return Ok(out);
        }
        let mut rest = s;
        let mut sign = BigInt::one();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r.trim_start();
        }
        loop {
            let end = rest.find(" + ").into_iter().chain(rest.find(" - ")).min().unwrap_or(rest.len());
            let term = rest[..end].trim();
            let (coeff, basis) = match term.split_once('*') {
                Some((c, b)) => (c.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?, b.trim()),
                None => (BigInt::one(), term),
            };
            let vec = basis
                .strip_prefix('B')
                .ok_or_else(|| Error::Parse(format!("expected B[...], got {basis:?}")))?
                .parse::<ExponentVector>()?;
            out.add_term(vec, sign * coeff);
            if end == rest.len() {
                break;
            }
            sign = if &rest[end..end + 3] == " - " { -BigInt::one() } else { BigInt::one() };
            rest = &rest[end + 3..];
        }
        Ok(out)
    }
}

impl Serialize for RGammaElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RGammaElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Polynomial in two sets of class-indexed variables, truncated to exponents
/// bounded by `(x_bound, y_bound)`.
type XYPoly = HashMap<(ExponentVector, ExponentVector), BigInt>;

fn xy_multiply(a: &XYPoly, b: &XYPoly, xb: &ExponentVector, yb: &ExponentVector) -> XYPoly {
    let mut out = XYPoly::new();
    for ((ax, ay), ca) in a {
        for ((bx, by), cb) in b {
            let x = ax.add(bx);
            let y = ay.add(by);
            if x.fits_in(xb) && y.fits_in(yb) {
                *out.entry((x, y)).or_default() += ca * cb;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Structure constants: `B_N B_M = Σ_K c_K B_K` with `c_K` the coefficient of
/// `x^N y^M` in `Π_i z_i^{K_i}`, `z_i = x_i + y_i + Σ_{j,k} A^i_{j,k} x_j y_k`.
pub fn basis_product(n: &ExponentVector, m: &ExponentVector, group: &GroupData) -> BTreeMap<ExponentVector, BigInt> {
    let l = group.num_classes();
    let z: Vec<XYPoly> = (0..l)
        .map(|i| {
            let mut p = XYPoly::new();
            p.insert((ExponentVector::unit(l, i, 1), ExponentVector::zero(l)), BigInt::one());
            p.insert((ExponentVector::zero(l), ExponentVector::unit(l, i, 1)), BigInt::one());
            for j in 0..l {
                for k in 0..l {
                    let a = group.class_coefficient(j, k, i);
                    if a != 0 {
                        p.insert((ExponentVector::unit(l, j, 1), ExponentVector::unit(l, k, 1)), BigInt::from(a));
                    }
                }
            }
            p.retain(|(x, y), _| x.fits_in(n) && y.fits_in(m));
            p
        })
        .collect();
    let target = (n.clone(), m.clone());
    let (lo, hi) = (n.total().max(m.total()), n.total() + m.total());
    let mut out = BTreeMap::new();
    let mut unit = XYPoly::new();
    unit.insert((ExponentVector::zero(l), ExponentVector::zero(l)), BigInt::one());
    // Depth-first over K, sharing partial products.
    fn go(
        i: usize,
        budget: usize,
        k: &mut Vec<usize>,
        acc: &XYPoly,
        z: &[XYPoly],
        ctx: (&ExponentVector, &ExponentVector, &(ExponentVector, ExponentVector), usize),
        out: &mut BTreeMap<ExponentVector, BigInt>,
    ) {
        let (n, m, target, lo) = ctx;
        if acc.is_empty() {
            return;
        }
        if i == z.len() {
            let total: usize = k.iter().sum();
            if total >= lo {
                if let Some(c) = acc.get(target) {
                    out.insert(ExponentVector(k.clone()), c.clone());
                }
            }
            return;
        }
        let mut cur = acc.clone();
        for e in 0..=budget {
            k.push(e);
            go(i + 1, budget - e, k, &cur, z, ctx, out);
            k.pop();
            cur = xy_multiply(&cur, &z[i], n, m);
        }
    }
    go(0, hi, &mut Vec::new(), &unit, &z, (n, m, &target, lo), &mut out);
    out.retain(|_, v| !v.is_zero());
    out
}

/// Product in `R_Γ`.
pub fn rg_multiply(a: &RGammaElement, b: &RGammaElement, group: &GroupData) -> RGammaElement {
    let mut out = RGammaElement::zero();
    for (n, ca) in &a.terms {
        for (m, cb) in &b.terms {
            let cab = ca * cb;
            for (k, c) in basis_product(n, m, group) {
                out.add_term(k, &cab * c);
            }
        }
    }
    out
}

/// Product in `R_Γ ⊗ F_p`.
pub fn rg_multiply_mod(a: &RGammaElement, b: &RGammaElement, group: &GroupData, p: u64) -> RGammaElement {
    rg_multiply(a, b, group).reduce_mod(p)
}

/// Polynomial with rational coefficients in one commuting variable `T(c)` per class.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TPolynomial {
    terms: BTreeMap<Vec<usize>, BigRational>,
}

impl TPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(l: usize, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![0; l], c);
        p
    }

    /// `T(c)`.
    pub fn variable(l: usize, c: usize) -> Self {
        let mut e = vec![0; l];
        e[c] = 1;
        let mut p = Self::zero();
        p.add_term(e, BigRational::one());
        p
    }

    pub fn add_term(&mut self, exps: Vec<usize>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TPolynomial) -> TPolynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> TPolynomial {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &TPolynomial) -> TPolynomial {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }

    /// Total degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> TPolynomial {
        TPolynomial {
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<usize>() == d).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Value at integer points `T(c) = values[c]`.
    pub fn evaluate(&self, values: &[BigInt]) -> BigRational {
        self.terms
            .iter()
            .map(|(e, c)| {
                let v: BigInt = e.iter().zip(values).map(|(&k, x)| x.pow(k as u32)).product();
                c * BigRational::from_integer(v)
            })
            .sum()
    }
}

impl fmt::Display for TPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("T{i}") } else { format!("T{i}^{k}") })
                    .collect();
                if vars.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

type Series<C> = BTreeMap<ExponentVector, C>;

/// Coefficients `B_N` of `Ω` for `|N| <= max_degree`, as polynomials in the `T(c)`.
pub fn omega_expand(group: &GroupData, max_degree: usize) -> BTreeMap<ExponentVector, TPolynomial> {
    let l = group.num_classes();
    // S = Σ_c c x_c with class-vector coefficients.
    let mut s: Series<Vec<BigInt>> = Series::new();
    for c in 0..l {
        let mut v = vec![BigInt::zero(); l];
        v[c] = BigInt::one();
        s.insert(ExponentVector::unit(l, c, 1), v);
    }
    let truncate = |k: &ExponentVector| k.total() <= max_degree;
    // log(1 + S) = Σ_k (-1)^{k+1} S^k / k, with T applied to each coefficient.
    let mut log_t: Series<TPolynomial> = Series::new();
    let mut power = s.clone();
    for k in 1..=max_degree {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let factor = BigRational::new(BigInt::from(sign), BigInt::from(k));
        for (x, v) in &power {
            let mut t = TPolynomial::zero();
            for (c, a) in v.iter().enumerate() {
                t = t.add(&TPolynomial::variable(l, c).scale(&BigRational::from_integer(a.clone())));
            }
            let entry = log_t.entry(x.clone()).or_default();
            *entry = entry.add(&t.scale(&factor));
        }
        let mut next: Series<Vec<BigInt>> = Series::new();
        for (x1, v1) in &power {
            for (x2, v2) in &s {
                let x = x1.add(x2);
                if !truncate(&x) {
                    continue;
                }
                let prod = group.class_product(v1, v2);
                let entry = next.entry(x).or_insert_with(|| vec![BigInt::zero(); l]);
                for (e, p) in entry.iter_mut().zip(prod) {
                    *e += p;
                }
            }
        }
        power = next;
    }
    // exp(L) = Σ_k L^k / k!.
    let mut out: Series<TPolynomial> = Series::new();
    out.insert(ExponentVector::zero(l), TPolynomial::constant(l, BigRational::one()));
    let mut term: Series<TPolynomial> = out.clone();
    for k in 1..=max_degree {
        let mut next: Series<TPolynomial> = Series::new();
        for (x1, p1) in &term {
            for (x2, p2) in &log_t {
                let x = x1.add(x2);
                if !truncate(&x) {
                    continue;
                }
                let entry = next.entry(x).or_default();
                *entry = entry.add(&p1.mul(p2).scale(&BigRational::new(BigInt::one(), BigInt::from(k))));
            }
        }
        for (x, p) in &next {
            let entry = out.entry(x.clone()).or_default();
            *entry = entry.add(p);
        }
        term = next;
    }
    for x in ExponentVector::all_up_to(l, max_degree) {
        out.entry(x).or_default();
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// `Π_c T(c)^{N(c)} / N(c)!`.
pub fn leading_monomial(n: &ExponentVector) -> TPolynomial {
    let denom: BigInt = n.entries().iter().map(|&k| (1..=k).fold(BigInt::one(), |a, i| a * i)).product();
    let mut p = TPolynomial::zero();
    p.add_term(n.entries().to_vec(), BigRational::new(BigInt::one(), denom));
    p
}

/// Cycle type with `N(c)` fixed points colored in class `c != 0` and all
/// other points trivial, if `|N| - N(0) <= n`.
pub fn colored_fixed_point_type(n_vec: &ExponentVector, n: usize) -> Option<Multipartition> {
    let coloured: usize = n_vec.total() - n_vec.get(0);
    if coloured > n {
        return None;
    }
    let mut map = BTreeMap::new();
    for c in 1..n_vec.num_classes() {
        if n_vec.get(c) > 0 {
            map.insert(c, Partition::ones(n_vec.get(c)));
        }
    }
    if n > coloured {
        map.insert(0, Partition::ones(n - coloured));
    }
    Some(Multipartition::from_map(map))
}

/// Image of `B_N` in `Z(Z[Γ≀S_n])`: the coefficient of `x^N` in
/// `(1 + Σ_c c x_c)^{⊗n}`.
pub fn ev_r(n_vec: &ExponentVector, n: usize) -> CentreElement {
    let mut out = CentreElement::zero(n);
    if n_vec.total() > n {
        return out;
    }
    let ty = colored_fixed_point_type(n_vec, n).expect("size checked");
    let free = n as i64 - n_vec.total() as i64 + n_vec.get(0) as i64;
    out.add_term(ty, binomial_i64(free, n_vec.get(0)));
    out
}

/// `ev_r` extended linearly.
pub fn ev_r_element(a: &RGammaElement, n: usize) -> CentreElement {
    let mut out = CentreElement::zero(n);
    for (v, c) in a.terms() {
        out = out.add_scaled(&ev_r(v, n), c);
    }
    out
}

/// `q^k` in the class algebra with coefficients mod `p`.
pub fn class_power_mod(group: &GroupData, q: &[u64], k: usize, p: u64) -> Vec<u64> {
    let l = group.num_classes();
    let qb: Vec<BigInt> = q.iter().map(|&x| BigInt::from(x)).collect();
    let mut acc: Vec<BigInt> = (0..l).map(|c| if c == 0 { BigInt::one() } else { BigInt::zero() }).collect();
    for _ in 0..k {
        acc = group.class_product(&acc, &qb).iter().map(|x| BigInt::from(mod_p(x, p))).collect();
    }
    acc.iter().map(|x| mod_p(x, p)).collect()
}

/// `B_{q,r} = Σ_{|M| = p^r} Π_c q_c^{M(c)} B_M` with coefficients mod `p`.
pub fn b_qr_mod_p(q: &[u64], r: u32, p: u64) -> Result<RGammaElement> {
    check_prime(p)?;
    let size = p.checked_pow(r).ok_or_else(|| Error::InvalidParameter("p^r overflows".into()))? as usize;
    let mut out = RGammaElement::zero();
    for m in ExponentVector::all_of_total(q.len(), size) {
        let coeff = m
            .entries()
            .iter()
            .zip(q)
            .fold(BigInt::one(), |acc, (&e, &qc)| acc * BigInt::from(qc % p).pow(e as u32));
        out.add_term(m, BigInt::from(mod_p(&coeff, p)));
    }
    Ok(out)
}

/// `k`-th power in `R_Γ ⊗ F_p`.
pub fn rg_power_mod(a: &RGammaElement, k: usize, group: &GroupData, p: u64) -> RGammaElement {
    let mut acc = RGammaElement::one(group.num_classes());
    for _ in 0..k {
        acc = rg_multiply_mod(&acc, a, group, p);
    }
    acc
}

/// Base-`p` digits of `x`, least significant first.
pub fn base_p_digits(x: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = x;
    while x > 0 {
        out.push(x % p);
        x /= p;
    }
    out
}

/// `C(t, k) mod p` for `t` given by base-`p` digits, by Lucas' theorem.
pub fn lucas_binomial(t_digits: &[u64], k: u64, p: u64) -> Result<u64> {
    let kd = base_p_digits(k, p);
    if kd.len() > t_digits.len() {
        return Err(Error::Precision(format!("{} base-{p} digits needed, {} given", kd.len(), t_digits.len())));
    }
    let mut acc = 1u64;
    for (i, &ki) in kd.iter().enumerate() {
        let ti = t_digits[i];
        if ki > ti {
            return Ok(0);
        }
        acc = acc * mod_p(&binomial_i64(ti as i64, ki as usize), p) % p;
    }
    Ok(acc)
}

/// Homomorphism `R_Γ -> F_p` sending `T(c)` to `Σ_u ω_c^u t_u`, where `u` runs
/// over the `p`-blocks of `Γ` and `t_u` is a `p`-adic integer given by its
/// leading digits. Returns the image of `B_N`: the coefficient of `x^N` in
/// `Π_u (1 + Σ_c ω_c^u x_c)^{t_u}`.
pub fn modular_hom(group: &GroupData, p: u64, digits: &[Vec<u64>], n_vec: &ExponentVector) -> Result<u64> {
    let blocks = group.p_blocks(p)?;
    if digits.len() != blocks.len() {
        return Err(Error::InvalidParameter(format!("{} digit sequences given for {} blocks", digits.len(), blocks.len())));
    }
    let l = group.num_classes();
    if n_vec.num_classes() != l {
        return Err(Error::InvalidParameter(format!("exponent vector {n_vec} has wrong length")));
    }
    let needed = base_p_digits(n_vec.total() as u64, p).len();
    if let Some(short) = digits.iter().find(|d| d.len() < needed) {
        return Err(Error::Precision(format!("{needed} base-{p} digits needed, {} given", short.len())));
    }
    if digits.iter().flatten().any(|&d| d >= p) {
        return Err(Error::InvalidParameter(format!("digits must lie in 0..{p}")));
    }
    // Polynomials in x truncated at N, coefficients mod p.
    let mut acc: HashMap<ExponentVector, u64> = HashMap::from([(ExponentVector::zero(l), 1)]);
    for (block, t) in blocks.iter().zip(digits) {
        let omega: Vec<u64> = (0..l)
            .map(|c| Ok(mod_p(&group.central_character_int(block[0], c)?, p)))
            .collect::<Result<_>>()?;
        // (Σ_c ω_c x_c)^k for k = 0..|N|, weighted by C(t, k).
        let mut factor: HashMap<ExponentVector, u64> = HashMap::new();
        let mut power: HashMap<ExponentVector, u64> = HashMap::from([(ExponentVector::zero(l), 1)]);
        for k in 0..=n_vec.total() {
            let b = lucas_binomial(t, k as u64, p)?;
            for (x, v) in &power {
                let e = factor.entry(x.clone()).or_default();
                *e = (*e + b * v) % p;
            }
            let mut next = HashMap::new();
            for (x, v) in &power {
                for (c, &w) in omega.iter().enumerate() {
                    let y = x.add(&ExponentVector::unit(l, c, 1));
                    if w != 0 && y.fits_in(n_vec) {
                        let e = next.entry(y).or_default();
                        *e = (*e + v * w) % p;
                    }
                }
            }
            power = next;
        }
        let mut next: HashMap<ExponentVector, u64> = HashMap::new();
        for (x, v) in &acc {
            for (y, w) in &factor {
                let z = x.add(y);
                if z.fits_in(n_vec) {
                    let e = next.entry(z).or_default();
                    *e = (*e + v * w) % p;
                }
            }
        }
        acc = next;
    }
    Ok(acc.get(n_vec).copied().unwrap_or(0))
}

/// `modular_hom` extended linearly.
pub fn modular_hom_element(group: &GroupData, p: u64, digits: &[Vec<u64>], a: &RGammaElement) -> Result<u64> {
    let mut total = 0u64;
    for (n, c) in a.terms() {
        total = (total + mod_p(c, p) * modular_hom(group, p, digits, n)?) % p;
    }
    Ok(total)
}

/// Evaluation `R_Γ -> Z` at integer parameters `t_χ`, one per irrep:
/// `B_N` maps to the coefficient of `x^N` in `Π_χ (1 + Σ_c ω_c^χ x_c)^{t_χ}`.
pub fn evaluate_at_irreps(group: &GroupData, counts: &[usize], a: &RGammaElement) -> Result<BigRational> {
    let l = group.num_classes();
    let max = a.terms().map(|(n, _)| n.clone()).fold(ExponentVector::zero(l), |acc, n| {
        ExponentVector(acc.0.iter().zip(&n.0).map(|(x, y)| *x.max(y)).collect())
    });
    let mut acc: HashMap<ExponentVector, BigRational> = HashMap::from([(ExponentVector::zero(l), BigRational::one())]);
    for (chi, &t) in counts.iter().enumerate() {
        let omega: Vec<BigRational> = (0..l).map(|c| group.central_character(chi, c)).collect::<Result<_>>()?;
        for _ in 0..t {
            let mut next: HashMap<ExponentVector, BigRational> = HashMap::new();
            for (x, v) in &acc {
                let e = next.entry(x.clone()).or_insert_with(BigRational::zero);
                *e += v;
                for (c, w) in omega.iter().enumerate() {
                    let y = x.add(&ExponentVector::unit(l, c, 1));
                    if !w.is_zero() && y.fits_in(&max) {
                        let e = next.entry(y).or_insert_with(BigRational::zero);
                        *e += v * w;
                    }
                }
            }
            acc = next;
        }
    }
    Ok(a.terms()
        .map(|(n, c)| acc.get(n).cloned().unwrap_or_else(BigRational::zero) * BigRational::from_integer(c.clone()))
        .sum())
}

/// `true` when every coefficient of `a` is divisible by `d`.
pub fn divisible_by(a: &RGammaElement, d: &BigInt) -> bool {
    a.terms().all(|(_, c)| c.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupdata::{builtin_group, trivial_group};
    use crate::wreath::{WreathEngine, DEFAULT_ELEMENT_CAP};
    use std::sync::Arc;

    fn ev(v: &[usize]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    fn b(v: &[usize]) -> RGammaElement {
        RGammaElement::basis(ev(v))
    }

    #[test]
    fn trivial_products_are_binomial_identities() {
        let g = trivial_group();
        let prod = rg_multiply(&b(&[1]), &b(&[1]), &g);
        let want = b(&[2]).scale(&BigInt::from(2)).add(&b(&[1]));
        assert_eq!(prod, want);
        // C(t,i) C(t,j) checked at t = 0..8.
        for i in 0..4 {
            for j in 0..4 {
                let prod = rg_multiply(&b(&[i]), &b(&[j]), &g);
                for t in 0..9i64 {
                    let lhs = binomial_i64(t, i) * binomial_i64(t, j);
                    let rhs: BigInt = prod.terms().map(|(k, c)| c * binomial_i64(t, k.get(0))).sum();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert_eq!(rg_multiply(&RGammaElement::one(1), &b(&[3]), &g), b(&[3]));
    }

    #[test]
    fn ring_axioms() {
        for name in ["C2", "S3"] {
            let g = builtin_group(name).unwrap();
            let l = g.num_classes();
            let basis = ExponentVector::all_up_to(l, 2);
            for x in &basis {
                for y in &basis {
                    let xy = rg_multiply(&RGammaElement::basis(x.clone()), &RGammaElement::basis(y.clone()), &g);
                    let yx = rg_multiply(&RGammaElement::basis(y.clone()), &RGammaElement::basis(x.clone()), &g);
                    assert_eq!(xy, yx);
                }
            }
            let small = ExponentVector::all_up_to(l, 1);
            for x in &small {
                for y in &basis {
                    for z in &small {
                        let (bx, by, bz) = (RGammaElement::basis(x.clone()), RGammaElement::basis(y.clone()), RGammaElement::basis(z.clone()));
                        assert_eq!(
                            rg_multiply(&rg_multiply(&bx, &by, &g), &bz, &g),
                            rg_multiply(&bx, &rg_multiply(&by, &bz, &g), &g)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn omega_examples() {
        let t = trivial_group();
        let om = omega_expand(&t, 4);
        assert_eq!(om[&ev(&[0])], TPolynomial::constant(1, BigRational::one()));
        for k in 0..=4usize {
            let p = &om[&ev(&[k])];
            for x in -3..6i64 {
                let want = BigRational::from_integer(binomial_i64(x, k));
                assert_eq!(p.evaluate(&[BigInt::from(x)]), want);
            }
        }
        for name in ["C2", "S3"] {
            let g = builtin_group(name).unwrap();
            let om = omega_expand(&g, 3);
            for (n, p) in &om {
                assert_eq!(p.degree(), Some(n.total()));
                assert_eq!(p.homogeneous_part(n.total()), leading_monomial(n));
                // Free over R: B_N - C(T(1), N(1)) B_M has lower degree.
                let m = n.without_identity();
                let mut binom = TPolynomial::constant(g.num_classes(), BigRational::one());
                for i in 0..n.get(0) {
                    let shifted = TPolynomial::variable(g.num_classes(), 0)
                        .add(&TPolynomial::constant(g.num_classes(), BigRational::from_integer(BigInt::from(-(i as i64)))));
                    binom = binom.mul(&shifted).scale(&BigRational::new(BigInt::one(), BigInt::from(i + 1)));
                }
                let diff = p.add(&binom.mul(&om[&m]).scale(&-BigRational::one()));
                assert!(diff.degree().map_or(true, |d| d < n.total()), "{name} {n}");
            }
        }
    }

    #[test]
    fn omega_products_match_structure_constants() {
        let g = builtin_group("C2").unwrap();
        let om = omega_expand(&g, 4);
        let basis = ExponentVector::all_up_to(2, 2);
        for x in &basis {
            for y in &basis {
                let lhs = om[x].mul(&om[y]);
                let mut rhs = TPolynomial::zero();
                for (k, c) in basis_product(x, y, &g) {
                    rhs = rhs.add(&om[&k].scale(&BigRational::from_integer(c)));
                }
                assert_eq!(lhs, rhs, "{x} {y}");
            }
        }
    }

    #[test]
    fn ev_r_examples_and_homomorphism() {
        let c2 = builtin_group("C2").unwrap();
        let e = ev_r(&ev(&[0, 1]), 2);
        assert_eq!(e.coefficient(&"[(1)@0;(1)@1]".parse().unwrap()), BigInt::one());
        assert_eq!(ev_r(&ev(&[0, 0]), 3), CentreElement::identity(3));
        assert!(ev_r(&ev(&[2, 2]), 3).is_zero());
        for name in ["C2", "S3"] {
            let g = Arc::new(builtin_group(name).unwrap());
            let engine = WreathEngine::new(g.clone(), DEFAULT_ELEMENT_CAP);
            let basis = ExponentVector::all_up_to(g.num_classes(), 2);
            for n in 0..=3 {
                for x in &basis {
                    for y in &basis {
                        let lhs = engine.centre_multiply(&ev_r(x, n), &ev_r(y, n)).unwrap();
                        let rhs = ev_r_element(&rg_multiply(&RGammaElement::basis(x.clone()), &RGammaElement::basis(y.clone()), &g), n);
                        assert_eq!(lhs, rhs, "{name} n={n} {x} {y}");
                    }
                }
            }
        }
        let _ = c2;
    }

    #[test]
    fn b_qr_examples() {
        assert!(b_qr_mod_p(&[0, 0], 1, 2).unwrap().is_zero());
        assert_eq!(b_qr_mod_p(&[0, 1], 1, 2).unwrap(), b(&[0, 2]));
        assert_eq!(b_qr_mod_p(&[1, 1], 0, 2).unwrap(), b(&[1, 0]).add(&b(&[0, 1])));
    }

    #[test]
    fn frobenius_identity() {
        for name in ["C2", "S3"] {
            let g = builtin_group(name).unwrap();
            let l = g.num_classes();
            for p in [2u64, 3] {
                for r in 0..=1u32 {
                    let qs: Vec<Vec<u64>> = if l == 2 {
                        vec![vec![1, 1], vec![0, 1], vec![1, p - 1]]
                    } else {
                        vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, p - 1]]
                    };
                    for q in qs {
                        let lhs = rg_power_mod(&b_qr_mod_p(&q, r, p).unwrap(), p as usize, &g, p);
                        let qp = class_power_mod(&g, &q, p as usize, p);
                        assert_eq!(lhs, b_qr_mod_p(&qp, r, p).unwrap(), "{name} p={p} r={r} q={q:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn modular_hom_digits() {
        let g = trivial_group();
        for p in [2u64, 3] {
            for t in 0..30u64 {
                let mut digits = base_p_digits(t, p);
                digits.resize(4, 0);
                for r in 0..=2u32 {
                    let v = modular_hom(&g, p, &[digits.clone()], &ev(&[p.pow(r) as usize])).unwrap();
                    assert_eq!(v, digits[r as usize]);
                    assert_eq!(v, mod_p(&binomial_i64(t as i64, p.pow(r) as usize), p));
                }
            }
        }
        assert_eq!(modular_hom(&g, 2, &[vec![0, 0, 0]], &ev(&[0])).unwrap(), 1);
        assert_eq!(modular_hom(&g, 2, &[vec![0, 0, 0]], &ev(&[3])).unwrap(), 0);
        assert!(matches!(modular_hom(&g, 2, &[vec![1]], &ev(&[4])), Err(Error::Precision(_))));
    }

    #[test]
    fn modular_hom_is_multiplicative() {
        for (name, p) in [("C2", 2u64), ("S3", 2), ("S3", 3)] {
            let g = builtin_group(name).unwrap();
            let blocks = g.p_blocks(p).unwrap().len();
            let digits: Vec<Vec<u64>> = (0..blocks).map(|u| vec![(u as u64 + 1) % p, 1, (u as u64) % p]).collect();
            let basis = ExponentVector::all_up_to(g.num_classes(), 2);
            for x in &basis {
                for y in &basis {
                    let prod = rg_multiply(&RGammaElement::basis(x.clone()), &RGammaElement::basis(y.clone()), &g);
                    let lhs = modular_hom(&g, p, &digits, x).unwrap() * modular_hom(&g, p, &digits, y).unwrap() % p;
                    assert_eq!(lhs, modular_hom_element(&g, p, &digits, &prod).unwrap(), "{name} {x} {y}");
                }
            }
        }
        // C2 at p = 2 factors through the trivial group via ω.
        let c2 = builtin_group("C2").unwrap();
        for t in 0..8u64 {
            let digits = { let mut d = base_p_digits(t, 2); d.resize(3, 0); d };
            for x in ExponentVector::all_up_to(2, 3) {
                let direct = mod_p(&(binomial_i64(t as i64, x.total()) * binomial_i64(x.total() as i64, x.get(0))), 2);
                assert_eq!(modular_hom(&c2, 2, &[digits.clone()], &x).unwrap(), direct);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let a = b(&[1, 0]).scale(&BigInt::from(-3)).add(&b(&[0, 2]));
        assert_eq!(a.to_string().parse::<RGammaElement>().unwrap(), a);
        assert_eq!("0".parse::<RGammaElement>().unwrap(), RGammaElement::zero());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<RGammaElement>(&json).unwrap(), a);
    }
}

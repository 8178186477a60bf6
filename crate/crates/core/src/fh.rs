//! The Farahat–Higman algebra `FH_Γ`: the free module over integer-valued
//! polynomials on the `K_μ`, indexed by partially-reduced cycle types, whose
//! structure constants interpolate the centre products of all `Γ≀S_n`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupdata::GroupData;
use crate::intpoly::{interpolate_stable, IntValuedPoly};
use crate::lambdagamma::basis_product as monomial_product;
use crate::partitions::{multipartitions_of, reduce_cycle_type, Multipartition, Partition};
use crate::rgamma::{rg_multiply, ExponentVector, RGammaElement};
use crate::wreath::{element_cap_from_env, product_candidates, CentreElement, WreathEngine};

/// `Σ a_μ(t) K_μ`, keyed by partially-reduced cycle type.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FhElement {
    terms: BTreeMap<Multipartition, IntValuedPoly>,
}

impl FhElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `K_∅`, the identity.
    pub fn one() -> Self {
        Self::basis(Multipartition::empty())
    }

    pub fn basis(label: Multipartition) -> Self {
        Self::term(label, IntValuedPoly::one())
    }

    pub fn term(label: Multipartition, coeff: IntValuedPoly) -> Self {
        let mut x = Self::zero();
        x.add_term(label, coeff);
        x
    }

    pub fn add_term(&mut self, label: Multipartition, coeff: IntValuedPoly) {
        if coeff.is_zero() {
            return;
        }
        let sum = match self.terms.get(&label) {
            Some(old) => old + &coeff,
            None => coeff,
        };
        if sum.is_zero() {
            self.terms.remove(&label);
        } else {
            self.terms.insert(label, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multipartition, &IntValuedPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, label: &Multipartition) -> IntValuedPoly {
        self.terms.get(label).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// `self + coeff * other`.
    pub fn add_multiple(&self, other: &FhElement, coeff: &IntValuedPoly) -> FhElement {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), coeff * v);
        }
        out
    }

    pub fn add(&self, other: &FhElement) -> FhElement {
        self.add_multiple(other, &IntValuedPoly::one())
    }

    pub fn sub(&self, other: &FhElement) -> FhElement {
        self.add_multiple(other, &IntValuedPoly::constant(-1))
    }

    pub fn scale(&self, c: &BigInt) -> FhElement {
        FhElement::zero().add_multiple(self, &IntValuedPoly::constant(c.clone()))
    }
}

/// Joins `coefficient * basis` terms; an empty basis string is a scalar term.
fn render_terms(terms: &[(IntValuedPoly, String)]) -> String {
    let mut out = String::new();
    for (i, (poly, basis)) in terms.iter().enumerate() {
        let nonzero: Vec<(usize, &BigInt)> = poly.coeffs().iter().enumerate().filter(|(_, a)| !a.is_zero()).collect();
        let (negative, body) = match nonzero.as_slice() {
            [(k, a)] => {
                let abs = a.abs();
                let mut factors = Vec::new();
                if *k == 0 {
                    if !abs.is_one() || basis.is_empty() {
                        factors.push(abs.to_string());
                    }
                } else {
                    if !abs.is_one() {
                        factors.push(abs.to_string());
                    }
                    factors.push(format!("C(t,{k})"));
                }
                if !basis.is_empty() {
                    factors.push(basis.clone());
                }
                (a.is_negative(), factors.join("*"))
            }
            _ if basis.is_empty() => (false, format!("({poly})")),
            _ => (false, format!("({poly})*{basis}")),
        };
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for FhElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(IntValuedPoly, String)> = self.terms.iter().rev().map(|(k, v)| (v.clone(), format!("K{k}"))).collect();
        write!(f, "{}", render_terms(&terms))
    }
}

/// Element of `R_Γ ⊗ Λ(Γ*)`: `Σ r_λ ⊗ m_λ`.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TensorElement {
    terms: BTreeMap<Multipartition, RGammaElement>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, key: Multipartition, coeff: RGammaElement) {
        let sum = match self.terms.get(&key) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multipartition, &RGammaElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &Multipartition) -> RGammaElement {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Multipartition> = self.terms.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse(processing_key(k)));
        let mut out = String::new();
        for (i, k) in keys.into_iter().enumerate() {
            let r = &self.terms[k];
            let basis = if k.is_empty() { String::new() } else { format!("m{k}") };
            let coeff = if r.len() > 1 { format!("({r})") } else { r.to_string() };
            let term = match r.as_scalar() {
                Some(c) => render_terms(&[(IntValuedPoly::constant(c), basis)]),
                None if basis.is_empty() => coeff,
                None => format!("{coeff}*{basis}"),
            };
            match (i, term.strip_prefix('-')) {
                (0, _) => out.push_str(&term),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(&term);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        write!(f, "{out}")
    }
}

/// Order in which monomial keys are eliminated: transposition degree `|λ|`,
/// then moving degree `|λ| + l(λ)`, then canonical order.
fn processing_key(lambda: &Multipartition) -> (usize, usize, Multipartition) {
    (lambda.size(), lambda.size() + lambda.len(), lambda.clone())
}

/// `Σ a_k C(t,k)` as `Σ a_k B_{k e_0}`.
pub fn poly_to_rgamma(p: &IntValuedPoly, l: usize) -> RGammaElement {
    let mut out = RGammaElement::zero();
    for (k, a) in p.coeffs().iter().enumerate() {
        out.add_term(ExponentVector::unit(l, 0, k), a.clone());
    }
    out
}

/// `Ψ(B_N) = C(t - |N| + N(0), N(0)) K_μ` with `μ(c) = (1^{N(c)})` for `c != 0`.
pub fn psi_r(n: &ExponentVector) -> FhElement {
    let mut map = BTreeMap::new();
    for c in 1..n.num_classes() {
        if n.get(c) > 0 {
            map.insert(c, Partition::ones(n.get(c)));
        }
    }
    let shift = n.get(0) as i64 - n.total() as i64;
    FhElement::term(Multipartition::from_map(map), IntValuedPoly::shifted_binom(shift, n.get(0)))
}

pub fn psi_r_element(r: &RGammaElement) -> FhElement {
    let mut out = FhElement::zero();
    for (n, c) in r.terms() {
        out = out.add(&psi_r(n).scale(c));
    }
    out
}

/// Splits a partially-reduced label `ν` as `hat(λ) ∪ (1^M)`: `λ(0) = ν(0)`,
/// `λ(c)` is `ν(c)` reduced, and `M(c)` counts the parts `1` of `ν(c)`.
pub fn split_label(nu: &Multipartition, l: usize) -> (Multipartition, ExponentVector) {
    let mut lam = BTreeMap::new();
    let mut m = vec![0; l];
    for (c, p) in nu.iter() {
        if c == 0 {
            lam.insert(0, p.clone());
        } else {
            lam.insert(c, reduce_cycle_type(p));
            m[c] = p.multiplicity(1);
        }
    }
    (Multipartition::from_map(lam), ExponentVector::new(m))
}

/// Set partitions of `0..k` as restricted growth strings.
fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, k: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == k {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, k, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, k, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), &mut out);
    out
}

type ProductTerms = Arc<Vec<(Multipartition, IntValuedPoly)>>;
type Decomposition = BTreeMap<Multipartition, RGammaElement>;

/// `FH_Γ` for one group, with caches for structure polynomials and the
/// images of weighted monomials.
pub struct FhAlgebra {
    engine: WreathEngine,
    products: Mutex<HashMap<(Multipartition, Multipartition), ProductTerms>>,
    power_sums: Mutex<HashMap<(usize, usize), Arc<FhElement>>>,
    block_products: Mutex<HashMap<Vec<(usize, Vec<BigInt>)>, Arc<FhElement>>>,
    monomial_images: Mutex<HashMap<Multipartition, Arc<FhElement>>>,
    char_sym: Mutex<HashMap<Multipartition, Arc<TensorElement>>>,
}

impl FhAlgebra {
    pub fn new(group: Arc<GroupData>, cap: u128) -> Self {
        FhAlgebra {
            engine: WreathEngine::new(group, cap),
            products: Mutex::default(),
            power_sums: Mutex::default(),
            block_products: Mutex::default(),
            monomial_images: Mutex::default(),
            char_sym: Mutex::default(),
        }
    }

    /// Uses the element cap from the environment.
    pub fn for_group(group: Arc<GroupData>) -> Self {
        Self::new(group, element_cap_from_env())
    }

    pub fn group(&self) -> &GroupData {
        self.engine.group()
    }

    pub fn engine(&self) -> &WreathEngine {
        &self.engine
    }

    fn l(&self) -> usize {
        self.group().num_classes()
    }

    fn check_label(&self, label: &Multipartition) -> Result<()> {
        if label.max_index().is_some_and(|c| c >= self.l()) {
            return Err(Error::InvalidParameter(format!("{label} uses a class index outside 0..{}", self.l())));
        }
        Ok(())
    }

    /// `φ_{μν}^λ`: interpolates the coefficient of `X_λ` in `X_μ X_ν`, sampled
    /// from `n = |λ| + l(λ(0))`, the first `n` at which `X_λ` is defined.
    pub fn structure_poly(&self, mu: &Multipartition, nu: &Multipartition, lambda: &Multipartition) -> Result<IntValuedPoly> {
        for x in [mu, nu, lambda] {
            self.check_label(x)?;
        }
        let cap = mu.size() + nu.size() + 4;
        interpolate_stable(
            |n| self.engine.centre_coefficient(mu, nu, lambda, n),
            lambda.affected_points() as i64,
            cap,
        )
    }

    /// Nonzero `(λ, φ_{μν}^λ)`.
    pub fn product_terms(&self, mu: &Multipartition, nu: &Multipartition) -> Result<ProductTerms> {
        let key = if mu <= nu { (mu.clone(), nu.clone()) } else { (nu.clone(), mu.clone()) };
        if let Some(v) = self.products.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        self.check_label(mu)?;
        self.check_label(nu)?;
        let candidates = product_candidates(&key.0, &key.1, self.l());
        let polys = candidates
            .par_iter()
            .map(|lam| self.structure_poly(&key.0, &key.1, lam))
            .collect::<Result<Vec<_>>>()?;
        let terms: Vec<(Multipartition, IntValuedPoly)> =
            candidates.into_iter().zip(polys).filter(|(_, p)| !p.is_zero()).collect();
        let terms = Arc::new(terms);
        self.products.lock().unwrap().insert(key, terms.clone());
        Ok(terms)
    }

    pub fn multiply(&self, a: &FhElement, b: &FhElement) -> Result<FhElement> {
        let mut out = FhElement::zero();
        for (mu, pa) in a.terms() {
            for (nu, pb) in b.terms() {
                let coeff = pa * pb;
                for (lam, phi) in self.product_terms(mu, nu)?.iter() {
                    out.add_term(lam.clone(), &coeff * phi);
                }
            }
        }
        Ok(out)
    }

    /// `Φ_n`: evaluate coefficients at `n`, dropping labels with no class in `Γ≀S_n`.
    pub fn specialize(&self, a: &FhElement, n: usize) -> CentreElement {
        let mut out = CentreElement::zero(n);
        for (lam, p) in a.terms() {
            if let Some(full) = lam.unreduce(n) {
                out.add_term(full, p.evaluate(n as i64));
            }
        }
        out
    }

    /// `Ψ(p_{r,c})`, the preimage of `Σ_d L_d(1)^r c^{(d)}`. Every term of
    /// `L_d(1)^r c^{(d)}` affects at most `r + 1` points.
    pub fn power_sum_image(&self, r: usize, c: usize) -> Result<Arc<FhElement>> {
        if r == 0 || c >= self.l() {
            return Err(Error::InvalidParameter(format!("power sum p_{r}({c}) is not defined")));
        }
        if let Some(v) = self.power_sums.lock().unwrap().get(&(r, c)) {
            return Ok(v.clone());
        }
        let mut samples: HashMap<usize, BTreeMap<Multipartition, BigInt>> = HashMap::new();
        let mut out = FhElement::zero();
        for size in 0..=r + 1 {
            for lam in multipartitions_of(size, self.l()) {
                if lam.affected_points() > r + 1 || lam.transposition_degree() > r {
                    continue;
                }
                let poly = interpolate_stable(
                    |n| {
                        let n = n as usize;
                        if !samples.contains_key(&n) {
                            let centre = self.engine.wreath(n).power_sum(r, c, self.engine.cap())?;
                            samples.insert(n, centre.by_reduced_label());
                        }
                        Ok(samples[&n].get(&lam).cloned().unwrap_or_default())
                    },
                    lam.affected_points() as i64,
                    r + 4,
                )?;
                out.add_term(lam, poly);
            }
        }
        let out = Arc::new(out);
        self.power_sums.lock().unwrap().insert((r, c), out.clone());
        Ok(out)
    }

    /// `Π_B Ψ(p_{r_B}(v_B))` for power sums with class-vector weights.
    fn power_sum_product(&self, blocks: &[(usize, Vec<BigInt>)]) -> Result<Arc<FhElement>> {
        if let Some(v) = self.block_products.lock().unwrap().get(blocks) {
            return Ok(v.clone());
        }
        let out = match blocks.split_last() {
            None => FhElement::one(),
            Some(((r, v), rest)) => {
                let mut single = FhElement::zero();
                for (c, w) in v.iter().enumerate().filter(|(_, w)| !w.is_zero()) {
                    single = single.add(&self.power_sum_image(*r, c)?.scale(w));
                }
                self.multiply(&*self.power_sum_product(rest)?, &single)?
            }
        };
        let out = Arc::new(out);
        self.block_products.lock().unwrap().insert(blocks.to_vec(), out.clone());
        Ok(out)
    }

    /// `Ψ(m_λ)`: the element whose image under every `Φ_n` is `m_λ` evaluated
    /// at the Jucys–Murphy elements. Sums over injective slot assignments are
    /// written through Möbius inversion over set partitions of the parts as
    /// signed products of power sums, which are interpolated individually.
    pub fn psi_m(&self, lambda: &Multipartition) -> Result<Arc<FhElement>> {
        self.check_label(lambda)?;
        if let Some(v) = self.monomial_images.lock().unwrap().get(lambda) {
            return Ok(v.clone());
        }
        let parts: Vec<(usize, usize)> = lambda.iter().flat_map(|(c, p)| p.parts().iter().map(move |&r| (r, c))).collect();
        let l = self.l();
        let mut total = FhElement::zero();
        for blocks in set_partitions(parts.len()) {
            let mut sign_weight = BigInt::one();
            let mut key: Vec<(usize, Vec<BigInt>)> = Vec::new();
            for block in &blocks {
                let size = block.len();
                let mut w: BigInt = (1..size).fold(BigInt::one(), |a, k| a * k);
                if size % 2 == 0 {
                    w = -w;
                }
                sign_weight *= w;
                let mut v: Vec<BigInt> = (0..l).map(|c| if c == 0 { BigInt::one() } else { BigInt::zero() }).collect();
                let mut r = 0;
                for &i in block {
                    let mut unit = vec![BigInt::zero(); l];
                    unit[parts[i].1] = BigInt::one();
                    v = self.group().class_product(&v, &unit);
                    r += parts[i].0;
                }
                key.push((r, v));
            }
            key.sort();
            total = total.add(&self.power_sum_product(&key)?.scale(&sign_weight));
        }
        let symmetry: BigInt = lambda
            .iter()
            .flat_map(|(_, p)| p.multiplicities().into_values().collect::<Vec<_>>())
            .map(|m| (1..=m).fold(BigInt::one(), |a, k| a * k))
            .product();
        let mut out = FhElement::zero();
        for (k, p) in total.terms() {
            let q = p
                .div_exact(&symmetry)
                .ok_or_else(|| Error::Validation(format!("image of m{lambda} is not integral")))?;
            out.add_term(k.clone(), q);
        }
        let out = Arc::new(out);
        self.monomial_images.lock().unwrap().insert(lambda.clone(), out.clone());
        Ok(out)
    }

    /// `Ψ` on `R_Γ ⊗ Λ(Γ*)`: `Σ Ψ(r_λ) Ψ(m_λ)`.
    pub fn psi_tensor(&self, f: &TensorElement) -> Result<FhElement> {
        let mut out = FhElement::zero();
        for (lam, r) in f.terms() {
            out = out.add(&self.multiply(&psi_r_element(r), &*self.psi_m(lam)?)?);
        }
        Ok(out)
    }

    /// Coordinates over `R_Γ` in the basis `K_{hat(λ)}`: repeatedly removes the
    /// term `a(t) K_ν` of most affected points using
    /// `Ψ(B_M) K_{hat(λ)} = K_ν + (fewer affected points)`.
    pub fn to_rgamma_basis(&self, x: &FhElement) -> Result<Decomposition> {
        let l = self.l();
        let mut rest = x.clone();
        let mut out = Decomposition::new();
        while let Some(nu) = rest.terms().map(|(k, _)| k.clone()).max_by_key(|k| (k.affected_points(), k.clone())) {
            let a = rest.coefficient(&nu);
            let (lam, m) = split_label(&nu, l);
            let rho = rg_multiply(&poly_to_rgamma(&a, l), &RGammaElement::basis(m.clone()), self.group());
            let entry = out.entry(lam.clone()).or_default();
            *entry = entry.add(&rho);
            let lead = self.multiply(&psi_r(&m), &FhElement::basis(lam.hat()))?;
            if lead.coefficient(&nu) != IntValuedPoly::one() {
                return Err(Error::Validation(format!("K{nu} is not the leading term of its split")));
            }
            rest = rest.sub(&FhElement::zero().add_multiple(&lead, &a));
            if rest.coefficient(&nu) != IntValuedPoly::zero() {
                return Err(Error::Validation(format!("elimination of K{nu} did not terminate")));
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// `f_μ = Ψ⁻¹(K_μ)`, by elimination from the top transposition and moving
    /// degree using `Ψ(m_λ) = K_{hat(λ)} + lower`.
    pub fn char_sym_fn(&self, mu: &Multipartition) -> Result<Arc<TensorElement>> {
        self.check_label(mu)?;
        if let Some(v) = self.char_sym.lock().unwrap().get(mu) {
            return Ok(v.clone());
        }
        let mut pending: BTreeMap<(usize, usize, Multipartition), RGammaElement> = self
            .to_rgamma_basis(&FhElement::basis(mu.clone()))?
            .into_iter()
            .map(|(k, v)| (processing_key(&k), v))
            .collect();
        let mut out = TensorElement::zero();
        while let Some((key, rho)) = pending.pop_last() {
            if rho.is_zero() {
                continue;
            }
            let lam = key.2.clone();
            out.add_term(lam.clone(), rho.clone());
            let image = self.to_rgamma_basis(&*self.psi_m(&lam)?)?;
            for (other, sigma) in image {
                if other == lam {
                    if sigma != RGammaElement::one(self.l()) {
                        return Err(Error::Validation(format!("image of m{lam} has leading coefficient {sigma}")));
                    }
                    continue;
                }
                let okey = processing_key(&other);
                if okey >= key {
                    return Err(Error::Validation(format!("image of m{lam} has a term m{other} not below it")));
                }
                let entry = pending.entry(okey).or_default();
                *entry = entry.sub(&rg_multiply(&rho, &sigma, self.group()));
            }
        }
        let out = Arc::new(out);
        self.char_sym.lock().unwrap().insert(mu.clone(), out.clone());
        Ok(out)
    }
}

/// For trivial `Γ`: `R_Γ = R` with `B_(k) = C(t,k)`.
pub fn rgamma_to_poly(r: &RGammaElement) -> Result<IntValuedPoly> {
    let mut out = IntValuedPoly::zero();
    for (n, c) in r.terms() {
        if n.num_classes() != 1 {
            return Err(Error::InvalidParameter("only defined for the trivial group".into()));
        }
        out = &out + &IntValuedPoly::binom(n.get(0)).scale(c);
    }
    Ok(out)
}

/// Order used for the `m -> e` change of basis: size, then lexicographic parts.
fn lex_key(p: &Partition) -> (usize, Vec<usize>) {
    (p.size(), p.parts().to_vec())
}

/// `e_ρ = Π e_{ρ_i}` in the monomial basis, trivial `Γ`.
fn elementary_product(rho: &Partition, group: &GroupData) -> BTreeMap<Partition, BigInt> {
    let mut acc = crate::lambdagamma::WeightedSymFn::one();
    for &r in rho.parts() {
        let e = Multipartition::single(0, Partition::ones(r));
        let mut next = crate::lambdagamma::WeightedSymFn::zero();
        for (k, c) in acc.terms() {
            next = next.add_scaled(&monomial_product(k, &e, group), c);
        }
        acc = next;
    }
    acc.terms().map(|(k, c)| (k.component(0), c.clone())).collect()
}

/// Expansion of a trivial-group tensor in products of elementary symmetric
/// functions, `Σ a_ρ(t) e_ρ`, using `e_ρ = m_{ρ'} + (lexicographically lower)`.
pub fn to_elementary_basis(f: &TensorElement, group: &GroupData) -> Result<Vec<(Partition, IntValuedPoly)>> {
    if group.num_classes() != 1 {
        return Err(Error::InvalidParameter("elementary basis is only used for the trivial group".into()));
    }
    let mut rest: BTreeMap<(usize, Vec<usize>), (Partition, IntValuedPoly)> = BTreeMap::new();
    for (k, r) in f.terms() {
        let p = k.component(0);
        rest.insert(lex_key(&p), (p, rgamma_to_poly(r)?));
    }
    let mut out = Vec::new();
    while let Some((_, (lam, a))) = rest.pop_last() {
        if a.is_zero() {
            continue;
        }
        let rho = lam.conjugate();
        for (mu, c) in elementary_product(&rho, group) {
            if mu == lam {
                continue;
            }
            let entry = rest.entry(lex_key(&mu)).or_insert_with(|| (mu.clone(), IntValuedPoly::zero()));
            entry.1 = &entry.1 - &a.scale(&c);
        }
        out.push((rho, a));
    }
    out.sort_by(|x, y| (y.0.size(), y.0.len()).cmp(&(x.0.size(), x.0.len())).then(y.0.cmp(&x.0)));
    Ok(out)
}

/// `e1^2`, `e2*e1`, … for a product of elementary symmetric functions.
fn elementary_name(rho: &Partition) -> String {
    rho.multiplicities()
        .into_iter()
        .rev()
        .map(|(i, m)| if m == 1 { format!("e{i}") } else { format!("e{i}^{m}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Text form of `f_μ`: elementary basis for trivial `Γ`, monomial basis otherwise.
pub fn render_char_sym(f: &TensorElement, group: &GroupData) -> Result<String> {
    if group.num_classes() != 1 {
        return Ok(f.to_string());
    }
    let terms: Vec<(IntValuedPoly, String)> =
        to_elementary_basis(f, group)?.into_iter().map(|(rho, a)| (a, elementary_name(&rho))).collect();
    Ok(render_terms(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupdata::{builtin_group, trivial_group};
    use crate::wreath::DEFAULT_ELEMENT_CAP;

    fn mp(s: &str) -> Multipartition {
        s.parse().unwrap()
    }

    fn algebra(name: &str) -> FhAlgebra {
        FhAlgebra::new(Arc::new(builtin_group(name).unwrap()), DEFAULT_ELEMENT_CAP)
    }

    fn poly(s: &str) -> IntValuedPoly {
        s.parse().unwrap()
    }

    #[test]
    fn structure_poly_examples() {
        let fh = algebra("trivial");
        assert_eq!(fh.structure_poly(&mp("(1)"), &mp("(1)"), &mp("()")).unwrap(), IntValuedPoly::binom(2));
        assert_eq!(fh.structure_poly(&mp("(1)"), &mp("(1)"), &mp("(2)")).unwrap(), IntValuedPoly::constant(3));
        assert_eq!(fh.structure_poly(&mp("(1)"), &mp("(1)"), &mp("(1,1)")).unwrap(), IntValuedPoly::constant(2));
        for nu in ["(1)", "(2)", "(1,1)"] {
            assert_eq!(fh.structure_poly(&mp("()"), &mp(nu), &mp(nu)).unwrap(), IntValuedPoly::one());
        }
        let sq = fh.multiply(&FhElement::basis(mp("(1)")), &FhElement::basis(mp("(1)"))).unwrap();
        let want = FhElement::term(mp("(1,1)"), IntValuedPoly::constant(2))
            .add(&FhElement::term(mp("(2)"), IntValuedPoly::constant(3)))
            .add(&FhElement::term(mp("()"), IntValuedPoly::binom(2)));
        assert_eq!(sq, want);
        assert_eq!(sq.to_string(), "2*K[(1,1)@0] + 3*K[(2)@0] + C(t,2)*K[]");
    }

    #[test]
    fn structure_poly_matches_closed_form() {
        let fh = algebra("C2");
        let labels: Vec<Multipartition> = (0..=2).flat_map(|k| multipartitions_of(k, 2)).collect();
        for mu in &labels {
            for nu in &labels {
                for (lam, phi) in fh.product_terms(mu, nu).unwrap().iter() {
                    let counts = fh.engine().local_counts(mu, nu, lam).unwrap();
                    let a = lam.affected_points() as i64;
                    let mut closed = IntValuedPoly::zero();
                    for (e, c) in counts.iter().enumerate() {
                        closed = &closed + &IntValuedPoly::shifted_binom(-a, e).scale(c);
                    }
                    assert_eq!(*phi, closed, "{mu} {nu} {lam}");
                }
            }
        }
    }

    #[test]
    fn specialization_is_a_homomorphism() {
        for name in ["trivial", "C2"] {
            let fh = algebra(name);
            let labels: Vec<Multipartition> = (0..=2).flat_map(|k| multipartitions_of(k, fh.l())).collect();
            for mu in &labels {
                for nu in &labels {
                    let prod = fh.multiply(&FhElement::basis(mu.clone()), &FhElement::basis(nu.clone())).unwrap();
                    for n in 0..=5 {
                        let lhs = fh.specialize(&prod, n);
                        let rhs = fh
                            .engine()
                            .centre_multiply(&fh.specialize(&FhElement::basis(mu.clone()), n), &fh.specialize(&FhElement::basis(nu.clone()), n))
                            .unwrap();
                        assert_eq!(lhs, rhs, "{name} {mu} {nu} n={n}");
                    }
                }
            }
        }
        let fh = algebra("trivial");
        assert_eq!(fh.specialize(&FhElement::one(), 4), CentreElement::identity(4));
        assert_eq!(fh.specialize(&FhElement::basis(mp("(1)")), 4).coefficient(&mp("(2,1,1)")), BigInt::one());
        assert!(fh.specialize(&FhElement::basis(mp("(2)")), 2).is_zero());
    }

    #[test]
    fn filtrations_of_products() {
        let fh = algebra("C2");
        let keys: Vec<Multipartition> = (0..=2).flat_map(|k| multipartitions_of(k, 2)).collect();
        for a in &keys {
            for b in &keys {
                let (ha, hb) = (a.hat(), b.hat());
                let prod = fh.multiply(&FhElement::basis(ha.clone()), &FhElement::basis(hb.clone())).unwrap();
                let top = ha.moving_degree() + hb.moving_degree();
                let union = a.union(b).hat();
                for (lam, p) in prod.terms() {
                    assert!(lam.moving_degree() <= top);
                    assert!(lam.transposition_degree() <= ha.transposition_degree() + hb.transposition_degree());
                    if lam.moving_degree() == top {
                        assert_eq!(*lam, union, "{a} {b}");
                        let ratio: BigInt = union
                            .iter()
                            .flat_map(|(c, p)| {
                                let (pa, pb) = (ha.component(c), hb.component(c));
                                p.multiplicities().into_iter().map(move |(i, m)| {
                                    let f = |k: usize| (1..=k).fold(BigInt::one(), |x, y| x * y);
                                    f(m) / (f(pa.multiplicity(i)) * f(pb.multiplicity(i)))
                                })
                            })
                            .product();
                        assert_eq!(*p, IntValuedPoly::constant(ratio));
                    }
                }
            }
        }
    }

    #[test]
    fn psi_m_examples() {
        let fh = algebra("trivial");
        assert_eq!(*fh.psi_m(&Multipartition::empty()).unwrap(), FhElement::one());
        assert_eq!(*fh.psi_m(&mp("(1)")).unwrap(), FhElement::basis(mp("(1)")));
        for r in 1..=3 {
            let want = crate::partitions::partitions_of(r)
                .into_iter()
                .fold(FhElement::zero(), |acc, p| acc.add(&FhElement::basis(Multipartition::single(0, p))));
            assert_eq!(*fh.psi_m(&Multipartition::single(0, Partition::ones(r))).unwrap(), want);
        }
    }

    #[test]
    fn psi_m_matches_direct_evaluation() {
        for (name, nmax, deg) in [("trivial", 5, 3), ("C2", 4, 2), ("S3", 3, 2)] {
            let fh = algebra(name);
            for lam in (0..=deg).flat_map(|k| multipartitions_of(k, fh.l())) {
                let image = fh.psi_m(&lam).unwrap();
                for n in 0..=nmax {
                    let w = fh.engine().wreath(n);
                    let direct = w.to_centre(&w.evaluate_weighted_monomial(&lam, DEFAULT_ELEMENT_CAP).unwrap()).unwrap();
                    assert_eq!(fh.specialize(&image, n), direct, "{name} {lam} n={n}");
                }
            }
        }
    }

    #[test]
    fn psi_r_examples() {
        let ev = |v: &[usize]| ExponentVector::new(v.to_vec());
        assert_eq!(psi_r(&ev(&[0])), FhElement::one());
        assert_eq!(psi_r(&ev(&[3])), FhElement::term(Multipartition::empty(), IntValuedPoly::binom(3)));
        assert_eq!(psi_r(&ev(&[1, 2])), FhElement::term(mp("[(1,1)@1]"), IntValuedPoly::shifted_binom(-2, 1)));
        let fh = algebra("C2");
        for v in ExponentVector::all_up_to(2, 3) {
            for n in 0..=4 {
                assert_eq!(fh.specialize(&psi_r(&v), n), crate::rgamma::ev_r(&v, n));
            }
        }
    }

    #[test]
    fn char_sym_trivial_examples() {
        let fh = algebra("trivial");
        let t = trivial_group();
        let render = |mu: &str| render_char_sym(&fh.char_sym_fn(&mp(mu)).unwrap(), &t).unwrap();
        assert_eq!(render("(1)"), "e1");
        assert_eq!(render("(2)"), "e1^2 - 2*e2 - C(t,2)");
        let f11 = to_elementary_basis(&fh.char_sym_fn(&mp("(1,1)")).unwrap(), &t).unwrap();
        let want = vec![
            (Partition::from_parts(vec![1, 1]), IntValuedPoly::constant(-1)),
            (Partition::from_parts(vec![2]), IntValuedPoly::constant(3)),
            (Partition::empty(), IntValuedPoly::binom(2)),
        ];
        assert_eq!(f11, want);
    }

    #[test]
    fn char_sym_round_trip() {
        for (name, deg) in [("trivial", 3), ("C2", 2), ("S3", 1)] {
            let fh = algebra(name);
            for mu in (0..=deg).flat_map(|k| multipartitions_of(k, fh.l())) {
                let f = fh.char_sym_fn(&mu).unwrap();
                assert_eq!(fh.psi_tensor(&f).unwrap(), FhElement::basis(mu.clone()), "{name} {mu}");
            }
        }
    }

    #[test]
    fn decomposition_round_trip() {
        let fh = algebra("C2");
        let x = FhElement::term(mp("[(1)@0;(1,1)@1]"), poly("2 + C(t,1)")).add(&FhElement::basis(mp("[(2,1)@1]")));
        let d = fh.to_rgamma_basis(&x).unwrap();
        let mut back = FhElement::zero();
        for (lam, r) in &d {
            back = back.add(&fh.multiply(&psi_r_element(r), &FhElement::basis(lam.hat())).unwrap());
        }
        assert_eq!(back, x);
    }

    #[test]
    fn label_split() {
        let (lam, m) = split_label(&mp("[(2)@0;(3,1,1)@1]"), 2);
        assert_eq!(lam, mp("[(2)@0;(2)@1]"));
        assert_eq!(m, ExponentVector::new(vec![0, 2]));
        assert_eq!(lam.hat(), mp("[(2)@0;(3)@1]"));
    }

    #[test]
    fn render_forms() {
        let terms = vec![
            (IntValuedPoly::constant(-1), "e2".to_string()),
            (poly("C(t,1) + C(t,2)"), String::new()),
            (IntValuedPoly::binom(3).scale(&BigInt::from(-2)), "e1".to_string()),
        ];
        assert_eq!(render_terms(&terms), "-e2 + (C(t,1) + C(t,2)) - 2*C(t,3)*e1");
        assert_eq!(render_terms(&[]), "0");
        let x = FhElement::term(mp("()"), IntValuedPoly::binom(2));
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<FhElement>(&json).unwrap(), x);
    }
}

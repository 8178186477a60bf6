//! Character values and block decompositions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fh::FhAlgebra;
use crate::groupdata::{check_prime, mod_p, GroupData};
use crate::partitions::{
    border_strips, contents, multipartitions_of, p_core, partitions_of, sym_class_size, Multipartition, Partition,
};
use crate::rgamma::evaluate_at_irreps;
use crate::wreath::{Wreath, WreathElement};

/// Largest `n` for which the induced-character oracle enumerates `Γ≀S_n`.
pub const WREATH_CHARACTER_MAX_N: usize = 3;

static MN_MEMO: Mutex<Option<HashMap<(Partition, Partition), BigInt>>> = Mutex::new(None);

/// `χ^λ(μ)` by the Murnaghan–Nakayama rule, removing the parts of `μ` from
/// the largest down.
pub fn mn_character(lambda: &Partition, mu: &Partition) -> Result<BigInt> {
    if lambda.size() != mu.size() {
        return Err(Error::InvalidParameter(format!("|{lambda}| != |{mu}|")));
    }
    Ok(mn(lambda, mu))
}

fn mn(lambda: &Partition, mu: &Partition) -> BigInt {
    if mu.is_empty() {
        return BigInt::from(1);
    }
    let key = (lambda.clone(), mu.clone());
    if let Some(v) = MN_MEMO.lock().unwrap().as_ref().and_then(|m| m.get(&key)) {
        return v.clone();
    }
    let rest = Partition::from_parts(mu.parts()[1..].to_vec());
    let mut total = BigInt::zero();
    for strip in border_strips(lambda, mu.parts()[0]) {
        let v = mn(&strip.result, &rest);
        if strip.height % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    MN_MEMO.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, total.clone());
    total
}

/// `ω^λ(μ) = |C_μ| χ^λ(μ) / χ^λ(1)` for `λ, μ ⊢ n`.
pub fn mn_central_character(lambda: &Partition, mu: &Partition) -> Result<BigRational> {
    let n = lambda.size();
    let value = mn_character(lambda, mu)? * sym_class_size(mu, n)?;
    Ok(BigRational::new(value, mn_character(lambda, &Partition::ones(n))?))
}

/// Evaluation point for weighted symmetric functions: `x^r(c)` in this slot
/// takes the value `scale^r · weights[c]`.
#[derive(Clone, Debug)]
struct Slot {
    scale: BigRational,
    weights: Vec<BigRational>,
}

/// `m_λ` at the given slots: the sum over injective placements of the parts
/// of `λ`, divided by the number of placements giving the same monomial.
fn monomial_at_slots(lambda: &Multipartition, slots: &[Slot]) -> BigRational {
    let parts: Vec<(usize, usize)> = lambda.iter().flat_map(|(c, p)| p.parts().iter().map(move |&r| (r, c))).collect();
    let values: Vec<Vec<BigRational>> = slots
        .iter()
        .map(|s| parts.iter().map(|&(r, c)| num_traits::pow(s.scale.clone(), r) * &s.weights[c]).collect())
        .collect();
    fn go(i: usize, used: &mut Vec<bool>, values: &[Vec<BigRational>], acc: BigRational, out: &mut BigRational) {
        if i == values.first().map_or(0, |v| v.len()) {
            *out += acc;
            return;
        }
        for s in 0..values.len() {
            if !used[s] && !values[s][i].is_zero() {
                used[s] = true;
                go(i + 1, used, values, &acc * &values[s][i], out);
                used[s] = false;
            }
        }
    }
    if parts.is_empty() {
        return BigRational::one();
    }
    let mut total = BigRational::zero();
    go(0, &mut vec![false; slots.len()], &values, BigRational::one(), &mut total);
    let symmetry: BigInt = lambda
        .iter()
        .flat_map(|(_, p)| p.multiplicities().into_values().collect::<Vec<_>>())
        .map(|m| (1..=m).fold(BigInt::one(), |a, k| a * k))
        .product();
    total / BigRational::from_integer(symmetry)
}

/// Central character of the irreducible `V^λ` of `Γ≀S_n`, `n = |λ|`, on the
/// class sum `X_μ` (partially-reduced label), by evaluating `f_μ` at the
/// contents of `λ`. Components of `λ` are indexed by irreps of `Γ`.
pub fn wreath_central_character_content(fh: &FhAlgebra, lambda: &Multipartition, mu: &Multipartition) -> Result<BigRational> {
    let group = fh.group();
    let irreps = group.irreps()?;
    if lambda.max_index().is_some_and(|chi| chi >= irreps.len()) {
        return Err(Error::InvalidParameter(format!("{lambda} uses an irrep index outside 0..{}", irreps.len())));
    }
    let order = BigRational::from_integer(group.order().into());
    let mut slots = Vec::new();
    let mut counts = vec![0; irreps.len()];
    for (chi, p) in lambda.iter() {
        counts[chi] = p.size();
        let ratio = &order / BigRational::from_integer(irreps[chi].dim.into());
        let weights = (0..group.num_classes()).map(|c| group.central_character(chi, c)).collect::<Result<Vec<_>>>()?;
        for k in contents(p) {
            slots.push(Slot { scale: &ratio * BigRational::from_integer(k.into()), weights: weights.clone() });
        }
    }
    let f = fh.char_sym_fn(mu)?;
    let mut total = BigRational::zero();
    for (key, r) in f.terms() {
        let coeff = evaluate_at_irreps(group, &counts, r)?;
        if !coeff.is_zero() {
            total += coeff * monomial_at_slots(key, &slots);
        }
    }
    Ok(total)
}

/// Central character of `S^λ` on the class of `X_{μ}` for a reduced cycle
/// type `μ` with `|μ| + l(μ) <= n = |λ|`, from `f_μ` at the contents of `λ`.
pub fn sym_central_character_content(fh: &FhAlgebra, lambda: &Partition, mu: &Partition) -> Result<BigInt> {
    if fh.group().num_classes() != 1 {
        return Err(Error::InvalidParameter("content evaluation for S_n needs the trivial group".into()));
    }
    let n = lambda.size();
    if mu.size() + mu.len() > n {
        return Err(Error::InvalidParameter(format!("reduced class {mu} does not occur in S_{n}")));
    }
    let value = wreath_central_character_content(
        fh,
        &Multipartition::single(0, lambda.clone()),
        &Multipartition::single(0, mu.clone()),
    )?;
    if !value.is_integer() {
        return Err(Error::Validation(format!("central character {value} of {lambda} is not an integer")));
    }
    Ok(value.to_integer())
}

/// Irreducibles of `Γ≀S_n`: multipartitions of `n` indexed by irreps of `Γ`.
pub fn wreath_irrep_labels(group: &GroupData, n: usize) -> Result<Vec<Multipartition>> {
    Ok(multipartitions_of(n, group.num_irreps()?))
}

/// Every element of `Γ≀S_n`, class by class.
fn all_elements(w: &Wreath<'_>) -> Vec<WreathElement> {
    w.all_types().iter().flat_map(|ty| w.class_elements(ty)).collect()
}

/// Character of `V^λ = Ind_{Γ≀S_τ}^{Γ≀S_n} (⊗_χ χ^{⊗τ_χ} ⊗ S^{λ(χ)})` at `a`,
/// summed over all of `Γ≀S_n`. Limited to `n <= WREATH_CHARACTER_MAX_N`.
pub fn wreath_character(group: &GroupData, lambda: &Multipartition, a: &WreathElement) -> Result<BigRational> {
    let n = lambda.size();
    if n != a.n() {
        return Err(Error::InvalidParameter(format!("{lambda} has size {n} but the element acts on {} points", a.n())));
    }
    if n > WREATH_CHARACTER_MAX_N {
        return Err(Error::ResourceLimit { needed: n as u128, cap: WREATH_CHARACTER_MAX_N as u128 });
    }
    let irreps = group.irreps()?;
    if lambda.max_index().is_some_and(|chi| chi >= irreps.len()) {
        return Err(Error::InvalidParameter(format!("{lambda} uses an irrep index outside 0..{}", irreps.len())));
    }
    // Point ranges of the Young subgroup blocks.
    let mut blocks = Vec::new();
    let mut start = 0;
    for (chi, p) in lambda.iter() {
        blocks.push((chi, p, start..start + p.size()));
        start += p.size();
    }
    let subgroup_character = |h: &WreathElement| -> Result<Option<BigRational>> {
        let mut value = BigRational::one();
        for (chi, p, range) in &blocks {
            if range.clone().any(|i| !range.contains(&h.image(i))) {
                return Ok(None);
            }
            let colors: Vec<usize> = range.clone().map(|i| h.color(i)).collect();
            let perm: Vec<usize> = range.clone().map(|i| h.image(i) - range.start).collect();
            let local = WreathElement::new(&colors, &perm)?;
            let ty = Wreath::new(group, p.size()).cycle_type(&local);
            let mut lengths = Vec::new();
            for (c, q) in ty.iter() {
                value *= num_traits::pow(irreps[*chi].values[c].clone(), q.len());
                lengths.extend_from_slice(q.parts());
            }
            value *= BigRational::from_integer(mn_character(p, &Partition::from_parts(lengths))?);
        }
        Ok(Some(value))
    };
    let w = Wreath::new(group, n);
    let mut total = BigRational::zero();
    for x in all_elements(&w) {
        let conj = w.multiply(&w.multiply(&x, a), &w.inverse(&x));
        if let Some(v) = subgroup_character(&conj)? {
            total += v;
        }
    }
    let subgroup_order: BigInt = lambda
        .iter()
        .map(|(_, p)| BigInt::from(group.order()).pow(p.size() as u32) * (1..=p.size()).fold(BigInt::one(), |a, k| a * k))
        .product();
    Ok(total / BigRational::from_integer(subgroup_order))
}

/// `|C| χ^λ(a) / χ^λ(1)` for the class `C` of partially-reduced type `mu`,
/// from the induced-character oracle; zero if the class is empty.
pub fn wreath_central_character_bruteforce(group: &GroupData, lambda: &Multipartition, mu: &Multipartition) -> Result<BigRational> {
    let n = lambda.size();
    let Some(full) = mu.unreduce(n) else {
        return Ok(BigRational::zero());
    };
    let w = Wreath::new(group, n);
    let rep = w.representative(mu).ok_or_else(|| Error::InvalidParameter(format!("no class {mu} in degree {n}")))?;
    let value = wreath_character(group, lambda, &rep)?;
    let dim = wreath_character(group, lambda, &WreathElement::identity(n))?;
    Ok(value * BigRational::from_integer(w.class_size(&full)) / dim)
}

/// Irreducibles grouped into `p`-blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub p: u64,
    pub blocks: Vec<Vec<Multipartition>>,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agrees: Option<bool>,
}

impl BlockPartition {
    fn from_keys<K: Ord>(p: u64, method: &str, labelled: impl IntoIterator<Item = (K, Multipartition)>) -> Self {
        let mut groups: BTreeMap<K, Vec<Multipartition>> = BTreeMap::new();
        for (k, label) in labelled {
            groups.entry(k).or_default().push(label);
        }
        let mut blocks: Vec<Vec<Multipartition>> = groups.into_values().collect();
        for b in &mut blocks {
            b.sort();
        }
        blocks.sort();
        BlockPartition { p, blocks, method: method.to_string(), agrees: None }
    }

    /// Same grouping, regardless of method.
    pub fn same_blocks(&self, other: &BlockPartition) -> bool {
        self.blocks == other.blocks
    }

    pub fn labels(&self) -> impl Iterator<Item = &Multipartition> {
        self.blocks.iter().flatten()
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} block(s), p = {}, method {}", self.blocks.len(), self.p, self.method)?;
        for (i, b) in self.blocks.iter().enumerate() {
            let labels: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}: {}", i + 1, labels.join(" "))?;
        }
        if let Some(a) = self.agrees {
            writeln!(f, "agrees: {a}")?;
        }
        Ok(())
    }
}

/// Blocks of `S_n` by `p`-core.
pub fn nakayama_blocks(n: usize, p: u64) -> Result<BlockPartition> {
    check_prime(p)?;
    let labelled = partitions_of(n)
        .into_iter()
        .map(|lam| Ok((p_core(&lam, p as usize)?, Multipartition::single(0, lam))))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockPartition::from_keys(p, "p-core", labelled))
}

/// Blocks of `S_n` by central characters modulo `p`, from the
/// Murnaghan–Nakayama rule.
pub fn sym_congruence_blocks(n: usize, p: u64) -> Result<BlockPartition> {
    check_prime(p)?;
    let classes = partitions_of(n);
    let labelled = partitions_of(n)
        .into_iter()
        .map(|lam| {
            let key = classes
                .iter()
                .map(|mu| integral_mod_p(&mn_central_character(&lam, mu)?, p))
                .collect::<Result<Vec<_>>>()?;
            Ok((key, Multipartition::single(0, lam)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockPartition::from_keys(p, "mn-congruence", labelled))
}

fn integral_mod_p(x: &BigRational, p: u64) -> Result<u64> {
    if !x.is_integer() {
        return Err(Error::Validation(format!("central character {x} is not an integer")));
    }
    Ok(mod_p(&x.to_integer(), p))
}

/// Blocks of `Γ≀S_n`: two labels share a block when, for every `p`-block `B`
/// of `Γ`, `Σ_{χ∈B} |λ(χ)|` agrees, and `λ(χ)` has the same `p`-core for each
/// `χ` alone in its block.
pub fn wreath_blocks(group: &GroupData, n: usize, p: u64) -> Result<BlockPartition> {
    let gamma_blocks = group.p_blocks(p)?;
    let labelled = wreath_irrep_labels(group, n)?
        .into_iter()
        .map(|lam| {
            let totals: Vec<usize> = gamma_blocks.iter().map(|b| b.iter().map(|&chi| lam.component(chi).size()).sum()).collect();
            let cores = gamma_blocks
                .iter()
                .filter(|b| b.len() == 1)
                .map(|b| p_core(&lam.component(b[0]), p as usize))
                .collect::<Result<Vec<_>>>()?;
            Ok(((totals, cores), lam))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockPartition::from_keys(p, "wreath-nakayama", labelled))
}

/// Groups irreducibles of `Γ≀S_n` by their content-evaluated central
/// characters modulo `p` on every class, and compares with `wreath_blocks`.
pub fn cross_validate_blocks(fh: &FhAlgebra, n: usize, p: u64) -> Result<BlockPartition> {
    let group = fh.group();
    let expected = wreath_blocks(group, n, p)?;
    let classes: Vec<Multipartition> = Wreath::new(group, n).all_types().iter().map(|t| t.partially_reduce()).collect();
    let labelled = wreath_irrep_labels(group, n)?
        .into_iter()
        .map(|lam| {
            let key = classes
                .iter()
                .map(|mu| integral_mod_p(&wreath_central_character_content(fh, &lam, mu)?, p))
                .collect::<Result<Vec<_>>>()?;
            Ok((key, lam))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = BlockPartition::from_keys(p, "central-character-congruence", labelled);
    out.agrees = Some(out.same_blocks(&expected));
    Ok(out)
}

//! Finite groups given by multiplication tables, with conjugacy classes,
//! class multiplication coefficients and rational character tables.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::characters::mn_character;
use crate::error::{Error, Result};
use crate::partitions::{partitions_of, Partition};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let parse_int = |x: &str| x.trim().parse::<BigInt>().ok();
    let value = match t.split_once('/') {
        Some((a, b)) => match (parse_int(a), parse_int(b)) {
            (Some(a), Some(b)) if !b.is_zero() => Some(Rational::new(a, b)),
            _ => None,
        },
        None => parse_int(t).map(Rational::from_integer),
    };
    value.ok_or_else(|| {
        Error::UnsupportedCharacterField(format!("character value {s:?} is not an exact rational"))
    })
}

/// Renders a rational as `"p/q"` (or `"p"` when integral).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepDocument {
    pub name: String,
    pub dim: u64,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharTableDocument {
    pub irreps: Vec<IrrepDocument>,
}

/// On-disk group description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDocument {
    pub name: String,
    pub order: usize,
    pub mult: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char_table: Option<CharTableDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irrep {
    pub name: String,
    pub dim: u64,
    /// One value per class, in canonical class order.
    pub values: Vec<Rational>,
}

/// A validated finite group.
#[derive(Clone, Debug)]
pub struct GroupData {
    pub name: String,
    mult: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    /// `a_coeffs[i][j][k]` is the coefficient of class `k` in `c_i c_j`.
    a_coeffs: Vec<Vec<Vec<u64>>>,
    char_table: Option<Vec<Irrep>>,
}

impl GroupData {
    /// Validates a group document and derives classes and class coefficients.
    pub fn load(doc: &GroupDocument) -> Result<Self> {
        let n = doc.order;
        if n == 0 || doc.mult.len() != n || doc.mult.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!("multiplication table must be {n}x{n}")));
        }
        let mult = doc.mult.clone();
        if mult.iter().flatten().any(|&x| x >= n) {
            return Err(Error::Validation("table entry out of range".into()));
        }
        for x in 0..n {
            if mult[0][x] != x || mult[x][0] != x {
                return Err(Error::Validation("element 0 is not a two-sided identity".into()));
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            let right: Vec<usize> = (0..n).filter(|&b| mult[a][b] == 0).collect();
            if right.len() != 1 || mult[right[0]][a] != 0 {
                return Err(Error::Validation(format!("element {a} has no two-sided inverse")));
            }
            inverse[a] = right[0];
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mult[a][b];
                for c in 0..n {
                    if mult[ab][c] != mult[a][mult[b][c]] {
                        return Err(Error::Validation(format!(
                            "associativity fails for ({a},{b},{c})"
                        )));
                    }
                }
            }
        }

        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let mut cls: Vec<usize> = (0..n).map(|g| mult[mult[g][x]][inverse[g]]).collect();
            cls.sort_unstable();
            cls.dedup();
            for &y in &cls {
                class_of[y] = classes.len();
            }
            classes.push(cls);
        }

        let l = classes.len();
        let mut a_coeffs = vec![vec![vec![0u64; l]; l]; l];
        for i in 0..l {
            for j in 0..l {
                for &a in &classes[i] {
                    for &b in &classes[j] {
                        let ab = mult[a][b];
                        let k = class_of[ab];
                        if ab == classes[k][0] {
                            a_coeffs[i][j][k] += 1;
                        }
                    }
                }
            }
        }

        let mut g = GroupData {
            name: doc.name.clone(),
            mult,
            inverse,
            classes,
            class_of,
            a_coeffs,
            char_table: None,
        };
        if let Some(table) = &doc.char_table {
            let irreps = table
                .irreps
                .iter()
                .map(|ir| {
                    Ok(Irrep {
                        name: ir.name.clone(),
                        dim: ir.dim,
                        values: ir.values.iter().map(|v| parse_rational(v)).collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            g.validate_char_table(&irreps)?;
            g.char_table = Some(irreps);
        }
        Ok(g)
    }

    /// Parses and validates a JSON group document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GroupDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("group document: {e}")))?;
        Self::load(&doc)
    }

    fn validate_char_table(&self, irreps: &[Irrep]) -> Result<()> {
        let l = self.num_classes();
        if irreps.len() != l {
            return Err(Error::Validation(format!("{} irreps for {l} classes", irreps.len())));
        }
        for ir in irreps {
            if ir.values.len() != l {
                return Err(Error::Validation(format!("irrep {} has wrong value count", ir.name)));
            }
            if ir.values[0] != Rational::from_integer(ir.dim.into()) {
                return Err(Error::Validation(format!("irrep {} has value at identity != dim", ir.name)));
            }
        }
        let order = Rational::from_integer(self.order().into());
        for (a, x) in irreps.iter().enumerate() {
            for (b, y) in irreps.iter().enumerate() {
                let s: Rational = (0..l)
                    .map(|k| Rational::from_integer(self.class_size(k).into()) * &x.values[k] * &y.values[k])
                    .sum();
                let want = if a == b { order.clone() } else { Rational::zero() };
                if s != want {
                    return Err(Error::Validation(format!(
                        "row orthogonality fails for {} and {}",
                        x.name, y.name
                    )));
                }
            }
        }
        for k in 0..l {
            for m in 0..l {
                let s: Rational = irreps.iter().map(|ir| &ir.values[k] * &ir.values[m]).sum();
                let want = if k == m {
                    order.clone() / Rational::from_integer(self.class_size(k).into())
                } else {
                    Rational::zero()
                };
                if s != want {
                    return Err(Error::Validation(format!("column orthogonality fails for classes {k},{m}")));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    /// Elements of class `c`, sorted; the first is the representative.
    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.classes[c].len()
    }

    pub fn representative(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    /// `A_{i,j}^k`.
    pub fn class_coefficient(&self, i: usize, j: usize, k: usize) -> u64 {
        self.a_coeffs[i][j][k]
    }

    /// The full `l x l x l` coefficient array.
    pub fn class_coefficients(&self) -> &[Vec<Vec<u64>>] {
        &self.a_coeffs
    }

    /// Product in the class algebra of vectors indexed by class.
    pub fn class_product(&self, v: &[BigInt], w: &[BigInt]) -> Vec<BigInt> {
        let l = self.num_classes();
        let mut out = vec![BigInt::zero(); l];
        for i in (0..l).filter(|&i| !v[i].is_zero()) {
            for j in (0..l).filter(|&j| !w[j].is_zero()) {
                let vw = &v[i] * &w[j];
                for (k, slot) in out.iter_mut().enumerate() {
                    let a = self.a_coeffs[i][j][k];
                    if a != 0 {
                        *slot += &vw * a;
                    }
                }
            }
        }
        out
    }

    pub fn has_char_table(&self) -> bool {
        self.char_table.is_some()
    }

    pub fn irreps(&self) -> Result<&[Irrep]> {
        self.char_table.as_deref().ok_or_else(|| {
            Error::UnsupportedCharacterField(format!("group {} has no rational character table", self.name))
        })
    }

    pub fn num_irreps(&self) -> Result<usize> {
        Ok(self.irreps()?.len())
    }

    /// `ω_c^χ = |c| χ(g) / χ(1)`.
    pub fn central_character(&self, chi: usize, c: usize) -> Result<Rational> {
        let ir = &self.irreps()?[chi];
        Ok(Rational::from_integer(self.class_size(c).into()) * &ir.values[c]
            / Rational::from_integer(ir.dim.into()))
    }

    /// Central character, required to be an integer.
    pub fn central_character_int(&self, chi: usize, c: usize) -> Result<BigInt> {
        let w = self.central_character(chi, c)?;
        if !w.is_integer() {
            return Err(Error::UnsupportedCharacterField(format!(
                "central character {w} of irrep {chi} at class {c} is not an integer"
            )));
        }
        Ok(w.to_integer())
    }

    /// Irreps grouped by their central characters modulo `p`.
    pub fn p_blocks(&self, p: u64) -> Result<Vec<Vec<usize>>> {
        check_prime(p)?;
        let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        for chi in 0..self.num_irreps()? {
            let key = (0..self.num_classes())
                .map(|c| Ok(mod_p(&self.central_character_int(chi, c)?, p)))
                .collect::<Result<Vec<_>>>()?;
            groups.entry(key).or_default().push(chi);
        }
        let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
        blocks.sort();
        Ok(blocks)
    }

    /// Serializable description, including the character table when present.
    pub fn to_document(&self) -> GroupDocument {
        GroupDocument {
            name: self.name.clone(),
            order: self.order(),
            mult: self.mult.clone(),
            char_table: self.char_table.as_ref().map(|t| CharTableDocument {
                irreps: t
                    .iter()
                    .map(|ir| IrrepDocument {
                        name: ir.name.clone(),
                        dim: ir.dim,
                        values: ir.values.iter().map(format_rational).collect(),
                    })
                    .collect(),
            }),
        }
    }
}

/// Least non-negative residue.
pub fn mod_p(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    r.try_into().expect("residue fits in u64")
}

pub fn check_prime(p: u64) -> Result<()> {
    let prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
    if prime {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{p} is not a prime")))
    }
}

fn cyclic_document(name: &str, n: usize) -> GroupDocument {
    GroupDocument {
        name: name.into(),
        order: n,
        mult: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
        char_table: None,
    }
}

fn irrep_doc(name: &str, values: Vec<i64>) -> IrrepDocument {
    IrrepDocument {
        name: name.into(),
        dim: values[0] as u64,
        values: values.iter().map(|v| v.to_string()).collect(),
    }
}

/// Elementary abelian 2-group of rank `k`; element `x` is a bit vector.
fn elementary_two_group(name: &str, k: u32, names: &[&str]) -> GroupDocument {
    let n = 1usize << k;
    let irreps = (0..n)
        .map(|s| {
            let values = (0..n).map(|x| if (s & x).count_ones() % 2 == 0 { 1 } else { -1 }).collect();
            irrep_doc(names[s], values)
        })
        .collect();
    GroupDocument {
        name: name.into(),
        order: n,
        mult: (0..n).map(|a| (0..n).map(|b| a ^ b).collect()).collect(),
        char_table: Some(CharTableDocument { irreps }),
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn cycle_type(perm: &[usize]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for s in 0..perm.len() {
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len > 0 {
            parts.push(len);
        }
    }
    Partition::from_parts(parts)
}

/// Symmetric group on `k` letters, permutations in lexicographic order,
/// `mult[a][b] = a ∘ b`, characters by Murnaghan–Nakayama.
fn symmetric_document(k: usize, names: Option<&[(&str, &[usize])]>) -> GroupDocument {
    let perms = permutations(k);
    let index: BTreeMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mult = perms
        .iter()
        .map(|a| perms.iter().map(|b| index[&b.iter().map(|&x| a[x]).collect::<Vec<_>>()]).collect())
        .collect();
    // Class representatives in canonical order: first occurrence of each cycle type.
    let mut reps: Vec<Partition> = Vec::new();
    for p in &perms {
        let ct = cycle_type(p);
        if !reps.contains(&ct) {
            reps.push(ct);
        }
    }
    let shapes: Vec<(String, Partition)> = match names {
        Some(list) => list.iter().map(|(n, s)| (n.to_string(), Partition::new(s.to_vec()).unwrap())).collect(),
        None => partitions_of(k).into_iter().map(|l| (l.to_string(), l)).collect(),
    };
    let irreps = shapes
        .iter()
        .map(|(name, lambda)| {
            let values: Vec<i64> = reps
                .iter()
                .map(|mu| i64::try_from(mn_character(lambda, mu).expect("sizes agree")).unwrap())
                .collect();
            irrep_doc(name, values)
        })
        .collect();
    GroupDocument {
        name: format!("S{k}"),
        order: perms.len(),
        mult,
        char_table: Some(CharTableDocument { irreps }),
    }
}

/// Names accepted by [`builtin_group`].
pub const BUILTIN_GROUPS: &[&str] = &["trivial", "C2", "V4", "S3", "S4", "C3"];

/// Built-in group documents. `C3` carries no character table.
pub fn builtin_document(name: &str) -> Option<GroupDocument> {
    let doc = match name {
        "trivial" | "1" => {
            let mut d = cyclic_document("trivial", 1);
            d.char_table = Some(CharTableDocument { irreps: vec![irrep_doc("triv", vec![1])] });
            d
        }
        "C2" => elementary_two_group("C2", 1, &["triv", "sign"]),
        "V4" | "klein" => elementary_two_group("V4", 2, &["triv", "a", "b", "ab"]),
        "S3" => symmetric_document(3, Some(&[("triv", &[3]), ("sign", &[1, 1, 1]), ("std", &[2, 1])])),
        "S4" => symmetric_document(4, None),
        "C3" => cyclic_document("C3", 3),
        _ => return None,
    };
    Some(doc)
}

pub fn builtin_group(name: &str) -> Result<GroupData> {
    let doc = builtin_document(name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown built-in group {name:?}")))?;
    GroupData::load(&doc)
}

/// The trivial group.
pub fn trivial_group() -> GroupData {
    builtin_group("trivial").expect("built-in group is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_and_are_orthogonal() {
        for name in BUILTIN_GROUPS {
            let g = builtin_group(name).unwrap();
            assert_eq!(g.representative(0), 0);
            assert_eq!(g.class(0), &[0]);
            assert_eq!(g.has_char_table(), *name != "C3");
        }
        assert_eq!(builtin_group("S4").unwrap().num_classes(), 5);
    }

    #[test]
    fn class_data_examples() {
        let t = trivial_group();
        assert_eq!((t.order(), t.num_classes(), t.class_coefficient(0, 0, 0)), (1, 1, 1));
        let c2 = builtin_group("C2").unwrap();
        assert_eq!(c2.class_coefficient(1, 1, 0), 1);
        assert_eq!(c2.class_coefficient(1, 1, 1), 0);
        let s3 = builtin_group("S3").unwrap();
        let sizes: Vec<usize> = (0..3).map(|c| s3.class_size(c)).collect();
        assert_eq!(sizes, vec![1, 3, 2]);
        assert_eq!(s3.class_coefficient(1, 1, 0), 3);
        assert_eq!(s3.class_coefficient(1, 1, 2), 3);
    }

    #[test]
    fn class_coefficients_do_not_depend_on_representative() {
        for name in BUILTIN_GROUPS {
            let g = builtin_group(name).unwrap();
            let l = g.num_classes();
            for i in 0..l {
                for j in 0..l {
                    let mut total = 0;
                    for k in 0..l {
                        for &rep in g.class(k) {
                            let count = g
                                .class(i)
                                .iter()
                                .flat_map(|&a| g.class(j).iter().map(move |&b| (a, b)))
                                .filter(|&(a, b)| g.multiply(a, b) == rep)
                                .count() as u64;
                            assert_eq!(count, g.class_coefficient(i, j, k));
                        }
                        assert_eq!(g.class_coefficient(i, j, k), g.class_coefficient(j, i, k));
                        total += g.class_coefficient(i, j, k) as usize * g.class_size(k);
                    }
                    assert_eq!(total, g.class_size(i) * g.class_size(j));
                }
            }
        }
    }

    #[test]
    fn central_characters() {
        let c2 = builtin_group("C2").unwrap();
        assert_eq!(c2.central_character_int(1, 1).unwrap(), BigInt::from(-1));
        let s3 = builtin_group("S3").unwrap();
        let tuples: Vec<Vec<i64>> = (0..3)
            .map(|chi| (0..3).map(|c| s3.central_character_int(chi, c).unwrap().try_into().unwrap()).collect())
            .collect();
        assert_eq!(tuples, vec![vec![1, 3, 2], vec![1, -3, 2], vec![1, 0, -1]]);
        for name in ["trivial", "C2", "V4", "S3", "S4"] {
            let g = builtin_group(name).unwrap();
            let l = g.num_classes();
            for chi in 0..l {
                for c in 0..l {
                    assert_eq!(g.central_character_int(chi, 0).unwrap(), BigInt::from(1));
                    if chi == 0 {
                        assert_eq!(g.central_character_int(0, c).unwrap(), BigInt::from(g.class_size(c)));
                    }
                }
                for i in 0..l {
                    for j in 0..l {
                        let lhs = g.central_character(chi, i).unwrap() * g.central_character(chi, j).unwrap();
                        let rhs: Rational = (0..l)
                            .map(|k| {
                                Rational::from_integer(g.class_coefficient(i, j, k).into())
                                    * g.central_character(chi, k).unwrap()
                            })
                            .sum();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn p_block_examples() {
        let c2 = builtin_group("C2").unwrap();
        assert_eq!(c2.p_blocks(2).unwrap(), vec![vec![0, 1]]);
        let s3 = builtin_group("S3").unwrap();
        assert_eq!(s3.p_blocks(3).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(s3.p_blocks(2).unwrap(), vec![vec![0, 1], vec![2]]);
        assert!(matches!(s3.p_blocks(4), Err(Error::InvalidParameter(_))));
        let c3 = builtin_group("C3").unwrap();
        assert!(matches!(c3.p_blocks(3), Err(Error::UnsupportedCharacterField(_))));
    }

    #[test]
    fn invalid_documents_are_rejected() {
        let mut doc = builtin_document("S3").unwrap();
        doc.mult[1][2] = doc.mult[1][3];
        assert!(matches!(GroupData::load(&doc), Err(Error::Validation(_))));

        // A commutative Latin square with identity that is not associative.
        let bad = GroupDocument {
            name: "loop".into(),
            order: 5,
            mult: vec![
                vec![0, 1, 2, 3, 4],
                vec![1, 0, 3, 4, 2],
                vec![2, 4, 0, 1, 3],
                vec![3, 2, 4, 0, 1],
                vec![4, 3, 1, 2, 0],
            ],
            char_table: None,
        };
        assert!(matches!(GroupData::load(&bad), Err(Error::Validation(_))));

        let mut doc = builtin_document("S3").unwrap();
        doc.char_table.as_mut().unwrap().irreps[2].values[1] = "1".into();
        assert!(matches!(GroupData::load(&doc), Err(Error::Validation(_))));

        let mut doc = builtin_document("C3").unwrap();
        doc.char_table = Some(CharTableDocument {
            irreps: vec![irrep_doc("triv", vec![1, 1, 1]), IrrepDocument {
                name: "w".into(),
                dim: 1,
                values: vec!["1".into(), "E(3)".into(), "E(3)^2".into()],
            }],
        });
        assert!(matches!(GroupData::load(&doc), Err(Error::UnsupportedCharacterField(_))));
    }

    #[test]
    fn json_round_trip() {
        let g = builtin_group("S3").unwrap();
        let text = serde_json::to_string(&g.to_document()).unwrap();
        let h = GroupData::from_json(&text).unwrap();
        assert_eq!(h.to_document(), g.to_document());
        assert_eq!(parse_rational("-3/6").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(format_rational(&Rational::new(3.into(), 6.into())), "1/2");
    }
}

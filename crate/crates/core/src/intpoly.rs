//! Integer-valued polynomials in the binomial basis `C(t,k)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Generalized binomial coefficient `C(n,k)` for any integer `n`.
pub fn binomial(n: &BigInt, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

pub fn binomial_i64(n: i64, k: usize) -> BigInt {
    binomial(&BigInt::from(n), k)
}

/// Leading forward differences `Δ^j v_0`.
fn forward_differences(values: &[BigInt]) -> Vec<BigInt> {
    let mut row = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while !row.is_empty() {
        out.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

/// `Σ a_k C(t,k)` with no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IntValuedPoly {
    coeffs: Vec<BigInt>,
}

impl IntValuedPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntValuedPoly { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// `C(t,k)`.
    pub fn binom(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        Self::from_coeffs(coeffs)
    }

    /// `C(t + shift, k)`.
    pub fn shifted_binom(shift: i64, k: usize) -> Self {
        let values: Vec<BigInt> = (0..=k as i64).map(|t| binomial_i64(t + shift, k)).collect();
        Self::from_values(0, &values)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.coeffs.len() {
            0 => Some(BigInt::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn evaluate_big(&self, n: &BigInt) -> BigInt {
        self.coeffs.iter().enumerate().map(|(k, a)| a * binomial(n, k)).sum()
    }

    pub fn evaluate(&self, n: i64) -> BigInt {
        self.evaluate_big(&BigInt::from(n))
    }

    /// Unique polynomial of degree `< values.len()` with `p(n0 + i) = values[i]`.
    pub fn from_values(n0: i64, values: &[BigInt]) -> Self {
        if values.is_empty() {
            return Self::zero();
        }
        let diffs = forward_differences(values);
        // Newton form at n0, re-evaluated at 0..d, then differenced at 0.
        let at_origin: Vec<BigInt> = (0..values.len() as i64)
            .map(|t| diffs.iter().enumerate().map(|(j, d)| d * binomial_i64(t - n0, j)).sum())
            .collect();
        Self::from_coeffs(forward_differences(&at_origin))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division by an integer, `None` if some coefficient is not divisible.
    pub fn div_exact(&self, c: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            let (q, r) = a.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::from_coeffs(out))
    }
}

impl Add for &IntValuedPoly {
    type Output = IntValuedPoly;
    fn add(self, rhs: &IntValuedPoly) -> IntValuedPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
        IntValuedPoly::from_coeffs((0..n).map(|i| get(&self.coeffs, i) + get(&rhs.coeffs, i)).collect())
    }
}

impl Neg for &IntValuedPoly {
    type Output = IntValuedPoly;
    fn neg(self) -> IntValuedPoly {
        IntValuedPoly::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }
}

impl Sub for &IntValuedPoly {
    type Output = IntValuedPoly;
    fn sub(self, rhs: &IntValuedPoly) -> IntValuedPoly {
        self + &(-rhs)
    }
}

impl Mul for &IntValuedPoly {
    type Output = IntValuedPoly;
    /// Computed in value space at `deg + deg + 1` points.
    fn mul(self, rhs: &IntValuedPoly) -> IntValuedPoly {
        let (Some(a), Some(b)) = (self.degree(), rhs.degree()) else {
            return IntValuedPoly::zero();
        };
        let values: Vec<BigInt> =
            (0..=(a + b) as i64).map(|t| self.evaluate(t) * rhs.evaluate(t)).collect();
        IntValuedPoly::from_values(0, &values)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntValuedPoly {
            type Output = IntValuedPoly;
            fn $m(self, rhs: IntValuedPoly) -> IntValuedPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for IntValuedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = a.abs();
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "C(t,{k})")?;
            } else {
                write!(f, "{mag}*C(t,{k})")?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntValuedPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        let mut depth = 0;
        for ch in compact.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (ch == '+' || ch == '-') {
                if !cur.is_empty() {
                    terms.push((negative, std::mem::take(&mut cur)));
                }
                negative = ch == '-';
                continue;
            }
            cur.push(ch);
        }
        terms.push((negative, cur));
        let mut coeffs: Vec<BigInt> = Vec::new();
        for (neg, term) in terms {
            let bad = || Error::Parse(format!("bad polynomial term {term:?}"));
            let (coef, k) = match term.split_once("C(t,") {
                Some((c, rest)) => {
                    let k: usize = rest.strip_suffix(')').ok_or_else(bad)?.parse().map_err(|_| bad())?;
                    let c = match c {
                        "" => BigInt::one(),
                        c => c.strip_suffix('*').ok_or_else(bad)?.parse().map_err(|_| bad())?,
                    };
                    (c, k)
                }
                None => (term.parse::<BigInt>().map_err(|_| bad())?, 0),
            };
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigInt::zero());
            }
            coeffs[k] += if neg { -coef } else { coef };
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

impl Serialize for IntValuedPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntValuedPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Samples `oracle` at `n0, n0+1, …` until the three top forward differences
/// vanish and two further points agree with the fitted polynomial.
pub fn interpolate_stable(
    mut oracle: impl FnMut(i64) -> Result<BigInt>,
    n0: i64,
    cap: usize,
) -> Result<IntValuedPoly> {
    let mut values: Vec<BigInt> = Vec::new();
    let mut k = 3;
    loop {
        while values.len() < k + 1 {
            values.push(oracle(n0 + values.len() as i64)?);
        }
        let diffs = forward_differences(&values[..=k]);
        if diffs[k - 2..=k].iter().all(Zero::is_zero) {
            let candidate = IntValuedPoly::from_values(n0, &values[..k - 2]);
            while values.len() < k + 3 {
                values.push(oracle(n0 + values.len() as i64)?);
            }
            let reproduces = values
                .iter()
                .enumerate()
                .all(|(i, v)| candidate.evaluate(n0 + i as i64) == *v);
            if reproduces {
                return Ok(candidate);
            }
        }
        if k >= cap + 3 {
            return Err(Error::DegreeCapExceeded {
                cap,
                start: n0,
                samples: values.iter().map(ToString::to_string).collect(),
            });
        }
        k += 1;
    }
}

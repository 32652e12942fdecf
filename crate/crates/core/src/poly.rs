//! Exact Laurent polynomials in `t` with checked `i64` coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("integer overflow in polynomial arithmetic")]
    Overflow,
    #[error("cannot parse polynomial {0:?}")]
    Parse(String),
}

/// `Σ c_e t^e` with no stored zero coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c · t^e`.
    pub fn monomial(c: i64, e: i32) -> Self {
        let mut p = Self::zero();
        if c != 0 {
            p.coeffs.insert(e, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, i64)>>(terms: I) -> Result<Self, PolyError> {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i32) -> i64 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, e: i32, c: i64) -> Result<(), PolyError> {
        if c == 0 {
            return Ok(());
        }
        let cur = self.coeff(e);
        let v = cur.checked_add(c).ok_or(PolyError::Overflow)?;
        if v == 0 {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, v);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.checked_neg().ok_or(PolyError::Overflow)?)?;
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                let e = e1.checked_add(e2).ok_or(PolyError::Overflow)?;
                out.add_term(e, c1.checked_mul(c2).ok_or(PolyError::Overflow)?)?;
            }
        }
        Ok(out)
    }

    pub fn checked_scale(&self, k: i64) -> Result<Self, PolyError> {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            out.add_term(e, c.checked_mul(k).ok_or(PolyError::Overflow)?)?;
        }
        Ok(out)
    }

    /// Multiplication by `t^s`.
    pub fn shift(&self, s: i32) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(&e, &c)| (e + s, c)).collect() }
    }

    pub fn derivative(&self) -> Result<Self, PolyError> {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            out.add_term(e - 1, c.checked_mul(e as i64).ok_or(PolyError::Overflow)?)?;
        }
        Ok(out)
    }

    pub fn eval_at_one(&self) -> Result<i64, PolyError> {
        self.coeffs.values().try_fold(0i64, |acc, &c| acc.checked_add(c).ok_or(PolyError::Overflow))
    }

    pub fn has_nonnegative_exponents(&self) -> bool {
        self.min_exponent().is_none_or(|e| e >= 0)
    }
}

impl fmt::Display for LaurentPoly {
    /// Ascending exponents: `5+23t^2+18t^4`, `t`, `-t^-1`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            if c < 0 {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            let a = c.unsigned_abs();
            match e {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    f.write_str("t")?;
                    if e != 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PolyError::Parse(s.to_string());
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Self::zero());
        }
        // split into signed terms, keeping exponent signs attached to '^'
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);

        let mut p = Self::zero();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            if body.is_empty() {
                return Err(err());
            }
            let (c, e) = match body.split_once('t') {
                None => (body.parse::<i64>().map_err(|_| err())?, 0),
                Some((c, rest)) => {
                    let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| err())? };
                    let e = match rest {
                        "" => 1,
                        r => r.strip_prefix('^').ok_or_else(err)?.parse::<i32>().map_err(|_| err())?,
                    };
                    (c, e)
                }
            };
            p.add_term(e, if neg { -c } else { c })?;
        }
        Ok(p)
    }
}

// JSON form: {"0":1,"2":1}
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.coeffs.iter().map(|(e, c)| (e.to_string(), c)))
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, i64>::deserialize(d)?;
        let mut p = Self::zero();
        for (k, c) in raw {
            let e = k.parse::<i32>().map_err(serde::de::Error::custom)?;
            p.add_term(e, c).map_err(serde::de::Error::custom)?;
        }
        Ok(p)
    }
}

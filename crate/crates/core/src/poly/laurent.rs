use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;

use super::UniPoly;
use crate::error::{Error, Result};

/// Sparse bivariate Laurent polynomial with rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by the exponent pair, so iteration
/// is lexicographic in `(k1, k2)` and never sees a zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly2 {
    terms: BTreeMap<(i64, i64), Rational>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rational::from(1), 0, 0)
    }

    pub fn monomial(c: Rational, k1: i64, k2: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(k1, k2, c);
        p
    }

    pub fn t1() -> Self {
        Self::monomial(Rational::from(1), 1, 0)
    }

    pub fn t2() -> Self {
        Self::monomial(Rational::from(1), 0, 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((i64, i64), Rational)>,
    {
        let mut p = Self::zero();
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    /// Build from integer triples `(k1, k2, c)`.
    pub fn from_int_terms(terms: &[(i64, i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(a, b, c)| ((a, b), Rational::from(c))))
    }

    pub fn add_term(&mut self, k1: i64, k2: i64, c: Rational) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry((k1, k2)).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&(k1, k2));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> Rational {
        self.terms.get(&(k1, k2)).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<(i64, i64)> {
        self.terms.keys().copied().collect()
    }

    /// `(min k1, max k1, min k2, max k2)`; `None` for the zero polynomial.
    pub fn exponent_box(&self) -> Option<(i64, i64, i64, i64)> {
        let mut it = self.terms.keys();
        let &(a, b) = it.next()?;
        let mut bx = (a, a, b, b);
        for &(a, b) in it {
            bx.0 = bx.0.min(a);
            bx.1 = bx.1.max(a);
            bx.2 = bx.2.min(b);
            bx.3 = bx.3.max(b);
        }
        Some(bx)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn has_only_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| *c.denom() == 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, Rational::from(-c))).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if *c == 0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, a)| (*k, Rational::from(a * c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, Rational::from(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by `t1^e1 t2^e2`.
    pub fn shift(&self, e1: i64, e2: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(a, b), c)| ((a + e1, b + e2), c.clone())).collect(),
        }
    }

    /// Shift so that both minimal exponents are zero. Returns the shifted
    /// polynomial and the shift `(e1, e2)` that was applied.
    pub fn normalized(&self) -> (Self, (i64, i64)) {
        match self.exponent_box() {
            None => (Self::zero(), (0, 0)),
            Some((a, _, b, _)) => (self.shift(-a, -b), (-a, -b)),
        }
    }

    /// `p(1/t1, 1/t2)`.
    pub fn inverted(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(a, b), c)| ((-a, -b), c.clone())).collect(),
        }
    }

    /// Swap the roles of `t1` and `t2`.
    pub fn swapped(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect(),
        }
    }

    pub fn d_dt1(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if a != 0 {
                out.add_term(a - 1, b, Rational::from(c * a));
            }
        }
        out
    }

    pub fn d_dt2(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if b != 0 {
                out.add_term(a, b - 1, Rational::from(c * b));
            }
        }
        out
    }

    /// Conjugate-reciprocal partner `t1^d1 t2^d2 p(1/t1, 1/t2)` of the
    /// normalized polynomial, where `(d1, d2)` are its partial degrees. For
    /// rational coefficients the conjugation is trivial.
    pub fn reciprocal_partner(&self) -> Self {
        let (p, _) = self.normalized();
        match p.exponent_box() {
            None => Self::zero(),
            Some((_, d1, _, d2)) => p.inverted().shift(d1, d2),
        }
    }

    /// Coefficients `a_i(t1)` of `t2^i` of the normalized polynomial.
    pub fn t2_coefficients(&self) -> Vec<UniPoly> {
        let (p, _) = self.normalized();
        let Some((_, d1, _, d2)) = p.exponent_box() else {
            return Vec::new();
        };
        let mut rows = vec![vec![Rational::new(); d1 as usize + 1]; d2 as usize + 1];
        for (&(a, b), c) in &p.terms {
            rows[b as usize][a as usize] = c.clone();
        }
        rows.into_iter().map(UniPoly::new).collect()
    }

    /// Inverse of [`t2_coefficients`](Self::t2_coefficients).
    pub fn from_t2_coefficients(coeffs: &[UniPoly]) -> Self {
        let mut out = Self::zero();
        for (b, a) in coeffs.iter().enumerate() {
            for (k, c) in a.coeffs().iter().enumerate() {
                out.add_term(k as i64, b as i64, c.clone());
            }
        }
        out
    }

    /// `p(x, t2)` as a polynomial in `t2` for rational `x`, on the
    /// normalized form.
    pub fn specialize_t1(&self, x: &Rational) -> UniPoly {
        let coeffs = self.t2_coefficients();
        UniPoly::new(coeffs.iter().map(|a| a.eval(x)).collect())
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        let mut acc = Rational::new();
        for (&(a, b), c) in &self.terms {
            if (a < 0 && *x == 0) || (b < 0 && *y == 0) {
                return Err(Error::Domain("negative power of zero".into()));
            }
            let xa = rpow(x, a);
            let yb = rpow(y, b);
            acc += Rational::from(c * &xa) * yb;
        }
        Ok(acc)
    }

    /// Serialized canonical form: lexicographically sorted
    /// `[k1, k2, "num/den"]` triples.
    pub fn to_canonical_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(&(a, b), c)| serde_json::json!([a, b, rational_string(c)]))
                .collect(),
        )
    }

    pub fn from_canonical_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("canonical form must be a JSON array".into()))?;
        let mut out = Self::zero();
        for t in arr {
            let t = t
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::Parse("each term must be [k1, k2, \"num/den\"]".into()))?;
            let a = t[0].as_i64().ok_or_else(|| Error::Parse("k1 must be an integer".into()))?;
            let b = t[1].as_i64().ok_or_else(|| Error::Parse("k2 must be an integer".into()))?;
            let c = t[2]
                .as_str()
                .and_then(|s| s.parse::<Rational>().ok())
                .ok_or_else(|| Error::Parse("coefficient must be a \"num/den\" string".into()))?;
            out.add_term(a, b, c);
        }
        Ok(out)
    }
}

pub(crate) fn rational_string(c: &Rational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub(crate) fn rpow(x: &Rational, e: i64) -> Rational {
    let mut base = if e < 0 { Rational::from(x.recip_ref()) } else { x.clone() };
    let mut e = e.unsigned_abs();
    let mut acc = Rational::from(1);
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = Rational::from(&base * &base);
        e >>= 1;
    }
    acc
}

fn write_monomial(s: &mut String, var: &str, e: i64) -> bool {
    match e {
        0 => false,
        1 => {
            s.push_str(var);
            true
        }
        _ => {
            s.push_str(&format!("{var}^{e}"));
            true
        }
    }
}

impl fmt::Display for LaurentPoly2 {
    /// Text form accepted by the parser, highest terms first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (&(a, b), c) in self.terms.iter().rev() {
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut mono = String::new();
            let had1 = write_monomial(&mut mono, "t1", a);
            if b != 0 {
                if had1 {
                    mono.push('*');
                }
                write_monomial(&mut mono, "t2", b);
            }
            if mono.is_empty() {
                s.push_str(&abs.to_string());
            } else if abs == 1 {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{abs}*{mono}"));
            }
        }
        f.write_str(&s)
    }
}


impl serde::Serialize for LaurentPoly2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

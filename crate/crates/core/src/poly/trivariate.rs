use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;

use super::rational_string;

/// Sparse Laurent polynomial in `t1, t2, t3`. Only used as input to the
/// three-variable Mahler measure.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly3 {
    terms: BTreeMap<[i64; 3], Rational>,
}

impl LaurentPoly3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, e: [i64; 3], c: Rational) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(e).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn from_int_terms(terms: &[([i64; 3], i64)]) -> Self {
        let mut out = Self::zero();
        for &(e, c) in terms {
            out.add_term(e, Rational::from(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64; 3], &Rational)> {
        self.terms.iter()
    }

    pub fn uses_t3(&self) -> bool {
        self.terms.keys().any(|e| e[2] != 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (*e, Rational::from(-c))).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, Rational::from(c * s));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], Rational::from(x * y));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_int_terms(&[([0, 0, 0], 1)]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The single term, if there is exactly one.
    pub fn as_monomial(&self) -> Option<([i64; 3], Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c.clone()))
        } else {
            None
        }
    }

    pub fn invert_monomial(&self) -> Option<Self> {
        let (e, c) = self.as_monomial()?;
        let mut out = Self::zero();
        out.add_term([-e[0], -e[1], -e[2]], c.recip());
        Some(out)
    }

    /// Shift so that every minimal exponent is zero.
    pub fn normalized(&self) -> Self {
        let mut lo = [i64::MAX; 3];
        for e in self.terms.keys() {
            for i in 0..3 {
                lo[i] = lo[i].min(e[i]);
            }
        }
        if self.terms.is_empty() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[0] - lo[0], e[1] - lo[1], e[2] - lo[2]], c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for LaurentPoly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, &k)| if k == 1 { format!("t{}", i + 1) } else { format!("t{}^{}", i + 1, k) })
                    .collect();
                if mono.is_empty() {
                    rational_string(c)
                } else {
                    format!("({})*{}", rational_string(c), mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl serde::Serialize for LaurentPoly3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

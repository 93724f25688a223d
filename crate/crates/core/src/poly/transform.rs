use std::fmt;

use serde::Serialize;

use super::LaurentPoly2;
use crate::error::{Error, Result};
use crate::numerics::BigReal;

/// Integer matrix `[[a, b], [c, d]]` with determinant `±1`, acting by
/// `phi(t1, t2) = (t1^a t2^c, t1^b t2^d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnimodularMap {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl UnimodularMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det.abs() != 1 {
            return Err(Error::Domain(format!("matrix [[{a},{b}],[{c},{d}]] has determinant {det}")));
        }
        Ok(UnimodularMap { a, b, c, d })
    }

    pub fn identity() -> Self {
        UnimodularMap { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Exponent vector of the pullback of `t1^k1 t2^k2`.
    pub fn apply_exponent(&self, k: (i64, i64)) -> (i64, i64) {
        (self.a * k.0 + self.b * k.1, self.c * k.0 + self.d * k.1)
    }

    /// The map `phi_self ∘ phi_other`. Its pullback is
    /// `phi_other^* ∘ phi_self^*`.
    pub fn compose(&self, other: &Self) -> Self {
        // exponent action of the composite is other * self
        let (a, b, c, d) = (other.a, other.b, other.c, other.d);
        UnimodularMap {
            a: a * self.a + b * self.c,
            b: a * self.b + b * self.d,
            c: c * self.a + d * self.c,
            d: c * self.b + d * self.d,
        }
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        UnimodularMap { a: self.d * det, b: -self.b * det, c: -self.c * det, d: self.a * det }
    }
}

impl fmt::Display for UnimodularMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Pullback `phi_A^* p`.
pub fn monomial_transform(p: &LaurentPoly2, m: &UnimodularMap) -> LaurentPoly2 {
    LaurentPoly2::from_terms(p.terms().map(|(&k, c)| (m.apply_exponent(k), c.clone())))
}

/// `Some((s1, s2))` with `t1^s1 t2^s2 p(1/t1, 1/t2) = p`, if it exists.
pub fn is_reciprocal(p: &LaurentPoly2) -> Option<(i64, i64)> {
    let (a1, b1, a2, b2) = p.exponent_box()?;
    let s = (a1 + b1, a2 + b2);
    if p.inverted().shift(s.0, s.1) == *p {
        Some(s)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Desingularized {
    pub map: UnimodularMap,
    pub m: i64,
    /// `max deg a_i` over `i >= 1`.
    pub m1: i64,
    /// `(t1 t2)^{deg a_0} phi_A^* p`, a genuine polynomial.
    #[serde(serialize_with = "ser_poly")]
    pub q: LaurentPoly2,
}

fn ser_poly<S: serde::Serializer>(p: &LaurentPoly2, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&p.to_canonical_json(), s)
}

/// Build `A = [[-1, m], [-1, m + 1]]` with `m >= max deg a_i (i >= 1)` such
/// that `(m + 1) l1 + l2` is at least `2^-(bits/2)` away from zero for every
/// singular log-radius pair `(l1, l2)`, and the polynomial `Q`.
pub fn desingularizing_transform(
    p: &LaurentPoly2,
    singular_radii: &[(BigReal, BigReal)],
    bits: u32,
) -> Result<Desingularized> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    let coeffs = p.t2_coefficients();
    if coeffs.len() < 2 {
        return Err(Error::Shape("polynomial does not involve t2".into()));
    }
    let deg_a0 = coeffs[0]
        .degree()
        .ok_or_else(|| Error::hypothesis("P* nonzero", "P(t1, 0) vanishes identically"))? as i64;
    let m1 = coeffs[1..].iter().filter_map(|a| a.degree()).max().unwrap_or(0) as i64;
    let margin = 2f64.powi(-(bits as i32) / 2);
    for (l1, l2) in singular_radii {
        if l1.contains_zero() && l2.contains_zero() {
            return Err(Error::hypothesis(
                "no singular point on the torus",
                format!("singular point with log-radii ({}, {}) lies on T^2", l1.display(12), l2.display(12)),
            ));
        }
    }
    let ok = |m: i64| {
        singular_radii
            .iter()
            .all(|(l1, l2)| l1.mul_i64(m + 1).add(l2).abs_lower() > margin)
    };
    let mut m = m1;
    while !ok(m) {
        m += 1;
        if m > m1 + 100_000 {
            return Err(Error::PrecisionExhausted("no admissible m found; raise working_bits".into()));
        }
    }
    let map = UnimodularMap::new(-1, m, -1, m + 1)?;
    let (pn, _) = p.normalized();
    let q = monomial_transform(&pn, &map).shift(deg_a0, deg_a0);
    Ok(Desingularized { map, m, m1, q })
}

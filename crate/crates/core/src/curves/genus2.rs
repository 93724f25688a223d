use rug::Rational;
use serde::Serialize;

use super::weierstrass::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::poly::{is_reciprocal, is_tempered, LaurentPoly2, UniPoly};

/// The splitting of a genus-2 curve `y^2 = D~(x)` with palindromic `D~`
/// into the two elliptic quotients `w^2 = Q(z)` and `w^2 = z^3 Q(1/z)`.
#[derive(Clone, Debug, Serialize)]
pub struct Genus2Split {
    pub r: u32,
    #[serde(serialize_with = "ser_uni")]
    pub d: UniPoly,
    #[serde(serialize_with = "ser_uni")]
    pub d_tilde: UniPoly,
    pub palindromic: bool,
    /// `Q(z) = c3 z^3 + c2 z^2 + c1 z + c0`.
    #[serde(serialize_with = "ser_uni_z")]
    pub q: UniPoly,
    pub e1: WeierstrassCurve,
    pub e2: WeierstrassCurve,
}

fn ser_uni<S: serde::Serializer>(p: &UniPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.display_in("t1"))
}

fn ser_uni_z<S: serde::Serializer>(p: &UniPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.display_in("z"))
}

fn fail(name: &str, detail: impl Into<String>) -> Error {
    Error::hypothesis(name, detail)
}

/// `(S - 1)^6 D~((S + 1)/(S - 1))` as a polynomial in `S`.
fn moebius_image(d: &UniPoly) -> UniPoly {
    let plus = UniPoly::from_ints(&[1, 1]);
    let minus = UniPoly::from_ints(&[-1, 1]);
    let mut acc = UniPoly::zero();
    for (i, c) in d.coeffs().iter().enumerate() {
        let term = plus.pow(i as u32).mul(&minus.pow(6 - i as u32)).scale(c);
        acc = acc.add(&term);
    }
    acc
}

/// `y^2 = c3 z^3 + c2 z^2 + c1 z + c0` as an integral-coefficient model
/// `Y^2 = X^3 + c2 X^2 + c1 c3 X + c0 c3^2` (`X = c3 z`, `Y = c3 w`).
fn cubic_model(c: [&Rational; 4]) -> Result<WeierstrassCurve> {
    let [c0, c1, c2, c3] = c;
    let zero = Rational::new();
    WeierstrassCurve::new([
        zero.clone(),
        c2.clone(),
        zero,
        Rational::from(c1 * c3),
        Rational::from(c0 * c3) * c3,
    ])
}

/// Splits the discriminant curve of a quadratic-in-`t2` polynomial into
/// elliptic factors, checking every hypothesis of the construction.
pub fn genus2_split(p: &LaurentPoly2) -> Result<Genus2Split> {
    let (p, _) = p.normalized();
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    if !p.has_only_integer_coeffs() {
        return Err(fail("integer coefficients", "P must lie in Z[t1, t2]"));
    }
    let rows = p.t2_coefficients();
    if rows.len() != 3 {
        return Err(fail("quadratic in t2", format!("degree in t2 is {}", rows.len() as i64 - 1)));
    }
    if !is_tempered(&p)?.tempered {
        return Err(fail("tempered", "some side polynomial has a non-cyclotomic factor"));
    }
    let (s1, s2) = is_reciprocal(&p).ok_or_else(|| fail("reciprocal", "P is not reciprocal"))?;
    if s2 != 2 {
        return Err(fail("reciprocal", format!("t2-exponent of the reciprocity is {s2}, not 2")));
    }
    let (c, b, a) = (&rows[0], &rows[1], &rows[2]);
    let d = b.mul(b).sub(&a.mul(c).scale(&Rational::from(4)));
    if d.is_zero() {
        return Err(fail("D nonzero", "B^2 - 4AC vanishes"));
    }
    let t1p1 = UniPoly::from_ints(&[1, 1]);
    let mut r = 0u32;
    let mut d_tilde = d.clone();
    while let Some(q) = d_tilde.div_exact(&t1p1.pow(2)) {
        d_tilde = q;
        r += 1;
    }
    let deg = d_tilde.degree().unwrap_or(0);
    if deg != 5 && deg != 6 {
        return Err(fail("deg D~ in {5, 6}", format!("D~ has degree {deg}")));
    }
    if d_tilde.discriminant() == 0 {
        return Err(fail("disc D~ != 0", "D~ has a repeated root"));
    }
    if s1 != 3 + r as i64 {
        return Err(fail("s = 3 + r", format!("s = {s1}, r = {r}")));
    }
    let palindromic = d_tilde.reversed(6) == d_tilde;
    if !palindromic {
        return Err(fail("t1^6 D~(1/t1) = D~(t1)", format!("D~ = {}", d_tilde.display_in("t1"))));
    }
    let f = moebius_image(&d_tilde);
    if f.coeffs().iter().skip(1).step_by(2).any(|c| *c != 0) {
        return Err(Error::Consistency("substituted discriminant is not even in S".into()));
    }
    let q = UniPoly::new(f.coeffs().iter().step_by(2).cloned().collect());
    let cs: Vec<Rational> = (0..4).map(|i| q.coeff(i)).collect();
    if q.degree() != Some(3) || cs[0] == 0 {
        return Err(fail("c0 c3 != 0", format!("Q = {}", q.display_in("z"))));
    }
    if q.discriminant() == 0 {
        return Err(fail("disc Q != 0", format!("Q = {}", q.display_in("z"))));
    }
    let e1 = cubic_model([&cs[0], &cs[1], &cs[2], &cs[3]])?;
    let e2 = cubic_model([&cs[3], &cs[2], &cs[1], &cs[0]])?;
    Ok(Genus2Split { r, d, d_tilde, palindromic, q, e1, e2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_laurent2;

    #[test]
    fn genus_two_example() {
        let p = parse_laurent2("(t1^2+t1+1)*t2^2 + t1*(t1+1)*t2 + t1*(t1^2+t1+1)").unwrap();
        let g = genus2_split(&p).unwrap();
        assert_eq!(g.r, 0);
        assert_eq!(g.d_tilde, UniPoly::from_ints(&[0, -4, -7, -10, -7, -4]));
        assert!(g.palindromic);
        assert_eq!(g.d_tilde.reversed(6), g.d_tilde);
        assert!(g.e1.discriminant() != 0 && g.e2.discriminant() != 0);
        assert!(g.e1.j_invariant() != g.e2.j_invariant());
        // Q(S^2) reproduces the substituted sextic.
        let s2 = UniPoly::from_ints(&[0, 0, 1]);
        assert_eq!(g.q.compose(&s2), moebius_image(&g.d_tilde));
    }

    #[test]
    fn named_hypotheses() {
        let p = parse_laurent2("t1*t2^3 + t2 + 1").unwrap();
        match genus2_split(&p) {
            Err(Error::Hypothesis { name, .. }) => assert_eq!(name, "quadratic in t2"),
            other => panic!("unexpected {other:?}"),
        }
        let p = parse_laurent2("t2^2 + t1*t2 + 1 + t1").unwrap();
        assert!(matches!(genus2_split(&p), Err(Error::Hypothesis { .. })));
    }
}

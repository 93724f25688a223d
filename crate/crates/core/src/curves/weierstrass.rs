use std::fmt;

use rug::{Integer, Rational};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::BigComplex;
use crate::poly::rational_string;

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub a1: Rational,
    pub a2: Rational,
    pub a3: Rational,
    pub a4: Rational,
    pub a6: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub b2: Rational,
    pub b4: Rational,
    pub b6: Rational,
    pub b8: Rational,
    pub c4: Rational,
    pub c6: Rational,
    pub disc: Rational,
    pub j: Rational,
}

/// Change of coordinates `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub u: Rational,
    pub r: Rational,
    pub s: Rational,
    pub t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine(Rational, Rational),
}

#[derive(Clone, Debug)]
pub enum ComplexPoint {
    Infinity,
    Affine(BigComplex, BigComplex),
}

fn q(v: i64) -> Rational {
    Rational::from(v)
}

impl WeierstrassCurve {
    /// Builds a curve, rejecting singular models.
    pub fn new(a: [Rational; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        let c = WeierstrassCurve { a1, a2, a3, a4, a6 };
        if c.discriminant() == 0 {
            return Err(Error::Domain(format!("singular curve {c}: discriminant is 0")));
        }
        Ok(c)
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(q))
    }

    pub fn coeffs(&self) -> [Rational; 5] {
        [self.a1.clone(), self.a2.clone(), self.a3.clone(), self.a4.clone(), self.a6.clone()]
    }

    /// The coefficients as integers, if the model is integral.
    pub fn integral_coeffs(&self) -> Option<[Integer; 5]> {
        let c = self.coeffs();
        if c.iter().any(|v| *v.denom() != 1) {
            return None;
        }
        Some(c.map(|v| v.into_numer_denom().0))
    }

    fn b_invariants(&self) -> [Rational; 4] {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = Rational::from(a1 * a1) + q(4) * a2;
        let b4 = q(2) * a4 + Rational::from(a1 * a3);
        let b6 = Rational::from(a3 * a3) + q(4) * a6;
        let b8 = Rational::from(a1 * a1) * a6 + q(4) * a2 * a6.clone()
            - Rational::from(a1 * a3) * a4
            + Rational::from(a2 * a3) * a3
            - Rational::from(a4 * a4);
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> Rational {
        let [b2, b4, b6, b8] = self.b_invariants();
        -Rational::from(&b2 * &b2) * &b8 - q(8) * Rational::from(&b4 * &b4) * &b4
            - q(27) * Rational::from(&b6 * &b6)
            + q(9) * Rational::from(&b2 * &b4) * &b6
    }

    pub fn invariants(&self) -> Invariants {
        let [b2, b4, b6, b8] = self.b_invariants();
        let c4 = Rational::from(&b2 * &b2) - q(24) * &b4;
        let c6 = -Rational::from(&b2 * &b2) * &b2 + q(36) * Rational::from(&b2 * &b4)
            - q(216) * &b6;
        let disc = self.discriminant();
        let j = Rational::from(&c4 * &c4) * &c4 / &disc;
        Invariants { b2, b4, b6, b8, c4, c6, disc, j }
    }

    pub fn j_invariant(&self) -> Rational {
        self.invariants().j
    }

    pub fn is_on(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => self.equation_at(x, y) == 0,
        }
    }

    /// Left side minus right side of the equation at `(x, y)`.
    pub fn equation_at(&self, x: &Rational, y: &Rational) -> Rational {
        let lhs = Rational::from(y * y) + Rational::from(&self.a1 * x) * y + Rational::from(&self.a3 * y);
        let rhs = Rational::from(x * x) * x
            + Rational::from(&self.a2 * x) * x
            + Rational::from(&self.a4 * x)
            + &self.a6;
        lhs - rhs
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => {
                let ny = -y.clone() - Rational::from(&self.a1 * x) - &self.a3;
                CurvePoint::Affine(x.clone(), ny)
            }
        }
    }

    /// Chord and tangent addition.
    pub fn add(&self, p: &CurvePoint, r: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, r) {
            (CurvePoint::Infinity, _) => return r.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let (lambda, nu) = if x1 == x2 {
            let denom = q(2) * y1 + Rational::from(&self.a1 * x1) + &self.a3;
            if y1 + y2.clone() + Rational::from(&self.a1 * x2) + &self.a3 == 0 {
                return CurvePoint::Infinity;
            }
            let x1sq = Rational::from(x1 * x1);
            let num_l = q(3) * &x1sq + q(2) * Rational::from(&self.a2 * x1) + &self.a4
                - Rational::from(&self.a1 * y1);
            let num_n = -Rational::from(&x1sq * x1) + Rational::from(&self.a4 * x1) + q(2) * &self.a6
                - Rational::from(&self.a3 * y1);
            (num_l / &denom, num_n / denom)
        } else {
            let dx = Rational::from(x2 - x1);
            let lambda = Rational::from(y2 - y1) / &dx;
            let nu = (Rational::from(y1 * x2) - Rational::from(y2 * x1)) / dx;
            (lambda, nu)
        };
        let x3 = Rational::from(&lambda * &lambda) + Rational::from(&self.a1 * &lambda)
            - &self.a2
            - x1
            - x2;
        let y3 = -(lambda + &self.a1) * &x3 - nu - &self.a3;
        CurvePoint::Affine(x3, y3)
    }

    pub fn sub(&self, p: &CurvePoint, r: &CurvePoint) -> CurvePoint {
        self.add(p, &self.neg(r))
    }

    /// `[m] p` by double and add; negative `m` allowed.
    pub fn mul(&self, p: &CurvePoint, m: i64) -> CurvePoint {
        let mut base = if m < 0 { self.neg(p) } else { p.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Order of a point if it is at most `bound`.
    pub fn order_up_to(&self, p: &CurvePoint, bound: u64) -> Option<u64> {
        let mut acc = p.clone();
        for m in 1..=bound {
            if acc == CurvePoint::Infinity {
                return Some(m);
            }
            acc = self.add(&acc, p);
        }
        None
    }

    /// The curve in the new coordinates of `iso`.
    pub fn transform(&self, iso: &Isomorphism) -> Result<WeierstrassCurve> {
        let Isomorphism { u, r, s, t } = iso;
        if *u == 0 {
            return Err(Error::Domain("isomorphism with u = 0".into()));
        }
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let u2 = Rational::from(u * u);
        let u3 = Rational::from(&u2 * u);
        let u4 = Rational::from(&u2 * &u2);
        let u6 = Rational::from(&u3 * &u3);
        let n1 = a1.clone() + q(2) * s;
        let n2 = a2.clone() - Rational::from(s * a1) + q(3) * r - Rational::from(s * s);
        let n3 = a3.clone() + Rational::from(r * a1) + q(2) * t;
        let n4 = a4.clone() - Rational::from(s * a3) + q(2) * Rational::from(r * a2)
            - (t.clone() + Rational::from(r * s)) * a1
            + q(3) * Rational::from(r * r)
            - q(2) * Rational::from(s * t);
        let n6 = a6.clone() + Rational::from(r * a4) + Rational::from(r * r) * a2
            + Rational::from(r * r) * r
            - Rational::from(t * a3)
            - Rational::from(t * t)
            - Rational::from(r * t) * a1;
        WeierstrassCurve::new([n1 / u, n2 / u2, n3 / u3, n4 / u4, n6 / u6])
    }

    /// Image of a point under the coordinate change `iso`.
    pub fn transform_point(iso: &Isomorphism, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => {
                let u2 = Rational::from(&iso.u * &iso.u);
                let dx = Rational::from(x - &iso.r);
                let xn = Rational::from(&dx / &u2);
                let yn = (y.clone() - Rational::from(&iso.s * &dx) - &iso.t) / (u2 * &iso.u);
                CurvePoint::Affine(xn, yn)
            }
        }
    }

    pub fn neg_complex(&self, p: &ComplexPoint) -> ComplexPoint {
        match p {
            ComplexPoint::Infinity => ComplexPoint::Infinity,
            ComplexPoint::Affine(x, y) => {
                let prec = x.prec();
                let a1 = BigComplex::from_rational(&self.a1, prec);
                let a3 = BigComplex::from_rational(&self.a3, prec);
                ComplexPoint::Affine(x.clone(), y.neg().sub(&a1.mul(x)).sub(&a3))
            }
        }
    }

    /// Addition of complex points. Coordinates closer than `tol` count as
    /// equal, which decides between chord, tangent and the identity.
    pub fn add_complex(&self, p: &ComplexPoint, r: &ComplexPoint, tol: f64) -> ComplexPoint {
        let (x1, y1, x2, y2) = match (p, r) {
            (ComplexPoint::Infinity, _) => return r.clone(),
            (_, ComplexPoint::Infinity) => return p.clone(),
            (ComplexPoint::Affine(x1, y1), ComplexPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let prec = x1.prec();
        let c = |v: &Rational| BigComplex::from_rational(v, prec);
        let (a1, a2, a3, a4, a6) = (c(&self.a1), c(&self.a2), c(&self.a3), c(&self.a4), c(&self.a6));
        let scale = 1.0 + x1.abs_upper().max(x2.abs_upper());
        let (lambda, nu) = if x1.sub(x2).abs_upper() <= tol * scale {
            let ysum = y1.add(y2).add(&a1.mul(x2)).add(&a3);
            if ysum.abs_upper() <= tol * (1.0 + y1.abs_upper()) {
                return ComplexPoint::Infinity;
            }
            let denom = y1.mul_i64(2).add(&a1.mul(x1)).add(&a3);
            let x1sq = x1.mul(x1);
            let num_l = x1sq.mul_i64(3).add(&a2.mul(x1).mul_i64(2)).add(&a4).sub(&a1.mul(y1));
            let num_n = x1sq.mul(x1).neg().add(&a4.mul(x1)).add(&a6.mul_i64(2)).sub(&a3.mul(y1));
            (num_l.div(&denom), num_n.div(&denom))
        } else {
            let dx = x2.sub(x1);
            (y2.sub(y1).div(&dx), y1.mul(x2).sub(&y2.mul(x1)).div(&dx))
        };
        let x3 = lambda.mul(&lambda).add(&a1.mul(&lambda)).sub(&a2).sub(x1).sub(x2);
        let y3 = lambda.add(&a1).mul(&x3).neg().sub(&nu).sub(&a3);
        ComplexPoint::Affine(x3, y3)
    }

    pub fn mul_complex(&self, p: &ComplexPoint, m: u64, tol: f64) -> ComplexPoint {
        let mut base = p.clone();
        let mut e = m;
        let mut acc = ComplexPoint::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add_complex(&acc, &base, tol);
            }
            base = self.add_complex(&base, &base, tol);
            e >>= 1;
        }
        acc
    }

    /// Residual of the curve equation at a complex point.
    pub fn complex_residual(&self, p: &ComplexPoint) -> f64 {
        match p {
            ComplexPoint::Infinity => 0.0,
            ComplexPoint::Affine(x, y) => {
                let prec = x.prec();
                let c = |v: &Rational| BigComplex::from_rational(v, prec);
                let lhs = y.mul(y).add(&c(&self.a1).mul(x).mul(y)).add(&c(&self.a3).mul(y));
                let rhs = x.mul(x).mul(x).add(&c(&self.a2).mul(x).mul(x)).add(&c(&self.a4).mul(x)).add(&c(&self.a6));
                lhs.sub(&rhs).abs_upper()
            }
        }
    }
}

impl Isomorphism {
    pub fn identity() -> Self {
        Isomorphism { u: q(1), r: q(0), s: q(0), t: q(0) }
    }

    /// Apply `self`, then `next` on the resulting model.
    pub fn then(&self, next: &Isomorphism) -> Isomorphism {
        let u1 = &self.u;
        let u1sq = Rational::from(u1 * u1);
        let u = Rational::from(u1 * &next.u);
        let r = Rational::from(&u1sq * &next.r) + &self.r;
        let s = Rational::from(u1 * &next.s) + &self.s;
        let t = Rational::from(&u1sq * u1) * &next.t
            + Rational::from(&self.s * &u1sq) * &next.r
            + &self.t;
        Isomorphism { u, r, s, t }
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for WeierstrassCurve {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs().iter().map(|v| v.to_string()))
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Infinity => s.serialize_str("O"),
            CurvePoint::Affine(x, y) => s.collect_seq([rational_string(x), rational_string(y)]),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine(x, y) => write!(f, "({x},{y})"),
        }
    }
}

/// Parses `"a1,a2,a3,a4,a6"`.
pub fn parse_curve(s: &str) -> Result<WeierstrassCurve> {
    let parts: Vec<&str> = s.trim().trim_start_matches('[').trim_end_matches(']').split(',').collect();
    if parts.len() != 5 {
        return Err(Error::Parse(format!("expected five coefficients a1,a2,a3,a4,a6, got {:?}", s)));
    }
    let mut a = Vec::with_capacity(5);
    for p in parts {
        let v: Rational = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad curve coefficient {p:?}")))?;
        a.push(v);
    }
    let a: [Rational; 5] = a.try_into().expect("five entries");
    WeierstrassCurve::new(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> CurvePoint {
        CurvePoint::Affine(q(x), q(y))
    }

    #[test]
    fn invariants_of_congruent_number_curve() {
        let e = WeierstrassCurve::from_ints([0, 0, 0, -1, 0]).unwrap();
        let inv = e.invariants();
        assert_eq!(inv.c4, 48);
        assert_eq!(inv.disc, 64);
        assert_eq!(inv.j, 1728);
        let lhs = Rational::from(&inv.c4 * &inv.c4) * &inv.c4 - Rational::from(&inv.c6 * &inv.c6);
        assert_eq!(lhs, q(1728) * inv.disc);
    }

    #[test]
    fn singular_curve_rejected() {
        assert!(matches!(WeierstrassCurve::from_ints([0, 1, 0, 0, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn five_torsion_on_conductor_11() {
        let e = WeierstrassCurve::from_ints([0, -1, 1, 0, 0]).unwrap();
        let p = pt(0, 0);
        assert_eq!(e.order_up_to(&p, 20), Some(5));
        assert_eq!(e.mul(&p, 2), pt(1, -1));
        assert_eq!(e.add(&p, &e.neg(&p)), CurvePoint::Infinity);
        assert_eq!(e.mul(&p, -1), e.neg(&p));
    }

    #[test]
    fn transform_round_trip() {
        let e = WeierstrassCurve::from_ints([1, 1, 1, 0, 0]).unwrap();
        let iso = Isomorphism { u: q(2), r: q(3), s: q(-1), t: Rational::from((1, 2)) };
        let f = e.transform(&iso).unwrap();
        let p = pt(0, 0);
        let img = WeierstrassCurve::transform_point(&iso, &p);
        assert!(f.is_on(&img));
        assert_eq!(Rational::from(&f.invariants().j - &e.invariants().j), 0);
        let twice = iso.then(&Isomorphism { u: q(3), r: q(1), s: q(2), t: q(5) });
        let g = e.transform(&twice).unwrap();
        let g2 = f.transform(&Isomorphism { u: q(3), r: q(1), s: q(2), t: q(5) }).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn curve_text_parses() {
        let e = parse_curve("0,-1,1,0,0").unwrap();
        assert_eq!(e.discriminant(), -11);
        assert!(parse_curve("1,2").is_err());
    }
}

impl Serialize for Invariants {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(8))?;
        for (k, v) in [
            ("b2", &self.b2),
            ("b4", &self.b4),
            ("b6", &self.b6),
            ("b8", &self.b8),
            ("c4", &self.c4),
            ("c6", &self.c6),
            ("disc", &self.disc),
            ("j", &self.j),
        ] {
            m.serialize_entry(k, &rational_string(v))?;
        }
        m.end()
    }
}

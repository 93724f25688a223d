use rug::Rational;

use super::local::{order_at, XyPoly};
use super::reduction::DivisorOnCurve;
use super::weierstrass::{CurvePoint, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::poly::{BiPoly, LaurentPoly2};

/// `t1 t2^2 + (t1^2 + k t1 + 1) t2 + t1`.
pub fn pk_polynomial(k: &Rational) -> LaurentPoly2 {
    let one = Rational::from(1);
    LaurentPoly2::from_terms([
        ((1, 2), one.clone()),
        ((2, 1), one.clone()),
        ((1, 1), k.clone()),
        ((0, 1), one.clone()),
        ((1, 0), one),
    ])
}

/// Birational map from the zero locus of `P_k` to `y^2 + kxy + ky = x^3 + x^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkMap {
    pub k: Rational,
}

fn check_k(k: &Rational) -> Result<()> {
    if *k.denom() != 1 || *k == 0 || *k == 4 || *k == -4 {
        return Err(Error::hypothesis(
            "k in Z - {0, +-4}",
            format!("k = {k} is excluded: the family needs an integer k with k != 0, 4, -4"),
        ));
    }
    Ok(())
}

/// The curve `C_k` with coefficients `[k, 1, k, 0, 0]` and the map to it.
pub fn pk_curve(k: &Rational) -> Result<(WeierstrassCurve, PkMap)> {
    check_k(k)?;
    let z = Rational::new;
    let c = WeierstrassCurve::new([k.clone(), Rational::from(1), k.clone(), z(), z()])?;
    let map = PkMap { k: k.clone() };
    map.check_symbolic()?;
    Ok((c, map))
}

/// `O, Q, 2Q, 3Q` with `Q = (0,0)`.
pub fn pk_points(k: &Rational) -> [CurvePoint; 4] {
    let r = |v: i64| Rational::from(v);
    [
        CurvePoint::Infinity,
        CurvePoint::Affine(r(0), r(0)),
        CurvePoint::Affine(r(-1), r(0)),
        CurvePoint::Affine(r(0), -k.clone()),
    ]
}

impl PkMap {
    /// `(x, y) = (k/s, -k t1 (s + k)/s^2)` with `s = t1 + t2`.
    pub fn forward(&self, t1: &Rational, t2: &Rational) -> Option<CurvePoint> {
        let s = Rational::from(t1 + t2);
        if s == 0 {
            return None;
        }
        let x = Rational::from(&self.k / &s);
        let y = -Rational::from(&self.k * t1) * Rational::from(&s + &self.k) / Rational::from(&s * &s);
        Some(CurvePoint::Affine(x, y))
    }

    /// `t1 = -y/(x(1+x))`, `t2 = (k(1+x) + y)/(x(1+x))`.
    pub fn inverse(&self, pt: &CurvePoint) -> Option<(Rational, Rational)> {
        let (x, y) = match pt {
            CurvePoint::Affine(x, y) => (x, y),
            CurvePoint::Infinity => return None,
        };
        let d = Rational::from(x * Rational::from(x + 1u32));
        if d == 0 {
            return None;
        }
        let t1 = Rational::from(-y) / &d;
        let t2 = (Rational::from(&self.k * Rational::from(x + 1u32)) + y) / d;
        Some((t1, t2))
    }

    /// Clears denominators of the Weierstrass relation pulled back through
    /// the map and reduces it modulo `P_k`; the remainder must vanish.
    pub fn check_symbolic(&self) -> Result<()> {
        let k = &self.k;
        let kk = |e: u32| LaurentPoly2::constant(crate::poly::rpow(k, e as i64));
        let t1 = LaurentPoly2::t1();
        let s = t1.add(&LaurentPoly2::t2());
        let s_plus_k = s.add(&LaurentPoly2::constant(k.clone()));
        // s^4 (y^2 + kxy + ky - x^3 - x^2) with x = k/s, y = -k t1 (s+k)/s^2.
        let y_num = kk(1).mul(&t1).mul(&s_plus_k).neg();
        let lhs = y_num
            .pow(2)
            .add(&kk(2).mul(&y_num).mul(&s))
            .add(&kk(1).mul(&y_num).mul(&s.pow(2)))
            .sub(&kk(3).mul(&s))
            .sub(&kk(2).mul(&s.pow(2)));
        let rem = BiPoly::from_laurent(&lhs).pseudo_rem(&BiPoly::from_laurent(&pk_polynomial(k)));
        if !rem.is_zero() {
            return Err(Error::Consistency(format!(
                "pulled-back Weierstrass relation is not divisible by P_k for k = {k}"
            )));
        }
        Ok(())
    }
}

fn xy(terms: &[(u32, u32, Rational)]) -> XyPoly {
    terms.to_vec()
}

/// Divisors of `t1` and `t2` as functions on `C_k`:
/// `div(t1) = (O) + (Q) - (2Q) - (3Q)`, `div(t2) = (O) - (Q) - (2Q) + (3Q)`.
/// Checked by expanding the numerators and denominators locally.
pub fn divisors_t1_t2_on_pk(k: &Rational) -> Result<(DivisorOnCurve, DivisorOnCurve)> {
    let (c, _) = pk_curve(k)?;
    let pts = pk_points(k);
    let one = Rational::from(1);
    let fx = xy(&[(1, 0, one.clone())]);
    let fx1 = xy(&[(1, 0, one.clone()), (0, 0, one.clone())]);
    let fy = xy(&[(0, 1, one.clone())]);
    let fnum2 = xy(&[(1, 0, k.clone()), (0, 0, k.clone()), (0, 1, one)]);
    let div_of = |g: &XyPoly| -> Result<DivisorOnCurve> {
        let mut terms = Vec::new();
        let mut affine_zeros = 0;
        for p in &pts {
            let o = order_at(&c, g, p)?;
            if *p != CurvePoint::Infinity {
                affine_zeros += o;
            }
            terms.push((p.clone(), o));
        }
        // A polynomial function has its only pole at O, so the affine zeros
        // seen here must account for the whole pole order.
        let pole = -terms[0].1;
        if affine_zeros != pole {
            return Err(Error::Consistency(format!(
                "zeros of a coordinate function outside O, Q, 2Q, 3Q (k = {k})"
            )));
        }
        Ok(DivisorOnCurve::new(terms))
    };
    let dx = div_of(&fx)?;
    let dx1 = div_of(&fx1)?;
    let dy = div_of(&fy)?;
    let dn2 = div_of(&fnum2)?;
    let combine = |plus: &DivisorOnCurve, minus: &[&DivisorOnCurve]| {
        let mut t = plus.terms.clone();
        for m in minus {
            t.extend(m.terms.iter().map(|(p, v)| (p.clone(), -v)));
        }
        DivisorOnCurve::new(t)
    };
    let d1 = combine(&dy, &[&dx, &dx1]);
    let d2 = combine(&dn2, &[&dx, &dx1]);
    let [o, q, q2, q3] = pts;
    let want1 = DivisorOnCurve::new(vec![(o.clone(), 1), (q.clone(), 1), (q2.clone(), -1), (q3.clone(), -1)]);
    let want2 = DivisorOnCurve::new(vec![(o, 1), (q, -1), (q2, -1), (q3, 1)]);
    let same = |a: &DivisorOnCurve, b: &DivisorOnCurve| {
        a.terms.len() == b.terms.len() && a.terms.iter().all(|(p, m)| b.multiplicity(p) == *m)
    };
    if !same(&d1, &want1) || !same(&d2, &want2) {
        return Err(Error::Consistency(format!("divisors of t1, t2 differ from the expected ones for k = {k}")));
    }
    Ok((want1, want2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn family_invariants() {
        for k in [1i64, 2, 3, 5, 6] {
            let (c, _) = pk_curve(&r(k)).unwrap();
            let inv = c.invariants();
            assert_eq!(inv.c4, r(k.pow(4) - 16 * k * k + 16));
            assert_eq!(inv.disc, r(k * k * (k - 4) * (k + 4)));
        }
        assert_eq!(pk_curve(&r(1)).unwrap().0.discriminant(), -15);
    }

    #[test]
    fn excluded_k() {
        for k in [0, 4, -4] {
            assert!(matches!(pk_curve(&r(k)), Err(Error::Hypothesis { .. })));
        }
        assert!(pk_curve(&Rational::from((1, 2))).is_err());
    }

    #[test]
    fn multiples_of_q() {
        let k = r(5);
        let (c, _) = pk_curve(&k).unwrap();
        assert_eq!(c.coeffs(), [r(5), r(1), r(5), r(0), r(0)]);
        let [o, q, q2, q3] = pk_points(&k);
        assert_eq!(c.add(&q, &q), q2);
        assert_eq!(c.mul(&q, 3), q3);
        assert_eq!(c.mul(&q, 4), o);
    }

    #[test]
    fn map_round_trip_on_rational_points() {
        let mut seen = 0;
        for k in [1i64, 2, 3, 5, 6] {
            let (c, m) = pk_curve(&r(k)).unwrap();
            for x in -60i64..60 {
                if x == 0 || x == -1 {
                    continue;
                }
                // y^2 + k(x+1) y - x^2 (x+1) = 0.
                let disc = rug::Integer::from(k * k * (x + 1) * (x + 1) + 4 * x * x * (x + 1));
                if disc < 0 || !disc.is_perfect_square() {
                    continue;
                }
                let root = disc.sqrt().to_i64().unwrap();
                let y = Rational::from((-k * (x + 1) + root, 2));
                let pt = CurvePoint::Affine(r(x), y);
                assert!(c.is_on(&pt));
                let (t1, t2) = m.inverse(&pt).unwrap();
                assert_eq!(pk_polynomial(&r(k)).eval(&t1, &t2).unwrap(), 0);
                assert_eq!(m.forward(&t1, &t2), Some(pt));
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn divisors_for_k5() {
        let (d1, d2) = divisors_t1_t2_on_pk(&r(5)).unwrap();
        assert_eq!(d1.degree(), 0);
        assert_eq!(d2.degree(), 0);
        let q = CurvePoint::Affine(r(0), r(0));
        assert_eq!(d2.multiplicity(&q), -1);
        assert_eq!(d1.multiplicity(&CurvePoint::Infinity), 1);
    }
}

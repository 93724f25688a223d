//! Truncated Laurent series in a local parameter, used to read off orders
//! of vanishing of polynomial functions at rational points of a curve.

use rug::Rational;

use super::weierstrass::{CurvePoint, WeierstrassCurve};
use crate::error::{Error, Result};

const LOW: i64 = 16;
const HIGH: i64 = 24;
const LEN: usize = (LOW + HIGH + 1) as usize;

/// Coefficients of degrees `-LOW..=HIGH`.
#[derive(Clone, Debug)]
struct Series(Vec<Rational>);

impl Series {
    fn zero() -> Self {
        Series(vec![Rational::new(); LEN])
    }

    fn monomial(c: Rational, deg: i64) -> Self {
        let mut s = Self::zero();
        s.0[(deg + LOW) as usize] = c;
        s
    }

    fn add(&self, o: &Self) -> Self {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| Rational::from(a + b)).collect())
    }

    fn scale(&self, c: &Rational) -> Self {
        Series(self.0.iter().map(|a| Rational::from(a * c)).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (i, a) in self.0.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if *b == 0 {
                    continue;
                }
                let d = i as i64 + j as i64 - 2 * LOW;
                assert!(d >= -LOW, "pole order beyond the series window");
                if d <= HIGH {
                    out.0[(d + LOW) as usize] += Rational::from(a * b);
                }
            }
        }
        out
    }

    fn order(&self) -> Option<i64> {
        self.0.iter().position(|c| *c != 0).map(|i| i as i64 - LOW)
    }

    /// Inverse of a series `z^v * (c + ...)`.
    fn inv(&self) -> Self {
        let v = self.order().expect("nonzero series");
        let start = (v + LOW) as usize;
        let unit: Vec<Rational> = self.0[start..].to_vec();
        let c0 = unit[0].clone();
        let mut out = vec![Rational::new(); unit.len()];
        out[0] = Rational::from(c0.recip_ref());
        for n in 1..unit.len() {
            let mut acc = Rational::new();
            for k in 1..=n {
                acc += Rational::from(&unit[k] * &out[n - k]);
            }
            out[n] = -acc / &c0;
        }
        let mut s = Self::zero();
        for (n, c) in out.into_iter().enumerate() {
            let d = n as i64 - v;
            if (-LOW..=HIGH).contains(&d) {
                s.0[(d + LOW) as usize] = c;
            }
        }
        s
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::monomial(Rational::from(1), 0);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// A polynomial `sum c x^i y^j` given by its terms.
pub type XyPoly = Vec<(u32, u32, Rational)>;

fn eval_series(g: &[(u32, u32, Rational)], x: &Series, y: &Series) -> Series {
    g.iter().fold(Series::zero(), |acc, (i, j, c)| acc.add(&x.pow(*i).mul(&y.pow(*j)).scale(c)))
}

fn curve_poly(c: &WeierstrassCurve) -> XyPoly {
    let one = Rational::from(1);
    vec![
        (0, 2, one.clone()),
        (1, 1, c.a1.clone()),
        (0, 1, c.a3.clone()),
        (3, 0, -one.clone()),
        (2, 0, -c.a2.clone()),
        (1, 0, -c.a4.clone()),
        (0, 0, -c.a6.clone()),
    ]
}

/// Local expansions `(x(z), y(z))` of the coordinates at `pt`.
fn expansions(c: &WeierstrassCurve, pt: &CurvePoint) -> Result<(Series, Series)> {
    let terms = HIGH as usize;
    match pt {
        CurvePoint::Infinity => {
            // z = -x/y, w = -1/y satisfies w = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3.
            let z = Series::monomial(Rational::from(1), 1);
            let z3 = z.pow(3);
            let mut w = z3.clone();
            for _ in 0..terms {
                let w2 = w.mul(&w);
                w = z3
                    .add(&z.mul(&w).scale(&c.a1))
                    .add(&z.pow(2).mul(&w).scale(&c.a2))
                    .add(&w2.scale(&c.a3))
                    .add(&z.mul(&w2).scale(&c.a4))
                    .add(&w2.mul(&w).scale(&c.a6));
            }
            let winv = w.inv();
            Ok((z.mul(&winv), winv.scale(&Rational::from(-1))))
        }
        CurvePoint::Affine(x0, y0) => {
            if !c.is_on(pt) {
                return Err(Error::Domain(format!("{pt} is not on the curve")));
            }
            let f = curve_poly(c);
            let fy = Rational::from(2 * y0.clone()) + Rational::from(&c.a1 * x0) + &c.a3;
            let fx = Rational::from(&c.a1 * y0)
                - Rational::from(3 * Rational::from(x0 * x0))
                - Rational::from(2 * Rational::from(&c.a2 * x0))
                - &c.a4;
            let h = Series::monomial(Rational::from(1), 1);
            // Solve for the dependent coordinate one coefficient at a time.
            let use_x = fy != 0;
            let (free0, dep0, d) = if use_x { (x0, y0, fy) } else { (y0, x0, fx) };
            let free = Series::monomial(free0.clone(), 0).add(&h);
            let mut dep = Series::monomial(dep0.clone(), 0);
            for n in 1..=HIGH {
                let val = if use_x { eval_series(&f, &free, &dep) } else { eval_series(&f, &dep, &free) };
                let cn = Rational::from(&val.0[(n + LOW) as usize] / &d);
                dep.0[(n + LOW) as usize] = -cn;
            }
            Ok(if use_x { (free, dep) } else { (dep, free) })
        }
    }
}

/// Order of vanishing of the polynomial function `g(x, y)` at `pt`.
pub fn order_at(c: &WeierstrassCurve, g: &[(u32, u32, Rational)], pt: &CurvePoint) -> Result<i64> {
    let (x, y) = expansions(c, pt)?;
    eval_series(g, &x, &y)
        .order()
        .ok_or_else(|| Error::Domain("function vanishes identically on the curve".into()))
}

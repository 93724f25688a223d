//! Period lattice and elliptic logarithms of a curve over the rationals.
//!
//! Periods are those of the invariant differential `dx/(2y + a1 x + a3)`,
//! computed with the arithmetic-geometric mean. Elliptic logarithms use
//! Carlson's symmetric integral `R_F`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::Serialize;

use super::weierstrass::{ComplexPoint, CurvePoint, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::numerics::{poly_roots, BigComplex, BigReal, PrecisionBudget};
use crate::poly::UniPoly;

/// `omega1` real and positive, `Im(omega2) > 0`.
#[derive(Clone, Debug)]
pub struct Periods {
    pub omega1: Complex,
    pub omega2: Complex,
    /// Roots of `4x^3 + b2 x^2 + 2 b4 x + b6`.
    pub roots: [Complex; 3],
    pub prec: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TorsionResult {
    Torsion { order: u64 },
    NonTorsionUpTo { bound: u64 },
}

/// Complex numbers as pairs of MPFR floats, enough for AGM and `R_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    re: Float,
    im: Float,
}

impl Complex {
    fn new(prec: u32) -> Self {
        Complex { re: Float::new(prec), im: Float::new(prec) }
    }

    fn from_parts(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    fn real_val(prec: u32, v: &Float) -> Self {
        Complex { re: Float::with_val(prec, v), im: Float::new(prec) }
    }

    pub fn real(&self) -> &Float {
        &self.re
    }

    pub fn imag(&self) -> &Float {
        &self.im
    }

    fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        let p = self.prec();
        Complex { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }

    fn sub(&self, o: &Self) -> Self {
        let p = self.prec();
        Complex { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }

    fn neg(&self) -> Self {
        Complex { re: -self.re.clone(), im: -self.im.clone() }
    }

    fn mul(&self, o: &Self) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Complex { re, im }
    }

    fn scale(&self, f: &Float) -> Self {
        let p = self.prec();
        Complex { re: Float::with_val(p, &self.re * f), im: Float::with_val(p, &self.im * f) }
    }

    fn div_u(&self, d: u32) -> Self {
        Complex { re: self.re.clone() / d, im: self.im.clone() / d }
    }

    fn norm(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm().sqrt()
    }

    fn div(&self, o: &Self) -> Self {
        let n = o.norm();
        let conj = Complex { re: o.re.clone(), im: -o.im.clone() };
        let m = self.mul(&conj);
        Complex { re: m.re / &n, im: m.im / &n }
    }

    /// Principal square root.
    fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Complex::new(p);
        }
        let r = self.abs();
        if !self.re.is_sign_negative() {
            let s = (Float::with_val(p, &r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(p, &self.im / &s) / 2u32;
            Complex { re: s, im }
        } else {
            let mut t = (Float::with_val(p, &r - &self.re) / 2u32).sqrt();
            if self.im.is_sign_negative() {
                t = -t;
            }
            let re = Float::with_val(p, &self.im / &t) / 2u32;
            Complex { re, im: t }
        }
    }

    /// `exp(i phi)`.
    fn cis(phi: &Float) -> Self {
        let (s, c) = phi.clone().sin_cos(Float::new(phi.prec()));
        Complex { re: c, im: s }
    }
}

fn to_complex(z: &BigComplex, prec: u32) -> Complex {
    Complex::from_parts(Float::with_val(prec, z.re.mid()), Float::with_val(prec, z.im.mid()))
}

pub fn to_big(z: &Complex, rad: f64) -> BigComplex {
    BigComplex::new(
        BigReal::new(z.real().clone(), rad),
        BigReal::new(z.imag().clone(), rad),
    )
}

impl ComplexPoint {
    pub fn from_rational(p: &CurvePoint, prec: u32) -> Self {
        match p {
            CurvePoint::Infinity => ComplexPoint::Infinity,
            CurvePoint::Affine(x, y) => {
                ComplexPoint::Affine(BigComplex::from_rational(x, prec), BigComplex::from_rational(y, prec))
            }
        }
    }
}

fn agm(a: &Float, b: &Float) -> Float {
    let mut out = a.clone();
    out.agm_mut(b);
    out
}

/// Fundamental periods by the arithmetic-geometric mean.
pub fn periods(c: &WeierstrassCurve, budget: &PrecisionBudget) -> Result<Periods> {
    let prec = budget.working_bits + 32;
    let inv = c.invariants();
    let f = UniPoly::new(vec![
        inv.b6.clone(),
        Rational::from(&inv.b4 * 2u32),
        inv.b2.clone(),
        Rational::from(4),
    ]);
    let fine = PrecisionBudget::new(prec, budget.target_abs_error * 1e-8)?;
    let mut roots: Vec<Complex> = poly_roots(&f, &fine)?.iter().map(|z| to_complex(z, prec)).collect();
    let fl = |q: &Rational| Float::with_val(prec, q.numer()) / Float::with_val(prec, q.denom());
    let (b2, b4) = (fl(&inv.b2), fl(&inv.b4));
    let pi = Float::with_val(prec, Constant::Pi);
    let (omega1, omega2) = if inv.disc < 0 {
        roots.sort_by(|a, b| {
            a.imag().clone().abs().partial_cmp(&b.imag().clone().abs()).expect("finite")
        });
        let e1 = roots[0].real().clone();
        roots[0] = Complex::real_val(prec, &e1);
        let a = Float::with_val(prec, 3 * e1.clone()) + Float::with_val(prec, &b2 / 4u32);
        let b = (Float::with_val(prec, 3 * Float::with_val(prec, e1.square_ref()))
            + Float::with_val(prec, &b2 * &e1) / 2u32
            + Float::with_val(prec, &b4 / 2u32))
        .sqrt();
        let two_sqrt_b = Float::with_val(prec, 2 * b.clone().sqrt());
        let w1 = Float::with_val(prec, 2 * pi.clone())
            / agm(&two_sqrt_b, &Float::with_val(prec, 2 * b.clone() + &a).sqrt());
        let im = Float::with_val(prec, &pi / agm(&two_sqrt_b, &Float::with_val(prec, 2 * b - &a).sqrt()));
        let w2 = Complex::from_parts(-Float::with_val(prec, &w1 / 2u32), im);
        (Complex::real_val(prec, &w1), w2)
    } else {
        let mut re: Vec<Float> = roots.iter().map(|z| z.real().clone()).collect();
        re.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let (e1, e2, e3) = (&re[0], &re[1], &re[2]);
        let d13 = Float::with_val(prec, e1 - e3).sqrt();
        let w1 = Float::with_val(prec, &pi / agm(&d13, &Float::with_val(prec, e1 - e2).sqrt()));
        let w2 = Float::with_val(prec, &pi / agm(&d13, &Float::with_val(prec, e2 - e3).sqrt()));
        roots = re.iter().map(|e| Complex::real_val(prec, e)).collect();
        (Complex::real_val(prec, &w1), Complex::from_parts(Float::new(prec), w2))
    };
    let roots: [Complex; 3] = roots.try_into().expect("cubic has three roots");
    Ok(Periods { omega1, omega2, roots, prec })
}

/// Carlson's `R_F(x, y, z)` by duplication, principal branches.
pub fn carlson_rf(x: &Complex, y: &Complex, z: &Complex) -> Complex {
    let prec = x.prec();
    let (mut x, mut y, mut z) = (x.clone(), y.clone(), z.clone());
    let tol = Float::with_val(prec, 2).pow(-(prec as i32) / 6 - 2);
    for _ in 0..4 * prec {
        let a = x.add(&y).add(&z).div_u(3);
        let amod = a.abs();
        let dev = [&x, &y, &z]
            .iter()
            .map(|v| v.sub(&a).abs() / &amod)
            .fold(Float::with_val(prec, 0), |m, v| if v > m { v } else { m });
        if dev < tol {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx.mul(&sy).add(&sy.mul(&sz)).add(&sz.mul(&sx));
        x = x.add(&lambda).div_u(4);
        y = y.add(&lambda).div_u(4);
        z = z.add(&lambda).div_u(4);
    }
    let a = x.add(&y).add(&z).div_u(3);
    let one = Complex::real_val(prec, &Float::with_val(prec, 1));
    let dx = one.sub(&x.div(&a));
    let dy = one.sub(&y.div(&a));
    let dz = dx.add(&dy).neg();
    let e2 = dx.mul(&dy).sub(&dz.mul(&dz));
    let e3 = dx.mul(&dy).mul(&dz);
    let series = one
        .sub(&e2.div_u(10))
        .add(&e3.div_u(14))
        .add(&e2.mul(&e2).div_u(24))
        .sub(&e2.mul(&e3).scale(&Float::with_val(prec, 3)).div_u(44));
    series.div(&a.sqrt())
}

fn on_negative_axis(z: &Complex) -> bool {
    let scale = z.abs().to_f64();
    z.imag().to_f64().abs() <= 1e-10 * (1.0 + scale) && z.real().is_sign_negative()
}

/// Elliptic logarithm of a point, defined modulo the period lattice.
pub fn elliptic_log(c: &WeierstrassCurve, pt: &ComplexPoint, per: &Periods) -> Result<Complex> {
    let prec = per.prec;
    let (x0, y0) = match pt {
        ComplexPoint::Infinity => return Ok(Complex::new(prec)),
        ComplexPoint::Affine(x, y) => (to_complex(x, prec), to_complex(y, prec)),
    };
    let q = |v: &Rational| {
        Complex::real_val(prec, &(Float::with_val(prec, v.numer()) / Float::with_val(prec, v.denom())))
    };
    // Y = 2y + a1 x + a3 is the derivative of the Weierstrass function.
    let ycoord = y0.add(&y0).add(&q(&c.a1).mul(&x0)).add(&q(&c.a3));
    let pi = Float::with_val(prec, Constant::Pi);
    // Integrate from x0 to infinity along a ray avoiding the branch cuts.
    for k in 0..8u32 {
        let phi = Float::with_val(prec, &pi * k) / 4u32;
        let rot = Complex::cis(&Float::with_val(prec, -&phi));
        let w: Vec<Complex> = per.roots.iter().map(|e| x0.sub(e).mul(&rot)).collect();
        if w.iter().any(on_negative_axis) {
            continue;
        }
        let half = Complex::cis(&(-Float::with_val(prec, &phi / 2u32)));
        let u = carlson_rf(&w[0], &w[1], &w[2]).mul(&half);
        // Derivative of the Weierstrass function at u along the same branch.
        let three_half = Complex::cis(&(Float::with_val(prec, 3 * phi) / 2u32));
        let prod = w.iter().fold(Complex::real_val(prec, &Float::with_val(prec, 1)), |acc, v| acc.mul(&v.sqrt()));
        let dp = three_half.mul(&prod).scale(&Float::with_val(prec, -2));
        let plus = ycoord.sub(&dp).abs();
        let minus = ycoord.add(&dp).abs();
        return Ok(if plus <= minus { u } else { u.neg() });
    }
    Err(Error::PrecisionExhausted("no integration ray for the elliptic logarithm".into()))
}

/// `(omega1, omega2, elog(pt))`.
pub fn periods_and_elog(
    c: &WeierstrassCurve,
    pt: &ComplexPoint,
    budget: &PrecisionBudget,
) -> Result<(BigComplex, BigComplex, BigComplex)> {
    let per = periods(c, budget)?;
    let u = elliptic_log(c, pt, &per)?;
    let rad = budget.target_abs_error * 1e-3;
    Ok((to_big(&per.omega1, rad), to_big(&per.omega2, rad), to_big(&u, rad)))
}

/// Real coordinates `(alpha, beta)` of `u = alpha omega1 + beta omega2`.
pub fn lattice_coords(u: &Complex, per: &Periods) -> (Float, Float) {
    let prec = per.prec;
    let beta = Float::with_val(prec, u.imag() / per.omega2.imag());
    let alpha = (Float::with_val(prec, u.real()) - Float::with_val(prec, &beta * per.omega2.real()))
        / per.omega1.real();
    (alpha, beta)
}

fn frac_dist(x: &Float) -> f64 {
    let r = x.clone().round();
    Float::with_val(x.prec(), x - r).to_f64().abs()
}

/// Decides whether `p1 - p2` is torsion of order at most `bound`, from the
/// lattice coordinates of its elliptic logarithm. A candidate order is
/// confirmed by the group law.
pub fn torsion_test(
    c: &WeierstrassCurve,
    p1: &ComplexPoint,
    p2: &ComplexPoint,
    bound: u64,
    budget: &PrecisionBudget,
) -> Result<TorsionResult> {
    let prec = budget.working_bits + 32;
    let group_tol = 2f64.powi(-(budget.working_bits as i32) / 2);
    for p in [p1, p2] {
        if c.complex_residual(p) > 1e-6 {
            return Err(Error::Domain("point is not on the curve".into()));
        }
    }
    let d = c.add_complex(p1, &c.neg_complex(p2), group_tol);
    if matches!(d, ComplexPoint::Infinity) {
        return Ok(TorsionResult::Torsion { order: 1 });
    }
    let per = periods(c, budget)?;
    let u = elliptic_log(c, &d, &per)?;
    let (alpha, beta) = lattice_coords(&u, &per);
    // The error of alpha, beta times the largest multiplier must stay well
    // below the acceptance window.
    let coord_err = 2f64.powi(-(budget.working_bits as i32) + 16);
    let window = 2f64.powi(-(budget.working_bits as i32) / 3);
    if coord_err * bound as f64 * 1e3 > window {
        return Err(Error::PrecisionExhausted(format!(
            "cannot separate torsion of order <= {bound} at {} bits",
            budget.working_bits
        )));
    }
    for m in 1..=bound {
        let ma = Float::with_val(prec, &alpha * m);
        let mb = Float::with_val(prec, &beta * m);
        if frac_dist(&ma) < window && frac_dist(&mb) < window {
            if matches!(c.mul_complex(&d, m, window), ComplexPoint::Infinity) {
                return Ok(TorsionResult::Torsion { order: m });
            }
            return Err(Error::Consistency(format!(
                "lattice coordinates suggest order {m} but the group law disagrees"
            )));
        }
    }
    Ok(TorsionResult::NonTorsionUpTo { bound })
}

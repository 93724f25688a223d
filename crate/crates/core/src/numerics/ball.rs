//! Midpoint-radius ("ball") arithmetic on top of MPFR.
//!
//! A [`BigReal`] is an MPFR midpoint plus an `f64` radius that is only ever
//! rounded upwards. Every operation adds the rounding error of the midpoint
//! (one ulp) to the propagated radius, so the true value always lies in
//! `[mid - rad, mid + rad]`.

use std::fmt;

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Float, Integer, Rational};

/// Relative inflation applied to every `f64` radius computation.
const INFLATE: f64 = 1.0 + 4.0 * f64::EPSILON;
/// Smallest radius increment; keeps bounds away from denormals.
const TINY: f64 = 1e-300;

#[inline]
pub(crate) fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * INFLATE + TINY
    }
}

/// Upper bound on `|x|` as an `f64`.
pub(crate) fn abs_up(x: &Float) -> f64 {
    let v = x.to_f64_round(rug::float::Round::Up).abs();
    if v.is_finite() {
        up(v)
    } else {
        f64::INFINITY
    }
}

/// Lower bound on `|x|` as an `f64`.
fn abs_down(x: &Float) -> f64 {
    let v = Float::with_val(53, x.abs_ref()).to_f64_round(rug::float::Round::Down);
    (v * (1.0 - 4.0 * f64::EPSILON) - TINY).max(0.0)
}

/// One unit in the last place of `x` at its own precision.
fn ulp(x: &Float) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.get_exp() {
        Some(e) => {
            let k = e as i64 - x.prec() as i64;
            if k < -1000 {
                TINY
            } else {
                up(2f64.powi(k as i32))
            }
        }
        None => f64::INFINITY,
    }
}

#[derive(Clone, Debug)]
pub struct BigReal {
    mid: Float,
    rad: f64,
}

impl BigReal {
    pub fn new(mid: Float, rad: f64) -> Self {
        assert!(rad >= 0.0 || rad.is_nan(), "negative radius");
        BigReal { mid, rad: if rad.is_nan() { f64::INFINITY } else { rad } }
    }

    pub fn exact(mid: Float) -> Self {
        BigReal { mid, rad: 0.0 }
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Float::new(prec))
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let mid = Float::with_val(prec, v);
        let rad = if mid == v { 0.0 } else { ulp(&mid) };
        BigReal { mid, rad }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        Self::exact(Float::with_val(prec.max(53), v))
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let mid = Float::with_val(prec, r);
        let exact = mid.to_rational().map_or(false, |q| &q == r);
        let rad = if exact { 0.0 } else { ulp(&mid) };
        BigReal { mid, rad }
    }

    pub fn from_integer(n: &Integer, prec: u32) -> Self {
        Self::from_rational(&Rational::from(n), prec)
    }

    pub fn pi(prec: u32) -> Self {
        let mid = Float::with_val(prec, Constant::Pi);
        let rad = ulp(&mid);
        BigReal { mid, rad }
    }

    pub fn euler_gamma(prec: u32) -> Self {
        let mid = Float::with_val(prec, Constant::Euler);
        let rad = ulp(&mid);
        BigReal { mid, rad }
    }

    pub fn log2(prec: u32) -> Self {
        let mid = Float::with_val(prec, Constant::Log2);
        let rad = ulp(&mid);
        BigReal { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Widen the radius by `e`.
    pub fn add_error(&self, e: f64) -> Self {
        BigReal { mid: self.mid.clone(), rad: up(self.rad + e) }
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let mid = Float::with_val(prec, &self.mid);
        let rad = up(self.rad + if prec < self.mid.prec() { ulp(&mid) } else { 0.0 });
        BigReal { mid, rad }
    }

    pub fn contains_zero(&self) -> bool {
        abs_down(&self.mid) <= self.rad
    }

    /// Certified strictly positive.
    pub fn is_positive(&self) -> bool {
        self.mid > 0 && abs_down(&self.mid) > self.rad
    }

    pub fn is_negative(&self) -> bool {
        self.mid < 0 && abs_down(&self.mid) > self.rad
    }

    /// Does the ball contain `x`?
    pub fn contains_f64(&self, x: f64) -> bool {
        let d = Float::with_val(self.prec().max(64), &self.mid - x);
        abs_down(&d) <= self.rad
    }

    pub fn contains(&self, other: &BigReal) -> bool {
        let d = Float::with_val(self.prec().max(other.prec()) + 8, &self.mid - &other.mid);
        abs_up(&d) + other.rad <= self.rad
    }

    /// Do the two balls intersect?
    pub fn overlaps(&self, other: &BigReal) -> bool {
        let d = Float::with_val(self.prec().max(other.prec()) + 8, &self.mid - &other.mid);
        abs_down(&d) <= up(self.rad + other.rad)
    }

    /// Upper bound on `|x|`.
    pub fn abs_upper(&self) -> f64 {
        up(abs_up(&self.mid) + self.rad)
    }

    /// Lower bound on `|x|` (zero if the ball contains zero).
    pub fn abs_lower(&self) -> f64 {
        (abs_down(&self.mid) - self.rad).max(0.0)
    }

    fn prec2(&self, other: &Self) -> u32 {
        self.prec().max(other.prec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mid = Float::with_val(self.prec2(other), &self.mid + &other.mid);
        let rad = up(self.rad + other.rad + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mid = Float::with_val(self.prec2(other), &self.mid - &other.mid);
        let rad = up(self.rad + other.rad + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn neg(&self) -> Self {
        BigReal { mid: Float::with_val(self.prec(), -&self.mid), rad: self.rad }
    }

    pub fn abs(&self) -> Self {
        BigReal { mid: Float::with_val(self.prec(), self.mid.abs_ref()), rad: self.rad }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mid = Float::with_val(self.prec2(other), &self.mid * &other.mid);
        let a = abs_up(&self.mid);
        let b = abs_up(&other.mid);
        let rad = up(a * other.rad + b * self.rad + self.rad * other.rad + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let mid = Float::with_val(self.prec(), &self.mid * k);
        let rad = up(self.rad * (k.unsigned_abs() as f64) + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&BigReal::from_rational(q, self.prec()))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0);
        let mid = Float::with_val(self.prec(), &self.mid / k);
        let rad = up(self.rad / (k.unsigned_abs() as f64) + ulp(&mid));
        BigReal { mid, rad }
    }

    /// Division; the radius becomes infinite when the divisor ball meets 0.
    pub fn div(&self, other: &Self) -> Self {
        let mid = Float::with_val(self.prec2(other), &self.mid / &other.mid);
        let lo = abs_down(&other.mid) - other.rad;
        if lo <= 0.0 {
            return BigReal { mid, rad: f64::INFINITY };
        }
        let q = abs_up(&mid);
        let rad = up((self.rad + q * other.rad) / (lo * (1.0 - 4.0 * f64::EPSILON)) + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn recip(&self) -> Self {
        BigReal::from_i64(1, self.prec()).div(self)
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        let lo = abs_down(&self.mid) * if self.mid < 0 { -1.0 } else { 1.0 } - self.rad;
        if lo <= 0.0 {
            // Ball meets the branch point: enclose [0, sqrt(hi)].
            let hi = Float::with_val(prec, &self.mid + self.rad);
            if hi <= 0 {
                return BigReal { mid: Float::new(prec), rad: 0.0 };
            }
            let s = Float::with_val(prec, hi.sqrt_ref());
            let half = Float::with_val(prec, &s / 2u32);
            let rad = up(abs_up(&half) + ulp(&half) * 2.0);
            return BigReal { mid: half, rad };
        }
        let mid = Float::with_val(prec, self.mid.sqrt_ref());
        let rad = up(self.rad / (lo.sqrt() * (1.0 - 4.0 * f64::EPSILON)) + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn exp(&self) -> Self {
        let mid = Float::with_val(self.prec(), self.mid.exp_ref());
        let rad = up(abs_up(&mid) * self.rad.exp_m1() + ulp(&mid));
        BigReal { mid, rad }
    }

    /// Natural log; infinite radius if the ball is not certified positive.
    pub fn ln(&self) -> Self {
        let mid = Float::with_val(self.prec(), self.mid.ln_ref());
        if !self.is_positive() {
            return BigReal { mid, rad: f64::INFINITY };
        }
        let lo = abs_down(&self.mid) - self.rad;
        let rad = up(self.rad / lo + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn sin(&self) -> Self {
        let mid = Float::with_val(self.prec(), self.mid.sin_ref());
        let rad = up(self.rad.min(2.0) + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn cos(&self) -> Self {
        let mid = Float::with_val(self.prec(), self.mid.cos_ref());
        let rad = up(self.rad.min(2.0) + ulp(&mid));
        BigReal { mid, rad }
    }

    pub fn atan(&self) -> Self {
        let mid = Float::with_val(self.prec(), self.mid.atan_ref());
        let rad = up(self.rad + ulp(&mid));
        BigReal { mid, rad }
    }

    /// `atan2(self, x)`, i.e. the argument of `x + i*self`.
    pub fn atan2(&self, x: &Self) -> Self {
        let prec = self.prec2(x);
        let mid = Float::with_val(prec, self.mid.atan2_ref(&x.mid));
        let r = Float::with_val(53, self.mid.hypot_ref(&x.mid)).to_f64() * (1.0 - 1e-12);
        let s = self.rad + x.rad;
        let rad = if r > 2.0 * s { up(s / (r - s) + ulp(&mid)) } else { std::f64::consts::PI * 2.0 };
        BigReal { mid, rad }
    }

    /// Integer power.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = BigReal::from_i64(1, self.prec());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// `self^y` for a certified positive base.
    pub fn pow(&self, y: &Self) -> Self {
        self.ln().mul(y).exp()
    }

    /// Smallest ball containing both.
    pub fn hull(&self, other: &Self) -> Self {
        let prec = self.prec2(other);
        let lo_a = Float::with_val(prec + 8, &self.mid - self.rad);
        let lo_b = Float::with_val(prec + 8, &other.mid - other.rad);
        let hi_a = Float::with_val(prec + 8, &self.mid + self.rad);
        let hi_b = Float::with_val(prec + 8, &other.mid + other.rad);
        let lo = if lo_a < lo_b { lo_a } else { lo_b };
        let hi = if hi_a > hi_b { hi_a } else { hi_b };
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let half = Float::with_val(prec, &hi - &lo) / 2u32;
        let rad = up(abs_up(&half) + ulp(&mid) * 2.0);
        BigReal { mid, rad }
    }

    /// Distance between midpoints, as `f64`.
    pub fn dist_f64(&self, other: &Self) -> f64 {
        Float::with_val(self.prec2(other), &self.mid - &other.mid).to_f64().abs()
    }

    /// `value ± bound` with `digits` significant digits.
    pub fn display(&self, digits: usize) -> String {
        format!("{} ± {:.2e}", fmt_float(&self.mid, digits), self.rad)
    }
}

/// Fixed-point or scientific decimal rendering of an MPFR value.
pub fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    // MPFR gives e.g. "1.2345e-1"; prefer plain notation for moderate exponents.
    if let Some((mant, exp)) = s.split_once('e') {
        let e: i64 = exp.parse().unwrap_or(0);
        if (-6..=6).contains(&e) {
            let neg = mant.starts_with('-');
            let m = mant.trim_start_matches('-').replace('.', "");
            let mut out = String::new();
            if neg {
                out.push('-');
            }
            if e < 0 {
                out.push_str("0.");
                for _ in 0..(-e - 1) {
                    out.push('0');
                }
                out.push_str(&m);
            } else {
                let e = e as usize;
                let (a, b) = if m.len() > e + 1 { m.split_at(e + 1) } else { (m.as_str(), "") };
                out.push_str(a);
                for _ in a.len()..e + 1 {
                    out.push('0');
                }
                if !b.is_empty() {
                    out.push('.');
                    out.push_str(b);
                }
            }
            return out;
        }
    }
    s
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(self.meaningful_digits().min(60));
        write!(f, "{}", self.display(digits))
    }
}

impl BigReal {
    /// Digits worth printing: those covered by the working precision and
    /// not swamped by the radius.
    pub fn meaningful_digits(&self) -> usize {
        let by_prec = (self.prec() as f64 / 3.33).floor();
        let mag = self.mid.to_f64().abs().max(1e-300).log10().floor();
        let by_rad = if self.rad > 0.0 { mag - self.rad.log10() + 2.0 } else { by_prec };
        by_prec.min(by_rad).clamp(1.0, 1000.0) as usize
    }
}

impl serde::Serialize for BigReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BigReal", 2)?;
        st.serialize_field("value", &fmt_float(&self.mid, self.meaningful_digits()))?;
        st.serialize_field("radius", &self.rad)?;
        st.end()
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.mid == other.mid && self.rad == other.rad
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex { re: BigReal::zero(prec), im: BigReal::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        BigComplex { re: BigReal::from_i64(1, prec), im: BigReal::zero(prec) }
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.prec();
        BigComplex { re, im: BigReal::zero(p) }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Self::from_real(BigReal::from_rational(q, prec))
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        BigComplex { re: BigReal::exact(re), im: BigReal::exact(im) }
    }

    pub fn from_c64(z: Complex64, prec: u32) -> Self {
        BigComplex { re: BigReal::from_f64(z.re, prec), im: BigReal::from_f64(z.im, prec) }
    }

    /// `e^{2 pi i theta}`.
    pub fn unit(theta: &BigReal) -> Self {
        let a = BigReal::pi(theta.prec()).mul_i64(2).mul(theta);
        BigComplex { re: a.cos(), im: a.sin() }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Radius of a disc (in the max norm, inflated to Euclidean) containing
    /// the value.
    pub fn rad(&self) -> f64 {
        up((self.re.rad * self.re.rad + self.im.rad * self.im.rad).sqrt())
    }

    pub fn add_error(&self, e: f64) -> Self {
        BigComplex { re: self.re.add_error(e), im: self.im.add_error(e) }
    }

    pub fn add(&self, o: &Self) -> Self {
        BigComplex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigComplex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        BigComplex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        BigComplex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, r: &BigReal) -> Self {
        BigComplex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        BigComplex { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn norm_sqr(&self) -> BigReal {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> BigReal {
        self.norm_sqr().sqrt()
    }

    pub fn div(&self, o: &Self) -> Self {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        BigComplex { re: n.re.div(&d), im: n.im.div(&d) }
    }

    pub fn recip(&self) -> Self {
        BigComplex::one(self.prec()).div(self)
    }

    /// `log|z|`.
    pub fn ln_abs(&self) -> BigReal {
        self.norm_sqr().ln().div_i64(2)
    }

    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = BigComplex::one(self.prec());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer power, negative exponents allowed.
    pub fn powi_signed(&self, n: i64) -> Self {
        if n >= 0 {
            self.powi(n as u32)
        } else {
            self.recip().powi((-n) as u32)
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Upper bound on `|z|`.
    pub fn abs_upper(&self) -> f64 {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        up((a * a + b * b).sqrt())
    }

    pub fn abs_lower(&self) -> f64 {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        ((a * a + b * b).sqrt() * (1.0 - 4.0 * f64::EPSILON)).max(0.0)
    }

    pub fn display(&self, digits: usize) -> String {
        let im = &self.im;
        let sign = if im.mid() < &0 { "-" } else { "+" };
        format!(
            "{} {} {}i ± {:.2e}",
            fmt_float(self.re.mid(), digits),
            sign,
            fmt_float(&Float::with_val(im.prec(), im.mid().abs_ref()), digits),
            self.rad()
        )
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(f.precision().unwrap_or(20)))
    }
}

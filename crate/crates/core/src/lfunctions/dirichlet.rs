use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use super::hurwitz::{derivative, hurwitz_zeta, pi, riemann_zeta};
use crate::error::{Error, Result};
use crate::numerics::{BigComplex, BigReal, PrecisionBudget};

/// A Dirichlet character in Conrey labelling `modulus:index`.
/// Values are stored exactly as angles `r` in `[0, 1)`, meaning `exp(2 pi i r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub index: u64,
    values: Vec<Option<Rational>>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Least primitive root mod `p^2` (a primitive root mod every `p^e`).
fn primitive_root(p: u64) -> u64 {
    let m = p * p;
    let phi = p * (p - 1);
    let mut qs: Vec<u64> = factor(p - 1).into_iter().map(|(q, _)| q).collect();
    qs.push(p);
    (2..m).find(|&g| g % p != 0 && qs.iter().all(|&q| pow_mod(g, phi / q, m) != 1)).expect("primitive root")
}

/// Discrete log of `a` to base `g` mod `m` (`a` a unit), by table.
fn dlog_table(g: u64, m: u64, order: u64) -> Vec<u64> {
    let mut t = vec![u64::MAX; m as usize];
    let mut x = 1 % m;
    for k in 0..order {
        t[x as usize] = k;
        x = x * g % m;
    }
    t
}

fn frac(num: i128, den: u64) -> Rational {
    let d = den as i128;
    Rational::from((Integer::from(num.rem_euclid(d)), Integer::from(den)))
}

/// Angles of `chi_{q}(n, .)` on residues mod `q = p^e`.
fn prime_power_angles(p: u64, e: u32, n: u64) -> Vec<Option<Rational>> {
    let q = p.pow(e);
    let mut out = vec![None; q as usize];
    if p == 2 {
        match e {
            1 => out[1] = Some(Rational::new()),
            2 => {
                out[1] = Some(Rational::new());
                out[3] = Some(if n % 4 == 3 { Rational::from((1, 2)) } else { Rational::new() });
            }
            _ => {
                let order = q / 4;
                let t = dlog_table(5, q, order);
                let split = |a: u64| if a % 4 == 1 { (0i128, t[a as usize]) } else { (1, t[(q - a) as usize]) };
                let (en, an) = split(n % q);
                for a in (1..q).step_by(2) {
                    let (ea, aa) = split(a);
                    let num = en * ea * (order as i128) / 2 + (an as i128) * (aa as i128);
                    out[a as usize] = Some(frac(num, order));
                }
            }
        }
        return out;
    }
    let phi = q / p * (p - 1);
    let g = primitive_root(p);
    let t = dlog_table(g % q, q, phi);
    let ln = t[(n % q) as usize] as i128;
    for a in 1..q {
        if a % p != 0 {
            out[a as usize] = Some(frac(ln * t[a as usize] as i128, phi));
        }
    }
    out
}

impl DirichletCharacter {
    /// The Conrey character `chi_m(n, .)`.
    pub fn conrey(modulus: u64, index: u64) -> Result<Self> {
        if modulus == 0 || modulus > 100_000 {
            return Err(Error::Domain(format!("modulus {modulus} out of range 1..=100000")));
        }
        if gcd(index % modulus, modulus) != 1 && modulus != 1 {
            return Err(Error::Domain(format!("Conrey index {index} is not a unit mod {modulus}")));
        }
        let mut values: Vec<Option<Rational>> = (0..modulus).map(|a| (gcd(a, modulus) == 1).then(Rational::new)).collect();
        for (p, e) in factor(modulus) {
            let q = p.pow(e);
            let local = prime_power_angles(p, e, index % q);
            for (a, v) in values.iter_mut().enumerate() {
                if let Some(v) = v {
                    let r = local[a % q as usize].as_ref().expect("unit residue");
                    *v += r;
                    if *v >= 1 {
                        *v -= 1;
                    }
                }
            }
        }
        Ok(DirichletCharacter { modulus, index: index % modulus.max(1), values })
    }

    /// Parses `"m:n"`.
    pub fn parse(label: &str) -> Result<Self> {
        let (m, n) = label
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("character label {label:?} is not of the form m:n")))?;
        let m: u64 = m.trim().parse().map_err(|_| Error::Parse(format!("bad modulus in {label:?}")))?;
        let n: u64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad index in {label:?}")))?;
        Self::conrey(m, n)
    }

    /// The angle of `chi(a)`, or `None` when `gcd(a, m) > 1`.
    pub fn angle(&self, a: i64) -> Option<&Rational> {
        self.values[a.rem_euclid(self.modulus as i64) as usize].as_ref()
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().flatten().all(|v| *v == 0)
    }

    /// `chi(-1)` as `+1` or `-1`.
    pub fn parity(&self) -> i32 {
        if self.angle(-1).is_some_and(|v| *v == 0) {
            1
        } else {
            -1
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().flatten().all(|v| *v == 0 || *v == Rational::from((1, 2)))
    }

    /// Smallest `d | m` such that `chi` is trivial on units `a = 1 mod d`.
    pub fn conductor(&self) -> u64 {
        let m = self.modulus;
        (1..=m)
            .filter(|d| m % d == 0)
            .find(|&d| (1..m).step_by(d as usize).all(|a| self.angle(a as i64).is_none_or(|v| *v == 0)))
            .unwrap_or(m)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Result<Self> {
        let f = self.conductor();
        if f == self.modulus {
            return Ok(self.clone());
        }
        for n in 1..f.max(2) {
            if gcd(n, f) != 1 && f != 1 {
                continue;
            }
            let cand = Self::conrey(f, n)?;
            let agrees = (0..self.modulus as i64).all(|a| match self.angle(a) {
                Some(v) => cand.angle(a) == Some(v),
                None => true,
            });
            if agrees {
                return Ok(cand);
            }
        }
        Err(Error::Consistency(format!("no primitive character mod {f} induces {self}")))
    }

    pub fn conjugate(&self) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| v.as_ref().map(|r| if *r == 0 { r.clone() } else { Rational::from(1 - r) }))
            .collect();
        let m = self.modulus;
        let index = (1..m.max(2)).find(|&n| self.index * n % m == 1 % m).unwrap_or(self.index);
        DirichletCharacter { modulus: m, index, values }
    }

    /// `chi(a)` as a complex number.
    pub fn value(&self, a: i64, prec: u32) -> (Float, Float) {
        match self.angle(a) {
            None => (Float::new(prec), Float::new(prec)),
            Some(r) => cis(r, prec),
        }
    }

    /// `tau(chi) = sum chi(a) exp(2 pi i a / m)`.
    pub fn gauss_sum(&self, prec: u32) -> (Float, Float) {
        let (mut re, mut im) = (Float::new(prec), Float::new(prec));
        for a in 0..self.modulus {
            if let Some(r) = self.angle(a as i64) {
                let angle = Rational::from(r + Rational::from((a as i64, self.modulus as i64)));
                let (c, s) = cis(&angle, prec);
                re += c;
                im += s;
            }
        }
        (re, im)
    }
}

fn cis(r: &Rational, prec: u32) -> (Float, Float) {
    let t = Float::with_val(prec, r.numer()) / Float::with_val(prec, r.denom()) * pi(prec) * 2u32;
    let (s, c) = t.sin_cos(Float::new(prec));
    (c, s)
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.modulus, self.index)
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Odd primitive characters of conductor `f`.
pub fn odd_primitive_characters(f: u64) -> Vec<DirichletCharacter> {
    let mut out: Vec<DirichletCharacter> = Vec::new();
    for n in 1..f.max(2) {
        if gcd(n, f) != 1 {
            continue;
        }
        let chi = match DirichletCharacter::conrey(f, n) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if chi.parity() == -1 && chi.is_primitive() {
            out.push(chi);
        }
    }
    out
}

fn to_big(x: Float, rad: f64) -> BigReal {
    BigReal::new(x, rad)
}

/// `L(chi, s) = m^-s sum_a chi(a) zeta(s, a/m)` at `prec` bits.
fn l_value_prec(chi: &DirichletCharacter, s: &Float, prec: u32) -> (Float, Float) {
    let m = chi.modulus;
    let (mut re, mut im) = (Float::new(prec), Float::new(prec));
    for a in 1..=m {
        if chi.angle(a as i64).is_none() {
            continue;
        }
        let x = Float::with_val(prec, a) / Float::with_val(prec, m);
        let z = hurwitz_zeta(s, &x, prec);
        let (c, sn) = chi.value(a as i64, prec);
        re += Float::with_val(prec, &z * &c);
        im += z * sn;
    }
    let scale = (-Float::with_val(prec, s * Float::with_val(prec, m).ln())).exp();
    (re * &scale, im * scale)
}

/// `L(chi, s)` for real `s != 1`.
pub fn dirichlet_l(chi: &DirichletCharacter, s: &Float, budget: &PrecisionBudget) -> Result<BigComplex> {
    if *s == 1 && chi.is_trivial() {
        return Err(Error::Domain("pole of L(chi, s) at s = 1 for the trivial character".into()));
    }
    let prec = budget.working_bits + 32;
    let (re, im) = l_value_prec(chi, s, prec);
    let rad = 2f64.powi(-(budget.working_bits as i32)) * (1.0 + re.to_f64().abs() + im.to_f64().abs());
    Ok(BigComplex::new(to_big(re, rad), to_big(im, rad)))
}

/// Route through the functional equation: for odd primitive `chi` of
/// conductor `f`, `L'(chi, -1) = f tau(chi) L(2, conj chi) / (4 pi i)`.
fn lprime_minus1_functional(chi: &DirichletCharacter, prec: u32) -> (Float, Float) {
    let f = chi.modulus;
    let (tr, ti) = chi.gauss_sum(prec);
    let (lr, li) = l_value_prec(&chi.conjugate(), &Float::with_val(prec, 2), prec);
    // tau / i = ti - i tr
    let (ar, ai) = (ti, -tr);
    let pr = Float::with_val(prec, &ar * &lr) - Float::with_val(prec, &ai * &li);
    let pi_ = Float::with_val(prec, &ar * &li) + Float::with_val(prec, &ai * &lr);
    let k = Float::with_val(prec, f) / (pi(prec) * 4u32);
    (pr * &k, pi_ * k)
}

/// Route through numerical differentiation of the continued `L(chi, s)`.
fn lprime_minus1_numeric(chi: &DirichletCharacter, prec: u32) -> (Float, Float) {
    let hp = 2 * prec;
    let s = Float::with_val(hp, -1);
    let h = Float::with_val(hp, 2).pow((prec as i32) / -4);
    let re = derivative(|t| l_value_prec(chi, t, hp).0, &s, &h);
    let im = derivative(|t| l_value_prec(chi, t, hp).1, &s, &h);
    (Float::with_val(prec, re), Float::with_val(prec, im))
}

/// Both routes to `L'(chi, -1)`, for a primitive odd nontrivial character.
/// The routes must agree to the target error; the result carries their
/// difference as part of its radius.
pub fn dirichlet_lprime_minus1_complex(chi: &DirichletCharacter, budget: &PrecisionBudget) -> Result<BigComplex> {
    if chi.is_trivial() {
        return Err(Error::Domain("L'(chi, -1) requires a nontrivial character".into()));
    }
    if !chi.is_primitive() {
        return Err(Error::Domain(format!(
            "character {chi} is not primitive (conductor {}); use its primitive version",
            chi.conductor()
        )));
    }
    if chi.parity() == 1 {
        return Err(Error::Domain(format!("character {chi} is even; only odd characters are supported")));
    }
    let prec = budget.working_bits + 32;
    let (ar, ai) = lprime_minus1_functional(chi, prec);
    let (br, bi) = lprime_minus1_numeric(chi, prec);
    let diff = Float::with_val(prec, &ar - &br).to_f64().abs().max(Float::with_val(prec, &ai - &bi).to_f64().abs());
    if diff > budget.target_abs_error {
        return Err(Error::Consistency(format!(
            "L'({chi}, -1): functional-equation and derivative routes differ by {diff:.3e}"
        )));
    }
    let rad = diff + 2f64.powi(-(budget.working_bits as i32));
    Ok(BigComplex::new(to_big(ar, rad), to_big(ai, rad)))
}

/// `L'(chi, -1)` for a real (quadratic) odd primitive character.
pub fn dirichlet_lprime_minus1(chi: &DirichletCharacter, budget: &PrecisionBudget) -> Result<BigReal> {
    let v = dirichlet_lprime_minus1_complex(chi, budget)?;
    if !v.im.contains_zero() {
        return Err(Error::Domain(format!(
            "L'({chi}, -1) is not real; use the complex variant for non-real characters"
        )));
    }
    Ok(v.re)
}

/// `zeta'(-2)`, from `-zeta(3)/(4 pi^2)` and from direct differentiation.
pub fn zeta_prime_minus2(budget: &PrecisionBudget) -> Result<BigReal> {
    let prec = budget.working_bits + 32;
    let z3 = riemann_zeta(&Float::with_val(prec, 3), prec);
    let a = -z3 / (Float::with_val(prec, pi(prec).square_ref()) * 4u32);
    let hp = 2 * prec;
    let h = Float::with_val(hp, 2).pow((prec as i32) / -4);
    let b = derivative(|t| riemann_zeta(t, hp), &Float::with_val(hp, -2), &h);
    let diff = Float::with_val(prec, &a - &b).to_f64().abs();
    if diff > budget.target_abs_error {
        return Err(Error::Consistency(format!("zeta'(-2) routes differ by {diff:.3e}")));
    }
    Ok(to_big(a, diff + 2f64.powi(-(budget.working_bits as i32))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_characters() {
        let c3 = DirichletCharacter::conrey(3, 2).unwrap();
        assert_eq!(c3.parity(), -1);
        assert!(c3.is_primitive() && c3.is_real());
        let c4 = DirichletCharacter::conrey(4, 3).unwrap();
        assert_eq!(c4.parity(), -1);
        assert_eq!(c4.conductor(), 4);
        let c8 = DirichletCharacter::conrey(8, 3).unwrap();
        assert_eq!(c8.parity(), -1);
        assert!(c8.is_primitive());
        let c87 = DirichletCharacter::conrey(8, 7).unwrap();
        assert_eq!(c87.conductor(), 4);
        assert_eq!(c87.primitive().unwrap(), c4);
        assert!(DirichletCharacter::conrey(12, 1).unwrap().is_trivial());
        assert!(DirichletCharacter::conrey(6, 3).is_err());
    }

    #[test]
    fn characters_are_multiplicative() {
        for (m, n) in [(7, 3), (9, 2), (16, 5), (15, 7), (8, 5)] {
            let chi = DirichletCharacter::conrey(m, n).unwrap();
            for a in 0..m as i64 {
                for b in 0..m as i64 {
                    let ab = chi.angle(a * b).cloned();
                    let prod = match (chi.angle(a), chi.angle(b)) {
                        (Some(x), Some(y)) => {
                            let mut s = Rational::from(x + y);
                            if s >= 1 {
                                s -= 1;
                            }
                            Some(s)
                        }
                        _ => None,
                    };
                    assert_eq!(ab, prod, "chi = {m}:{n}, a = {a}, b = {b}");
                }
            }
        }
    }

    #[test]
    fn l_at_one_for_chi3() {
        // L(1, chi_-3) = pi / (3 sqrt 3)
        let chi = DirichletCharacter::conrey(3, 2).unwrap();
        let b = PrecisionBudget::from_digits(30);
        let v = dirichlet_l(&chi, &Float::with_val(200, 1), &b).unwrap();
        let want = pi(200) / (Float::with_val(200, 3).sqrt() * 3u32);
        assert!(Float::with_val(200, v.re.mid() - want).abs() < 1e-30);
    }

    #[test]
    fn lprime_chi3() {
        let chi = DirichletCharacter::conrey(3, 2).unwrap();
        let v = dirichlet_lprime_minus1(&chi, &PrecisionBudget::from_digits(35)).unwrap();
        let want = Float::with_val(300, Float::parse("0.3230659472194505140936365107238063940722").unwrap());
        assert!(Float::with_val(300, v.mid() - want).abs() < 1e-34);
    }

    #[test]
    fn zeta_prime() {
        let v = zeta_prime_minus2(&PrecisionBudget::from_digits(30)).unwrap();
        assert!((v.to_f64() + 0.030448457058393270780).abs() < 1e-15);
    }
}

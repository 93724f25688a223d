use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

/// Dense univariate polynomial over the rationals, lowest degree first.
///
/// The coefficient vector is always trimmed, so the zero polynomial is the
/// empty vector and every other polynomial has a nonzero last entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UniPoly {
    #[serde(with = "crate::poly::serde_rational_vec")]
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| *c == 0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::new(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `t - a`.
    pub fn linear_root(a: Rational) -> Self {
        Self::new(vec![-a, Rational::from(1)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = -1`.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Multiplicity of `t` as a factor.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| **c == 0).count()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::new(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Divide by `t^k`, dropping lower terms.
    pub fn unshift(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::new(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = Rational::from(&r[k + dd] / &lead);
            if c != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= Rational::from(&c * dc);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.leading();
        Self::new(self.coeffs.iter().map(|c| Rational::from(c / &l)).collect())
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * i as u64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// `t^n * self(1/t)`; requires `n >= deg`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut coeffs = vec![Rational::new(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            assert!(i <= n, "reversal degree below polynomial degree");
            coeffs[n - i] = c.clone();
        }
        Self::new(coeffs)
    }

    /// `self(c * t)`.
    pub fn scale_var(&self, c: &Rational) -> Self {
        let mut pw = Rational::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(Rational::from(a * &pw));
            pw *= c;
        }
        Self::new(out)
    }

    /// Composition `self(other(t))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Rational `c` with `self / c` a primitive integer polynomial whose
    /// leading coefficient is positive. The sign of `c` follows the leading
    /// coefficient.
    pub fn content(&self) -> Rational {
        if self.is_zero() {
            return Rational::new();
        }
        let mut num = Integer::new();
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            num.gcd_mut(c.numer());
            den.lcm_mut(c.denom());
        }
        let mut content = Rational::from((num, den));
        if self.leading() < 0 {
            content = -content;
        }
        content
    }

    /// `self / content`: integer coefficients, gcd 1, positive leading term.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let c = self.content();
        Self::new(self.coeffs.iter().map(|a| Rational::from(a / &c)).collect())
    }

    /// Squarefree factorisation (Yun): `self = c * prod f_i^i` with the
    /// returned `f_i` monic and pairwise coprime. Index 0 of the result is
    /// multiplicity 1.
    pub fn squarefree_factors(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = Self::gcd(&f, &fp);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = fp.div_exact(&a0).expect("gcd divides derivative");
        let mut d = c.sub(&b.derivative());
        loop {
            let a = Self::gcd(&b, &d);
            out.push(a.clone());
            b = b.div_exact(&a).expect("gcd divides");
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_exact(&a).expect("gcd divides");
            d = c.sub(&b.derivative());
        }
        while out.last().map_or(false, |p| p.degree() == Some(0)) {
            out.pop();
        }
        out
    }

    /// Product of the distinct monic irreducible factors' squarefree part.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return Self::one();
        }
        let g = Self::gcd(self, &self.derivative());
        self.div_exact(&g).expect("gcd divides").monic()
    }

    /// Multiplicity of the factor `d` in `self` (d non-constant).
    pub fn multiplicity_of(&self, d: &Self) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let mut k = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.div_exact(d) {
            cur = q;
            k += 1;
        }
        k
    }

    /// Discriminant via the resultant with the derivative.
    pub fn discriminant(&self) -> Rational {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return Rational::new(),
        };
        let r = resultant(self, &self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        r * Rational::from(sign) / self.leading()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Pretty form in variable `var`, highest degree first.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                s.push_str(&abs.to_string());
            } else if abs == 1 {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{abs}*{mono}"));
            }
        }
        s
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("t"))
    }
}

/// Resultant of two univariate polynomials over Q (Sylvester determinant
/// via Euclid's algorithm).
pub fn resultant(a: &UniPoly, b: &UniPoly) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::new();
    }
    let mut f = a.clone();
    let mut g = b.clone();
    let mut res = Rational::from(1);
    loop {
        let df = f.degree().unwrap();
        let dg = g.degree().unwrap();
        if dg == 0 {
            let lg = g.leading();
            let mut p = Rational::from(1);
            for _ in 0..df {
                p *= &lg;
            }
            return res * p;
        }
        let (_, r) = f.div_rem(&g);
        if r.is_zero() {
            return Rational::new();
        }
        let dr = r.degree().unwrap();
        if (df * dg) % 2 == 1 {
            res = -res;
        }
        let lg = g.leading();
        for _ in 0..(df - dr) {
            res *= &lg;
        }
        f = g;
        g = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let a = UniPoly::from_ints(&[-1, 0, 1]); // t^2 - 1
        let b = UniPoly::from_ints(&[1, 1]); // t + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, UniPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        let g = UniPoly::gcd(&a, &UniPoly::from_ints(&[1, 2, 1]));
        assert_eq!(g, b);
    }

    #[test]
    fn yun_factorisation() {
        // (t-1)^2 (t+2)
        let f = UniPoly::from_ints(&[-1, 1]).pow(2).mul(&UniPoly::from_ints(&[2, 1]));
        let sf = f.squarefree_factors();
        assert_eq!(sf.len(), 2);
        assert_eq!(sf[0], UniPoly::from_ints(&[2, 1]));
        assert_eq!(sf[1], UniPoly::from_ints(&[-1, 1]));
        assert_eq!(f.squarefree_part(), UniPoly::from_ints(&[-2, 1, 1]));
    }

    #[test]
    fn resultant_matches_root_product() {
        // Res(t^2 - 2, t - 3) = (3^2 - 2) up to sign convention: prod a(beta)
        let a = UniPoly::from_ints(&[-2, 0, 1]);
        let b = UniPoly::from_ints(&[-3, 1]);
        assert_eq!(resultant(&a, &b).abs(), Rational::from(7));
        assert_eq!(UniPoly::from_ints(&[1, 0, 1]).discriminant(), Rational::from(-4));
        assert_eq!(UniPoly::from_ints(&[0, -1, 0, 1]).discriminant(), Rational::from(4));
    }

    #[test]
    fn content_and_primitive_part() {
        let p = UniPoly::new(vec![Rational::from((2, 3)), Rational::from((-4, 3))]);
        assert_eq!(p.content(), Rational::from((-2, 3)));
        assert_eq!(p.primitive_part(), UniPoly::from_ints(&[-1, 2]));
    }

    #[test]
    fn display() {
        assert_eq!(UniPoly::from_ints(&[2, 1]).to_string(), "t + 2");
        assert_eq!(UniPoly::from_ints(&[1, 0, -3]).to_string(), "-3*t^2 + 1");
    }
}

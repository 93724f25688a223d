//! Hurwitz zeta by Euler-Maclaurin summation, for real `s`.

use std::sync::Mutex;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

static BERNOULLI: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// `B_0 .. B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut cache = BERNOULLI.lock().expect("bernoulli cache");
    if cache.is_empty() {
        cache.push(Rational::from(1));
    }
    while cache.len() <= n {
        let m = cache.len();
        // sum_{k<m} C(m+1, k) B_k + (m+1) B_m = 0
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, b) in cache.iter().enumerate() {
            acc += Rational::from(b * &binom);
            binom = binom * (m + 1 - k) as u32 / (k + 1) as u32;
        }
        cache.push(-acc / (m as u32 + 1));
    }
    cache[..=n].to_vec()
}

fn to_float(q: &Rational, prec: u32) -> Float {
    Float::with_val(prec, q.numer()) / Float::with_val(prec, q.denom())
}

/// `x^(-s)` for `x > 0`.
fn pow_neg(x: &Float, s: &Float) -> Float {
    let prec = x.prec();
    (-Float::with_val(prec, s * Float::with_val(prec, x.ln_ref()))).exp()
}

/// `zeta(s, a)` for real `s` and `a > 0`, working at `prec` bits.
/// At `s = 1` the constant term `-psi(a)` of the Laurent expansion is
/// returned, so sums over a nontrivial character stay correct there.
/// The error is below `2^-prec` times the magnitude of the largest term.
pub fn hurwitz_zeta(s: &Float, a: &Float, prec: u32) -> Float {
    let s = Float::with_val(prec, s);
    let a = Float::with_val(prec, a);
    let sabs = s.to_f64().abs();
    let n = (prec as f64 * 0.35 + sabs * 2.0 + 10.0) as u32;
    let mut sum = Float::new(prec);
    for k in 0..n {
        sum += pow_neg(&Float::with_val(prec, &a + k), &s);
    }
    let x = Float::with_val(prec, &a + n);
    let x_s = pow_neg(&x, &s);
    // (N+a)^(1-s)/(s-1) + (N+a)^(-s)/2
    if s == 1 {
        sum -= Float::with_val(prec, x.ln_ref());
    } else {
        sum += Float::with_val(prec, &x_s * &x) / Float::with_val(prec, &s - 1u32);
    }
    sum += Float::with_val(prec, &x_s / 2u32);
    let eps = Float::with_val(prec, 2).pow(-(prec as i32) - 8);
    let x2 = Float::with_val(prec, x.square_ref());
    let mut rising = s.clone();
    let mut xpow = Float::with_val(prec, &x_s / &x);
    let mut fact = Integer::from(2);
    let max_j = prec as usize / 2 + 20;
    let bern = bernoulli_numbers(2 * max_j);
    for j in 1..=max_j {
        let b = to_float(&bern[2 * j], prec);
        let term = b * &rising * &xpow / Float::with_val(prec, &fact);
        let small = Float::with_val(prec, term.abs_ref()) < Float::with_val(prec, &eps * Float::with_val(prec, sum.abs_ref()).max(&Float::with_val(prec, 1)));
        sum += &term;
        if rising.is_zero() || small {
            break;
        }
        rising *= Float::with_val(prec, &s + (2 * j - 1) as u32);
        rising *= Float::with_val(prec, &s + (2 * j) as u32);
        xpow /= &x2;
        fact *= (2 * j + 1) as u32;
        fact *= (2 * j + 2) as u32;
    }
    sum
}

/// `zeta(s)`.
pub fn riemann_zeta(s: &Float, prec: u32) -> Float {
    hurwitz_zeta(s, &Float::with_val(prec, 1), prec)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Central difference with one Richardson step: error `O(h^4)`.
pub fn derivative<F: Fn(&Float) -> Float>(f: F, s: &Float, h: &Float) -> Float {
    let prec = s.prec();
    let d = |h: &Float| {
        let up = f(&Float::with_val(prec, s + h));
        let dn = f(&Float::with_val(prec, s - h));
        (up - dn) / Float::with_val(prec, 2 * h.clone())
    };
    let h2 = Float::with_val(prec, h / 2u32);
    let d1 = d(h);
    let d2 = d(&h2);
    (Float::with_val(prec, 4 * d2) - d1) / 3u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[12], Rational::from((-691, 2730)));
        assert_eq!(b[7], 0);
    }

    #[test]
    fn zeta_values() {
        let prec = 200;
        let z2 = riemann_zeta(&Float::with_val(prec, 2), prec);
        let pi2 = Float::with_val(prec, pi(prec).square_ref()) / 6u32;
        assert!(Float::with_val(prec, &z2 - &pi2).abs() < 1e-55);
        let zm1 = riemann_zeta(&Float::with_val(prec, -1), prec);
        assert!(Float::with_val(prec, zm1 + Float::with_val(prec, 1) / 12u32).abs() < 1e-55);
        let zm2 = riemann_zeta(&Float::with_val(prec, -2), prec);
        assert!(zm2.abs() < 1e-50);
        // zeta(1/2, 1/2) = (sqrt 2 - 1) zeta(1/2)
        let h = Float::with_val(prec, 0.5);
        let lhs = hurwitz_zeta(&h, &h, prec);
        let rhs = (Float::with_val(prec, 2).sqrt() - 1u32) * riemann_zeta(&h, prec);
        assert!(Float::with_val(prec, lhs - rhs).abs() < 1e-50);
        // constant term at s = 1 is -psi(1) = gamma
        let g = hurwitz_zeta(&Float::with_val(prec, 1), &Float::with_val(prec, 1), prec);
        assert!((g.to_f64() - 0.5772156649015329).abs() < 1e-15);
    }
}

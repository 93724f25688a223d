use rug::Rational;
use serde::Serialize;

use super::UniPoly;

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> UniPoly {
    assert!(n >= 1);
    let mut p = UniPoly::monomial(Rational::from(1), n as usize).sub(&UniPoly::one());
    for d in 1..n {
        if n % d == 0 {
            p = p.div_exact(&cyclotomic_poly(d)).expect("Phi_d divides t^n - 1");
        }
    }
    p
}

/// Exact decomposition `q = c * t^m * prod Phi_d^e_d * residual`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclotomicFactorization {
    /// True iff `residual` is `1`.
    pub is_product: bool,
    /// Power of `t` removed first.
    pub monomial_power: usize,
    /// Content of the input (positive-leading normalisation); `±1` for the
    /// primitive integer polynomials met in practice.
    #[serde(serialize_with = "ser_rational")]
    pub content: Rational,
    /// `(d, e)` pairs, increasing in `d`.
    pub factors: Vec<(u64, u32)>,
    /// Primitive factor left after removing every cyclotomic factor.
    pub residual: UniPoly,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&super::rational_string(r))
}

/// Decide exactly whether `q` is a constant times a monomial times a product
/// of cyclotomic polynomials, by trial division by `Phi_d` for every `d`
/// with `phi(d) <= deg q` (all such `d` satisfy `d <= 2 deg^2`).
pub fn is_cyclotomic_product(q: &UniPoly) -> CyclotomicFactorization {
    assert!(!q.is_zero(), "cyclotomic test of the zero polynomial");
    let m = q.trailing_zeros();
    let content = q.content();
    let mut rest = q.unshift(m).primitive_part();
    let mut factors = Vec::new();
    let deg = rest.degree().unwrap_or(0) as u64;
    let bound = (2 * deg * deg).max(2);
    for d in 1..=bound {
        let remaining = rest.degree().unwrap_or(0) as u64;
        if remaining == 0 {
            break;
        }
        if euler_phi(d) > remaining {
            continue;
        }
        let phi = cyclotomic_poly(d);
        let mut e = 0u32;
        while let Some(next) = rest.div_exact(&phi) {
            rest = next;
            e += 1;
        }
        if e > 0 {
            factors.push((d, e));
        }
    }
    let residual = rest.primitive_part();
    CyclotomicFactorization {
        is_product: residual.degree() == Some(0),
        monomial_power: m,
        content,
        factors,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(1), UniPoly::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), UniPoly::from_ints(&[1, 1]));
        assert_eq!(cyclotomic_poly(6), UniPoly::from_ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), UniPoly::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn phi5_is_cyclotomic() {
        let f = is_cyclotomic_product(&UniPoly::from_ints(&[1, 1, 1, 1, 1]));
        assert!(f.is_product);
        assert_eq!(f.factors, vec![(5, 1)]);
    }

    #[test]
    fn t_squared_minus_two_is_not() {
        let f = is_cyclotomic_product(&UniPoly::from_ints(&[-2, 0, 1]));
        assert!(!f.is_product);
        assert_eq!(f.residual, UniPoly::from_ints(&[-2, 0, 1]));
    }

    #[test]
    fn t_cubed_plus_one() {
        let f = is_cyclotomic_product(&UniPoly::from_ints(&[1, 0, 0, 1]));
        assert!(f.is_product);
        assert_eq!(f.factors, vec![(2, 1), (6, 1)]);
    }

    #[test]
    fn monomial_and_content_are_split_off() {
        // -3 t^2 (t + 1)^2
        let q = UniPoly::from_ints(&[0, 0, -3, -6, -3]);
        let f = is_cyclotomic_product(&q);
        assert!(f.is_product);
        assert_eq!(f.monomial_power, 2);
        assert_eq!(f.content, Rational::from(-3));
        assert_eq!(f.factors, vec![(2, 2)]);
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(97), 96);
    }
}

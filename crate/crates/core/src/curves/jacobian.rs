use rug::Rational;

use super::weierstrass::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::poly::{discriminant_in_t2, LaurentPoly2, UniPoly};

/// `y^2 = D0(t1)` with `D0` the squarefree-up-to-squares part of
/// `B^2 - 4AC`, for `P = A t2^2 + B t2 + C`.
pub fn discriminant_model(p: &LaurentPoly2) -> Result<UniPoly> {
    let (p, _) = p.normalized();
    let d = discriminant_in_t2(&p)?;
    if d.is_zero() {
        return Err(Error::Domain("discriminant in t2 vanishes identically".into()));
    }
    let mut d0 = UniPoly::constant(d.leading());
    for (i, f) in d.squarefree_factors().iter().enumerate() {
        if i % 2 == 0 {
            d0 = d0.mul(f);
        }
    }
    Ok(d0)
}

/// Jacobian of the genus-1 curve `P = 0`, for `P` quadratic in `t2` whose
/// discriminant has squarefree part of degree 3 or 4. Uses the classical
/// invariants `I, J` of the binary quartic: `Y^2 = X^3 - 27 I X - 27 J`.
pub fn genus1_jacobian(p: &LaurentPoly2) -> Result<WeierstrassCurve> {
    let d0 = discriminant_model(p)?;
    let deg = d0.degree().unwrap_or(0);
    if deg != 3 && deg != 4 {
        return Err(Error::hypothesis(
            "genus 1",
            format!("squarefree part of the t2-discriminant has degree {deg}, not 3 or 4"),
        ));
    }
    let [e, d, c, b, a] = [0, 1, 2, 3, 4].map(|i| d0.coeff(i));
    let q = |x: &Rational, y: &Rational| Rational::from(x * y);
    let i_inv = Rational::from(12 * q(&a, &e)) - Rational::from(3 * q(&b, &d)) + q(&c, &c);
    let j_inv = Rational::from(72 * q(&q(&a, &c), &e)) + Rational::from(9 * q(&q(&b, &c), &d))
        - Rational::from(27 * q(&q(&a, &d), &d))
        - Rational::from(27 * q(&q(&e, &b), &b))
        - Rational::from(2 * q(&q(&c, &c), &c));
    let z = Rational::new;
    WeierstrassCurve::new([z(), z(), z(), Rational::from(-27 * i_inv), Rational::from(-27 * j_inv)])
}

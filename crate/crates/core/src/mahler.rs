//! Mahler measures in one, two and three variables.

use num_complex::Complex64;
use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_with, roots_f64, roots_with_radii, uni_to_balls, BigComplex, BigReal, PrecisionBudget, QuadOptions,
};
use crate::poly::{is_cyclotomic_product, BiPoly, LaurentPoly2, LaurentPoly3, UniPoly};
use crate::torus::{eval_uni, torus_intersections, unit_circle_roots, DEFAULT_UNITY_BOUND};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Jensen1var,
    Quadrature2var,
    Tracker,
    Nested3var,
}

#[derive(Clone, Debug, Serialize)]
pub struct MahlerResult {
    pub value: BigReal,
    pub method: Method,
    /// Outer-integral breakpoints, as turns in `[0, 1]`.
    pub breakpoints_used: Vec<BigReal>,
    /// `Z(P)` meets the torus in arcs (their branches contribute `log 1 = 0`).
    pub one_dimensional: bool,
    /// The error bound met the budget's target.
    pub within_target: bool,
}

/// `log max(1, |z|)` for a root ball.
fn log_plus(z: &BigComplex, r: f64) -> BigReal {
    let prec = z.prec();
    let m = z.abs().add_error(r);
    let one = BigReal::from_i64(1, prec);
    let d = m.sub(&one);
    if d.is_positive() {
        m.ln()
    } else if d.is_negative() {
        BigReal::zero(prec)
    } else {
        let hi = m.mid().to_f64() + m.rad();
        let top = BigReal::from_f64(hi.max(1.0).ln() * (1.0 + 1e-12), prec);
        BigReal::zero(prec).hull(&top)
    }
}

/// Jensen's formula for a polynomial with ball coefficients, lowest degree
/// first: `log|a_n| + sum log max(1, |root|)`.
pub fn jensen(coeffs: &[BigComplex], bits: u32) -> Result<BigReal> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |a| a.rad() == 0.0 && a.re.mid().is_zero() && a.im.mid().is_zero()) {
        c.pop();
    }
    let Some(lead) = c.last() else {
        return Err(Error::Domain("Mahler measure of zero".into()));
    };
    if lead.contains_zero() {
        return Err(Error::PrecisionExhausted("leading coefficient not certified nonzero".into()));
    }
    let mut acc = lead.ln_abs();
    if c.len() == 2 && !c[0].contains_zero() {
        // linear: the root is -a0/a1
        return Ok(acc.add(&log_plus(&c[0].div(&c[1]), 0.0)));
    }
    for r in roots_with_radii(&c, bits)? {
        acc = acc.add(&log_plus(&r.value, r.radius));
    }
    Ok(acc)
}

/// `m(q)` for a rational polynomial in one variable. Cyclotomic factors are
/// removed exactly before the roots are computed.
pub fn mahler_1var(q: &UniPoly, budget: &PrecisionBudget) -> Result<BigReal> {
    if q.is_zero() {
        return Err(Error::Domain("Mahler measure of zero".into()));
    }
    let bits = budget.working_bits;
    let q = q.unshift(q.trailing_zeros());
    let fac = is_cyclotomic_product(&q);
    let rest = fac.residual;
    let lead = BigReal::from_rational(&q.leading().abs(), bits).ln();
    if rest.degree().unwrap_or(0) == 0 {
        return Ok(lead);
    }
    let balls = uni_to_balls(&rest.scale(&rest.leading().recip()), bits + 32);
    let mut acc = lead;
    for r in roots_with_radii(&balls, bits)? {
        acc = acc.add(&log_plus(&r.value, r.radius));
    }
    Ok(acc)
}

/// Coefficients (in `t2`) of `P(e(theta), t2)`.
pub(crate) fn slice(coeffs: &[UniPoly], theta: &BigReal, bits: u32) -> Vec<BigComplex> {
    let t1 = BigComplex::unit(theta);
    coeffs.iter().map(|a| eval_uni(a, &t1, bits)).collect()
}

/// Turns of the unit-circle roots of `q` (empty for constants).
pub(crate) fn unit_turns(q: &UniPoly, bits: u32) -> Result<Vec<BigReal>> {
    if q.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    Ok(unit_circle_roots(q, bits)?.into_iter().map(|u| u.theta).collect())
}

/// Sort, merge near-duplicates and clip to `(0, 1)`.
pub(crate) fn clean_breakpoints(mut v: Vec<BigReal>) -> Vec<BigReal> {
    v.sort_by(|a, b| a.mid().partial_cmp(b.mid()).unwrap());
    let mut out: Vec<BigReal> = Vec::new();
    for x in v {
        if x.mid() <= &0 || x.mid() >= &1 {
            continue;
        }
        if out.last().map_or(true, |y| x.dist_f64(y) > 1e-30) {
            out.push(x);
        }
    }
    out
}

/// Split off the `t1`-content: `P = c(t1) * R` with `R` primitive.
fn split_content(p: &LaurentPoly2) -> (UniPoly, BiPoly) {
    let (pn, _) = p.normalized();
    let f = BiPoly::from_laurent(&pn);
    let c = f.content_t1();
    let r = f.primitive_t1();
    // keep the rational scalar with the content
    let lead_ratio = f.leading().leading() / (c.leading() * r.leading().leading());
    (c.scale(&lead_ratio), r)
}

/// `m(P)` by integrating Jensen's formula in `t2` over `t1 = e(theta)`, with
/// the outer integral cut at every projection of `Z(P) ∩ T^2`.
pub fn mahler_2var(p: &LaurentPoly2, budget: &PrecisionBudget) -> Result<MahlerResult> {
    mahler_2var_with(p, budget, QuadOptions::default())
}

pub fn mahler_2var_with(p: &LaurentPoly2, budget: &PrecisionBudget, opts: QuadOptions) -> Result<MahlerResult> {
    if p.is_zero() {
        return Err(Error::Domain("Mahler measure of zero".into()));
    }
    let bits = budget.working_bits;
    let (content, f) = split_content(p);
    let m_content = mahler_1var(&content, budget)?;
    if f.degree_t2().unwrap_or(0) == 0 {
        let value = m_content.add(&mahler_1var(&f.coeffs()[0], budget)?);
        return Ok(MahlerResult {
            within_target: value.rad() <= budget.target_abs_error,
            value,
            method: Method::Jensen1var,
            breakpoints_used: Vec::new(),
            one_dimensional: false,
        });
    }
    let inner = budget.with_target(budget.target_abs_error * 0.9);
    let report = torus_intersections(&f.to_laurent(), &inner, DEFAULT_UNITY_BOUND)?;
    let mut bps: Vec<BigReal> = report.points.iter().map(|pt| pt.theta1.clone()).collect();
    bps.extend(unit_turns(&f.leading(), bits)?);
    bps.extend(unit_turns(&f.coeffs()[0], bits)?);
    let bps = clean_breakpoints(bps);
    let coeffs = f.coeffs().to_vec();
    let integrand = |x: &Float| {
        let theta = BigReal::exact(x.clone());
        match jensen(&slice(&coeffs, &theta, bits), bits) {
            Ok(v) => v,
            Err(_) => BigReal::new(Float::new(bits), f64::INFINITY),
        }
    };
    let zero = Float::new(bits);
    let one = Float::with_val(bits, 1);
    let cuts: Vec<Float> = bps.iter().map(|b| b.mid().clone()).collect();
    let q = integrate_with(integrand, &zero, &one, &cuts, &inner, opts);
    let value = q.value.add(&m_content);
    Ok(MahlerResult {
        within_target: q.converged && value.rad() <= budget.target_abs_error,
        value,
        method: Method::Quadrature2var,
        breakpoints_used: bps,
        one_dimensional: report.one_dimensional,
    })
}

/// `m(P)` by the tracker route: `m(P*)` plus the chain integral over the
/// inside arcs.
pub fn mahler_2var_tracked(p: &LaurentPoly2, budget: &PrecisionBudget) -> Result<MahlerResult> {
    if p.is_zero() {
        return Err(Error::Domain("Mahler measure of zero".into()));
    }
    let (content, f) = split_content(p);
    let m_content = mahler_1var(&content, budget)?;
    if f.degree_t2().unwrap_or(0) == 0 {
        return mahler_2var(p, budget);
    }
    let inner = budget.with_target(budget.target_abs_error * 0.45);
    let fl = f.to_laurent();
    let decomp = crate::tracker::track(&fl, &inner)?;
    let chain = crate::tracker::chain_integral(&fl, &decomp, &inner)?;
    let m_star = mahler_1var(&f.coeffs()[0], &inner)?;
    let value = m_content.add(&m_star).add(&chain);
    let one_dimensional = decomp.arcs.iter().any(|a| a.classification == crate::tracker::ArcClass::OnTorus);
    let n = decomp.subdivision.len();
    Ok(MahlerResult {
        within_target: value.rad() <= budget.target_abs_error,
        value,
        method: Method::Tracker,
        breakpoints_used: decomp.subdivision[1..n - 1].to_vec(),
        one_dimensional,
    })
}

/// Dense coefficients `c[i][j]` of `t2^i t3^j` for the slice `t1 = e(theta)`
/// of a normalized trivariate polynomial.
fn slice3(p: &LaurentPoly3, theta: &BigReal, bits: u32) -> Vec<Vec<BigComplex>> {
    let (mut d2, mut d3) = (0usize, 0usize);
    for (e, _) in p.terms() {
        d2 = d2.max(e[1] as usize);
        d3 = d3.max(e[2] as usize);
    }
    let t1 = BigComplex::unit(theta);
    let mut c = vec![vec![BigComplex::zero(bits); d3 + 1]; d2 + 1];
    for (e, q) in p.terms() {
        let term = t1.powi(e[0] as u32).scale(&BigReal::from_rational(q, bits));
        c[e[1] as usize][e[2] as usize] = c[e[1] as usize][e[2] as usize].add(&term);
    }
    c
}

fn horner64(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det64(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        if a[piv][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k];
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
        }
    }
    det
}

fn sylvester64(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    if size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut s = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            s[i][i + j] = *c;
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            s[n + i][i + j] = *c;
        }
    }
    det64(s)
}

/// Turns `phi` where `Q(e(phi), t3)` has a root on the unit circle, for the
/// slice `Q` (dense in `t2, t3`), located in double precision from the
/// resultant of `Q` with its conjugate reciprocal.
fn slice_crossings(c: &[Vec<BigComplex>]) -> Vec<f64> {
    let d2 = c.len() - 1;
    let d3 = c[0].len() - 1;
    if d3 == 0 {
        return Vec::new();
    }
    let q: Vec<Vec<Complex64>> = c.iter().map(|row| row.iter().map(|z| z.to_c64()).collect()).collect();
    // Q^dagger(t2, t3) = t2^d2 t3^d3 conj(Q)(1/t2, 1/t3)
    let qd: Vec<Vec<Complex64>> =
        (0..=d2).map(|i| (0..=d3).map(|j| q[d2 - i][d3 - j].conj()).collect()).collect();
    let at = |m: &Vec<Vec<Complex64>>, t2: Complex64| -> Vec<Complex64> {
        (0..=d3).map(|j| horner64(&m.iter().map(|row| row[j]).collect::<Vec<_>>(), t2)).collect()
    };
    let deg = 2 * d2 * d3;
    let n = (deg + 1).next_power_of_two().max(4);
    let w: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    let vals: Vec<Complex64> = w.iter().map(|&z| sylvester64(&at(&q, z), &at(&qd, z))).collect();
    // interpolate from the values at the n-th roots of unity
    let mut coef: Vec<Complex64> = (0..n)
        .map(|k| {
            let s: Complex64 = (0..n).map(|j| vals[j] * w[(j * k) % n].conj()).sum();
            s / n as f64
        })
        .collect();
    let scale = coef.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    while coef.last().map_or(false, |z| z.norm() < 1e-11 * scale) {
        coef.pop();
    }
    let lo = coef.iter().take_while(|z| z.norm() < 1e-11 * scale).count();
    let coef = coef.split_off(lo.min(coef.len()));
    if coef.len() < 2 {
        return Vec::new();
    }
    roots_f64(&coef)
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() < 1e-6)
        .map(|z| z.arg().rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI))
        .collect()
}

/// `m(P)` for a polynomial in three variables: Jensen in `t3`, adaptive
/// quadrature in `t2` cut where a `t3`-root crosses the circle, and an outer
/// adaptive quadrature in `t1`.
pub fn mahler_3var(p: &LaurentPoly3, budget: &PrecisionBudget) -> Result<BigReal> {
    if p.is_zero() {
        return Err(Error::Domain("Mahler measure of zero".into()));
    }
    if let Some((_, c)) = p.as_monomial() {
        return Ok(BigReal::from_rational(&Rational::from(c.abs_ref()), budget.working_bits).ln());
    }
    let bits = budget.working_bits;
    let pn = p.normalized();
    let inner_budget = budget.with_target(budget.target_abs_error * 0.25);
    let inner_opts = QuadOptions { order: Some(10), max_panels: 400, initial_split: 1 };
    let zero = Float::new(bits);
    let one = Float::with_val(bits, 1);
    let failed = || BigReal::new(Float::new(bits), f64::INFINITY);
    let outer = |x: &Float| {
        let theta = BigReal::exact(x.clone());
        let c = slice3(&pn, &theta, bits);
        let cuts: Vec<Float> = {
            let mut v = slice_crossings(&c);
            v.sort_by(f64::total_cmp);
            v.into_iter().map(|t| Float::with_val(bits, t)).collect()
        };
        let inner = |y: &Float| {
            let t2 = BigComplex::unit(&BigReal::exact(y.clone()));
            let coeffs: Vec<BigComplex> = (0..c[0].len())
                .map(|j| {
                    let mut acc = BigComplex::zero(bits);
                    for row in c.iter().rev() {
                        acc = acc.mul(&t2).add(&row[j]);
                    }
                    acc
                })
                .collect();
            jensen(&coeffs, bits).unwrap_or_else(|_| failed())
        };
        let r = integrate_with(inner, &zero, &one, &cuts, &inner_budget, inner_opts);
        r.value
    };
    let outer_opts = QuadOptions { order: Some(12), max_panels: 600, initial_split: 4 };
    let r = integrate_with(outer, &zero, &one, &[], &budget.with_target(budget.target_abs_error * 0.5), outer_opts);
    Ok(r.value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Triviality {
    Trivial,
    /// `|m(P)|` is at least `lower_bound > 0`.
    NonTrivial { lower_bound: f64 },
    Inconclusive,
}

/// Is `P` a monomial times cyclotomic polynomials in `t1` and `t2` alone?
fn structurally_trivial(p: &LaurentPoly2) -> bool {
    let (pn, _) = p.normalized();
    let f = BiPoly::from_laurent(&pn);
    let c1 = f.content_t1();
    let r = f.primitive_t1();
    let g = BiPoly::from_laurent(&r.to_laurent().swapped());
    let c2 = g.content_t1();
    let rest = g.primitive_t1();
    let unit = |q: &UniPoly| {
        let fac = is_cyclotomic_product(q);
        fac.is_product && fac.content.clone().abs() == 1
    };
    let scalar = f.leading().leading() / (c1.leading() * r.leading().leading());
    let scalar2 = r.leading().leading() / (c2.leading() * rest.leading().leading());
    rest.degree_t2() == Some(0)
        && rest.coeffs()[0].degree() == Some(0)
        && unit(&c1.scale(&scalar))
        && unit(&c2.scale(&scalar2))
        && (rest.coeffs()[0].leading().clone().abs() == 1)
}

/// Numerical test for `m(P) = 0`.
pub fn is_measure_trivial(p: &LaurentPoly2, budget: &PrecisionBudget) -> Result<Triviality> {
    if p.is_zero() {
        return Err(Error::Domain("Mahler measure of zero".into()));
    }
    if structurally_trivial(p) {
        return Ok(Triviality::Trivial);
    }
    let m = mahler_2var(p, budget)?.value;
    let err = m.rad();
    if m.abs_upper() < 10.0 * err || m.abs_upper() < budget.target_abs_error * 10.0 {
        return Ok(Triviality::Inconclusive);
    }
    Ok(Triviality::NonTrivial { lower_bound: m.abs_lower() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_laurent2, parse_laurent3};

    fn b20() -> PrecisionBudget {
        PrecisionBudget::from_digits(20)
    }

    #[test]
    fn one_variable() {
        let b = b20();
        let log2 = BigReal::log2(128);
        assert!(mahler_1var(&UniPoly::from_ints(&[-2, 1]), &b).unwrap().overlaps(&log2));
        assert!(mahler_1var(&UniPoly::from_ints(&[-1, 2]), &b).unwrap().overlaps(&log2));
        assert!(mahler_1var(&UniPoly::from_ints(&[1, 1, 1]), &b).unwrap().contains_f64(0.0));
        // Lehmer's polynomial
        let l = UniPoly::from_ints(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let m = mahler_1var(&l, &b).unwrap();
        assert!((m.to_f64() - 0.162_357_612_007_738_5).abs() < 1e-15);
    }

    #[test]
    fn smyth_value() {
        let p = parse_laurent2("t1 + t2 + 1").unwrap();
        let r = mahler_2var(&p, &b20()).unwrap();
        // L'(chi_3, -1) = 0.3230659472194505140936...
        assert!((r.value.to_f64() - 0.323_065_947_219_450_5).abs() < 1e-15, "{}", r.value);
        assert!(r.value.rad() < 1e-18);
        // 1/3 and 2/3 from the torus, 1/2 from the root of 1 + t1
        assert_eq!(r.breakpoints_used.len(), 3);
    }

    #[test]
    fn trivial_measures() {
        let b = b20();
        let m = mahler_2var(&parse_laurent2("t1*t2").unwrap(), &b).unwrap();
        assert!(m.value.contains_f64(0.0));
        let m = mahler_2var(&parse_laurent2("3*t1^2 + 3").unwrap(), &b).unwrap();
        assert!(m.value.overlaps(&BigReal::from_i64(3, 128).ln()));
        assert_eq!(is_measure_trivial(&parse_laurent2("t1*t2").unwrap(), &b).unwrap(), Triviality::Trivial);
        assert_eq!(
            is_measure_trivial(&parse_laurent2("(1+t1)*(1+t2)").unwrap(), &b).unwrap(),
            Triviality::Trivial
        );
        let p5 = parse_laurent2("t1*t2^2 + (t1^2 + 5*t1 + 1)*t2 + t1").unwrap();
        assert!(matches!(is_measure_trivial(&p5, &b).unwrap(), Triviality::NonTrivial { lower_bound } if lower_bound > 0.5));
    }

    #[test]
    fn three_variables_monomial() {
        let b = PrecisionBudget::from_digits(10).with_target(1e-8);
        let m = mahler_3var(&parse_laurent3("8*t1*t2*t3").unwrap(), &b).unwrap();
        assert!(m.overlaps(&BigReal::from_i64(8, 128).ln()));
        assert!(mahler_3var(&parse_laurent3("t3").unwrap(), &b).unwrap().contains_f64(0.0));
    }
}

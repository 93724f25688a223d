//! Property suites shared by `properties.rs` (one test each) and the
//! acceptance run (all of them, with the pinned case counts).
//!
//! Every suite is a plain function returning `Err(description)` on the
//! first counterexample, so callers decide how to report.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mahler_lab::curves::{
    bernoulli3, component_orders, delta_p, divisors_t1_t2_on_pk, genus2_split, pk_curve, pk_points, reduction_data,
    CurvePoint, DivisorOnCurve, ReductionType, WeierstrassCurve,
};
use mahler_lab::lfunctions::{
    ap_coefficients, dirichlet_lprime_minus1_complex, ell_lprime_0, odd_primitive_characters, DirichletCharacter,
};
use mahler_lab::mahler::{mahler_2var, mahler_2var_tracked};
use mahler_lab::numerics::{poly_roots, BigComplex, BigReal, PrecisionBudget};
use mahler_lab::poly::{
    cyclotomic_poly, desingularizing_transform, is_cyclotomic_product, is_reciprocal, is_tempered,
    monomial_transform, newton_polygon, parse_laurent2, LaurentPoly2, UniPoly, UnimodularMap,
};
use mahler_lab::relations::{find_relation, RelationBasis, RelationStatus};
use mahler_lab::torus::{eval_laurent, singular_points, torus_intersections, Contact};
use mahler_lab::tracker::track;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rug::Rational;

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const INTERVAL_CASES: u32 = 10_000;
pub const GL2_CASES: u32 = 50;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- numerics

#[derive(Clone, Debug)]
pub enum Expr {
    Lit(i32, u32),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Atan(Box<Expr>),
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = (-50i32..=50, 1u32..=12).prop_map(|(n, d)| Expr::Lit(n, d));
    leaf.prop_recursive(5, 32, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            inner.clone().prop_map(move |x| Expr::Sqrt(b(x))),
            inner.clone().prop_map(move |x| Expr::Exp(b(x))),
            inner.clone().prop_map(move |x| Expr::Ln(b(x))),
            inner.clone().prop_map(move |x| Expr::Sin(b(x))),
            inner.clone().prop_map(move |x| Expr::Cos(b(x))),
            inner.prop_map(move |x| Expr::Atan(b(x))),
        ]
    })
}

/// `None` once a value leaves the range where the operations are defined
/// or useful; such trees are not counterexamples.
fn eval(e: &Expr, prec: u32) -> Option<BigReal> {
    let v = match e {
        Expr::Lit(n, d) => BigReal::from_rational(&Rational::from((*n, *d)), prec),
        Expr::Add(x, y) => eval(x, prec)?.add(&eval(y, prec)?),
        Expr::Sub(x, y) => eval(x, prec)?.sub(&eval(y, prec)?),
        Expr::Mul(x, y) => eval(x, prec)?.mul(&eval(y, prec)?),
        Expr::Div(x, y) => {
            let y = eval(y, prec)?;
            if y.contains_zero() {
                return None;
            }
            eval(x, prec)?.div(&y)
        }
        Expr::Sqrt(x) => {
            let x = eval(x, prec)?;
            if !x.is_positive() {
                return None;
            }
            x.sqrt()
        }
        Expr::Exp(x) => {
            let x = eval(x, prec)?;
            if x.abs_upper() > 50.0 {
                return None;
            }
            x.exp()
        }
        Expr::Ln(x) => {
            let x = eval(x, prec)?;
            if !x.is_positive() {
                return None;
            }
            x.ln()
        }
        Expr::Sin(x) => eval(x, prec)?.sin(),
        Expr::Cos(x) => eval(x, prec)?.cos(),
        Expr::Atan(x) => eval(x, prec)?.atan(),
    };
    (v.rad().is_finite() && v.abs_upper() < 1e100).then_some(v)
}

/// The ball computed at `p` bits meets the ball computed at `2p` bits: both
/// enclose the exact value, so disjoint balls would expose an unsound radius.
pub fn interval_soundness(cases: u32) -> Result<(), String> {
    run(cases, (expr(), 53u32..=256), |(e, p)| {
        if let (Some(lo), Some(hi)) = (eval(&e, p), eval(&e, 2 * p)) {
            prop_assert!(lo.overlaps(&hi), "{e:?} at {p} bits: {lo} vs {hi}");
        }
        Ok(())
    })
}

fn int_poly(max_deg: usize, bound: i64) -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-bound..=bound, 2..=max_deg + 1).prop_filter_map("degree >= 1, q(0) != 0", |mut c| {
        while c.last() == Some(&0) {
            c.pop();
        }
        (c.len() >= 2 && c[0] != 0).then(|| UniPoly::from_ints(&c))
    })
}

/// Product of the certified roots contains `(-1)^n q(0) / lead(q)`.
pub fn root_product(cases: u32) -> Result<(), String> {
    let b = PrecisionBudget::from_digits(20);
    run(cases, int_poly(8, 6), |q| {
        let roots = poly_roots(&q, &b).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let prec = b.working_bits;
        let prod = roots.iter().fold(BigComplex::one(prec), |acc, r| acc.mul(r));
        let n = q.degree().unwrap();
        let mut exact = Rational::from(q.coeff(0) / q.leading());
        if n % 2 == 1 {
            exact = -exact;
        }
        let diff = prod.sub(&BigComplex::from_rational(&exact, prec));
        prop_assert!(diff.contains_zero(), "{}: product {} vs {exact}", q.display_in("t"), prod.display(20));
        Ok(())
    })
}

fn corpus() -> Vec<LaurentPoly2> {
    [
        "t1 + t2 + 1",
        "t1^2*t2 + t1*t2^2 + t1*t2 + t1 + t2",
        "t1*t2^2 + (t1^2 + 3*t1 + 1)*t2 + t1",
        "(t1^2+1)^2*t2^2 + 2*t1*t2 + 1",
        "t1^2*t2^2 + t1 + t2 + 1",
        "(t1^2+t1+1)*t2^2 + t1*(t1+1)*t2 + t1*(t1^2+t1+1)",
    ]
    .iter()
    .map(|s| parse_laurent2(s).unwrap())
    .collect()
}

/// Raising the precision moves a measure by less than the first error bound.
pub fn quadrature_refinement() -> Result<(), String> {
    let b = PrecisionBudget::from_digits(12);
    for p in corpus() {
        let lo = mahler_2var(&p, &b).map_err(|e| e.to_string())?.value;
        let hi = mahler_2var(&p, &b.scaled(2.0)).map_err(|e| e.to_string())?.value;
        if lo.dist_f64(&hi) > lo.rad() {
            return Err(format!("{p}: {lo} then {hi}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- polynomials

/// Bivariate polynomials with exponents in `0..=2` that genuinely involve
/// both variables.
fn bivariate() -> impl Strategy<Value = LaurentPoly2> {
    prop::collection::vec((0i64..=2, 0i64..=2, -3i64..=3), 2..=5).prop_filter_map("two-dimensional support", |terms| {
        let p = LaurentPoly2::from_int_terms(&terms.iter().map(|&(a, b, c)| (a, b, c)).collect::<Vec<_>>());
        let s = p.support();
        let (x0, y0) = *s.first()?;
        let two_d = s.iter().any(|&(x, y)| {
            s.iter().any(|&(u, v)| (x - x0) * (v - y0) - (y - y0) * (u - x0) != 0)
        });
        two_d.then_some(p)
    })
}

fn unimodular() -> impl Strategy<Value = UnimodularMap> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_filter_map("det = +-1", |(a, b, c, d)| UnimodularMap::new(a, b, c, d).ok())
}

fn translate_to_origin(v: &[(i64, i64)]) -> BTreeSet<(i64, i64)> {
    let m = *v.iter().min().unwrap();
    v.iter().map(|&(x, y)| (x - m.0, y - m.1)).collect()
}

pub fn newton_equivariance(cases: u32) -> Result<(), String> {
    run(cases, (bivariate(), unimodular()), |(p, m)| {
        let before = newton_polygon(&p).unwrap();
        let after = newton_polygon(&monomial_transform(&p, &m)).unwrap();
        let image: Vec<_> = before.vertices.iter().map(|&v| m.apply_exponent(v)).collect();
        prop_assert_eq!(translate_to_origin(&image), translate_to_origin(&after.vertices));
        Ok(())
    })
}

pub fn tempered_invariance(cases: u32) -> Result<(), String> {
    run(cases, (bivariate(), unimodular(), -2i64..=2, -2i64..=2), |(p, m, e1, e2)| {
        let q = monomial_transform(&p, &m).shift(e1, e2);
        prop_assert_eq!(is_tempered(&p).unwrap().tempered, is_tempered(&q).unwrap().tempered, "{} under {:?}", p, m);
        Ok(())
    })
}

pub fn reciprocal_invariance(cases: u32) -> Result<(), String> {
    // p + t1^a t2^b p(1/t1, 1/t2) is reciprocal by construction
    let recip = (bivariate(), 0i64..=3, 0i64..=3).prop_map(|(p, a, b)| p.add(&p.inverted().shift(a, b)));
    let scalars = (1i64..=9, 1u32..=5, any::<bool>());
    run(cases, (prop_oneof![bivariate(), recip], scalars, -3i64..=3, -3i64..=3), |(p, (n, d, neg), e1, e2)| {
        prop_assume!(!p.is_zero());
        let c = Rational::from((if neg { -n } else { n }, d));
        let q = p.scale(&c).shift(e1, e2);
        prop_assert_eq!(is_reciprocal(&p).is_some(), is_reciprocal(&q).is_some(), "{}", p);
        Ok(())
    })
}

/// Independent decision: roots numerically on the unit circle, and the
/// squarefree part of what remains after removing powers of `t` divides
/// `t^L - 1` with `L` the lcm of every order `d` with `phi(d) <= 8`.
fn cyclotomic_oracle(q: &UniPoly) -> bool {
    let tz = q.trailing_zeros();
    let r = q.unshift(tz);
    if r.degree() == Some(0) {
        return true;
    }
    // roots of the squarefree part, since repeated roots lose accuracy
    let c: Vec<Complex64> = r.squarefree_part().to_f64_vec().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    let on_circle = mahler_lab::numerics::roots_f64(&c).iter().all(|z| (z.norm() - 1.0).abs() < 1e-4);
    if !on_circle {
        return false;
    }
    // d with phi(d) <= 8 is at most 30
    let mut l: u64 = 1;
    for d in 1..=30u64 {
        if mahler_lab::poly::euler_phi(d) <= 8 {
            l = l / gcd(l, d) * d;
        }
    }
    let mut tl = vec![0i64; l as usize + 1];
    tl[0] = -1;
    tl[l as usize] = 1;
    let (_, rem) = UniPoly::from_ints(&tl).div_rem(&r.squarefree_part());
    rem.is_zero()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Random products of cyclotomic polynomials mixed with arbitrary ones, so
/// both answers occur often.
fn small_poly() -> impl Strategy<Value = UniPoly> {
    let cyclo = prop::collection::vec(prop::sample::select(vec![1u64, 2, 3, 4, 5, 6, 8, 10, 12]), 1..=4)
        .prop_filter_map("degree <= 8", |ds| {
            let q = ds.iter().fold(UniPoly::one(), |acc, &d| acc.mul(&cyclotomic_poly(d)));
            (q.degree().unwrap() <= 8).then_some(q)
        });
    let shifted = (cyclo.clone(), 0usize..=2, prop::sample::select(vec![1i64, -1, 2, -3]))
        .prop_filter_map("degree <= 8", |(q, k, c)| {
            let q = q.shift(k).scale(&Rational::from(c));
            (q.degree().unwrap() <= 8).then_some(q)
        });
    let random = prop::collection::vec(-3i64..=3, 2..=9).prop_filter_map("nonconstant", |c| {
        let q = UniPoly::from_ints(&c);
        (q.degree().unwrap_or(0) >= 1).then_some(q)
    });
    prop_oneof![cyclo, shifted, random]
}

pub fn cyclotomic_agreement(cases: u32) -> Result<(), String> {
    run(cases, small_poly(), |q| {
        let f = is_cyclotomic_product(&q);
        prop_assert_eq!(f.is_product, cyclotomic_oracle(&q), "{}", q.display_in("t"));
        if f.is_product {
            let rebuilt = f
                .factors
                .iter()
                .fold(UniPoly::constant(f.content.clone()), |acc, &(d, e)| acc.mul(&cyclotomic_poly(d).pow(e)))
                .shift(f.monomial_power);
            prop_assert!(rebuilt == q || rebuilt == q.neg(), "{} rebuilt as {}", q.display_in("t"), rebuilt.display_in("t"));
        }
        Ok(())
    })
}

/// `Q` is a polynomial and `Q(t1, 0)` is the constant `+-lead(a_0)`.
pub fn desingularized_shape(cases: u32) -> Result<(), String> {
    let b = PrecisionBudget::from_digits(20);
    run(cases, bivariate(), |p| {
        let a = p.t2_coefficients();
        prop_assume!(a.len() >= 2 && !a[0].is_zero());
        let radii: Vec<_> = match singular_points(&p, &b) {
            Ok(s) => s.into_iter().map(|s| s.log_radii).collect(),
            Err(_) => return Err(TestCaseError::reject("singular locus not zero-dimensional")),
        };
        let d = match desingularizing_transform(&p, &radii, b.working_bits) {
            Ok(d) => d,
            Err(mahler_lab::Error::Hypothesis { .. }) => return Err(TestCaseError::reject("torus singularity")),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let (lo1, _, lo2, _) = d.q.exponent_box().unwrap();
        prop_assert!(lo1 >= 0 && lo2 >= 0, "{}", d.q);
        let q0 = &d.q.t2_coefficients()[0];
        let lead = a[0].leading();
        prop_assert!(*q0 == UniPoly::constant(lead.clone()) || *q0 == UniPoly::constant(-lead), "Q(t1,0) = {}", q0.display_in("t1"));
        Ok(())
    })
}

// ---------------------------------------------------------------- measures

fn measure(p: &LaurentPoly2, b: &PrecisionBudget) -> Result<BigReal, TestCaseError> {
    mahler_2var(p, b).map(|r| r.value).map_err(|e| TestCaseError::fail(format!("{p}: {e}")))
}

pub fn gl2_invariance(cases: u32) -> Result<(), String> {
    let b = PrecisionBudget::from_digits(12);
    run(cases, (bivariate(), unimodular()), |(p, m)| {
        let q = monomial_transform(&p, &m);
        let (mp, mq) = (measure(&p, &b)?, measure(&q, &b)?);
        prop_assert!(mp.overlaps(&mq), "{p} -> {q}: {mp} vs {mq}");
        Ok(())
    })
}

pub fn multiplicativity(cases: u32) -> Result<(), String> {
    let b = PrecisionBudget::from_digits(12);
    run(cases, (bivariate(), bivariate()), |(p, q)| {
        let lhs = measure(&p.mul(&q), &b)?;
        let rhs = measure(&p, &b)?.add(&measure(&q, &b)?);
        prop_assert!(lhs.overlaps(&rhs), "{p} * {q}: {lhs} vs {rhs}");
        Ok(())
    })
}

pub fn swap_and_inversion(cases: u32) -> Result<(), String> {
    let b = PrecisionBudget::from_digits(12);
    run(cases, bivariate(), |p| {
        let m = measure(&p, &b)?;
        for q in [p.swapped(), p.inverted()] {
            let mq = measure(&q, &b)?;
            prop_assert!(m.overlaps(&mq), "{p} vs {q}: {m} vs {mq}");
        }
        // integer coefficients: m(P) >= 0
        prop_assert!(m.mid().to_f64() >= -m.rad(), "{p}: {m}");
        Ok(())
    })
}

pub fn route_agreement() -> Result<(), String> {
    let b = PrecisionBudget::from_digits(15);
    for p in corpus() {
        let q = mahler_2var(&p, &b).map_err(|e| e.to_string())?.value;
        let t = mahler_2var_tracked(&p, &b).map_err(|e| format!("{p}: {e}"))?.value;
        if !q.overlaps(&t) {
            return Err(format!("{p}: quadrature {q}, tracker {t}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- torus and tracker

fn turn_conj(x: &BigReal) -> f64 {
    (1.0 - x.to_f64()).rem_euclid(1.0)
}

fn near_turn(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d) < 1e-15
}

/// Closed under conjugation, and `P` vanishes (as a ball) at every point.
pub fn torus_symmetry(cases: u32) -> Result<(), String> {
    let b = PrecisionBudget::from_digits(20);
    let recip = (bivariate(), 0i64..=2, 0i64..=2).prop_map(|(p, a, c)| p.add(&p.inverted().shift(a, c)));
    run(cases, prop_oneof![bivariate(), recip], |p| {
        prop_assume!(!p.is_zero() && p.t2_coefficients().len() >= 2);
        let rep = match torus_intersections(&p, &b, 120) {
            Ok(r) => r,
            Err(_) => return Err(TestCaseError::reject("outside the supported shape")),
        };
        prop_assume!(!rep.one_dimensional);
        for pt in &rep.points {
            let v = eval_laurent(&p, &pt.t1, &pt.t2);
            prop_assert!(v.contains_zero(), "{p}: |P| = {:.2e} at a torus point", v.abs_lower());
            let (c1, c2) = (turn_conj(&pt.theta1), turn_conj(&pt.theta2));
            let mirrored = rep
                .points
                .iter()
                .any(|q| near_turn(q.theta1.to_f64(), c1) && near_turn(q.theta2.to_f64(), c2));
            prop_assert!(mirrored, "{p}: conjugate of ({}, {}) missing", pt.theta1, pt.theta2);
        }
        Ok(())
    })
}

/// Parity of the boundary set, reciprocal vanishing, and open-path ends
/// among the transversal torus points.
pub fn tracker_structure() -> Result<(), String> {
    let b = PrecisionBudget::from_digits(15);
    for p in corpus() {
        let d = match track(&p, &b) {
            Ok(d) => d,
            Err(mahler_lab::Error::Hypothesis { .. }) => continue,
            Err(e) => return Err(format!("{p}: {e}")),
        };
        let mut ends: Vec<(f64, f64)> = Vec::new();
        for path in &d.open_paths {
            let first = &d.arcs[path[0]];
            let last = &d.arcs[*path.last().unwrap()];
            ends.push((first.theta_interval.0.to_f64(), first.start().arg().to_f64()));
            ends.push((last.theta_interval.1.to_f64(), last.end().arg().to_f64()));
        }
        if ends.len() % 2 != 0 {
            return Err(format!("{p}: odd number of open-path ends"));
        }
        if is_reciprocal(&p).is_some() && singular_points(&p, &b).map(|s| s.is_empty()).unwrap_or(false) {
            if !d.boundary_set.is_empty() {
                return Err(format!("{p}: reciprocal but R_P has {} points", d.boundary_set.len()));
            }
        }
        let torus = torus_intersections(&p, &b, 120).map_err(|e| e.to_string())?;
        for r in &d.boundary_set {
            let found = torus.points.iter().any(|t| {
                t.contact == Some(Contact::Transversal)
                    && near_turn(t.theta1.to_f64(), r.theta1.to_f64())
                    && near_turn(t.theta2.to_f64(), r.theta2.to_f64())
            });
            if !found {
                return Err(format!("{p}: boundary point ({}, {}) is not a transversal torus point", r.theta1, r.theta2));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- curves

fn curve() -> impl Strategy<Value = WeierstrassCurve> {
    prop::array::uniform5(-20i64..=20).prop_filter_map("nonsingular", |a| WeierstrassCurve::from_ints(a).ok())
}

pub fn c4_c6_discriminant(cases: u32) -> Result<(), String> {
    run(cases, curve(), |c| {
        let i = c.invariants();
        let lhs = Rational::from(&i.c4 * &i.c4) * &i.c4 - Rational::from(&i.c6 * &i.c6);
        prop_assert_eq!(lhs, Rational::from(&i.disc * 1728u32));
        Ok(())
    })
}

/// Points on `y^2 + y = x^3 - x`, whose group of rational points is
/// generated by `(0, 0)`.
fn point_37a() -> impl Strategy<Value = CurvePoint> {
    let c = WeierstrassCurve::from_ints([0, 0, 1, -1, 0]).unwrap();
    (-6i64..=6).prop_map(move |m| c.mul(&CurvePoint::Affine(Rational::new(), Rational::new()), m))
}

pub fn group_law(cases: u32) -> Result<(), String> {
    let c = WeierstrassCurve::from_ints([0, 0, 1, -1, 0]).unwrap();
    run(cases, (point_37a(), point_37a(), point_37a()), |(p, q, r)| {
        prop_assert!(c.is_on(&p) && c.is_on(&q) && c.is_on(&r));
        prop_assert_eq!(c.add(&c.add(&p, &q), &r), c.add(&p, &c.add(&q, &r)));
        prop_assert_eq!(c.add(&p, &CurvePoint::Infinity), p.clone());
        prop_assert_eq!(c.add(&p, &c.neg(&p)), CurvePoint::Infinity);
        prop_assert_eq!(c.add(&p, &q), c.add(&q, &p));
        Ok(())
    })
}

pub fn pk_map_symbolic() -> Result<(), String> {
    for k in [-7i64, -3, -1, 1, 2, 3, 5, 6, 9, 12] {
        let (_, map) = pk_curve(&Rational::from(k)).map_err(|e| e.to_string())?;
        map.check_symbolic().map_err(|e| format!("k = {k}: {e}"))?;
    }
    Ok(())
}

pub fn bernoulli_oddness() -> Result<(), String> {
    for n in 2i64..=60 {
        for nu in 1..n {
            let a = bernoulli3(&Rational::from((n - nu, n)));
            let b = bernoulli3(&Rational::from((nu, n)));
            if a != -b {
                return Err(format!("B3({}/{n}) != -B3({nu}/{n})", n - nu));
            }
        }
    }
    Ok(())
}

fn scaled(d: &DivisorOnCurve, m: i64) -> DivisorOnCurve {
    DivisorOnCurve::new(d.support().into_iter().map(|p| (p.clone(), m * d.multiplicity(&p))).collect())
}

/// Scaling either divisor scales every value in the set.
pub fn delta_bilinear() -> Result<(), String> {
    for k in [3i64, 5, 6, 9, 10, 15] {
        let kq = Rational::from(k);
        let (c, _) = pk_curve(&kq).map_err(|e| e.to_string())?;
        let (d1, d2) = divisors_t1_t2_on_pk(&kq).map_err(|e| e.to_string())?;
        for p in mahler_lab::curves::bad_primes(&c) {
            let rd = reduction_data(&c, p).map_err(|e| e.to_string())?;
            if rd.kind != ReductionType::MultiplicativeSplit {
                continue;
            }
            let a = component_orders(&c, &pk_points(&kq), &rd).map_err(|e| e.to_string())?;
            let base = delta_p(&c, &d1, &d2, &rd, &a).map_err(|e| e.to_string())?;
            for m in [2i64, -1, 3] {
                let expect: BTreeSet<Rational> = base.iter().map(|v| Rational::from(v * m)).collect();
                let left = delta_p(&c, &scaled(&d1, m), &d2, &rd, &a).map_err(|e| e.to_string())?;
                let right = delta_p(&c, &d1, &scaled(&d2, m), &rd, &a).map_err(|e| e.to_string())?;
                if left != expect || right != expect {
                    return Err(format!("k = {k}, p = {p}, scale {m}"));
                }
                let swapped: BTreeSet<Rational> = delta_p(&c, &d2, &d1, &rd, &a)
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .map(|v| -v)
                    .collect();
                if swapped != base {
                    return Err(format!("k = {k}, p = {p}: not antisymmetric"));
                }
            }
        }
    }
    Ok(())
}

pub fn genus2_distinct_j() -> Result<(), String> {
    let p = parse_laurent2("(t1^2+t1+1)*t2^2 + t1*(t1+1)*t2 + t1*(t1^2+t1+1)").unwrap();
    let g = genus2_split(&p).map_err(|e| e.to_string())?;
    if g.e1.j_invariant() == g.e2.j_invariant() {
        return Err("E1 and E2 share a j-invariant".into());
    }
    Ok(())
}

// ---------------------------------------------------------------- L-functions

/// Both routes are computed and compared inside the call; a disagreement
/// surfaces as an error.
pub fn dual_route_dirichlet() -> Result<(), String> {
    let b = PrecisionBudget::from_digits(20);
    for f in [3u64, 4, 5, 7, 8, 11, 12, 15, 16, 19, 20, 23, 24] {
        for chi in odd_primitive_characters(f) {
            let v = dirichlet_lprime_minus1_complex(&chi, &b).map_err(|e| format!("{chi}: {e}"))?;
            if chi.is_real() && !v.im.contains_zero() {
                return Err(format!("{chi}: real character with value {}", v.display(15)));
            }
        }
    }
    Ok(())
}

pub fn dual_route_elliptic() -> Result<(), String> {
    let b = PrecisionBudget::from_digits(15);
    for a in [[0, -1, 1, 0, 0], [0, 0, 1, -1, 0], [1, 1, 1, 0, 0], [1, 0, 0, -1, 0]] {
        let c = WeierstrassCurve::from_ints(a).unwrap();
        let r = ell_lprime_0(&c, &b).map_err(|e| e.to_string())?;
        if r.consistency > 10.0 * b.target_abs_error {
            return Err(format!("{a:?}: the two cutoffs differ by {:.2e}", r.consistency));
        }
    }
    Ok(())
}

fn factor(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `p + 1 - #E(F_p)` by counting every affine pair.
fn brute_trace(c: &WeierstrassCurve, p: i64) -> i64 {
    let a: Vec<i64> = c.coeffs().iter().map(|x| x.numer().to_i64().unwrap().rem_euclid(p)).collect();
    let mut count = 1;
    for x in 0..p {
        for y in 0..p {
            let lhs = (y * y + a[0] * x * y + a[2] * y) % p;
            let rhs = (x * x % p * x + a[1] * x % p * x + a[3] * x + a[4]) % p;
            if (lhs - rhs).rem_euclid(p) == 0 {
                count += 1;
            }
        }
    }
    p + 1 - count
}

pub fn euler_product(cases: u32) -> Result<(), String> {
    let c = WeierstrassCurve::from_ints([0, 0, 1, -1, 0]).unwrap();
    let data = ap_coefficients(&c, 10_000).map_err(|e| e.to_string())?;
    let bad: Vec<u64> = data.bad.iter().map(|(p, _)| *p).collect();
    for p in (2..200).filter(|&p| factor(p).len() == 1 && factor(p)[0].1 == 1) {
        if !bad.contains(&(p as u64)) && brute_trace(&data.curve, p as i64) != data.a[p] {
            return Err(format!("a_{p} disagrees with a point count"));
        }
    }
    for p in (2..10_000usize).filter(|&p| factor(p).len() == 1 && factor(p)[0].1 == 1) {
        if !bad.contains(&(p as u64)) && (data.a[p] * data.a[p]) as usize > 4 * p {
            return Err(format!("Hasse bound fails at {p}"));
        }
    }
    run(cases, 1usize..=10_000, |n| {
        let mut expect = 1i64;
        for (p, e) in factor(n) {
            let ap = data.a[p];
            let good = !bad.contains(&(p as u64));
            let (mut prev, mut cur) = (1i64, ap);
            for _ in 1..e {
                let next = if good { ap * cur - p as i64 * prev } else { ap * cur };
                prev = cur;
                cur = next;
            }
            expect *= cur;
        }
        prop_assert_eq!(data.a[n], expect, "a_{}", n);
        Ok(())
    })
}

/// Doubling the digits keeps each value inside its earlier ball.
pub fn precision_monotonicity() -> Result<(), String> {
    let lo = PrecisionBudget::from_digits(15);
    let hi = PrecisionBudget::from_digits(30);
    let chi = DirichletCharacter::conrey(4, 3).unwrap();
    let a = dirichlet_lprime_minus1_complex(&chi, &lo).map_err(|e| e.to_string())?.re;
    let b = dirichlet_lprime_minus1_complex(&chi, &hi).map_err(|e| e.to_string())?.re;
    if !a.overlaps(&b) {
        return Err(format!("L'(chi_4,-1): {a} then {b}"));
    }
    let c = WeierstrassCurve::from_ints([0, -1, 1, 0, 0]).unwrap();
    let a = ell_lprime_0(&c, &lo).map_err(|e| e.to_string())?.value;
    let b = ell_lprime_0(&c, &hi).map_err(|e| e.to_string())?.value;
    if !a.overlaps(&b) {
        return Err(format!("L'(E,0): {a} then {b}"));
    }
    Ok(())
}

// ---------------------------------------------------------------- relations

fn relation_basis(vals: &[BigReal]) -> RelationBasis {
    RelationBasis::new(vals.iter().enumerate().map(|(i, v)| (format!("x{i}"), v.clone())).collect()).unwrap()
}

/// Logs of small integers have relations coming from factorisations.
fn log_basis(prec: u32) -> Vec<BigReal> {
    [2, 3, 12].iter().map(|&n| BigReal::from_i64(n, prec).ln()).collect()
}

pub fn scale_invariance(cases: u32) -> Result<(), String> {
    let b = PrecisionBudget::from_digits(30);
    let base = log_basis(b.working_bits + 32);
    let reference = find_relation(&relation_basis(&base), 1000, &b).map_err(|e| e.to_string())?;
    let c0 = reference.coefficients.clone().ok_or("no relation among log 2, log 3, log 12")?;
    run(cases, (1i64..=50, 1i64..=50), |(n, d)| {
        let q = Rational::from((n, d));
        let scaled: Vec<_> = base.iter().map(|v| v.mul_rational(&q)).collect();
        let r = find_relation(&relation_basis(&scaled), 1000, &b).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let c = r.coefficients.unwrap_or_default();
        let neg: Vec<i64> = c0.iter().map(|x| -x).collect();
        prop_assert!(c == c0 || c == neg, "scale {q}: {c:?} vs {c0:?}");
        Ok(())
    })
}

pub fn determinism_and_exclusion() -> Result<(), String> {
    let vals = |prec: u32| {
        vec![
            BigReal::from_i64(2, prec).sqrt(),
            BigReal::from_i64(3, prec).ln(),
            BigReal::pi(prec),
        ]
    };
    let mut last = 0.0;
    for digits in [20, 30, 40] {
        let b = PrecisionBudget::from_digits(digits);
        let r1 = find_relation(&relation_basis(&vals(b.working_bits + 32)), 1000, &b).map_err(|e| e.to_string())?;
        let r2 = find_relation(&relation_basis(&vals(b.working_bits + 32)), 1000, &b).map_err(|e| e.to_string())?;
        if r1.status != r2.status || r1.coefficients != r2.coefficients || r1.exclusion_norm.to_f64() != r2.exclusion_norm.to_f64() {
            return Err(format!("two identical runs differ at {digits} digits"));
        }
        if r1.status == RelationStatus::Found {
            return Err(format!("spurious relation {:?}", r1.coefficients));
        }
        let e = r1.exclusion_norm.to_f64();
        if e < last {
            return Err(format!("exclusion norm fell from {last:.3e} to {e:.3e} at {digits} digits"));
        }
        last = e;
    }
    Ok(())
}

// ---------------------------------------------------------------- registry

/// Every suite with the case counts pinned for acceptance.
pub fn suites() -> Vec<Suite> {
    vec![
        ("interval soundness", || interval_soundness(INTERVAL_CASES)),
        ("root product", || root_product(300)),
        ("quadrature refinement", quadrature_refinement),
        ("newton equivariance", || newton_equivariance(300)),
        ("tempered invariance", || tempered_invariance(300)),
        ("reciprocal invariance", || reciprocal_invariance(300)),
        ("cyclotomic oracle", || cyclotomic_agreement(2000)),
        ("desingularized shape", || desingularized_shape(60)),
        ("GL2 invariance", || gl2_invariance(GL2_CASES)),
        ("multiplicativity", || multiplicativity(30)),
        ("swap and inversion", || swap_and_inversion(30)),
        ("route agreement", route_agreement),
        ("torus symmetry", || torus_symmetry(60)),
        ("tracker structure", tracker_structure),
        ("c4^3 - c6^2 = 1728 disc", || c4_c6_discriminant(500)),
        ("group law", || group_law(100)),
        ("P_k map", pk_map_symbolic),
        ("B3 oddness", bernoulli_oddness),
        ("delta_p bilinear", delta_bilinear),
        ("genus-2 factors distinct", genus2_distinct_j),
        ("dual route, Dirichlet", dual_route_dirichlet),
        ("dual route, elliptic", dual_route_elliptic),
        ("Euler product", || euler_product(500)),
        ("precision monotonicity", precision_monotonicity),
        ("relation scale invariance", || scale_invariance(20)),
        ("relation determinism and exclusion", determinism_and_exclusion),
    ]
}

pub fn run_all_pinned() -> Vec<(&'static str, Result<(), String>)> {
    suites().into_iter().map(|(name, f)| (name, f())).collect()
}

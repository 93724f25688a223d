//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! with the measured quantity next to its tolerance, then asserts.

mod props;

use std::time::{Duration, Instant};

use mahler_lab::curves::{
    bad_primes, component_orders, delta_p, divisors_t1_t2_on_pk, genus2_split, pk_curve, pk_points, pk_polynomial,
    reduction_data, torsion_test, ComplexPoint, CurvePoint, ReductionType, TorsionResult, WeierstrassCurve,
};
use mahler_lab::lfunctions::{dirichlet_lprime_minus1, zeta_prime_minus2, DirichletCharacter};
use mahler_lab::mahler::{mahler_2var, mahler_2var_tracked, mahler_3var};
use mahler_lab::numerics::{BigComplex, BigReal, PrecisionBudget};
use mahler_lab::poly::{is_tempered, parse_laurent2, parse_laurent3, LaurentPoly2, UniPoly};
use mahler_lab::relations::{
    discover, find_relation, parse_basis_spec, DiscoverOptions, DiscoveryReport, RelationBasis, RelationStatus,
};
use mahler_lab::torus::{singular_points, torus_intersections};
use rug::Rational;

const EQ2: &str = "t1^2*t2 + t1*t2^2 + t1*t2 + t1 + t2";
const GENUS2: &str = "(t1^2+t1+1)*t2^2 + t1*(t1+1)*t2 + t1*(t1^2+t1+1)";
const MIXED: &str = "(t1^2+1)^2*t2^2 + 2*t1*t2 + 1";
const NEGATIVE: &str = "t1^2*t2^2 + t1 + t2 + 1";
const REMARK: &str = "(t1^2+t1+1)*t2^2 + (t1^4-t1^3-6*t1^2-t1+1)*t2 + t1^2*(t1^2+t1+1)";

fn report(n: u32, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let timed = elapsed <= limit;
    let verdict = if ok && timed { "PASS" } else { "FAIL" };
    println!("criterion {n:>2}: {verdict}  {detail}  [{:.1}s of {}s]", elapsed.as_secs_f64(), limit.as_secs());
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(timed, "criterion {n} over time: {elapsed:?} > {limit:?}");
}

fn p2(s: &str) -> LaurentPoly2 {
    parse_laurent2(s).unwrap()
}

fn pk(k: i64) -> LaurentPoly2 {
    pk_polynomial(&Rational::from(k))
}

fn discover_with(p: &LaurentPoly2, basis: Option<&str>, height: u64, digits: u32) -> DiscoveryReport {
    let opts = DiscoverOptions {
        height_bound: height,
        basis: basis.map(|b| parse_basis_spec(b).unwrap()),
        ..Default::default()
    };
    discover(p, &opts, &PrecisionBudget::from_digits(digits)).unwrap()
}

#[test]
fn c01_smyth_identity() {
    let t = Instant::now();
    let b = PrecisionBudget::from_digits(40);
    let m = mahler_2var(&p2("t1 + t2 + 1"), &b).unwrap().value;
    let l = dirichlet_lprime_minus1(&DirichletCharacter::conrey(3, 2).unwrap(), &b).unwrap();
    let diff = m.sub(&l).abs_upper();
    report(1, diff < 1e-25, t.elapsed(), Duration::from_secs(60), &format!("|m - L'(chi_3,-1)| <= {diff:.2e} < 1e-25"));
}

#[test]
fn c02_route_equivalence() {
    let t = Instant::now();
    let b = PrecisionBudget::from_digits(20);
    let mut corpus = vec![p2("t1 + t2 + 1"), p2(EQ2)];
    corpus.extend([1, 2, 3, 5].map(pk));
    corpus.push(p2(GENUS2));
    let mut worst = 0f64;
    for p in &corpus {
        let q = mahler_2var(p, &b).unwrap().value;
        let r = mahler_2var_tracked(p, &b).unwrap().value;
        let d = q.sub(&r).abs_upper();
        println!("  {p}: quad {q}, track {r}, gap {d:.1e}");
        worst = worst.max(d);
    }
    report(2, worst < 1e-12, t.elapsed(), Duration::from_secs(300), &format!("max route gap {worst:.2e} < 1e-12"));
}

#[test]
fn c03_temperedness() {
    let t = Instant::now();
    let mut positives: Vec<LaurentPoly2> = (1..=10).filter(|&k| k != 4).map(pk).collect();
    positives.extend([EQ2, GENUS2, MIXED, NEGATIVE].map(p2));
    let mut slowest = Duration::ZERO;
    let mut all_true = true;
    for p in &positives {
        let s = Instant::now();
        all_true &= is_tempered(p).unwrap().tempered;
        slowest = slowest.max(s.elapsed());
    }
    let s = Instant::now();
    let neg = is_tempered(&p2("t1 + t2 + 2")).unwrap();
    slowest = slowest.max(s.elapsed());
    // each side is read from its start vertex, so a side may give 2t + 1
    let t_plus_2 = UniPoly::from_ints(&[2, 1]);
    let reversed = UniPoly::from_ints(&[1, 2]);
    let obstruction_ok = !neg.tempered
        && neg.obstructions.iter().any(|o| o.factorization.residual == t_plus_2)
        && neg.obstructions.iter().all(|o| [&t_plus_2, &reversed].contains(&&o.factorization.residual));
    report(
        3,
        all_true && obstruction_ok && slowest < Duration::from_secs(1),
        t.elapsed(),
        Duration::from_secs(15),
        &format!("{} tempered, t1+t2+2 obstructed by t+2: {obstruction_ok}, slowest {slowest:?}", positives.len()),
    );
}

#[test]
fn c04_pk_curve_data() {
    let t = Instant::now();
    let mut ok = true;
    let mut split_primes = 0;
    for k in [1i64, 2, 3, 5, 6] {
        let kq = Rational::from(k);
        let (c, _) = pk_curve(&kq).unwrap();
        let inv = c.invariants();
        let k2 = k * k;
        ok &= inv.c4 == Rational::from(k2 * k2 - 16 * k2 + 16);
        ok &= inv.disc == Rational::from(k2 * (k - 4) * (k + 4));
        let [o, q, q2, q3] = pk_points(&kq);
        ok &= o == CurvePoint::Infinity && q == CurvePoint::Affine(Rational::new(), Rational::new());
        ok &= c.mul(&q, 2) == CurvePoint::Affine(Rational::from(-1), Rational::new()) && q2 == c.mul(&q, 2);
        ok &= c.mul(&q, 3) == CurvePoint::Affine(Rational::new(), Rational::from(-k)) && q3 == c.mul(&q, 3);
        ok &= c.mul(&q, 4) == CurvePoint::Infinity;
        let (d1, d2) = divisors_t1_t2_on_pk(&kq).unwrap();
        for p in bad_primes(&c) {
            let rd = reduction_data(&c, p).unwrap();
            if rd.kind != ReductionType::MultiplicativeSplit {
                continue;
            }
            split_primes += 1;
            let a = component_orders(&c, &pk_points(&kq), &rd).unwrap();
            if p >= 3 && k % p as i64 == 0 {
                ok &= a.orders == vec![1, 2, 1, 2];
            }
            let set = delta_p(&c, &d1, &d2, &rd, &a).unwrap();
            ok &= set.len() == 1 && set.contains(&Rational::new());
        }
    }
    report(4, ok, t.elapsed(), Duration::from_secs(30), &format!("invariants, 4-torsion, orders and delta_p = {{0}} at {split_primes} split primes"));
}

fn unity_set(p: &LaurentPoly2) -> Vec<(Rational, Rational)> {
    let rep = torus_intersections(p, &PrecisionBudget::from_digits(30), 120).unwrap();
    let mut v: Vec<_> = rep
        .points
        .iter()
        .map(|pt| {
            let [n1, d1, n2, d2] = pt.unity.expect("root-of-unity tag");
            (Rational::from((n1, d1)), Rational::from((n2, d2)))
        })
        .collect();
    v.sort();
    v
}

fn turns(pairs: &[(i64, i64, i64, i64)]) -> Vec<(Rational, Rational)> {
    let mut v: Vec<_> = pairs.iter().map(|&(a, b, c, d)| (Rational::from((a, b)), Rational::from((c, d)))).collect();
    v.sort();
    v
}

#[test]
fn c05_torus_sets() {
    let t = Instant::now();
    // t = e(turn): zeta_3 = e(1/3), -zeta_3^-1 = e(1/6), and so on.
    let mixed = turns(&[(1, 3, 1, 6), (2, 3, 5, 6), (1, 6, 1, 3), (5, 6, 2, 3)]);
    // (-zeta, zeta) with zeta = e(j/8), j odd, and (-1, -1)
    let neg = turns(&[(5, 8, 1, 8), (7, 8, 3, 8), (1, 8, 5, 8), (3, 8, 7, 8), (1, 2, 1, 2)]);
    let got_mixed = unity_set(&p2(MIXED));
    let got_neg = unity_set(&p2(NEGATIVE));
    let sing = singular_points(&p2(REMARK), &PrecisionBudget::from_digits(30)).unwrap();
    let has = |x: f64| {
        sing.iter().any(|s| {
            let (a, b) = (s.z1.to_c64(), s.z2.to_c64());
            (a.re - x).abs() < 1e-20 && a.im.abs() < 1e-20 && (b.re - 1.0).abs() < 1e-20 && b.im.abs() < 1e-20
        })
    };
    let ok = got_mixed == mixed && got_neg == neg && has(-1.0) && has(1.0);
    report(5, ok, t.elapsed(), Duration::from_secs(60), &format!(
        "mixed set {} points, negative set {} points, singular (-1,1),(1,1): {}",
        got_mixed.len(),
        got_neg.len(),
        has(-1.0) && has(1.0)
    ));
}

fn height(c: &[i64]) -> u64 {
    c.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

#[test]
fn c06_genus_one_discovery() {
    let t = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    let mut slowest = Duration::ZERO;
    for k in [1, 2, 3, 5] {
        let s = Instant::now();
        let r = discover_with(&pk(k), None, 10_000, 30);
        slowest = slowest.max(s.elapsed());
        let rel = r.relation.as_ref();
        let good = r.status == RelationStatus::Found
            && r.basis.len() == 2
            && r.basis[1].label == format!("L'(C_{k},0)")
            && rel.is_some_and(|x| x.coeffs[0] != 0 && x.coeffs[1] != 0 && height(&x.coeffs) <= 10_000)
            && rel.is_some_and(|x| x.residual.abs_upper() < 1e-20);
        ok &= good;
        lines.push(format!("{} ({:.0e})", r.identity.as_deref().unwrap_or("none"), rel.map_or(1.0, |x| x.residual.abs_upper())));
    }
    report(6, ok && slowest < Duration::from_secs(600), t.elapsed(), Duration::from_secs(2400), &lines.join("; "));
}

#[test]
fn c07_genus_two_discovery() {
    let t = Instant::now();
    let p = p2(GENUS2);
    let g = genus2_split(&p).unwrap();
    let split_ok = g.r == 0 && g.palindromic && g.e1.discriminant() != 0 && g.e2.discriminant() != 0;
    let with_e1 = discover_with(&p, Some("e1"), 1000, 30);
    let with_e2 = discover_with(&p, Some("e2"), 1000, 30);
    let res1 = with_e1.relation.as_ref().map_or(1.0, |x| x.residual.abs_upper());
    let ok = split_ok
        && with_e1.status == RelationStatus::Found
        && with_e1.relation.as_ref().is_some_and(|x| x.coeffs[0] != 0)
        && res1 < 1e-15
        && with_e2.status == RelationStatus::Excluded;
    report(7, ok, t.elapsed(), Duration::from_secs(900), &format!(
        "split ok: {split_ok}; E1: {} ({res1:.0e}); E2 alone: {:?}, exclusion {:.1e}",
        with_e1.identity.as_deref().unwrap_or("none"),
        with_e2.status,
        with_e2.exclusion_norm.to_f64()
    ));
}

#[test]
fn c08_mixed_type() {
    let t = Instant::now();
    let r = discover_with(&p2(MIXED), Some("jac; chi:3:2; chi:4:3"), 1000, 25);
    let res = r.relation.as_ref().map_or(1.0, |x| x.residual.abs_upper());
    let ok = r.status == RelationStatus::Found && r.relation.as_ref().is_some_and(|x| x.coeffs[0] != 0) && res < 1e-15;
    report(8, ok, t.elapsed(), Duration::from_secs(900), &format!("{} ({res:.0e})", r.identity.as_deref().unwrap_or("none")));
}

/// The five torus points of the negative example, carried to
/// `y^2 + y = x^3 - x^2` by `(t1, t2) -> (t2, t2^3)`.
fn negative_example_points(prec: u32) -> Vec<ComplexPoint> {
    let mut pts = Vec::new();
    for j in [1i64, 3, 5, 7] {
        let z = BigComplex::unit(&BigReal::from_rational(&Rational::from((j, 8)), prec));
        let z3 = z.powi(3);
        pts.push(ComplexPoint::Affine(z, z3));
    }
    pts.push(ComplexPoint::from_rational(&CurvePoint::Affine(Rational::from(1), Rational::from(-1)), prec));
    pts
}

#[test]
fn c09_negative_result() {
    let t = Instant::now();
    let r = discover_with(&p2(NEGATIVE), Some("jac; chi:3:2; chi:8:3"), 1000, 25);
    let auto = discover_with(&p2(NEGATIVE), None, 1000, 25);
    let b = PrecisionBudget::from_digits(25);
    let e = WeierstrassCurve::from_ints([0, -1, 1, 0, 0]).unwrap();
    let pts = negative_example_points(b.working_bits + 32);
    let mut non_torsion = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if torsion_test(&e, &pts[i], &pts[j], 1000, &b).unwrap() == (TorsionResult::NonTorsionUpTo { bound: 1000 }) {
                non_torsion += 1;
            }
        }
    }
    let origin = ComplexPoint::from_rational(&CurvePoint::Affine(Rational::new(), Rational::new()), b.working_bits + 32);
    let control = torsion_test(&e, &origin, &ComplexPoint::Infinity, 1000, &b).unwrap();
    let ok = r.status == RelationStatus::Excluded
        && auto.status == RelationStatus::Excluded
        && non_torsion == 10
        && control == TorsionResult::Torsion { order: 5 };
    report(9, ok, t.elapsed(), Duration::from_secs(600), &format!(
        "explicit basis {:?} ({:.1e}), auto basis {:?} ({:.1e}), {non_torsion}/10 non-torsion, control {control:?}",
        r.status,
        r.exclusion_norm.to_f64(),
        auto.status,
        auto.exclusion_norm.to_f64()
    ));
}

#[test]
fn c10_three_variables() {
    let t = Instant::now();
    let b = PrecisionBudget::from_digits(8);
    let m = mahler_3var(&parse_laurent3("1 + t1 + t2 + t3").unwrap(), &b).unwrap();
    let z = zeta_prime_minus2(&b).unwrap();
    let basis = RelationBasis::new(vec![("m".into(), m.clone()), ("zeta'(-2)".into(), z)]).unwrap();
    let r = find_relation(&basis, 100, &b).unwrap();
    let c = r.coefficients.clone().unwrap_or_default();
    let ok = m.rad() < 1e-8
        && r.status == RelationStatus::Found
        && c.len() == 2
        && c[0] != 0
        && height(&c) <= 100
        && r.residual.abs_upper() < 1e-6;
    report(10, ok, t.elapsed(), Duration::from_secs(1200), &format!(
        "m = {m}, coefficients {c:?}, residual {:.1e}",
        r.residual.abs_upper()
    ));
}

#[test]
fn c11_property_suites() {
    let t = Instant::now();
    let results = props::run_all_pinned();
    let mut ok = true;
    for (name, r) in &results {
        if let Err(e) = r {
            println!("  {name}: {e}");
        }
        ok &= r.is_ok();
    }
    let names: Vec<_> = results.iter().map(|(n, r)| format!("{n}{}", if r.is_ok() { "" } else { "!" })).collect();
    report(11, ok, t.elapsed(), Duration::from_secs(600), &names.join(", "));
}

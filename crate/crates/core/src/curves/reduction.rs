use std::collections::BTreeSet;

use rug::{Integer, Rational};
use serde::Serialize;

use super::weierstrass::{CurvePoint, Isomorphism, WeierstrassCurve};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionType {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    Additive,
}

impl ReductionType {
    pub fn is_multiplicative(self) -> bool {
        matches!(self, ReductionType::MultiplicativeSplit | ReductionType::MultiplicativeNonsplit)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionData {
    pub prime: u64,
    pub minimal_model: WeierstrassCurve,
    /// Coordinate change from the input model to `minimal_model`.
    #[serde(skip)]
    pub to_minimal: Isomorphism,
    #[serde(rename = "type")]
    pub kind: ReductionType,
    /// Number of components of the special fibre when multiplicative.
    pub n: u32,
    /// Reduction of the singular point on the minimal model, if any.
    #[serde(skip)]
    pub singular_point: Option<(u64, u64)>,
}

/// p-adic valuation, `i64::MAX` for zero.
pub fn valuation(x: &Rational, p: u64) -> i64 {
    if *x == 0 {
        return i64::MAX;
    }
    let pz = Integer::from(p);
    let count = |n: &Integer| -> i64 {
        let mut n = n.clone().abs();
        let mut k = 0;
        while n.is_divisible(&pz) {
            n /= &pz;
            k += 1;
        }
        k
    };
    count(x.numer()) - count(x.denom())
}

pub fn is_prime(p: u64) -> bool {
    Integer::from(p).is_probably_prime(30) != rug::integer::IsPrime::No
}

fn mod_p(x: &Rational, p: u64) -> u64 {
    residue(x, p)
}

/// Integer in `[0, m)` congruent to a rational with denominator prime to `m`.
fn residue(x: &Rational, m: u64) -> u64 {
    let pz = Integer::from(m);
    let inv = Integer::from(x.denom().invert_ref(&pz).expect("p-integral value"));
    let v = Integer::from(x.numer() * inv).div_rem_euc(pz).1;
    v.to_u64().expect("residue fits")
}

fn is_p_integral(c: &WeierstrassCurve, p: u64) -> bool {
    c.coeffs().iter().all(|a| valuation(a, p) >= 0)
}

/// A p-integral model, then the largest reductions by `u = p` the
/// standard transformations allow.
fn minimal_at(c: &WeierstrassCurve, p: u64) -> Result<(WeierstrassCurve, Isomorphism)> {
    let mut iso = Isomorphism::identity();
    let mut cur = c.clone();
    // Clear p from denominators.
    while !is_p_integral(&cur, p) {
        let step = Isomorphism {
            u: Rational::from((1, p)),
            r: Rational::new(),
            s: Rational::new(),
            t: Rational::new(),
        };
        cur = cur.transform(&step)?;
        iso = iso.then(&step);
    }
    loop {
        let inv = cur.invariants();
        if valuation(&inv.disc, p) < 12 || valuation(&inv.c4, p) < 4 || valuation(&inv.c6, p) < 6 {
            break;
        }
        match reducing_step(&cur, p)? {
            Some(step) => {
                cur = cur.transform(&step)?;
                iso = iso.then(&step);
            }
            None => break,
        }
    }
    Ok((cur, iso))
}

fn reducing_step(c: &WeierstrassCurve, p: u64) -> Result<Option<Isomorphism>> {
    let u = Rational::from(p);
    if p >= 5 {
        // Complete the square and the cube (2 and 3 are units at p), then
        // replace r, s, t by integers close to them p-adically.
        let inv = c.invariants();
        let s0 = Rational::from(-&c.a1) / 2;
        let r0 = Rational::from(-&inv.b2) / 12;
        let t0 = -(Rational::from(&c.a3) + Rational::from(&r0 * &c.a1)) / 2;
        let step = Isomorphism {
            u,
            r: Rational::from(residue(&r0, p * p)),
            s: Rational::from(residue(&s0, p)),
            t: Rational::from(residue(&t0, p * p * p)),
        };
        let reduced = c.transform(&step)?;
        return Ok(is_p_integral(&reduced, p).then_some(step));
    }
    let p2 = p * p;
    for r in 0..p2 {
        for s in 0..p {
            for t in 0..p2 * p {
                let step = Isomorphism {
                    u: u.clone(),
                    r: Rational::from(r),
                    s: Rational::from(s),
                    t: Rational::from(t),
                };
                if is_p_integral(&c.transform(&step)?, p) {
                    return Ok(Some(step));
                }
            }
        }
    }
    Ok(None)
}

fn eval_mod(c: &[u64; 5], p: u64, x: u64, y: u64) -> (u64, u64, u64) {
    let [a1, a2, a3, a4, a6] = c.map(|v| v as i128);
    let (x, y, p) = (x as i128, y as i128, p as i128);
    let r = |v: i128| v.rem_euclid(p) as u64;
    // y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6 and its partials.
    let f = r(y * y + a1 * x * y + a3 * y - x * x % p * x - a2 * x * x - a4 * x - a6);
    let fx = r(a1 * y - 3 * x * x - 2 * a2 * x - a4);
    let fy = r(2 * y + a1 * x + a3);
    (f, fx, fy)
}

/// The singular point of the reduction of an integral model, by search.
fn singular_point_mod(c: &WeierstrassCurve, p: u64) -> Result<(u64, u64)> {
    if p > 1 << 20 {
        return Err(Error::Domain(format!("prime {p} too large for the node search")));
    }
    let a = c.coeffs().map(|v| mod_p(&v, p));
    for x in 0..p {
        if p == 2 {
            for y in 0..2 {
                if eval_mod(&a, p, x, y) == (0, 0, 0) {
                    return Ok((x, y));
                }
            }
            continue;
        }
        // For odd p the singular point sits where 2y + a1 x + a3 = 0.
        let inv2 = (p + 1) / 2;
        let y = ((p - (a[0] * x + a[2]) % p) % p) * inv2 % p;
        if eval_mod(&a, p, x, y) == (0, 0, 0) {
            return Ok((x, y));
        }
    }
    Err(Error::Consistency(format!("no singular point of the reduction mod {p}")))
}

fn legendre(a: u64, p: u64) -> i32 {
    let a = Integer::from(a % p);
    if a == 0 {
        return 0;
    }
    let e = Integer::from((p - 1) / 2);
    let r = a.pow_mod(&e, &Integer::from(p)).expect("p > 0");
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Reduction type of `c` at the prime `p`, computed on a minimal model.
pub fn reduction_data(c: &WeierstrassCurve, p: u64) -> Result<ReductionData> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let (model, iso) = minimal_at(c, p)?;
    let inv = model.invariants();
    let vd = valuation(&inv.disc, p);
    if vd == 0 {
        return Ok(ReductionData {
            prime: p,
            minimal_model: model,
            to_minimal: iso,
            kind: ReductionType::Good,
            n: 0,
            singular_point: None,
        });
    }
    let node = singular_point_mod(&model, p)?;
    if valuation(&inv.c4, p) > 0 {
        return Ok(ReductionData {
            prime: p,
            minimal_model: model,
            to_minimal: iso,
            kind: ReductionType::Additive,
            n: 0,
            singular_point: Some(node),
        });
    }
    // Move the node to the origin; tangents are T^2 + a1 T - a2 = 0.
    let shift = Isomorphism {
        u: Rational::from(1),
        r: Rational::from(node.0),
        s: Rational::new(),
        t: Rational::from(node.1),
    };
    let moved = model.transform(&shift)?;
    let a1 = mod_p(&moved.a1, p);
    let a2 = mod_p(&moved.a2, p);
    let split = if p == 2 {
        // a1 is odd for a node; roots of T^2 + T + a2 exist iff a2 is even.
        a2 == 0
    } else {
        legendre((a1 * a1 + 4 * a2) % p, p) == 1
    };
    Ok(ReductionData {
        prime: p,
        minimal_model: model,
        to_minimal: iso,
        kind: if split {
            ReductionType::MultiplicativeSplit
        } else {
            ReductionType::MultiplicativeNonsplit
        },
        n: vd as u32,
        singular_point: Some(node),
    })
}

/// A model minimal at every prime, reached by clearing denominators and
/// then reducing one bad prime at a time with integral `r, s, t`.
pub fn global_minimal_model(c: &WeierstrassCurve) -> Result<(WeierstrassCurve, Isomorphism)> {
    let mut d = Integer::from(1);
    for a in c.coeffs() {
        d.lcm_mut(a.denom());
    }
    let mut iso = Isomorphism {
        u: Rational::from((Integer::from(1), d)),
        r: Rational::new(),
        s: Rational::new(),
        t: Rational::new(),
    };
    let mut cur = c.transform(&iso)?;
    for p in bad_primes(&cur) {
        let (next, step) = minimal_at(&cur, p)?;
        cur = next;
        iso = iso.then(&step);
    }
    Ok((cur, iso))
}

/// Primes dividing the numerator of the minimal discriminant.
pub fn bad_primes(c: &WeierstrassCurve) -> Vec<u64> {
    let d = c.discriminant();
    let mut n = Integer::from(d.numer() * d.denom()).abs();
    let mut out = Vec::new();
    let mut f = 2u64;
    while Integer::from(f) * f <= n {
        if n.is_divisible_u(f as u32) {
            out.push(f);
            while n.is_divisible_u(f as u32) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n.to_u64().expect("prime factor fits in u64"));
    }
    out
}

/// Formal sum of rational points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorOnCurve {
    pub terms: Vec<(CurvePoint, i64)>,
}

impl DivisorOnCurve {
    pub fn new(terms: Vec<(CurvePoint, i64)>) -> Self {
        let mut out: Vec<(CurvePoint, i64)> = Vec::new();
        for (p, m) in terms {
            match out.iter_mut().find(|(q, _)| *q == p) {
                Some(e) => e.1 += m,
                None => out.push((p, m)),
            }
        }
        out.retain(|(_, m)| *m != 0);
        DivisorOnCurve { terms: out }
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(_, m)| m).sum()
    }

    pub fn support(&self) -> Vec<CurvePoint> {
        self.terms.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn multiplicity(&self, p: &CurvePoint) -> i64 {
        self.terms.iter().find(|(q, _)| q == p).map_or(0, |(_, m)| *m)
    }

    /// Sum of the points in the group law.
    pub fn sum(&self, c: &WeierstrassCurve) -> CurvePoint {
        self.terms
            .iter()
            .fold(CurvePoint::Infinity, |acc, (p, m)| c.add(&acc, &c.mul(p, *m)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentAssignment {
    pub n: u32,
    pub points: Vec<CurvePoint>,
    /// Order of each point in the component group.
    pub orders: Vec<u32>,
    /// Component index mod `n`, when it is forced by the order alone.
    pub index: Vec<Option<u32>>,
}

fn reduces_to_node(rd: &ReductionData, pt: &CurvePoint) -> bool {
    let node = match rd.singular_point {
        Some(n) => n,
        None => return false,
    };
    match WeierstrassCurve::transform_point(&rd.to_minimal, pt) {
        CurvePoint::Infinity => false,
        CurvePoint::Affine(x, y) => {
            if valuation(&x, rd.prime) < 0 {
                return false;
            }
            (mod_p(&x, rd.prime), mod_p(&y, rd.prime)) == node
        }
    }
}

/// Order of each rational point in the component group at a prime of
/// multiplicative reduction: the least `m` with `[m] pt` reducing to a
/// smooth point.
pub fn component_orders(
    c: &WeierstrassCurve,
    pts: &[CurvePoint],
    rd: &ReductionData,
) -> Result<ComponentAssignment> {
    if !rd.kind.is_multiplicative() {
        return Err(Error::Domain(format!(
            "component orders need multiplicative reduction, found {:?} at {}",
            rd.kind, rd.prime
        )));
    }
    let cap = if rd.kind == ReductionType::MultiplicativeSplit { rd.n } else { 2 };
    let mut orders = Vec::with_capacity(pts.len());
    for pt in pts {
        if !c.is_on(pt) {
            return Err(Error::Domain(format!("{pt} is not on the curve")));
        }
        let mut acc = pt.clone();
        let mut found = None;
        for m in 1..=cap.max(1) {
            if !reduces_to_node(rd, &acc) {
                found = Some(m);
                break;
            }
            acc = c.add(&acc, pt);
        }
        let m = found.ok_or_else(|| {
            Error::Consistency(format!("no multiple of {pt} up to {cap} reduces to a smooth point"))
        })?;
        orders.push(m);
    }
    let n = rd.n;
    let index = orders
        .iter()
        .map(|&d| match d {
            1 => Some(0),
            2 if n % 2 == 0 => Some(n / 2),
            _ => None,
        })
        .collect();
    Ok(ComponentAssignment { n, points: pts.to_vec(), orders, index })
}

/// `B_3(x) = x^3 - 3x^2/2 + x/2`.
pub fn bernoulli3(x: &Rational) -> Rational {
    let x2 = Rational::from(x * x);
    Rational::from(&x2 * x) - Rational::from(&x2 * 3u32) / 2 + Rational::from(x / 2u32)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// For each point, a relation `pt = [m] earlier` found by small multiples.
fn multiple_relations(c: &WeierstrassCurve, pts: &[CurvePoint], cap: i64) -> Vec<Option<(usize, i64)>> {
    let mut out = vec![None; pts.len()];
    for i in 0..pts.len() {
        if pts[i] == CurvePoint::Infinity {
            continue;
        }
        'search: for j in 0..i {
            if out[j].is_some() || pts[j] == CurvePoint::Infinity {
                continue;
            }
            for m in -cap..=cap {
                if m != 0 && c.mul(&pts[j], m) == pts[i] {
                    out[i] = Some((j, m));
                    break 'search;
                }
            }
        }
    }
    out
}

/// All values of the double Bernoulli sum over component-index assignments
/// consistent with the orders and with the multiples among the points.
/// The set is closed under negation.
pub fn delta_p(
    c: &WeierstrassCurve,
    div1: &DivisorOnCurve,
    div2: &DivisorOnCurve,
    rd: &ReductionData,
    assignment: &ComponentAssignment,
) -> Result<BTreeSet<Rational>> {
    if rd.kind != ReductionType::MultiplicativeSplit {
        return Err(Error::Domain(format!("delta_p needs split multiplicative reduction at {}", rd.prime)));
    }
    let n = assignment.n;
    if n == 0 || n != rd.n {
        return Err(Error::Domain("assignment and reduction data disagree on N".into()));
    }
    let pts = &assignment.points;
    for d in [div1, div2] {
        for p in d.support() {
            if !pts.contains(&p) {
                return Err(Error::Domain(format!("no component order given for {p}")));
            }
        }
    }
    for (&d, p) in assignment.orders.iter().zip(pts) {
        if d == 0 || n % d != 0 {
            return Err(Error::Consistency(format!("order {d} of {p} does not divide N = {n}")));
        }
    }
    let relations = multiple_relations(c, pts, 2 * n as i64 + 2);
    let free: Vec<usize> = (0..pts.len())
        .filter(|&i| pts[i] != CurvePoint::Infinity && relations[i].is_none())
        .collect();
    // Candidate indices of exact order d in Z/N.
    let choices: Vec<Vec<u32>> = free
        .iter()
        .map(|&i| {
            let d = assignment.orders[i];
            match assignment.index[i] {
                Some(v) => vec![v],
                None => (0..n).filter(|&v| n / gcd(v, n).max(1) == d || (v == 0 && d == 1)).collect(),
            }
        })
        .collect();
    let mut values = BTreeSet::new();
    let mut counter = vec![0usize; free.len()];
    let mut consistent = false;
    'outer: loop {
        let mut nu: Vec<Option<u32>> = vec![None; pts.len()];
        for (k, &i) in free.iter().enumerate() {
            nu[i] = Some(choices[k].get(counter[k]).copied().unwrap_or(u32::MAX));
        }
        let mut ok = choices.iter().all(|c| !c.is_empty());
        for i in 0..pts.len() {
            if pts[i] == CurvePoint::Infinity {
                nu[i] = Some(0);
            } else if let Some((j, m)) = relations[i] {
                let base = nu[j].unwrap_or(0) as i64;
                nu[i] = Some((m * base).rem_euclid(n as i64) as u32);
            }
            let v = nu[i].unwrap_or(0);
            let exact = if v == 0 { 1 } else { n / gcd(v, n) };
            if exact != assignment.orders[i] {
                ok = false;
            }
        }
        if ok {
            consistent = true;
            let d = |div: &DivisorOnCurve, mu: u32| -> i64 {
                div.terms
                    .iter()
                    .map(|(p, m)| {
                        let i = pts.iter().position(|q| q == p).expect("checked above");
                        if nu[i] == Some(mu) {
                            *m
                        } else {
                            0
                        }
                    })
                    .sum()
            };
            let mut total = Rational::new();
            for mu in 0..n {
                let d1 = d(div1, mu);
                if d1 == 0 {
                    continue;
                }
                for v in 0..n {
                    let d2 = d(div2, (v + mu) % n);
                    if d2 != 0 {
                        total += bernoulli3(&Rational::from((v, n))) * Rational::from(d1 * d2);
                    }
                }
            }
            total /= Rational::from(3 * n);
            values.insert(Rational::from(-&total));
            values.insert(total);
        }
        // Advance the mixed-radix counter.
        for k in 0..free.len() {
            counter[k] += 1;
            if counter[k] < choices[k].len() {
                continue 'outer;
            }
            counter[k] = 0;
        }
        break;
    }
    if !consistent {
        return Err(Error::Consistency(
            "no component-index assignment is consistent with the given orders".into(),
        ));
    }
    Ok(values)
}

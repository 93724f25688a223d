//! Where a plane curve `Z(P)` meets the torus `|t1| = |t2| = 1`, where it is
//! singular, and how its `t2`-branches touch the torus.

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{roots_with_radii, uni_to_balls, BigComplex, BigReal, PrecisionBudget};
use crate::poly::{
    cyclotomic_poly, gcd_t2, is_cyclotomic_product, resultant_t2, BiPoly, LaurentPoly2, UniPoly,
};

/// Default denominator bound for root-of-unity tags.
pub const DEFAULT_UNITY_BOUND: u64 = 120;

/// A root of a rational polynomial certified to lie on the unit circle,
/// written `e(theta)` with `theta` in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct UnitRoot {
    pub theta: BigReal,
    pub z: BigComplex,
    /// `(n, d)` when the root is exactly `e(n/d)`.
    pub exact: Option<(i64, i64)>,
}

/// `arg(z) / 2 pi` reduced to `[0, 1)`.
pub fn turn_of(z: &BigComplex) -> BigReal {
    let prec = z.prec();
    let t = z.arg().div(&BigReal::pi(prec).mul_i64(2));
    if t.mid() < &0 {
        t.add(&BigReal::from_i64(1, prec))
    } else {
        t
    }
}

fn exact_turn(n: i64, d: i64, prec: u32) -> BigReal {
    BigReal::from_rational(&Rational::from((n, d)), prec)
}

/// Is the (isolated, simple) root `z` with inclusion radius `r` its own
/// mirror `1/conj(z)`? True when the disc meets the circle and no other
/// root can be that mirror.
fn self_mirrored(z: &BigComplex, r: f64, others: &[&BigComplex]) -> bool {
    let m = z.abs();
    let dist = m.sub(&BigReal::from_i64(1, m.prec())).abs_lower();
    if dist > r {
        return false;
    }
    let sep = others
        .iter()
        .map(|w| z.sub(w).abs_lower())
        .fold(f64::INFINITY, f64::min);
    sep > 4.0 * r + 1e-300
}

/// Unit-circle roots of `q`, without multiplicity, ascending in `theta`.
/// Cyclotomic factors give exact roots; the rest are certified by the
/// `z -> 1/conj(z)` symmetry of self-reciprocal factors.
pub fn unit_circle_roots(q: &UniPoly, bits: u32) -> Result<Vec<UnitRoot>> {
    if q.is_zero() {
        return Err(Error::Domain("unit-circle roots of the zero polynomial".into()));
    }
    let sf = q.squarefree_part();
    let fac = is_cyclotomic_product(&sf);
    let mut out = Vec::new();
    for &(d, _) in &fac.factors {
        for n in 0..d as i64 {
            if Integer::from(n).gcd(&Integer::from(d)) == 1 {
                let theta = exact_turn(n, d as i64, bits);
                out.push(UnitRoot { z: BigComplex::unit(&theta), theta, exact: Some((n, d as i64)) });
            }
        }
    }
    let rest = fac.residual;
    if rest.degree().unwrap_or(0) > 0 {
        let balls = uni_to_balls(&rest, bits + 32);
        let roots = roots_with_radii(&balls, bits)?;
        for (i, r) in roots.iter().enumerate() {
            if r.cluster > 1 {
                return Err(Error::PrecisionExhausted("squarefree polynomial with clustered roots".into()));
            }
            let others: Vec<&BigComplex> =
                roots.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| &x.value).collect();
            if self_mirrored(&r.value, r.radius, &others) {
                out.push(UnitRoot { theta: turn_of(&r.value), z: r.value.clone(), exact: None });
            } else {
                let m = r.value.abs();
                if m.sub(&BigReal::from_i64(1, bits)).contains_zero() {
                    return Err(Error::PrecisionExhausted(
                        "cannot decide whether a root lies on the unit circle".into(),
                    ));
                }
            }
        }
    }
    out.sort_by(|a, b| a.theta.mid().partial_cmp(b.theta.mid()).unwrap());
    Ok(out)
}

/// Best rational approximation `n/d` of `x` with `d <= bound` lying within
/// `tol`, from the continued-fraction convergents.
pub fn rational_within(x: &Float, tol: f64, bound: u64) -> Option<(i64, i64)> {
    let prec = x.prec();
    let mut y = x.clone();
    let (mut p0, mut q0, mut p1, mut q1) = (Integer::from(0), Integer::from(1), Integer::from(1), Integer::from(0));
    for _ in 0..64 {
        let a = Float::with_val(prec, y.floor_ref()).to_integer()?;
        let p2 = Integer::from(&a * &p1) + &p0;
        let q2 = Integer::from(&a * &q1) + &q0;
        if q2 > bound {
            return None;
        }
        let approx = Float::with_val(prec, &p2) / Float::with_val(prec, &q2);
        if Float::with_val(prec, x - &approx).abs().to_f64() <= tol {
            return Some((p2.to_i64()?, q2.to_i64()?));
        }
        let frac = Float::with_val(prec, &y - Float::with_val(prec, &a));
        if frac.is_zero() {
            return None;
        }
        y = frac.recip();
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    None
}

/// Exact test `p(e(n1/d1), e(n2/d2)) = 0`, by reducing modulo `Phi_L`.
pub fn vanishes_at_unity(p: &LaurentPoly2, n1: i64, d1: i64, n2: i64, d2: i64) -> bool {
    let l = Integer::from(d1).lcm(&Integer::from(d2)).to_i64().unwrap();
    let (e1, e2) = (n1 * (l / d1), n2 * (l / d2));
    let mut coeffs = vec![Rational::new(); l as usize];
    for (&(k1, k2), c) in p.terms() {
        let e = (k1 * e1 + k2 * e2).rem_euclid(l) as usize;
        coeffs[e] += c;
    }
    let s = UniPoly::new(coeffs);
    if s.is_zero() {
        return true;
    }
    s.div_rem(&cyclotomic_poly(l as u64)).1.is_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Contact {
    /// The branch modulus crosses 1 with nonzero speed.
    Transversal,
    /// The branch touches the circle and stays on one side.
    Tangent,
    /// `P`, `dP/dt1`, `dP/dt2` all vanish.
    Singular,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusPoint {
    pub t1: BigComplex,
    pub t2: BigComplex,
    pub theta1: BigReal,
    pub theta2: BigReal,
    /// `[n1, d1, n2, d2]` with `t_j = e(n_j / d_j)`, verified exactly.
    pub unity: Option<[i64; 4]>,
    pub contact: Option<Contact>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusReport {
    pub points: Vec<TorusPoint>,
    /// `Z(P)` contains arcs lying in `T^2`.
    pub one_dimensional: bool,
    /// Product of the factors responsible for the arcs, when detected.
    pub arc_factor: Option<LaurentPoly2>,
}

fn eval_bi(coeffs: &[UniPoly], t1: &BigComplex, bits: u32) -> Vec<BigComplex> {
    coeffs.iter().map(|a| eval_uni(a, t1, bits)).collect()
}

pub(crate) fn eval_uni(a: &UniPoly, z: &BigComplex, bits: u32) -> BigComplex {
    let mut acc = BigComplex::zero(bits);
    for c in a.coeffs().iter().rev() {
        acc = acc.mul(z).add(&BigComplex::from_rational(c, bits));
    }
    acc
}

/// `P(t1, t2)` with ball arithmetic (Laurent exponents allowed).
pub fn eval_laurent(p: &LaurentPoly2, t1: &BigComplex, t2: &BigComplex) -> BigComplex {
    let bits = t1.prec().max(t2.prec());
    let mut acc = BigComplex::zero(bits);
    for (&(a, b), c) in p.terms() {
        let m = t1.powi_signed(a).mul(&t2.powi_signed(b));
        acc = acc.add(&m.scale(&BigReal::from_rational(c, bits)));
    }
    acc
}

/// Does `g(e(theta), .)` have a root on the unit circle for some sample
/// theta? Used to decide whether a self-reciprocal factor carries arcs.
fn has_torus_arcs(g: &BiPoly, bits: u32) -> bool {
    if g.degree_t2().unwrap_or(0) == 0 {
        return false;
    }
    let samples = 97;
    let mut hits = 0;
    for k in 0..samples {
        let theta = BigReal::from_rational(&Rational::from((2 * k + 1, 2 * samples)), bits);
        let t1 = BigComplex::unit(&theta);
        let c = eval_bi(g.coeffs(), &t1, bits);
        if c.last().map_or(true, |a| a.contains_zero()) {
            continue;
        }
        if let Ok(roots) = roots_with_radii(&c, bits) {
            if roots.iter().any(|r| r.value.abs().sub(&BigReal::from_i64(1, bits)).abs_upper() < 1e-12) {
                hits += 1;
            }
        }
    }
    hits > 0
}

/// Torus points of `Z(g)` lying over `t1 = z`: roots `w` of `g(z, .)` with
/// `|w| = 1`, certified by the mirror argument.
fn torus_points_over(g: &BiPoly, u: &UnitRoot, bits: u32, strict: bool) -> Result<Vec<BigComplex>> {
    let c = eval_bi(g.coeffs(), &u.z, bits);
    let mut c = c;
    while c.last().map_or(false, |a| a.contains_zero()) && c.len() > 1 {
        // leading coefficient vanishes here: that root went to infinity
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let roots = roots_with_radii(&c, bits)?;
    let mut out = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        let others: Vec<&BigComplex> =
            roots.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| &x.value).collect();
        let on = if r.cluster == 1 {
            self_mirrored(&r.value, r.radius, &others)
        } else {
            // a multiple root: accept when its disc meets the circle
            r.value.abs().sub(&BigReal::from_i64(1, bits)).abs_lower() <= r.radius
        };
        if on {
            if !out.iter().any(|w: &BigComplex| w.sub(&r.value).abs_upper() <= 2.0 * r.radius + 1e-300) {
                out.push(r.value.clone());
            }
        } else if strict && r.cluster == 1 {
            let d = r.value.abs().sub(&BigReal::from_i64(1, bits));
            if d.contains_zero() {
                return Err(Error::PrecisionExhausted("cannot separate a t2-root from the circle".into()));
            }
        }
    }
    Ok(out)
}

fn make_point(p: &LaurentPoly2, t1: &UnitRoot, t2: BigComplex, bound: u64, bits: u32) -> TorusPoint {
    let theta2 = turn_of(&t2);
    let tol1 = t1.theta.rad() + 2f64.powi(-(bits as i32) / 2);
    let tol2 = theta2.rad() + 2f64.powi(-(bits as i32) / 2);
    let r1 = t1.exact.or_else(|| rational_within(t1.theta.mid(), tol1, bound));
    let r2 = rational_within(theta2.mid(), tol2, bound);
    let mut unity = None;
    if let (Some((n1, d1)), Some((n2, d2))) = (r1, r2) {
        let n1 = n1.rem_euclid(d1);
        let n2 = n2.rem_euclid(d2);
        if vanishes_at_unity(p, n1, d1, n2, d2) {
            unity = Some([n1, d1, n2, d2]);
        }
    }
    let (theta1, t1v, theta2, t2v) = match unity {
        Some([n1, d1, n2, d2]) => {
            let a = exact_turn(n1, d1, bits);
            let b = exact_turn(n2, d2, bits);
            (a.clone(), BigComplex::unit(&a), b.clone(), BigComplex::unit(&b))
        }
        None => (t1.theta.clone(), t1.z.clone(), theta2, t2),
    };
    TorusPoint { t1: t1v, t2: t2v, theta1, theta2, unity, contact: None }
}

/// `Z(P) ∩ T^2`.
///
/// `P` is split as `G * H` with `G = gcd(P, P^dagger)` in `Q(t1)[t2]`. The
/// isolated points come from the unit-circle roots of `Res_t2(H, H^dagger)`.
/// If `G` (or a factor depending on `t1` only) has roots on the circle over
/// an interval of `theta`, the intersection is one-dimensional; the points
/// listed for `G` are then the ends of its torus arcs.
pub fn torus_intersections(p: &LaurentPoly2, budget: &PrecisionBudget, unity_bound: u64) -> Result<TorusReport> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    let bits = budget.working_bits;
    let (pn, _) = p.normalized();
    let full = BiPoly::from_laurent(&pn);
    let mut one_dimensional = false;
    let mut arc_factor: Option<LaurentPoly2> = None;

    let content = full.content_t1();
    if content.degree().unwrap_or(0) > 0 && !unit_circle_roots(&content, bits)?.is_empty() {
        one_dimensional = true;
        arc_factor = Some(LaurentPoly2::from_t2_coefficients(&[content.clone()]));
    }
    let f = full.primitive_t1();
    let mut points: Vec<TorusPoint> = Vec::new();
    if f.degree_t2().unwrap_or(0) == 0 {
        return Ok(TorusReport { points, one_dimensional, arc_factor });
    }
    let fd = BiPoly::from_laurent(&f.to_laurent().reciprocal_partner());
    let g = gcd_t2(&f, &fd);
    let mut h = f.div_exact(&g).ok_or_else(|| Error::Consistency("gcd does not divide".into()))?;

    // self-reciprocal part: arcs and their endpoints
    if g.degree_t2().unwrap_or(0) > 0 {
        if has_torus_arcs(&g, bits) {
            one_dimensional = true;
            let gl = g.to_laurent();
            arc_factor = Some(match arc_factor {
                Some(a) => a.mul(&gl),
                None => gl,
            });
        }
        let crit = crate::poly::discriminant_t2_general(&g.to_laurent()).mul(&g.leading());
        if !crit.is_zero() {
            for u in unit_circle_roots(&crit, bits)? {
                for w in torus_points_over(&g, &u, bits, false)? {
                    points.push(make_point(&pn, &u, w, unity_bound, bits));
                }
            }
        }
    }

    // isolated part
    loop {
        if h.degree_t2().unwrap_or(0) == 0 {
            break;
        }
        let hd = BiPoly::from_laurent(&h.to_laurent().reciprocal_partner());
        let r = resultant_t2(&h, &hd);
        if r.is_zero() {
            let g2 = gcd_t2(&h, &hd);
            h = h.div_exact(&g2).ok_or_else(|| Error::Consistency("gcd does not divide".into()))?;
            continue;
        }
        for u in unit_circle_roots(&r, bits)? {
            for w in torus_points_over(&h, &u, bits, true)? {
                points.push(make_point(&pn, &u, w, unity_bound, bits));
            }
        }
        break;
    }
    // dedupe (a point may come from both parts)
    let mut uniq: Vec<TorusPoint> = Vec::new();
    for pt in points {
        if !uniq.iter().any(|q| {
            q.t1.sub(&pt.t1).abs_upper() < 1e-20 && q.t2.sub(&pt.t2).abs_upper() < 1e-20
        }) {
            uniq.push(pt);
        }
    }
    uniq.sort_by(|a, b| {
        a.theta1
            .mid()
            .partial_cmp(b.theta1.mid())
            .unwrap()
            .then(a.theta2.mid().partial_cmp(b.theta2.mid()).unwrap())
    });
    for pt in &mut uniq {
        pt.contact = classify_torus_contact(&pn, pt, budget).ok();
    }
    Ok(TorusReport { points: uniq, one_dimensional, arc_factor })
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularPoint {
    pub z1: BigComplex,
    pub z2: BigComplex,
    /// `(log|z1|, log|z2|)`.
    pub log_radii: (BigReal, BigReal),
}

/// Common zeros of `P`, `dP/dt1`, `dP/dt2` in `(C^*)^2`.
pub fn singular_points(p: &LaurentPoly2, budget: &PrecisionBudget) -> Result<Vec<SingularPoint>> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    let bits = budget.working_bits;
    let (pn, _) = p.normalized();
    let f = BiPoly::from_laurent(&pn);
    if f.degree_t2().unwrap_or(0) == 0 {
        // P = a(t1): singular where a has a multiple root
        let a = f.leading();
        let rep = UniPoly::gcd(&a, &a.derivative());
        if rep.degree().unwrap_or(0) > 0 {
            return Err(Error::hypothesis("squarefree", "P has a repeated factor in t1"));
        }
        return Ok(Vec::new());
    }
    let fx = BiPoly::from_laurent(&pn.d_dt1());
    let fy = f.d_dt2();
    let r_y = resultant_t2(&f, &fy);
    let r_x = if fx.is_zero() { UniPoly::zero() } else { resultant_t2(&f, &fx) };
    if r_y.is_zero() {
        return Err(Error::hypothesis(
            "squarefree",
            "P shares a factor with dP/dt2: positive-dimensional singular locus",
        ));
    }
    let mut g = if r_x.is_zero() { r_y.clone() } else { UniPoly::gcd(&r_y, &r_x) };
    // drop t1 = 0
    g = g.unshift(g.trailing_zeros());
    if g.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let g = g.squarefree_part();
    let balls = uni_to_balls(&g, bits + 32);
    let roots = roots_with_radii(&balls, bits)?;
    let tol = 2f64.powi(-(bits as i32) / 3);
    let mut out = Vec::new();
    for r in roots {
        let z1 = r.value;
        let c = eval_bi(f.coeffs(), &z1, bits);
        let mut c = c;
        while c.len() > 1 && c.last().unwrap().contains_zero() {
            c.pop();
        }
        if c.len() <= 1 {
            continue;
        }
        let ws = roots_with_radii(&c, bits)?;
        for w in ws {
            if w.value.contains_zero() {
                continue;
            }
            let z2 = w.value.clone();
            let scale = 1.0 + z1.abs_upper().max(z2.abs_upper());
            let px = eval_laurent(&pn.d_dt1(), &z1, &z2).abs_upper();
            let py = eval_laurent(&pn.d_dt2(), &z1, &z2).abs_upper();
            if px <= tol * scale.powi(8) && py <= tol * scale.powi(8) {
                if out.iter().any(|s: &SingularPoint| {
                    s.z1.sub(&z1).abs_upper() < 1e-20 && s.z2.sub(&z2).abs_upper() < 1e-20
                }) {
                    continue;
                }
                let log_radii = (z1.ln_abs(), z2.ln_abs());
                out.push(SingularPoint { z1: z1.clone(), z2, log_radii });
            }
        }
    }
    Ok(out)
}

/// The `k` roots of `P(e(theta), .)` nearest to `w0`.
fn nearest_roots(p: &LaurentPoly2, theta: &BigReal, w0: &BigComplex, k: usize, bits: u32) -> Option<Vec<BigComplex>> {
    let coeffs = p.t2_coefficients();
    let t1 = BigComplex::unit(theta);
    let mut c = eval_bi(&coeffs, &t1, bits);
    while c.len() > 1 && c.last().unwrap().contains_zero() {
        c.pop();
    }
    let mut roots: Vec<BigComplex> = roots_with_radii(&c, bits).ok()?.into_iter().map(|r| r.value).collect();
    if roots.len() < k {
        return None;
    }
    roots.sort_by(|a, b| a.sub(w0).abs_upper().total_cmp(&b.sub(w0).abs_upper()));
    roots.truncate(k);
    Some(roots)
}

/// Signs of `|w| - 1` over the branches through `w0`, just beside `theta`.
fn side_signs(p: &LaurentPoly2, theta: &BigReal, w0: &BigComplex, k: usize, bits: u32) -> Option<Vec<i8>> {
    let one = BigReal::from_i64(1, bits);
    let mut signs = Vec::new();
    for w in nearest_roots(p, theta, w0, k, bits)? {
        let d = w.abs().sub(&one);
        signs.push(if d.is_positive() {
            1
        } else if d.is_negative() {
            -1
        } else {
            return None;
        });
    }
    signs.sort();
    Some(signs)
}

/// How the `t2`-branches through `pt` meet `|t2| = 1`.
///
/// A simple root crossing with nonzero speed is transversal. Otherwise the
/// branches through the point are sampled on both sides: if the pattern of
/// inside/outside changes the contact is transversal, else tangent.
pub fn classify_torus_contact(p: &LaurentPoly2, pt: &TorusPoint, budget: &PrecisionBudget) -> Result<Contact> {
    let bits = budget.working_bits;
    let (pn, _) = p.normalized();
    let val = eval_laurent(&pn, &pt.t1, &pt.t2);
    let tol = 2f64.powi(-(bits as i32) / 3);
    if val.abs_upper() > tol {
        return Err(Error::Domain("point is not on the curve".into()));
    }
    let px = eval_laurent(&pn.d_dt1(), &pt.t1, &pt.t2);
    let py = eval_laurent(&pn.d_dt2(), &pt.t1, &pt.t2);
    let small = |z: &BigComplex| z.abs_upper() <= tol;
    if small(&px) && small(&py) {
        return Ok(Contact::Singular);
    }
    let mut branches = 1;
    if small(&py) {
        branches = 2;
    } else {
        // d|t2|/dtheta = Re(conj(t2) * (-2 pi i t1 P_t1 / P_t2))
        let two_pi_i = BigComplex::new(BigReal::zero(bits), BigReal::pi(bits).mul_i64(2));
        let dt2 = two_pi_i.mul(&pt.t1).mul(&px).div(&py).neg();
        let speed = pt.t2.conj().mul(&dt2).re;
        if speed.abs_lower() > tol {
            return Ok(Contact::Transversal);
        }
    }
    let h = BigReal::from_f64(2f64.powi(-(bits as i32) / 5), bits);
    let left = side_signs(&pn, &pt.theta1.sub(&h), &pt.t2, branches, bits);
    let right = side_signs(&pn, &pt.theta1.add(&h), &pt.t2, branches, bits);
    match (left, right) {
        (Some(l), Some(r)) if l != r => Ok(Contact::Transversal),
        (Some(l), Some(_)) if l.iter().all(|&s| s == l[0]) => Ok(Contact::Tangent),
        _ => Err(Error::PrecisionExhausted("contact undecidable at this precision".into())),
    }
}

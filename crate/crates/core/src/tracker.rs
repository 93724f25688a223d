//! Following the `t2`-roots of `P(e(theta), .)` around the circle.
//!
//! `[0, 1]` is cut at every `theta` where something happens to the roots:
//! a root crosses or touches `|t2| = 1`, two roots collide, or a root passes
//! through 0. On each piece every root is a continuous branch whose modulus
//! stays on one side of 1 (or on the circle), so the root set splits into
//! arcs classified as inside, on the torus, or outside. Jensen's formula at
//! `t2 = 0` then gives
//!
//! `m(P) - m(P*) = - sum over inside arcs of the integral of log|F(e(theta))|`,
//!
//! where `P*(t1) = P(t1, 0)`.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mahler::{clean_breakpoints, slice, unit_turns};
use crate::numerics::{integrate_with, roots_with_radii, BigComplex, BigReal, PrecisionBudget, QuadOptions};
use crate::poly::{discriminant_t2_general, BiPoly, LaurentPoly2};
use crate::torus::{singular_points, torus_intersections, turn_of, TorusPoint, DEFAULT_UNITY_BOUND};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcClass {
    Inside,
    OnTorus,
    Outside,
}

#[derive(Clone, Debug, Serialize)]
pub struct Arc {
    /// Index of the piece `[tau_k, tau_{k+1}]`.
    pub piece: usize,
    pub theta_interval: (BigReal, BigReal),
    pub branch_id: usize,
    /// `(theta, F(e(theta)))`, endpoints included.
    pub samples: Vec<(BigReal, BigComplex)>,
    pub classification: ArcClass,
}

impl Arc {
    pub fn start(&self) -> &BigComplex {
        &self.samples[0].1
    }

    pub fn end(&self) -> &BigComplex {
        &self.samples[self.samples.len() - 1].1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathDecomposition {
    /// `0 = tau_0 < ... < tau_s = 1`.
    pub subdivision: Vec<BigReal>,
    pub arcs: Vec<Arc>,
    /// Arc indices; each path is a cycle of arcs of one classification.
    pub closed_paths: Vec<Vec<usize>>,
    /// Arc indices of inside paths whose ends lie on the torus.
    pub open_paths: Vec<Vec<usize>>,
    /// Torus points where the numbers of arcs in the closed disc arriving and
    /// leaving differ.
    pub boundary_set: Vec<TorusPoint>,
    /// Indices of the inside arcs.
    pub inside_arcs: Vec<usize>,
    /// On-torus arcs left out of the chain: duplicates of another branch, and
    /// those not needed to join inside paths ending on the torus.
    pub discarded: Vec<usize>,
}

const INTERIOR_SAMPLES: usize = 12;
const MATCH_TOL: f64 = 1e-12;


struct Slice<'a> {
    coeffs: &'a [crate::poly::UniPoly],
    bits: u32,
    poles: &'a [BigReal],
}

impl Slice<'_> {
    /// `theta` moved a hair towards `towards` if it is a zero of `a_n`.
    fn off_pole(&self, theta: &BigReal, towards: &BigReal) -> BigReal {
        let at_pole = self.poles.iter().any(|q| {
            let d = q.dist_f64(theta);
            d < 1e-30 || (1.0 - d).abs() < 1e-30
        });
        if !at_pole {
            return theta.clone();
        }
        let eps = BigReal::from_f64(2f64.powi(-(self.bits as i32) / 4), self.bits);
        if towards.mid() > theta.mid() {
            theta.add(&eps)
        } else {
            theta.sub(&eps)
        }
    }

    fn roots(&self, theta: &BigReal) -> Result<Vec<(BigComplex, f64)>> {
        let c = slice(self.coeffs, theta, self.bits);
        Ok(roots_with_radii(&c, self.bits)?.into_iter().map(|r| (r.value, r.radius)).collect())
    }
}

fn dist(a: &BigComplex, b: &BigComplex) -> f64 {
    a.sub(b).to_c64().norm()
}

/// Reorder `next` so that `next[i]` continues `prev[i]`; returns the
/// largest step taken.
fn match_roots(prev: &[BigComplex], next: Vec<(BigComplex, f64)>) -> (Vec<BigComplex>, f64) {
    let n = prev.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, q) in next.iter().enumerate() {
            pairs.push((dist(p, &q.0), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Option<BigComplex>> = vec![None; n];
    let mut used = vec![false; n];
    let mut worst = 0f64;
    for (d, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(next[j].0.clone());
            used[j] = true;
            worst = worst.max(d);
        }
    }
    (out.into_iter().map(|z| z.unwrap()).collect(), worst)
}

fn separation(v: &[BigComplex]) -> f64 {
    let mut s = f64::INFINITY;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            s = s.min(dist(&v[i], &v[j]));
        }
    }
    s
}

fn modulus_sign(z: &BigComplex, tol: f64) -> i8 {
    let d = z.to_c64().norm() - 1.0;
    let m = z.abs().sub(&BigReal::from_i64(1, z.prec()));
    if m.abs_upper() <= tol || d.abs() <= tol {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// Branches over one piece: `branches[i]` is the list of sampled values.
fn follow_piece(
    s: &Slice,
    a: &BigReal,
    b: &BigReal,
) -> Result<(Vec<BigReal>, Vec<Vec<BigComplex>>)> {
    let steps = INTERIOR_SAMPLES + 1;
    let mut thetas: Vec<BigReal> = (0..=steps)
        .map(|k| {
            let w = b.sub(a);
            a.add(&w.mul_i64(k as i64).div_i64(steps as i64))
        })
        .collect();
    let n_t = thetas.len();
    thetas[0] = s.off_pole(&thetas[0], b);
    thetas[n_t - 1] = s.off_pole(&thetas[n_t - 1], a);
    let first = s.roots(&thetas[0])?;
    let mut cur: Vec<BigComplex> = first.into_iter().map(|r| r.0).collect();
    let n = cur.len();
    let mut branches: Vec<Vec<BigComplex>> = cur.iter().map(|z| vec![z.clone()]).collect();
    let mut out_thetas = vec![thetas[0].clone()];
    let mut k = 1;
    let mut depth = 0;
    while k < thetas.len() {
        let next = s.roots(&thetas[k])?;
        if next.len() != n {
            return Err(Error::Consistency("root count changed along a piece".into()));
        }
        let (matched, worst) = match_roots(&cur, next);
        let endpoint = k == 1 || k + 1 == thetas.len();
        let sep = separation(&cur).min(separation(&matched));
        if !endpoint && worst > 0.3 * sep && depth < 24 {
            // step too large for a safe continuation: halve it
            let mid = thetas[k - 1].add(&thetas[k]).div_i64(2);
            thetas.insert(k, mid);
            depth += 1;
            continue;
        }
        depth = 0;
        for (i, z) in matched.iter().enumerate() {
            branches[i].push(z.clone());
        }
        out_thetas.push(thetas[k].clone());
        cur = matched;
        k += 1;
    }
    Ok((out_thetas, branches))
}

/// Locate where the branch through `za` at `ta` and `zb` at `tb` has
/// modulus 1, by bisection.
fn locate_crossing(s: &Slice, ta: &BigReal, za: &BigComplex, tb: &BigReal, zb: &BigComplex) -> Result<BigReal> {
    let (mut lo, mut hi) = (ta.clone(), tb.clone());
    let (mut zlo, mut zhi) = (za.clone(), zb.clone());
    let slo = modulus_sign(&zlo, 0.0);
    let width = 2f64.powi(-(s.bits as i32) / 2);
    for _ in 0..(s.bits as usize) {
        if hi.sub(&lo).abs_upper() < width {
            break;
        }
        let mid = lo.add(&hi).div_i64(2);
        let roots = s.roots(&mid)?;
        let guess = zlo.add(&zhi).scale(&BigReal::from_f64(0.5, s.bits));
        let z = roots
            .into_iter()
            .map(|r| r.0)
            .min_by(|x, y| dist(x, &guess).total_cmp(&dist(y, &guess)))
            .unwrap();
        if modulus_sign(&z, 0.0) == slo {
            lo = mid;
            zlo = z;
        } else {
            hi = mid;
            zhi = z;
        }
    }
    let _ = zhi;
    Ok(lo.add(&hi).div_i64(2))
}

/// Subdivide `[0, 1]`, follow the roots and assemble arcs into paths.
pub fn track(p: &LaurentPoly2, budget: &PrecisionBudget) -> Result<PathDecomposition> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    let bits = budget.working_bits;
    let (pn, _) = p.normalized();
    let f = BiPoly::from_laurent(&pn);
    let one = BigReal::from_i64(1, bits);
    let zero = BigReal::zero(bits);
    if f.degree_t2().unwrap_or(0) == 0 {
        return Ok(PathDecomposition {
            subdivision: vec![zero, one],
            arcs: Vec::new(),
            closed_paths: Vec::new(),
            open_paths: Vec::new(),
            boundary_set: Vec::new(),
            inside_arcs: Vec::new(),
            discarded: Vec::new(),
        });
    }
    // where a_n vanishes a root escapes to infinity; pieces ending there are
    // sampled just short of the endpoint
    let poles = unit_turns(&f.leading(), bits)?;
    for s in singular_points(&pn, budget)? {
        let on_circle = s.log_radii.0.contains_zero() || s.log_radii.0.abs_upper() < 1e-20;
        let in_disc = !s.log_radii.1.is_positive() || s.log_radii.1.abs_upper() < 1e-20;
        if on_circle && in_disc {
            return Err(Error::hypothesis(
                "no singular point on S^1 x B",
                format!(
                    "singular point ({}, {}); apply desingularizing_transform first",
                    s.z1.display(10),
                    s.z2.display(10)
                ),
            ));
        }
    }
    let report = torus_intersections(&pn, budget, DEFAULT_UNITY_BOUND)?;
    let mut taus: Vec<BigReal> = report.points.iter().map(|q| q.theta1.clone()).collect();
    taus.extend(unit_turns(&f.coeffs()[0], bits)?);
    taus.extend(poles.iter().cloned());
    let disc = discriminant_t2_general(&pn);
    if !disc.is_zero() {
        taus.extend(unit_turns(&disc, bits)?);
    }
    let mut taus = clean_breakpoints(taus);
    let s = Slice { coeffs: f.coeffs(), bits, poles: &poles };
    let tol = 2f64.powi(-(bits as i32) / 2);

    // follow every piece; insert crossings the exact data missed
    let mut pieces: Vec<(Vec<BigReal>, Vec<Vec<BigComplex>>)>;
    let mut rounds = 0;
    loop {
        let mut cuts = vec![zero.clone()];
        cuts.extend(taus.iter().cloned());
        cuts.push(one.clone());
        pieces = Vec::new();
        let mut extra = Vec::new();
        for w in cuts.windows(2) {
            let (th, br) = follow_piece(&s, &w[0], &w[1])?;
            for b in &br {
                let signs: Vec<i8> = b[1..b.len() - 1].iter().map(|z| modulus_sign(z, tol)).collect();
                for j in 1..signs.len() {
                    if signs[j - 1] * signs[j] < 0 {
                        extra.push(locate_crossing(&s, &th[j], &b[j], &th[j + 1], &b[j + 1])?);
                    }
                }
            }
            pieces.push((th, br));
        }
        if extra.is_empty() || rounds > 4 {
            break;
        }
        rounds += 1;
        taus.extend(extra);
        taus = clean_breakpoints(taus);
    }

    let mut subdivision = vec![zero.clone()];
    subdivision.extend(taus.iter().cloned());
    subdivision.push(one.clone());
    let mut arcs: Vec<Arc> = Vec::new();
    for (k, (th, br)) in pieces.iter().enumerate() {
        for (i, b) in br.iter().enumerate() {
            let interior = &b[1..b.len() - 1];
            let signs: Vec<i8> = interior.iter().map(|z| modulus_sign(z, tol)).collect();
            let classification = if signs.iter().all(|&x| x == 0) {
                ArcClass::OnTorus
            } else if signs.iter().all(|&x| x <= 0) {
                ArcClass::Inside
            } else if signs.iter().all(|&x| x >= 0) {
                ArcClass::Outside
            } else {
                return Err(Error::Consistency(format!(
                    "branch {i} changes side on [{}, {}] without a detected crossing; raise the precision",
                    subdivision[k].display(12),
                    subdivision[k + 1].display(12)
                )));
            };
            arcs.push(Arc {
                piece: k,
                theta_interval: (subdivision[k].clone(), subdivision[k + 1].clone()),
                branch_id: i,
                samples: th.iter().cloned().zip(b.iter().cloned()).collect(),
                classification,
            });
        }
    }

    // two branches running along the same on-torus arc: keep the lower index
    let mut discarded = Vec::new();
    for a in 0..arcs.len() {
        for b in (a + 1)..arcs.len() {
            if arcs[a].piece == arcs[b].piece
                && arcs[a].classification == ArcClass::OnTorus
                && arcs[b].classification == ArcClass::OnTorus
                && arcs[a].samples.iter().zip(&arcs[b].samples).all(|(x, y)| dist(&x.1, &y.1) < MATCH_TOL)
                && !discarded.contains(&b)
            {
                discarded.push(b);
            }
        }
    }

    let npieces = pieces.len();
    // ends sampled off a pole land about `eps` apart across it
    let pole_eps = 2f64.powi(-(bits as i32) / 4);
    let node_tol: Vec<f64> = subdivision[..npieces]
        .iter()
        .map(|t| {
            let hit = poles.iter().any(|q| {
                let d = q.dist_f64(t);
                d < 1e-30 || (1.0 - d).abs() < 1e-30
            });
            if hit { (1e4 * pole_eps).max(1e-8) } else { 1e-8 }
        })
        .collect();
    // On-torus arcs contribute nothing to the integral, so each one may be
    // kept or dropped. Keep just those that join an inside path ending on
    // the torus to one starting there; drop the rest.
    let nodes_end = |i: usize| ((arcs[i].piece + 1) % npieces, arcs[i].end().clone());
    let nodes_start = |i: usize| (arcs[i].piece, arcs[i].start().clone());
    let same = |a: &(usize, BigComplex), b: &(usize, BigComplex)| a.0 == b.0 && dist(&a.1, &b.1) < node_tol[a.0];
    let inside: Vec<usize> = (0..arcs.len()).filter(|&i| arcs[i].classification == ArcClass::Inside).collect();
    // arrivals minus departures of inside arcs at a node
    let imbalance = |n: &(usize, BigComplex), extra: &[usize]| -> i64 {
        let all = inside.iter().chain(extra.iter());
        all.map(|&i| same(&nodes_end(i), n) as i64 - same(&nodes_start(i), n) as i64).sum()
    };
    let torus_arcs: Vec<usize> = (0..arcs.len())
        .filter(|&i| arcs[i].classification == ArcClass::OnTorus && !discarded.contains(&i))
        .collect();
    let mut kept: Vec<usize> = Vec::new();
    if !torus_arcs.is_empty() {
        let mut sources: Vec<(usize, BigComplex)> = Vec::new();
        for &i in &inside {
            let n = nodes_end(i);
            if !sources.iter().any(|m| same(m, &n)) {
                sources.push(n);
            }
        }
        for src in sources {
            while imbalance(&src, &kept) > 0 {
                // depth-first search along unused on-torus arcs
                let mut stack: Vec<(usize, Vec<usize>)> = torus_arcs
                    .iter()
                    .filter(|&&j| !kept.contains(&j) && same(&nodes_start(j), &src))
                    .map(|&j| (j, vec![j]))
                    .collect();
                let mut found = None;
                while let Some((j, path)) = stack.pop() {
                    let n = nodes_end(j);
                    if imbalance(&n, &kept) < 0 {
                        found = Some(path);
                        break;
                    }
                    if path.len() > torus_arcs.len() {
                        continue;
                    }
                    for &k in &torus_arcs {
                        if !kept.contains(&k) && !path.contains(&k) && same(&nodes_start(k), &n) {
                            let mut next = path.clone();
                            next.push(k);
                            stack.push((k, next));
                        }
                    }
                }
                match found {
                    Some(path) => kept.extend(path),
                    None => break,
                }
            }
        }
        for &i in &torus_arcs {
            if !kept.contains(&i) {
                discarded.push(i);
            }
        }
        discarded.sort_unstable();
    }
    let live = |i: usize| !discarded.contains(&i);
    let group = |c: ArcClass| c != ArcClass::Outside;
    // successor of each arc among arcs of the same class in the next piece
    let mut succ: Vec<Option<usize>> = vec![None; arcs.len()];
    let mut has_pred = vec![false; arcs.len()];
    for i in 0..arcs.len() {
        if !live(i) {
            continue;
        }
        let next_piece = (arcs[i].piece + 1) % npieces;
        let best = (0..arcs.len())
            .filter(|&j| live(j) && arcs[j].piece == next_piece && group(arcs[j].classification) == group(arcs[i].classification))
            .filter(|&j| !has_pred[j])
            .map(|j| (dist(arcs[i].end(), arcs[j].start()), j))
            .filter(|(d, _)| *d < node_tol[next_piece])
            .min_by(|x, y| x.0.total_cmp(&y.0));
        if let Some((_, j)) = best {
            succ[i] = Some(j);
            has_pred[j] = true;
        }
    }
    let mut seen = vec![false; arcs.len()];
    let mut closed_paths = Vec::new();
    let mut open_paths = Vec::new();
    for start in 0..arcs.len() {
        if !live(start) || seen[start] || has_pred[start] {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(c) = cur {
            seen[c] = true;
            path.push(c);
            cur = succ[c];
        }
        open_paths.push(path);
    }
    for start in 0..arcs.len() {
        if !live(start) || seen[start] {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            seen[cur] = true;
            path.push(cur);
            match succ[cur] {
                Some(n) if n != start => cur = n,
                _ => break,
            }
        }
        closed_paths.push(path);
    }
    // only paths in the closed disc with ends count as paths with boundary
    let open_paths: Vec<Vec<usize>> = open_paths
        .into_iter()
        .filter(|p| group(arcs[p[0]].classification))
        .collect();

    // boundary points: arcs of the chain arriving vs leaving at each subdivision point
    let mut boundary_set: Vec<TorusPoint> = Vec::new();
    for k in 0..npieces {
        let arriving: Vec<&Arc> = arcs
            .iter()
            .enumerate()
            .filter(|(i, a)| live(*i) && group(a.classification) && (a.piece + 1) % npieces == k)
            .map(|(_, a)| a)
            .collect();
        let leaving: Vec<&Arc> = arcs
            .iter()
            .enumerate()
            .filter(|(i, a)| live(*i) && group(a.classification) && a.piece == k)
            .map(|(_, a)| a)
            .collect();
        let tk = node_tol[k];
        let mut values: Vec<BigComplex> = Vec::new();
        for z in arriving.iter().map(|a| a.end()).chain(leaving.iter().map(|a| a.start())) {
            if !values.iter().any(|v| dist(v, z) < tk) {
                values.push(z.clone());
            }
        }
        for v in values {
            let cin = arriving.iter().filter(|a| dist(a.end(), &v) < tk).count();
            let cout = leaving.iter().filter(|a| dist(a.start(), &v) < tk).count();
            if cin == cout {
                continue;
            }
            let theta1 = subdivision[k].clone();
            let known = report.points.iter().find(|q| {
                let dt = q.theta1.dist_f64(&theta1);
                (dt < 1e-8 || (1.0 - dt).abs() < 1e-8) && dist(&q.t2, &v) < 1e-8
            });
            boundary_set.push(match known {
                Some(q) => q.clone(),
                None => TorusPoint {
                    t1: BigComplex::unit(&theta1),
                    theta2: turn_of(&v),
                    t2: v,
                    theta1,
                    unity: None,
                    contact: None,
                },
            });
        }
    }
    let inside_arcs = (0..arcs.len()).filter(|&i| live(i) && arcs[i].classification == ArcClass::Inside).collect();
    Ok(PathDecomposition { subdivision, arcs, closed_paths, open_paths, boundary_set, inside_arcs, discarded })
}

/// `m(P) - m(P*)`: minus the integral of `log|F|` over the inside arcs.
///
/// On each piece the inside arcs are exactly the roots of smallest modulus,
/// so the integrand takes that many smallest roots at every node.
pub fn chain_integral(p: &LaurentPoly2, decomp: &PathDecomposition, budget: &PrecisionBudget) -> Result<BigReal> {
    let bits = budget.working_bits;
    let (pn, _) = p.normalized();
    let f = BiPoly::from_laurent(&pn);
    let mut total = BigReal::zero(bits);
    let npieces = decomp.subdivision.len() - 1;
    let per_piece = budget.with_target(budget.target_abs_error / (npieces.max(1) as f64 + 1.0));
    let s = Slice { coeffs: f.coeffs(), bits, poles: &[] };
    for k in 0..npieces {
        let count = decomp.inside_arcs.iter().filter(|&&i| decomp.arcs[i].piece == k).count();
        if count == 0 {
            continue;
        }
        let integrand = |x: &Float| -> BigReal {
            let theta = BigReal::exact(x.clone());
            let Ok(mut roots) = s.roots(&theta) else {
                return BigReal::new(Float::new(bits), f64::INFINITY);
            };
            roots.sort_by(|a, b| a.0.abs_upper().total_cmp(&b.0.abs_upper()));
            let mut acc = BigReal::zero(bits);
            for (z, r) in roots.iter().take(count) {
                acc = acc.sub(&z.abs().add_error(*r).ln());
            }
            acc
        };
        let a = decomp.subdivision[k].mid().clone();
        let b = decomp.subdivision[k + 1].mid().clone();
        let q = integrate_with(integrand, &a, &b, &[], &per_piece, QuadOptions::default());
        total = total.add(&q.value);
    }
    Ok(total)
}

/// `sum log|b|` over the roots `b` of `P(e(theta), .)` with `|b| < 1`.
pub fn eta_form_values(p: &LaurentPoly2, theta: &BigReal, budget: &PrecisionBudget) -> Result<BigReal> {
    let bits = budget.working_bits;
    let (pn, _) = p.normalized();
    let f = BiPoly::from_laurent(&pn);
    let c = slice(f.coeffs(), theta, bits);
    if c[0].contains_zero() {
        return Err(Error::Domain("P*(e(theta)) vanishes: a root sits at 0".into()));
    }
    let mut acc = BigReal::zero(bits);
    if c.len() == 1 {
        return Ok(acc);
    }
    for r in roots_with_radii(&c, bits)? {
        let m = r.value.abs().add_error(r.radius);
        let d = m.sub(&BigReal::from_i64(1, bits));
        if d.contains_zero() {
            return Err(Error::Domain(format!(
                "on-torus ambiguity: root {} has modulus 1 within its error bound",
                r.value.display(12)
            )));
        }
        if d.is_negative() {
            acc = acc.add(&m.ln());
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mahler::{mahler_1var, mahler_2var};
    use crate::poly::parse_laurent2;

    fn b20() -> PrecisionBudget {
        PrecisionBudget::from_digits(20)
    }

    #[test]
    fn constant_branch() {
        let p = parse_laurent2("t2 - 2").unwrap();
        let d = track(&p, &b20()).unwrap();
        assert_eq!(d.arcs.len(), 1);
        assert_eq!(d.arcs[0].classification, ArcClass::Outside);
        assert_eq!(d.closed_paths, vec![vec![0]]);
        assert!(d.inside_arcs.is_empty() && d.boundary_set.is_empty());
        assert!(chain_integral(&p, &d, &b20()).unwrap().contains_f64(0.0));
    }

    #[test]
    fn p5_has_closed_inside_path() {
        let p = parse_laurent2("t1*t2^2 + (t1^2 + 5*t1 + 1)*t2 + t1").unwrap();
        let b = b20();
        let d = track(&p, &b).unwrap();
        assert!(d.boundary_set.is_empty());
        assert!(d.closed_paths.iter().any(|c| d.arcs[c[0]].classification == ArcClass::Inside));
        let a0 = BiPoly::from_laurent(&p).coeffs()[0].clone();
        let via_chain = chain_integral(&p, &d, &b).unwrap().add(&mahler_1var(&a0, &b).unwrap());
        let direct = mahler_2var(&p, &b).unwrap().value;
        assert!(via_chain.dist_f64(&direct) < 1e-12, "{via_chain} vs {direct}");
    }

    #[test]
    fn section_four_boundary() {
        let p = parse_laurent2("(t1^2+1)^2*t2^2 + 2*t1*t2 + 1").unwrap();
        let d = track(&p, &b20()).unwrap();
        let mut tags: Vec<[i64; 4]> = d.boundary_set.iter().map(|q| q.unity.unwrap()).collect();
        tags.sort();
        assert_eq!(tags, vec![[1, 3, 1, 6], [1, 6, 1, 3], [2, 3, 5, 6], [5, 6, 2, 3]]);
        for path in &d.open_paths {
            assert_eq!(d.arcs[path[0]].classification, ArcClass::Inside);
        }
    }

    #[test]
    fn branch_of_constant_modulus() {
        let p = parse_laurent2("t2 + 2*t1").unwrap();
        let d = track(&p, &b20()).unwrap();
        assert!(d.arcs.iter().all(|a| a.classification == ArcClass::Outside));
        assert!(chain_integral(&p, &d, &b20()).unwrap().contains_f64(0.0));
    }

    #[test]
    fn eta_values() {
        let b = b20();
        let half_log = BigReal::from_rational(&rug::Rational::from((1, 2)), 128).ln().mul_i64(2);
        let theta = BigReal::from_f64(0.3, 128);
        let v = eta_form_values(&parse_laurent2("t2^2 - 1/4").unwrap(), &theta, &b).unwrap();
        assert!(v.overlaps(&half_log));
        assert!(eta_form_values(&parse_laurent2("t2 - 2").unwrap(), &theta, &b).unwrap().contains_f64(0.0));
        let p4 = parse_laurent2("(t1^2+1)^2*t2^2 + 2*t1*t2 + 1").unwrap();
        let v = eta_form_values(&p4, &BigReal::zero(128), &b).unwrap();
        assert!(v.overlaps(&half_log));
    }
}

//! Aberth–Ehrlich simultaneous root finding with certified inclusion discs.
//!
//! Roots are first approximated in `f64`, then polished at the working
//! precision, then enclosed: with `r_i = n |p(z_i)| / (|a_n| prod_{j != i} |z_i - z_j|)`
//! every root lies in the union of the discs `D(z_i, r_i)`, and a connected
//! component made of `k` discs holds exactly `k` roots.

use num_complex::Complex64;
use rug::Float;

use super::ball::{abs_up, up};
use super::{BigComplex, BigReal, PrecisionBudget};
use crate::error::{Error, Result};
use crate::poly::UniPoly;

/// A root with its certified inclusion radius and the size of the cluster
/// it belongs to (1 for an isolated simple root).
#[derive(Clone, Debug)]
pub struct RootBall {
    pub value: BigComplex,
    pub radius: f64,
    pub cluster: usize,
}

/// Initial guesses on circles whose radii come from the upper convex hull of
/// `(i, log|a_i|)`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(i, a)| (i, a.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cr = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cr >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let m = j - i;
        let r = ((li - lj) / m as f64).exp();
        for k in 0..m {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 / m as f64 + i as f64 / n as f64) + 0.7;
            out.push(Complex64::from_polar(r, ang));
        }
    }
    out
}

fn horner_c64(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth iteration in double precision. `c` is lowest degree first with a
/// nonzero last entry.
pub fn roots_f64(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let zeros = c.iter().take_while(|a| a.norm() == 0.0).count();
    if zeros > 0 {
        let mut z = roots_f64(&c[zeros..]);
        z.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
        return z;
    }
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    let mut z = initial_guesses(c);
    let mut done = vec![false; n];
    for _ in 0..500 {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_c64(c, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z
}

/// Complex number with MPFR parts, used only inside the iteration.
#[derive(Clone, Debug)]
struct Cf {
    re: Float,
    im: Float,
}

impl Cf {
    fn new(prec: u32, z: Complex64) -> Self {
        Cf { re: Float::with_val(prec, z.re), im: Float::with_val(prec, z.im) }
    }
    fn zero(prec: u32) -> Self {
        Cf { re: Float::new(prec), im: Float::new(prec) }
    }
    fn add(&self, o: &Cf) -> Cf {
        let p = self.re.prec();
        Cf { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
    fn sub(&self, o: &Cf) -> Cf {
        let p = self.re.prec();
        Cf { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
    fn mul(&self, o: &Cf) -> Cf {
        let p = self.re.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cf { re, im }
    }
    fn norm_sqr(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }
    fn div(&self, o: &Cf) -> Cf {
        let d = o.norm_sqr();
        let conj = Cf { re: o.re.clone(), im: Float::with_val(o.im.prec(), -&o.im) };
        let n = self.mul(&conj);
        Cf { re: n.re / &d, im: n.im / &d }
    }
    fn recip(&self) -> Cf {
        let p = self.re.prec();
        Cf { re: Float::with_val(p, 1), im: Float::new(p) }.div(self)
    }
    fn abs_f64(&self) -> f64 {
        self.norm_sqr().sqrt().to_f64()
    }
}

fn horner_cf(c: &[Cf], z: &Cf) -> (Cf, Cf) {
    let prec = z.re.prec();
    let mut p = Cf::zero(prec);
    let mut dp = Cf::zero(prec);
    for a in c.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(a);
    }
    (p, dp)
}

fn polish(c: &[Cf], start: &[Complex64], prec: u32) -> Vec<Cf> {
    let n = start.len();
    let mut z: Vec<Cf> = start.iter().map(|s| Cf::new(prec, *s)).collect();
    let mut done = vec![false; n];
    let tol = 2f64.powi(-(prec as i32) + 8);
    for _ in 0..(60 + prec / 8) {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_cf(c, &z[i]);
            if p.re.is_zero() && p.im.is_zero() {
                done[i] = true;
                continue;
            }
            let ratio = p.div(&dp);
            let mut s = Cf::zero(prec);
            for j in 0..n {
                if j != i {
                    s = s.add(&z[i].sub(&z[j]).recip());
                }
            }
            let one = Cf { re: Float::with_val(prec, 1), im: Float::new(prec) };
            let w = ratio.div(&one.sub(&ratio.mul(&s)));
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] = z[i].sub(&w);
            let scale = z[i].abs_f64().max(1e-300);
            if w.abs_f64() <= tol * scale {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z
}

fn horner_ball(c: &[BigComplex], z: &BigComplex) -> BigComplex {
    let mut acc = BigComplex::zero(z.prec());
    for a in c.iter().rev() {
        acc = acc.mul(z).add(a);
    }
    acc
}

fn find(parent: &mut Vec<usize>, i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

/// All roots of a polynomial with ball coefficients (lowest degree first),
/// with inclusion radii. Never fails on clusters: radii just get larger.
pub fn roots_with_radii(coeffs: &[BigComplex], bits: u32) -> Result<Vec<RootBall>> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |a| a.re.mid().is_zero() && a.im.mid().is_zero() && a.rad() == 0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::Domain("roots of the zero polynomial".into()));
    }
    if c.last().unwrap().contains_zero() {
        return Err(Error::PrecisionExhausted(
            "leading coefficient not certified nonzero; raise working_bits".into(),
        ));
    }
    // exact zero roots
    let mut zeros = 0;
    while c.len() > 1 && c[0].re.mid().is_zero() && c[0].im.mid().is_zero() && c[0].rad() == 0.0 {
        c.remove(0);
        zeros += 1;
    }
    let n = c.len() - 1;
    let prec = bits + 32;
    let mut out: Vec<RootBall> = (0..zeros)
        .map(|_| RootBall { value: BigComplex::zero(bits), radius: 0.0, cluster: zeros })
        .collect();
    if n == 0 {
        return Ok(out);
    }
    let c64: Vec<Complex64> = c.iter().map(|a| a.to_c64()).collect();
    let start = roots_f64(&c64);
    let cf: Vec<Cf> = c
        .iter()
        .map(|a| Cf { re: Float::with_val(prec, a.re.mid()), im: Float::with_val(prec, a.im.mid()) })
        .collect();
    let z = polish(&cf, &start, prec);

    let lead_lo = c[n].abs_lower();
    let mut radii = vec![0f64; n];
    for i in 0..n {
        let zi = BigComplex::from_floats(z[i].re.clone(), z[i].im.clone());
        let pv = horner_ball(&c, &zi).abs_upper();
        let mut prod = 1f64;
        for j in 0..n {
            if j != i {
                let d = z[i].sub(&z[j]);
                prod *= d.abs_f64() * (1.0 - 1e-12);
            }
        }
        radii[i] = if prod > 0.0 && lead_lo > 0.0 {
            up(n as f64 * pv / (lead_lo * prod))
        } else {
            f64::INFINITY
        };
    }
    // cluster the overlapping discs
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = z[i].sub(&z[j]).abs_f64();
            if d <= radii[i] + radii[j] || !radii[i].is_finite() || !radii[j].is_finite() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut final_rad = radii.clone();
    let mut cluster = vec![1usize; n];
    for members in groups.values() {
        if members.len() == 1 {
            continue;
        }
        // a single disc around the cluster mean holds all its roots
        let k = members.len() as f64;
        let mut cre = Float::new(prec);
        let mut cim = Float::new(prec);
        for &i in members {
            cre += &z[i].re;
            cim += &z[i].im;
        }
        cre /= k;
        cim /= k;
        let centre = Cf { re: cre, im: cim };
        let r = members
            .iter()
            .map(|&i| up(z[i].sub(&centre).abs_f64() + radii[i]))
            .fold(0f64, f64::max);
        for &i in members {
            final_rad[i] = up(r + z[i].sub(&centre).abs_f64());
            cluster[i] = members.len();
        }
    }
    for i in 0..n {
        let re = BigReal::new(Float::with_val(bits, &z[i].re), 0.0);
        let im = BigReal::new(Float::with_val(bits, &z[i].im), 0.0);
        let round = abs_up(&Float::with_val(bits, &z[i].re - re.mid()))
            + abs_up(&Float::with_val(bits, &z[i].im - im.mid()));
        let radius = up(final_rad[i] + round);
        let value = BigComplex::new(re.add_error(radius), im.add_error(radius));
        out.push(RootBall { value, radius, cluster: cluster[i] });
    }
    out.sort_by(|a, b| {
        a.value
            .re
            .mid()
            .partial_cmp(b.value.re.mid())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.value.im.mid().partial_cmp(b.value.im.mid()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

/// Roots of a complex polynomial, each certified to `budget.target_abs_error`.
pub fn poly_roots_complex(coeffs: &[BigComplex], budget: &PrecisionBudget) -> Result<Vec<BigComplex>> {
    let roots = roots_with_radii(coeffs, budget.working_bits)?;
    if let Some(bad) = roots.iter().find(|r| !(r.radius <= budget.target_abs_error)) {
        return Err(Error::PrecisionExhausted(format!(
            "root near {} only certified to radius {:.1e} (cluster of {}); raise working_bits",
            bad.value.display(12),
            bad.radius,
            bad.cluster
        )));
    }
    Ok(roots.into_iter().map(|r| r.value).collect())
}

/// Roots of a rational polynomial, each certified to the target error.
pub fn poly_roots(q: &UniPoly, budget: &PrecisionBudget) -> Result<Vec<BigComplex>> {
    if q.is_zero() {
        return Err(Error::Domain("roots of the zero polynomial".into()));
    }
    let c = uni_to_balls(q, budget.working_bits + 32);
    poly_roots_complex(&c, budget)
}

pub(crate) fn uni_to_balls(q: &UniPoly, bits: u32) -> Vec<BigComplex> {
    q.coeffs().iter().map(|a| BigComplex::from_rational(a, bits)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn budget() -> PrecisionBudget {
        PrecisionBudget::from_digits(40)
    }

    #[test]
    fn plus_minus_one() {
        let r = poly_roots(&UniPoly::from_ints(&[-1, 0, 1]), &budget()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].re.contains_f64(-1.0) && r[0].im.contains_f64(0.0));
        assert!(r[1].re.contains_f64(1.0));
    }

    #[test]
    fn cube_roots_of_unity() {
        let r = poly_roots(&UniPoly::from_ints(&[1, 1, 1]), &budget()).unwrap();
        let s3 = BigReal::from_i64(3, 200).sqrt().div_i64(2);
        assert!(r[0].re.contains_f64(-0.5));
        assert!(r[0].im.overlaps(&s3.neg()));
        assert!(r[1].im.overlaps(&s3));
        for z in &r {
            assert!(z.rad() < 1e-40);
        }
    }

    #[test]
    fn vieta_product_for_pk_fibre() {
        // t^2 + 7t + 1
        let r = poly_roots(&UniPoly::from_ints(&[1, 7, 1]), &budget()).unwrap();
        let prod = r[0].mul(&r[1]);
        assert!(prod.re.contains_f64(1.0));
        assert!(prod.im.contains_f64(0.0));
    }

    #[test]
    fn double_root_is_a_cluster() {
        let q = UniPoly::from_ints(&[1, -2, 1]);
        let c = uni_to_balls(&q, 200);
        let r = roots_with_radii(&c, 160).unwrap();
        assert_eq!(r[0].cluster, 2);
        assert!(r[0].value.re.contains_f64(1.0));
        assert!(poly_roots(&q, &budget()).is_err());
    }

    #[test]
    fn zero_roots_and_high_degree() {
        // t^3 (t^5 - 3)
        let q = UniPoly::from_ints(&[0, 0, 0, -3, 0, 0, 0, 0, 1]);
        let r = poly_roots(&q, &budget()).unwrap();
        assert_eq!(r.len(), 8);
        let fifth = Rational::from(3);
        let m = BigReal::from_rational(&fifth, 200).ln().div_i64(5).exp();
        let nonzero: Vec<_> = r.iter().filter(|z| !z.contains_zero()).collect();
        assert_eq!(nonzero.len(), 5);
        for z in nonzero {
            assert!(z.abs().overlaps(&m));
        }
    }
}

//! Polynomials in `t2` with coefficients in `Q[t1]`: resultants, gcds and
//! discriminants with respect to `t2`.

use rug::Rational;

use super::{LaurentPoly2, UniPoly};
use crate::error::{Error, Result};

/// `sum_i coeffs[i](t1) * t2^i`, trimmed so the last coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    coeffs: Vec<UniPoly>,
}

impl BiPoly {
    pub fn new(mut coeffs: Vec<UniPoly>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        BiPoly { coeffs }
    }

    pub fn from_laurent(p: &LaurentPoly2) -> Self {
        Self::new(p.t2_coefficients())
    }

    pub fn to_laurent(&self) -> LaurentPoly2 {
        LaurentPoly2::from_t2_coefficients(&self.coeffs)
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_t2(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn degree_t1(&self) -> usize {
        self.coeffs.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn leading(&self) -> UniPoly {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Monic gcd of the `t1`-coefficients.
    pub fn content_t1(&self) -> UniPoly {
        let mut g = UniPoly::zero();
        for c in &self.coeffs {
            g = UniPoly::gcd(&g, c);
        }
        g
    }

    pub fn primitive_t1(&self) -> Self {
        let g = self.content_t1();
        if g.is_zero() {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| c.div_exact(&g).expect("content divides")).collect())
    }

    /// Divide by the rational content of all coefficients so the result has
    /// coprime integer coefficients and a positive leading term.
    pub fn integer_primitive(&self) -> Self {
        let mut num = rug::Integer::new();
        let mut den = rug::Integer::from(1);
        for c in &self.coeffs {
            for a in c.coeffs() {
                num.gcd_mut(a.numer());
                den.lcm_mut(a.denom());
            }
        }
        if num == 0 {
            return self.clone();
        }
        let mut content = Rational::from((num, den));
        if self.leading().leading() < 0 {
            content = -content;
        }
        let inv = content.recip();
        Self::new(self.coeffs.iter().map(|c| c.scale(&inv)).collect())
    }

    pub fn scale_t1(&self, u: &UniPoly) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul(u)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = UniPoly::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z).sub(other.coeffs.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    /// Pseudo-remainder `lc(g)^(deg f - deg g + 1) f mod g`.
    pub fn pseudo_rem(&self, g: &Self) -> Self {
        let dg = g.degree_t2().expect("nonzero divisor");
        let lg = g.leading();
        let mut r = self.clone();
        while let Some(dr) = r.degree_t2() {
            if dr < dg {
                break;
            }
            let lr = r.leading();
            let shift = dr - dg;
            let mut t = vec![UniPoly::zero(); shift];
            t.extend(g.coeffs.iter().map(|c| c.mul(&lr)));
            r = r.scale_t1(&lg).sub(&Self::new(t));
        }
        r
    }

    /// Exact division in `Q[t1][t2]`.
    pub fn div_exact(&self, g: &Self) -> Option<Self> {
        let dg = g.degree_t2()?;
        let lg = g.leading();
        let mut r = self.clone();
        let mut q = vec![UniPoly::zero(); self.coeffs.len().saturating_sub(dg).max(1)];
        while let Some(dr) = r.degree_t2() {
            if dr < dg {
                return None;
            }
            let c = r.leading().div_exact(&lg)?;
            let shift = dr - dg;
            q[shift] = c.clone();
            let mut t = vec![UniPoly::zero(); shift];
            t.extend(g.coeffs.iter().map(|x| x.mul(&c)));
            r = r.sub(&Self::new(t));
        }
        Some(Self::new(q))
    }

    /// Evaluate at `t1 = x`.
    pub fn eval_t1(&self, x: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c.eval(x)).collect())
    }

    pub fn d_dt2(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&Rational::from(i as u64)))
                .collect(),
        )
    }
}

fn sylvester_det(f: &[Rational], g: &[Rational]) -> Rational {
    // f, g given with formal lengths (m+1, n+1), lowest degree first.
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return Rational::from(1);
    }
    let mut a = vec![vec![Rational::new(); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            a[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            a[n + i][i + j] = c.clone();
        }
    }
    determinant(a)
}

pub(crate) fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::from(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return Rational::new();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in (col + 1)..n {
            if a[r][col] == 0 {
                continue;
            }
            let factor = Rational::from(&a[r][col] / &p);
            for c in col..n {
                let delta = Rational::from(&factor * &a[col][c]);
                a[r][c] -= delta;
            }
        }
    }
    det
}

fn interpolate(xs: &[Rational], ys: &[Rational]) -> UniPoly {
    // Newton divided differences.
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = Rational::from(&dd[i] - &dd[i - 1]);
            let den = Rational::from(&xs[i] - &xs[i - j]);
            dd[i] = num / den;
        }
    }
    let mut acc = UniPoly::zero();
    for i in (0..n).rev() {
        acc = acc
            .mul(&UniPoly::linear_root(xs[i].clone()))
            .add(&UniPoly::constant(dd[i].clone()));
    }
    acc
}

/// Resultant with respect to `t2` of two polynomials in `Q[t1][t2]`,
/// computed exactly by evaluation at integer points and interpolation.
pub fn resultant_t2(f: &BiPoly, g: &BiPoly) -> UniPoly {
    let (Some(m), Some(n)) = (f.degree_t2(), g.degree_t2()) else {
        return UniPoly::zero();
    };
    let bound = m * g.degree_t1() + n * f.degree_t1();
    let xs: Vec<Rational> = (0..=bound as i64)
        .map(|j| Rational::from(if j % 2 == 0 { j / 2 } else { -(j + 1) / 2 }))
        .collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| {
            let fv: Vec<Rational> = f.coeffs.iter().map(|c| c.eval(x)).collect();
            let gv: Vec<Rational> = g.coeffs.iter().map(|c| c.eval(x)).collect();
            sylvester_det(&fv, &gv)
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Greatest common divisor in `Q(t1)[t2]`, returned primitive in `Q[t1][t2]`.
pub fn gcd_t2(f: &BiPoly, g: &BiPoly) -> BiPoly {
    let mut a = f.primitive_t1();
    let mut b = g.primitive_t1();
    if a.degree_t2() < b.degree_t2() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.degree_t2() == Some(0) {
            return BiPoly::new(vec![UniPoly::one()]);
        }
        let r = a.pseudo_rem(&b);
        a = b;
        b = r.primitive_t1();
    }
    a.primitive_t1().integer_primitive()
}

/// `B^2 - 4AC` for `p = A(t1) t2^2 + B(t1) t2 + C(t1)`.
pub fn discriminant_in_t2(p: &LaurentPoly2) -> Result<UniPoly> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    let a = p.t2_coefficients();
    if a.len() != 3 {
        return Err(Error::Shape(format!(
            "expected a quadratic in t2, got degree {}",
            a.len() as i64 - 1
        )));
    }
    Ok(a[1].mul(&a[1]).sub(&a[2].mul(&a[0]).scale(&Rational::from(4))))
}

/// Discriminant in `t2` of arbitrary degree, `Res_t2(p, dp/dt2) / a_n` up to
/// sign. Vanishes at the `t1` values where two `t2`-roots collide.
pub fn discriminant_t2_general(p: &LaurentPoly2) -> UniPoly {
    let f = BiPoly::from_laurent(p);
    match f.degree_t2() {
        None | Some(0) => UniPoly::one(),
        Some(1) => UniPoly::one(),
        Some(_) => {
            let r = resultant_t2(&f, &f.d_dt2());
            match r.div_exact(&f.leading()) {
                Some(q) => q,
                None => r,
            }
        }
    }
}

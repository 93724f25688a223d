use rug::Rational;
use serde::Serialize;

use super::{is_cyclotomic_product, CyclotomicFactorization, LaurentPoly2, UniPoly};
use crate::error::{Error, Result};

type Pt = (i64, i64);

/// One side `F` of the Newton polygon, traversed clockwise from `start` to
/// `end`, with its lattice points and side polynomial
/// `P_F(t) = sum_i alpha_{lattice[i]} t^i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Side {
    pub start: Pt,
    pub end: Pt,
    pub lattice: Vec<Pt>,
    pub polynomial: UniPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewtonPolygon {
    /// Hull vertices, counterclockwise, starting from the lexicographically
    /// smallest one. Collinear points are not vertices.
    pub vertices: Vec<Pt>,
    /// Sides in clockwise order. A segment has two sides (one per
    /// orientation); a point has none.
    pub sides: Vec<Side>,
}

fn cross(o: Pt, a: Pt, b: Pt) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Andrew's monotone chain, strictly convex, counterclockwise.
fn convex_hull(mut pts: Vec<Pt>) -> Vec<Pt> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Pt> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Pt> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn make_side(p: &LaurentPoly2, start: Pt, end: Pt) -> Side {
    let (dx, dy) = (end.0 - start.0, end.1 - start.1);
    let g = gcd(dx, dy);
    let step = (dx / g, dy / g);
    let lattice: Vec<Pt> = (0..=g).map(|i| (start.0 + i * step.0, start.1 + i * step.1)).collect();
    let polynomial = UniPoly::new(lattice.iter().map(|&(a, b)| p.coeff(a, b)).collect());
    Side { start, end, lattice, polynomial }
}

pub fn newton_polygon(p: &LaurentPoly2) -> Result<NewtonPolygon> {
    if p.is_zero() {
        return Err(Error::Domain("Newton polygon of the zero polynomial".into()));
    }
    let vertices = convex_hull(p.support());
    let n = vertices.len();
    let sides = match n {
        1 => Vec::new(),
        2 => vec![make_side(p, vertices[1], vertices[0]), make_side(p, vertices[0], vertices[1])],
        _ => (0..n)
            .map(|i| {
                let a = vertices[(n - i) % n];
                let b = vertices[(2 * n - i - 1) % n];
                make_side(p, a, b)
            })
            .collect(),
    };
    Ok(NewtonPolygon { vertices, sides })
}

impl NewtonPolygon {
    /// Lattice points strictly inside the hull, found by scanning its box.
    pub fn interior_points(&self) -> Vec<Pt> {
        if self.vertices.len() < 3 {
            return Vec::new();
        }
        let (x0, x1) = bounds(self.vertices.iter().map(|v| v.0));
        let (y0, y1) = bounds(self.vertices.iter().map(|v| v.1));
        let n = self.vertices.len();
        let mut out = Vec::new();
        for x in x0..=x1 {
            for y in y0..=y1 {
                if (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], (x, y)) > 0) {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

fn bounds(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Non-cyclotomic part of one side polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideObstruction {
    pub side: usize,
    pub start: Pt,
    pub end: Pt,
    pub factorization: CyclotomicFactorization,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TemperedReport {
    pub tempered: bool,
    pub obstructions: Vec<SideObstruction>,
    /// Sides whose polynomial has content other than `±1`. Reported but not
    /// used in the decision.
    pub nonunit_content: Vec<usize>,
    pub sides: Vec<Side>,
}

pub fn is_tempered(p: &LaurentPoly2) -> Result<TemperedReport> {
    let np = newton_polygon(p)?;
    let mut obstructions = Vec::new();
    let mut nonunit_content = Vec::new();
    for (i, side) in np.sides.iter().enumerate() {
        let f = is_cyclotomic_product(&side.polynomial);
        let c = Rational::from(f.content.abs_ref());
        if c != 1 {
            nonunit_content.push(i);
        }
        if !f.is_product {
            obstructions.push(SideObstruction {
                side: i,
                start: side.start,
                end: side.end,
                factorization: f,
            });
        }
    }
    Ok(TemperedReport {
        tempered: obstructions.is_empty(),
        obstructions,
        nonunit_content,
        sides: np.sides,
    })
}

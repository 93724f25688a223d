//! Integer relations among real constants, and the discovery pipeline
//! that assembles a Mahler measure with candidate L-values.

mod discover;
mod lll;

use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{BigReal, PrecisionBudget};

pub use discover::{discover, parse_basis_spec, BasisItem, DiscoverOptions, DiscoveryReport};
pub use lll::{lll, Reduced};

/// Labelled constants to search for a relation among.
#[derive(Clone, Debug, Serialize)]
pub struct RelationBasis {
    pub entries: Vec<BasisEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisEntry {
    pub label: String,
    pub value: BigReal,
}

impl RelationBasis {
    pub fn new(entries: Vec<(String, BigReal)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (l, _) in &entries {
            if !seen.insert(l.clone()) {
                return Err(Error::Domain(format!("duplicate basis label {l:?}")));
            }
        }
        Ok(RelationBasis { entries: entries.into_iter().map(|(label, value)| BasisEntry { label, value }).collect() })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationStatus {
    Found,
    Excluded,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationResult {
    pub status: RelationStatus,
    /// Primitive integer vector, first nonzero entry positive.
    pub coefficients: Option<Vec<i64>>,
    /// `|sum c_i v_i|` for the returned vector, or for the shortest
    /// reduced vector when nothing was found.
    pub residual: BigReal,
    /// No integer relation of Euclidean norm below this exists.
    pub exclusion_norm: BigReal,
}

fn gcd_all(c: &[Integer]) -> Integer {
    c.iter().fold(Integer::new(), |g, x| g.gcd(x))
}

/// `|sum c_i v_i|` and the part of it explained by the value errors.
pub fn residual_of(basis: &RelationBasis, c: &[i64]) -> (Float, f64) {
    let prec = basis.entries.iter().map(|e| e.value.prec()).max().unwrap_or(64);
    let mut s = Float::new(prec);
    let mut err = 0.0;
    for (e, &ci) in basis.entries.iter().zip(c) {
        s += Float::with_val(prec, e.value.mid() * ci);
        err += (ci as f64).abs() * e.value.rad();
    }
    (s.abs(), err)
}

/// Searches for `c` with `sum c_i v_i = 0` and `max |c_i| <= height_bound`,
/// by reducing the lattice spanned by `(e_i, round(C v_i))`.
pub fn find_relation(basis: &RelationBasis, height_bound: u64, budget: &PrecisionBudget) -> Result<RelationResult> {
    let n = basis.len();
    if n < 2 {
        return Err(Error::Domain("a relation search needs at least two constants".into()));
    }
    if height_bound == 0 {
        return Err(Error::Domain("height bound must be positive".into()));
    }
    let floor = 2f64.powi(-(budget.working_bits as i32));
    let delta = basis.entries.iter().map(|e| e.value.rad()).fold(floor, f64::max);
    let guard = 8;
    let scale_bits = ((-delta.log2()).floor() as i64 - guard).min(budget.working_bits as i64 - guard);
    let need = (n as f64 - 1.0) * (height_bound as f64).log2() + 8.0;
    if (scale_bits as f64) < need {
        return Err(Error::PrecisionExhausted(format!(
            "insufficient precision for this height: values are good to about 2^-{} but height {height_bound} \
             with {n} constants needs about 2^-{}",
            scale_bits + guard,
            (need as i64) + guard
        )));
    }
    let prec = (2 * scale_bits as u32 + 128).max(budget.working_bits + 64);
    let c_scale = Float::with_val(prec, Float::i_exp(1, scale_bits as i32));
    let rows: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            let mut row = vec![Integer::new(); n + 1];
            row[i] = Integer::from(1);
            let v = Float::with_val(prec, basis.entries[i].value.mid() * &c_scale).round();
            row[n] = v.to_integer().expect("finite basis value");
            row
        })
        .collect();
    let red = lll(rows, prec);

    let slack = (1.0 + n as f64 * (0.5 + c_scale.to_f64() * delta).powi(2)).sqrt();
    let min_gs = red.gs_norms2.iter().map(|x| x.to_f64().sqrt()).fold(f64::INFINITY, f64::min);
    let exclusion = min_gs / slack;

    let mut best: Option<(Vec<i64>, Float, f64)> = None;
    let mut first_residual: Option<Float> = None;
    for row in &red.basis {
        let g = gcd_all(&row[..n]);
        if g == 0 {
            continue;
        }
        let mut c: Vec<Integer> = row[..n].iter().map(|x| Integer::from(x / &g)).collect();
        if c.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
            c.iter_mut().for_each(|x| *x = Integer::from(-&*x));
        }
        if c.iter().any(|x| x.clone().abs() > height_bound) {
            continue;
        }
        let c: Vec<i64> = c.iter().map(|x| x.to_i64().expect("bounded by height")).collect();
        let (res, err) = residual_of(basis, &c);
        if first_residual.is_none() {
            first_residual = Some(res.clone());
        }
        let tol = 10.0 * err + floor * c.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>();
        if res.to_f64() <= tol && best.as_ref().is_none_or(|(b, _, _)| l1(&c) < l1(b)) {
            best = Some((c, res, err));
        }
    }
    let prec_out = budget.working_bits;
    let excl = BigReal::from_f64(exclusion, 53);
    match best {
        Some((c, res, err)) => Ok(RelationResult {
            status: RelationStatus::Found,
            coefficients: Some(c),
            residual: BigReal::new(Float::with_val(prec_out, res), err),
            exclusion_norm: excl,
        }),
        None => {
            let status = if exclusion > height_bound as f64 * (n as f64).sqrt() {
                RelationStatus::Excluded
            } else {
                RelationStatus::Inconclusive
            };
            let res = first_residual.unwrap_or_else(|| Float::new(prec_out));
            Ok(RelationResult {
                status,
                coefficients: None,
                residual: BigReal::exact(Float::with_val(prec_out, res)),
                exclusion_norm: excl,
            })
        }
    }
}

fn l1(c: &[i64]) -> u64 {
    c.iter().map(|x| x.unsigned_abs()).sum()
}

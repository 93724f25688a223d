//! Globally adaptive Gauss–Legendre quadrature.
//!
//! The interval is first cut at every breakpoint, so no panel ever straddles
//! one. The panel with the largest error estimate is bisected until the sum
//! of estimates drops below the target. A panel's estimate is
//! `|G(panel) - G(left) - G(right)|`, where `G` is the `n`-point rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use super::ball::up;
use super::legendre::gauss_rule;
use super::{BigReal, PrecisionBudget};

#[derive(Clone, Debug)]
pub struct QuadResult {
    /// Integral with radius `estimate + evaluation error`.
    pub value: BigReal,
    /// Sum of the per-panel bisection estimates.
    pub estimate: f64,
    /// Contribution of the integrand's own error bounds.
    pub evaluation_error: f64,
    pub converged: bool,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadOptions {
    /// Points per panel; `None` picks one from the precision.
    pub order: Option<usize>,
    pub max_panels: usize,
    /// Initial equal pieces per breakpoint-free segment.
    pub initial_split: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { order: None, max_panels: 6000, initial_split: 2 }
    }
}

struct Panel {
    a: Float,
    b: Float,
    /// `G(left) + G(right)`.
    value: Float,
    eval_err: f64,
    est: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .total_cmp(&other.est)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn default_order(bits: u32) -> usize {
    ((bits / 6) as usize).clamp(12, 64)
}

/// `G` on `[a, b]`: value and the propagated evaluation error.
fn gauss<F>(f: &F, a: &Float, b: &Float, order: usize, prec: u32) -> (Float, f64)
where
    F: Fn(&Float) -> BigReal + Sync,
{
    let rule = gauss_rule(order, prec);
    let nodes = rule.nodes();
    let half = Float::with_val(prec, b - a) / 2u32;
    let centre = Float::with_val(prec, a + b) / 2u32;
    let vals: Vec<BigReal> = nodes
        .par_iter()
        .map(|(x, _)| {
            let t = Float::with_val(prec, &half * x) + &centre;
            f(&t)
        })
        .collect();
    let mut sum = Float::new(prec);
    let mut err = 0f64;
    for ((_, w), v) in nodes.iter().zip(&vals) {
        sum += Float::with_val(prec, w * v.mid());
        err += w.to_f64() * v.rad();
    }
    let h = half.to_f64().abs();
    let value = sum * &half;
    let rounding = value.to_f64().abs() * 2f64.powi(-(prec as i32) + 6) * order as f64;
    (value, up(err * h + rounding))
}

fn make_panel<F>(f: &F, a: Float, b: Float, whole: Option<Float>, order: usize, prec: u32) -> (Panel, usize)
where
    F: Fn(&Float) -> BigReal + Sync,
{
    let m = Float::with_val(prec, &a + &b) / 2u32;
    let mut evals = 2 * order;
    let whole = match whole {
        Some(w) => w,
        None => {
            evals += order;
            gauss(f, &a, &b, order, prec).0
        }
    };
    let (l, el) = gauss(f, &a, &m, order, prec);
    let (r, er) = gauss(f, &m, &b, order, prec);
    let value = Float::with_val(prec, &l + &r);
    let est = Float::with_val(prec, &whole - &value).to_f64().abs();
    (Panel { a, b, value, eval_err: up(el + er), est }, evals)
}

/// Integrate `f` over `[a, b]`, never placing a panel across a breakpoint.
pub fn integrate_adaptive<F>(
    f: F,
    a: &Float,
    b: &Float,
    breakpoints: &[Float],
    budget: &PrecisionBudget,
) -> QuadResult
where
    F: Fn(&Float) -> BigReal + Sync,
{
    integrate_with(f, a, b, breakpoints, budget, QuadOptions::default())
}

pub fn integrate_with<F>(
    f: F,
    a: &Float,
    b: &Float,
    breakpoints: &[Float],
    budget: &PrecisionBudget,
    opts: QuadOptions,
) -> QuadResult
where
    F: Fn(&Float) -> BigReal + Sync,
{
    let prec = budget.working_bits;
    let order = opts.order.unwrap_or_else(|| default_order(prec));
    let (lo, hi, sign) = if a <= b { (a, b, 1) } else { (b, a, -1) };
    let mut cuts: Vec<Float> = vec![Float::with_val(prec, lo)];
    let mut bps: Vec<Float> = breakpoints.iter().filter(|x| *x > lo && *x < hi).cloned().collect();
    bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    bps.dedup();
    cuts.extend(bps.into_iter().map(|x| Float::with_val(prec, x)));
    cuts.push(Float::with_val(prec, hi));
    let mut seeds: Vec<(Float, Float)> = Vec::new();
    for w in cuts.windows(2) {
        let k = opts.initial_split.max(1);
        let width = Float::with_val(prec, &w[1] - &w[0]);
        for i in 0..k {
            let s = if i == 0 { w[0].clone() } else { Float::with_val(prec, &width * i as u32) / k as u32 + &w[0] };
            let e = if i + 1 == k {
                w[1].clone()
            } else {
                Float::with_val(prec, &width * (i + 1) as u32) / k as u32 + &w[0]
            };
            if s < e {
                seeds.push((s, e));
            }
        }
    }
    let initial: Vec<(Panel, usize)> =
        seeds.into_iter().map(|(s, e)| make_panel(&f, s, e, None, order, prec)).collect();
    let mut evaluations: usize = initial.iter().map(|p| p.1).sum();
    let mut heap: BinaryHeap<Panel> = initial.into_iter().map(|p| p.0).collect();
    let mut finished: Vec<Panel> = Vec::new();
    let min_width = 2f64.powi(-(prec as i32) / 2 - 8);
    let target = budget.target_abs_error * 0.5;
    let mut converged = false;
    loop {
        let total: f64 = heap.iter().chain(finished.iter()).map(|p| p.est).sum();
        if total <= target {
            converged = true;
            break;
        }
        if heap.len() + finished.len() >= opts.max_panels || heap.is_empty() {
            break;
        }
        let batch_size = (rayon::current_num_threads() * 2).clamp(2, 16);
        let mut batch = Vec::new();
        while batch.len() < batch_size {
            match heap.pop() {
                Some(p) if p.est > target / (opts.max_panels as f64) || batch.is_empty() => batch.push(p),
                Some(p) => {
                    heap.push(p);
                    break;
                }
                None => break,
            }
        }
        let mut to_split = Vec::new();
        for p in batch {
            let w = Float::with_val(prec, &p.b - &p.a).to_f64();
            if w < min_width {
                finished.push(p);
            } else {
                to_split.push(p);
            }
        }
        let children: Vec<(Panel, usize)> = to_split
            .par_iter()
            .flat_map_iter(|p| {
                let m = Float::with_val(prec, &p.a + &p.b) / 2u32;
                let left = make_panel(&f, p.a.clone(), m.clone(), None, order, prec);
                let right = make_panel(&f, m, p.b.clone(), None, order, prec);
                [left, right]
            })
            .collect();
        for (c, e) in children {
            evaluations += e;
            heap.push(c);
        }
    }
    let mut all: Vec<Panel> = heap.into_vec();
    all.extend(finished);
    all.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
    let mut sum = Float::new(prec);
    let mut est = 0f64;
    let mut eval_err = 0f64;
    for p in &all {
        sum += &p.value;
        est += p.est;
        eval_err += p.eval_err;
    }
    if sign < 0 {
        sum = -sum;
    }
    let rad = up(est + eval_err + sum.to_f64().abs() * 2f64.powi(-(prec as i32) + 8));
    QuadResult {
        value: BigReal::new(sum, rad),
        estimate: est,
        evaluation_error: eval_err,
        converged,
        panels: all.len(),
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn b() -> PrecisionBudget {
        PrecisionBudget::from_digits(30)
    }

    #[test]
    fn constants_and_linear() {
        let zero = Float::with_val(200, 0);
        let one = Float::with_val(200, 1);
        let r = integrate_adaptive(|_| BigReal::from_i64(1, 200), &zero, &one, &[], &b());
        assert!(r.value.contains_f64(1.0));
        let r = integrate_adaptive(|x| BigReal::exact(x.clone()), &zero, &one, &[], &b());
        assert!(r.value.contains_f64(0.5));
        assert!(r.converged);
    }

    #[test]
    fn jensen_for_one_plus_t() {
        // log|2 cos(pi x)| has a log singularity at 1/2 and integrates to 0.
        let prec = b().working_bits;
        let zero = Float::with_val(prec, 0);
        let one = Float::with_val(prec, 1);
        let half = Float::with_val(prec, 0.5);
        let f = |x: &Float| {
            let pi = Float::with_val(prec, Constant::Pi);
            let c = Float::with_val(prec, &pi * x).cos() * 2u32;
            BigReal::exact(c.abs().ln())
        };
        let budget = PrecisionBudget::from_digits(20);
        let r = integrate_adaptive(f, &zero, &one, &[half], &budget);
        assert!(r.value.abs_upper() < 1e-18, "{}", r.value);
        assert!(r.value.contains_f64(0.0));
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let zero = Float::with_val(200, 0);
        let two = Float::with_val(200, 2);
        let r = integrate_adaptive(|x| BigReal::exact(Float::with_val(200, x.square_ref())), &two, &zero, &[], &b());
        let expect = BigReal::from_rational(&rug::Rational::from((-8, 3)), 200);
        assert!(r.value.overlaps(&expect));
    }
}

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::Float;

/// Gauss–Legendre nodes and weights on `[-1, 1]`; only the nonnegative half
/// of the symmetric rule is stored.
#[derive(Debug)]
pub struct GaussRule {
    pub n: usize,
    /// `(x_k, w_k)` with `x_k >= 0`; for odd `n` the first pair is `x = 0`.
    pub half: Vec<(Float, Float)>,
}

fn legendre_and_derivative(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(prec, x * &p1) * (2 * k - 1) as u32;
        let b = Float::with_val(prec, &p0 * (k - 1) as u32);
        let p2 = (a - b) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = (Float::with_val(prec, x * &p1) - &p0) * n as u32;
    let den = Float::with_val(prec, x.square_ref()) - 1u32;
    (p1, num / den)
}

fn compute(n: usize, prec: u32) -> GaussRule {
    let wp = prec + 32;
    let pi = Float::with_val(wp, Constant::Pi);
    let mut half = Vec::new();
    for i in 1..=n / 2 {
        // Tricomi's initial approximation, then Newton.
        let theta = Float::with_val(wp, &pi * (4 * i - 1) as u32) / (4 * n + 2) as u32;
        let mut x = theta.cos();
        let mut last_dx = f64::INFINITY;
        for _ in 0..200 {
            let (p, dp) = legendre_and_derivative(n, &x);
            let dx = p / &dp;
            x -= &dx;
            let m = dx.to_f64().abs();
            if m < 2f64.powi(-(wp as i32) + 4) || (m >= last_dx && m < 1e-20) {
                break;
            }
            last_dx = m;
        }
        let (_, dp) = legendre_and_derivative(n, &x);
        let one_minus = Float::with_val(wp, 1) - Float::with_val(wp, x.square_ref());
        let w = Float::with_val(wp, 2) / (one_minus * Float::with_val(wp, dp.square_ref()));
        half.push((Float::with_val(prec, &x), Float::with_val(prec, &w)));
    }
    if n % 2 == 1 {
        let zero = Float::with_val(wp, 0);
        let (_, dp) = legendre_and_derivative(n, &zero);
        let w = Float::with_val(wp, 2) / Float::with_val(wp, dp.square_ref());
        half.insert(0, (Float::new(prec), Float::with_val(prec, &w)));
    }
    GaussRule { n, half }
}

/// Cached rule for `(n, prec)`.
pub fn gauss_rule(n: usize, prec: u32) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&(n, prec)) {
        return r.clone();
    }
    let rule = Arc::new(compute(n, prec));
    cache.lock().unwrap().insert((n, prec), rule.clone());
    rule
}

impl GaussRule {
    /// Full list of `(x, w)` on `[-1, 1]`, ascending in `x`.
    pub fn nodes(&self) -> Vec<(Float, Float)> {
        let odd = self.n % 2 == 1;
        let mut out: Vec<(Float, Float)> = Vec::with_capacity(self.n);
        for (i, (x, w)) in self.half.iter().enumerate() {
            out.push((x.clone(), w.clone()));
            if !(odd && i == 0) {
                out.push((Float::with_val(x.prec(), -x), w.clone()));
            }
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials() {
        for n in [5usize, 12, 21] {
            let rule = gauss_rule(n, 200);
            let nodes = rule.nodes();
            assert_eq!(nodes.len(), n);
            let mut s = Float::with_val(200, 0);
            let mut s4 = Float::with_val(200, 0);
            for (x, w) in &nodes {
                s += w;
                s4 += Float::with_val(200, x.square_ref()).square() * w;
            }
            assert!((s - 2u32).abs().to_f64() < 1e-55);
            // integral of x^4 over [-1,1] is 2/5
            let err = s4 - Float::with_val(200, 0.4f64);
            assert!(err.abs().to_f64() < 1e-15);
        }
    }
}

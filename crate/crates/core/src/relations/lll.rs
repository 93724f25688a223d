//! LLL reduction of an integer lattice basis, Gram-Schmidt kept in MPFR.

use rug::{Float, Integer};

pub struct Reduced {
    pub basis: Vec<Vec<Integer>>,
    /// Squared Gram-Schmidt norms of the reduced basis.
    pub gs_norms2: Vec<Float>,
}

fn gram_schmidt(b: &[Vec<Integer>], prec: u32) -> (Vec<Vec<Float>>, Vec<Float>) {
    let n = b.len();
    let mut mu = vec![vec![Float::new(prec); n]; n];
    let mut bstar: Vec<Vec<Float>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<Float> = b[i].iter().map(|x| Float::with_val(prec, x)).collect();
        for j in 0..i {
            let num: Float = b[i].iter().zip(&bstar[j]).map(|(x, y)| Float::with_val(prec, x * y)).fold(Float::new(prec), |a, t| a + t);
            let m = num / &norms[j];
            for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= Float::with_val(prec, &m * bk);
            }
            mu[i][j] = m;
        }
        let nn = v.iter().fold(Float::new(prec), |a, t| a + Float::with_val(prec, t.square_ref()));
        norms.push(nn);
        bstar.push(v);
    }
    (mu, norms)
}

/// LLL with `delta = 0.99`. Rows of `b` must be linearly independent.
pub fn lll(mut b: Vec<Vec<Integer>>, prec: u32) -> Reduced {
    let n = b.len();
    let delta = Float::with_val(prec, 0.99);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        assert!(guard < 1_000_000, "LLL did not terminate");
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&b[..=k], prec);
            let r = mu[k][j].clone().round();
            if r != 0 {
                let r = r.to_integer().expect("finite");
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= Integer::from(&r * y);
                }
            }
        }
        let (mu, norms) = gram_schmidt(&b[..=k], prec);
        let m2 = Float::with_val(prec, mu[k][k - 1].square_ref());
        let rhs = Float::with_val(prec, &delta - m2) * &norms[k - 1];
        if norms[k] >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    let (_, gs_norms2) = gram_schmidt(&b, prec);
    Reduced { basis: b, gs_norms2 }
}

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

pub type Rational = Ratio<i64>;

/// Assignment of each of the `q` split positions to one of `K` sub-intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KTuple {
    /// 1-based block labels, each in `1..=big_k`.
    pub k: Vec<u32>,
    pub big_k: u32,
}

impl KTuple {
    pub fn new(k: Vec<u32>, big_k: u32) -> Result<Self> {
        if big_k == 0 || !big_k.is_power_of_two() {
            return Err(contract(format!("K = {big_k} must be a power of two")));
        }
        if let Some(bad) = k.iter().find(|&&v| v == 0 || v > big_k) {
            return Err(contract(format!("k entry {bad} outside 1..={big_k}")));
        }
        Ok(Self { k, big_k })
    }

    pub fn q(&self) -> usize {
        self.k.len()
    }

    /// `j_l = #{m : k_m = l}` for `l = 1..=K` (index `l - 1`).
    pub fn occupation(&self) -> Vec<usize> {
        let mut j = vec![0usize; self.big_k as usize];
        for &v in &self.k {
            j[v as usize - 1] += 1;
        }
        j
    }

    /// Partial sums `Sigma_0..Sigma_K`.
    pub fn sigma(&self) -> Vec<usize> {
        let mut s = vec![0usize];
        for j in self.occupation() {
            s.push(s.last().unwrap() + j);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaWorkspace {
    pub sigma: Vec<usize>,
    pub occupation: Vec<usize>,
    /// Membership-sum weights, the normative values.
    #[serde(skip)]
    pub alpha: Vec<Rational>,
    /// Smallest block `l` (1-based) containing `s`.
    pub lmin: Vec<usize>,
    /// Largest block `l` (1-based) containing `s`.
    pub lmax: Vec<usize>,
    /// The min/max closed form evaluated literally, `w(lmin) + w(lmax) + lmax - lmin - 1`.
    #[serde(skip)]
    pub alpha_minmax_literal: Vec<Rational>,
    /// Positions where the literal min/max form disagrees with the membership sum.
    pub minmax_mismatch: Vec<usize>,
}

impl AlphaWorkspace {
    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(|r| r.to_f64().unwrap()).collect()
    }

    pub fn alpha_sum(&self) -> Rational {
        self.alpha.iter().fold(Rational::zero(), |a, b| a + b)
    }
}

/// Weights `alpha_s = sum over blocks l containing s of 1/(j_l + 1)`, where block
/// `l` spans positions `Sigma_{l-1}..=Sigma_l`.
pub fn alpha_coeffs(kt: &KTuple) -> AlphaWorkspace {
    let q = kt.q();
    let big_k = kt.big_k as usize;
    let occupation = kt.occupation();
    let sigma = kt.sigma();
    let w = |l: usize| Rational::new(1, occupation[l - 1] as i64 + 1);

    let mut alpha = vec![Rational::zero(); q + 1];
    for l in 1..=big_k {
        for a in alpha.iter_mut().take(sigma[l] + 1).skip(sigma[l - 1]) {
            *a += w(l);
        }
    }

    let mut lmin = Vec::with_capacity(q + 1);
    let mut lmax = Vec::with_capacity(q + 1);
    let mut literal = Vec::with_capacity(q + 1);
    let mut mismatch = Vec::new();
    for s in 0..=q {
        let lo = (1..=big_k).find(|&l| sigma[l] >= s).unwrap();
        let hi = (1..=big_k).rev().find(|&l| sigma[l - 1] <= s).unwrap();
        let lit = w(lo) + w(hi) + Rational::from_integer(hi as i64 - lo as i64 - 1);
        let closed = if hi > lo {
            lit
        } else {
            w(lo)
        };
        debug_assert_eq!(closed, alpha[s]);
        if lit != alpha[s] {
            mismatch.push(s);
        }
        lmin.push(lo);
        lmax.push(hi);
        literal.push(lit);
    }
    AlphaWorkspace {
        sigma,
        occupation,
        alpha,
        lmin,
        lmax,
        alpha_minmax_literal: literal,
        minmax_mismatch: mismatch,
    }
}

/// Floating-point weights from the order-statistic form; used in hot loops.
pub(crate) fn alpha_into(k: &[u32], big_k: usize, occ: &mut [usize], sigma: &mut [usize], out: &mut [f64]) {
    occ.iter_mut().for_each(|v| *v = 0);
    for &v in k {
        occ[v as usize - 1] += 1;
    }
    sigma[0] = 0;
    for l in 1..=big_k {
        sigma[l] = sigma[l - 1] + occ[l - 1];
    }
    let mut lo = 1usize;
    let mut hi = 1usize;
    for (s, o) in out.iter_mut().enumerate() {
        while sigma[lo] < s {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < big_k && sigma[hi] <= s {
            hi += 1;
        }
        let wl = 1.0 / (occ[lo - 1] as f64 + 1.0);
        *o = if hi > lo {
            wl + 1.0 / (occ[hi - 1] as f64 + 1.0) + (hi - lo - 1) as f64
        } else {
            wl
        };
    }
}

/// Visit all `K^q` tuples in lexicographic order.
pub fn for_each_ktuple(q: usize, big_k: u32, mut f: impl FnMut(&[u32])) {
    let mut k = vec![1u32; q];
    loop {
        f(&k);
        let mut pos = q;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if k[pos] < big_k {
                k[pos] += 1;
                break;
            }
            k[pos] = 1;
        }
    }
}

/// Floating-point alpha vectors for every tuple, lexicographic order.
pub fn alpha_table(q: usize, big_k: u32) -> Vec<Vec<f64>> {
    let bk = big_k as usize;
    let mut occ = vec![0usize; bk];
    let mut sigma = vec![0usize; bk + 1];
    let mut out = Vec::new();
    for_each_ktuple(q, big_k, |k| {
        let mut a = vec![0.0; q + 1];
        alpha_into(k, bk, &mut occ, &mut sigma, &mut a);
        out.push(a);
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn example_one_two() {
        let ws = alpha_coeffs(&KTuple::new(vec![1, 2], 2).unwrap());
        assert_eq!(ws.occupation, vec![1, 1]);
        assert_eq!(ws.sigma, vec![0, 1, 2]);
        assert_eq!(ws.alpha, vec![r(1, 2), r(1, 1), r(1, 2)]);
        // The literal min/max form misses single-block positions.
        assert_eq!(ws.minmax_mismatch, vec![0, 2]);
    }

    #[test]
    fn example_one_one() {
        let ws = alpha_coeffs(&KTuple::new(vec![1, 1], 2).unwrap());
        assert_eq!(ws.occupation, vec![2, 0]);
        assert_eq!(ws.alpha, vec![r(1, 3), r(1, 3), r(4, 3)]);
    }

    #[test]
    fn empty_tuple() {
        for big_k in [1, 2, 4, 8] {
            let ws = alpha_coeffs(&KTuple::new(vec![], big_k).unwrap());
            assert_eq!(ws.alpha, vec![r(big_k as i64, 1)]);
        }
    }

    #[test]
    fn float_form_matches_rational() {
        for q in 0..=4 {
            let table = alpha_table(q, 4);
            let mut idx = 0;
            for_each_ktuple(q, 4, |k| {
                let ws = alpha_coeffs(&KTuple::new(k.to_vec(), 4).unwrap());
                for (a, b) in ws.alpha_f64().iter().zip(&table[idx]) {
                    assert!((a - b).abs() < 1e-15);
                }
                idx += 1;
            });
            assert_eq!(idx, 4usize.pow(q as u32));
        }
    }

    #[test]
    fn rejects_bad_tuples() {
        assert!(KTuple::new(vec![3], 2).is_err());
        assert!(KTuple::new(vec![1], 3).is_err());
    }
}

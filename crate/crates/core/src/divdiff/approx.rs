use num_complex::Complex64;

use super::alpha::{alpha_into, for_each_ktuple};
use super::{dd_exp_exact, factorial, neg_i_pow, PairwiseSum};
use crate::error::{contract, Error, Result};

/// Default cap on enumerated terms.
pub const DEFAULT_TERM_BUDGET: f64 = 1e7;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
}

fn check_k(big_k: u32) -> Result<()> {
    if big_k == 0 {
        return Err(contract("K must be at least 1"));
    }
    Ok(())
}

/// `((-i tau)^q / q!) e^{-i tau mean(x)}`.
pub fn mean_phase_approx(x: &[f64], tau: f64) -> Complex64 {
    let q = x.len() - 1;
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    neg_i_pow(q) * (tau.powi(q as i32) / factorial(q)) * Complex64::from_polar(1.0, -tau * mean)
}

/// Visit non-decreasing split points `0 <= j_1 <= ... <= j_{K-1} <= q`,
/// presented as the full boundary list `[0, j_1, ..., j_{K-1}, q]`.
fn for_each_split(q: usize, big_k: usize, mut f: impl FnMut(&[usize])) {
    let mut b = vec![0usize; big_k + 1];
    b[big_k] = q;
    fn rec(b: &mut Vec<usize>, pos: usize, big_k: usize, q: usize, f: &mut impl FnMut(&[usize])) {
        if pos == big_k {
            f(b);
            return;
        }
        for v in b[pos - 1]..=q {
            b[pos] = v;
            rec(b, pos + 1, big_k, q, f);
        }
    }
    rec(&mut b, 1, big_k, q, &mut f);
}

/// K-fold Leibniz split: sum over boundary lists of the product of sub-interval
/// divided differences at `tau / K`. Mathematically equal to the exact value.
pub fn leibniz_kfold_split(x: &[f64], tau: f64, big_k: u32) -> Result<Complex64> {
    leibniz_kfold_split_with(x, tau, big_k, DEFAULT_TERM_BUDGET)
}

pub fn leibniz_kfold_split_with(x: &[f64], tau: f64, big_k: u32, budget: f64) -> Result<Complex64> {
    check_k(big_k)?;
    let q = x.len().checked_sub(1).ok_or_else(|| contract("empty input list"))?;
    let bk = big_k as usize;
    let count = binom(q + bk - 1, bk - 1);
    if count > budget {
        return Err(Error::Budget {
            what: "Leibniz split points".into(),
            count,
            budget,
        });
    }
    let delta = tau / big_k as f64;
    // Table of sub-interval divided differences x[a..=b].
    let mut table = vec![Complex64::new(0.0, 0.0); (q + 1) * (q + 1)];
    for a in 0..=q {
        for b in a..=q {
            table[a * (q + 1) + b] = dd_exp_exact(&x[a..=b], delta)?;
        }
    }
    let mut acc = PairwiseSum::new();
    for_each_split(q, bk, |bnd| {
        let mut p = Complex64::new(1.0, 0.0);
        for w in bnd.windows(2) {
            p *= table[w[0] * (q + 1) + w[1]];
        }
        acc.add(p);
    });
    Ok(acc.total())
}

/// Ordered-partition form: `(-i delta)^q sum_j prod_l e^{-i delta xbar_l} / j_l!`
/// over compositions `j_1 + ... + j_K = q`; block `l` spans `Sigma_{l-1}..=Sigma_l`.
pub fn ehat_partition(x: &[f64], tau: f64, big_k: u32) -> Result<Complex64> {
    ehat_partition_with(x, tau, big_k, DEFAULT_TERM_BUDGET)
}

pub fn ehat_partition_with(x: &[f64], tau: f64, big_k: u32, budget: f64) -> Result<Complex64> {
    check_k(big_k)?;
    let q = x.len().checked_sub(1).ok_or_else(|| contract("empty input list"))?;
    let bk = big_k as usize;
    let count = binom(q + bk - 1, bk - 1);
    if count > budget {
        return Err(Error::Budget {
            what: "ordered partitions".into(),
            count,
            budget,
        });
    }
    let delta = tau / big_k as f64;
    let mut prefix = vec![0.0; q + 2];
    for (i, v) in x.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    let mean = |a: usize, b: usize| (prefix[b + 1] - prefix[a]) / (b - a + 1) as f64;
    let mut acc = PairwiseSum::new();
    for_each_split(q, bk, |bnd| {
        let mut phase = 0.0;
        let mut den = 1.0;
        for w in bnd.windows(2) {
            phase += mean(w[0], w[1]);
            den *= factorial(w[1] - w[0]);
        }
        acc.add(Complex64::from_polar(1.0 / den, -delta * phase));
    });
    Ok(neg_i_pow(q) * delta.powi(q as i32) * acc.total())
}

/// Tuple form: `((-i delta)^q / q!) sum_{k in [K]^q} e^{-i delta sum_s alpha_s x_s}`.
pub fn ehat_ktuple(x: &[f64], tau: f64, big_k: u32) -> Result<Complex64> {
    ehat_ktuple_with(x, tau, big_k, DEFAULT_TERM_BUDGET)
}

pub fn ehat_ktuple_with(x: &[f64], tau: f64, big_k: u32, budget: f64) -> Result<Complex64> {
    check_k(big_k)?;
    let q = x.len().checked_sub(1).ok_or_else(|| contract("empty input list"))?;
    let count = (big_k as f64).powi(q as i32);
    if count > budget {
        return Err(Error::Budget {
            what: "K-tuples".into(),
            count,
            budget,
        });
    }
    let delta = tau / big_k as f64;
    Ok(neg_i_pow(q) * (delta.powi(q as i32) / factorial(q)) * phase_sum(x, delta, big_k))
}

/// `sum_{k in [K]^q} e^{-i delta sum_s alpha_s(k) x_s}` in lexicographic tuple order.
pub(crate) fn phase_sum(x: &[f64], delta: f64, big_k: u32) -> Complex64 {
    let q = x.len() - 1;
    let bk = big_k as usize;
    let mut occ = vec![0usize; bk];
    let mut sigma = vec![0usize; bk + 1];
    let mut alpha = vec![0.0; q + 1];
    let mut acc = PairwiseSum::new();
    for_each_ktuple(q, big_k, |k| {
        alpha_into(k, bk, &mut occ, &mut sigma, &mut alpha);
        let e: f64 = alpha.iter().zip(x).map(|(a, v)| a * v).sum();
        acc.add(Complex64::from_polar(1.0, -delta * e));
    });
    acc.total()
}

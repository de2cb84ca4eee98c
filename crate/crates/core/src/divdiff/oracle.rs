//! Independent high-precision evaluation through the Taylor form
//! `sum_m (-i tau)^{q+m} / (q+m)! * h_m(x_0..x_q)`, where `h_m` is the complete
//! homogeneous symmetric polynomial, carried out in double-double arithmetic.

use num_complex::Complex64;

use super::ln_factorial;
use crate::error::{contract, Result};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let d = quick_two_sum(s, e + t);
        quick_two_sum(d.hi, d.lo + f)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        quick_two_sum(p, e)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = Dd::from(q1).mul(Dd::from(d));
        let r = self.add(p.neg());
        let q2 = r.hi / d;
        quick_two_sum(q1, q2)
    }
}

/// Taylor-form oracle with truncation at relative size `10^-digits`.
pub fn dd_exp_oracle(x: &[f64], tau: f64, digits: u32) -> Result<Complex64> {
    let n = x.len();
    if n == 0 {
        return Err(contract("dd_exp_oracle: empty input list"));
    }
    let q = n - 1;
    if q > 12 {
        return Err(contract(format!("dd_exp_oracle: q = {q} exceeds oracle scale 12")));
    }
    let xmax = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 10f64.powi(-(digits.min(32) as i32));
    let ln_scale = q as f64 * tau.abs().max(1e-300).ln() - ln_factorial(q);

    // mag = |tau|^{q+m} / (q+m)!, accumulated exactly enough in double-double.
    let mut mag = Dd::from(1.0);
    for k in 1..=q {
        mag = mag.mul(Dd::from(tau.abs())).div_f64(k as f64);
    }
    let tsign = if tau < 0.0 { -1.0 } else { 1.0 };
    let mut h = vec![Dd::from(1.0); n];
    let mut re = Dd::ZERO;
    let mut im = Dd::ZERO;
    for m in 0..100_000usize {
        if m > 0 {
            let mut prev = Dd::ZERO;
            for j in 0..n {
                let v = prev.add(Dd::from(x[j]).mul(h[j]));
                h[j] = v;
                prev = v;
            }
            mag = mag.mul(Dd::from(tau.abs())).div_f64((q + m) as f64);
        }
        // (-i sign(tau))^{q+m}
        let p = q + m;
        let mut term = mag.mul(h[n - 1]);
        if tsign < 0.0 && p % 2 == 1 {
            term = term.neg();
        }
        match p % 4 {
            0 => re = re.add(term),
            1 => im = im.add(term.neg()),
            2 => re = re.add(term.neg()),
            _ => im = im.add(term),
        }
        // Bound on the remaining tail: (|tau| X)^m / m! * |tau|^q / q! * C(q+m, q) growth.
        let ln_bound = ln_scale
            + m as f64 * (tau.abs() * xmax).max(1e-300).ln()
            - ln_factorial(m)
            + ln_binom(q + m, q);
        if m as f64 > tau.abs() * xmax && (ln_bound - ln_scale) < tol.ln() - 2.0 {
            break;
        }
    }
    Ok(Complex64::new(re.hi + re.lo, im.hi + im.lo))
}

fn ln_binom(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divdiff::dd_exp_exact;

    #[test]
    fn trivial() {
        assert_eq!(dd_exp_oracle(&[0.0], 1.0, 30).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_point_matches_exact() {
        let a = dd_exp_oracle(&[0.0, 1.0], 1.0, 30).unwrap();
        let b = dd_exp_exact(&[0.0, 1.0], 1.0).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn repeated_two() {
        let a = dd_exp_oracle(&[2.0, 2.0], 1.0, 30).unwrap();
        let want = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -2.0);
        assert!((a - want).norm() < 1e-15);
    }

    #[test]
    fn negative_tau() {
        let x = [0.3, -1.1, 0.4];
        let a = dd_exp_oracle(&x, -0.9, 30).unwrap();
        let b = dd_exp_exact(&x, -0.9).unwrap();
        assert!((a - b).norm() < 1e-14);
    }
}

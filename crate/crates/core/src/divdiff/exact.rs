use num_complex::Complex64;

use super::ln_factorial;
use crate::error::{contract, Error, Result};

/// Largest admissible `ln(|tau|^q / q!)` before the result would overflow.
const LN_RANGE: f64 = 700.0;

/// Upper-triangular square matrix, row-major.
struct Tri {
    n: usize,
    a: Vec<Complex64>,
}

impl Tri {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            t.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        t
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    fn mul(&self, o: &Tri) -> Tri {
        let n = self.n;
        let mut r = Tri::zeros(n);
        for i in 0..n {
            for k in i..n {
                let aik = self.a[i * n + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k..n {
                    r.a[i * n + j] += aik * o.a[k * n + j];
                }
            }
        }
        r
    }

    fn max_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| (i..self.n).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `exp(-i tau [x_0, ..., x_q])`: the `(0, q)` entry of `exp(-i tau A)` for the
/// bidiagonal `A` with the inputs on the diagonal and ones above it.
///
/// Scaling and squaring with a Taylor kernel; the diagonal is shifted by the
/// input mean first, which factors out as a global phase.
pub fn dd_exp_exact(x: &[f64], tau: f64) -> Result<Complex64> {
    let n = x.len();
    if n == 0 {
        return Err(contract("dd_exp_exact: empty input list"));
    }
    if !tau.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(contract("dd_exp_exact: non-finite input"));
    }
    let q = n - 1;
    if q > 0 && tau != 0.0 {
        let ln_mag = q as f64 * tau.abs().ln() - ln_factorial(q);
        if ln_mag > LN_RANGE {
            return Err(Error::Range(format!(
                "|tau|^q/q! = exp({ln_mag:.1}) is outside the representable range"
            )));
        }
    }
    if q == 0 {
        return Ok(Complex64::from_polar(1.0, -tau * x[0]));
    }
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let c = x.iter().sum::<f64>() / n as f64;
    let mi = Complex64::new(0.0, -tau);
    let mut b = Tri::zeros(n);
    for j in 0..n {
        b.a[j * n + j] = mi * (x[j] - c);
        if j + 1 < n {
            b.a[j * n + j + 1] = mi;
        }
    }
    let nrm = b.max_row_sum();
    let s = if nrm > 0.5 {
        (nrm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = Complex64::new(0.5f64.powi(s), 0.0);
    for v in b.a.iter_mut() {
        *v *= scale;
    }
    // Taylor series of exp(B) with ||B|| <= 1/2.
    let mut e = Tri::identity(n);
    let mut term = Tri::identity(n);
    for k in 1..=30 {
        term = term.mul(&b);
        let inv = Complex64::new(1.0 / k as f64, 0.0);
        for v in term.a.iter_mut() {
            *v *= inv;
        }
        let mut biggest = 0.0f64;
        for (ev, tv) in e.a.iter_mut().zip(term.a.iter()) {
            *ev += *tv;
            biggest = biggest.max(tv.norm());
        }
        if biggest == 0.0 || (k > 4 && biggest < 1e-20 * e.get(0, 0).norm().max(1e-300)) {
            break;
        }
    }
    for _ in 0..s {
        e = e.mul(&e);
    }
    let v = e.get(0, n - 1) * Complex64::from_polar(1.0, -tau * c);
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Range("dd_exp_exact produced a non-finite value".into()));
    }
    Ok(v)
}

/// Direct ratio form `sum_j f(x_j) / prod_{k != j} (x_j - x_k)`.
///
/// Only meaningful for well-separated inputs; repeated inputs are rejected.
pub fn dd_exp_ratio(x: &[f64], tau: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &xj) in x.iter().enumerate() {
        let mut den = 1.0;
        for (k, &xk) in x.iter().enumerate() {
            if k != j {
                den *= xj - xk;
            }
        }
        if den == 0.0 {
            return Err(contract("dd_exp_ratio: repeated inputs"));
        }
        acc += Complex64::from_polar(1.0, -tau * xj) / den;
    }
    Ok(acc)
}

#[cfg(test)]
/// Repeated-point value `(-i tau)^q e^{-i tau x} / q!`.
pub(crate) fn confluent(x: f64, q: usize, tau: f64) -> Complex64 {
    super::neg_i_pow(q) * (q as f64 * tau.ln() - ln_factorial(q)).exp() * Complex64::from_polar(1.0, -tau * x)
}

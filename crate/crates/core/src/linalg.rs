//! Dense complex linear algebra helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Default ceiling on qubits for dense operators.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// SVD is used up to this dimension; larger problems use power iteration.
pub const SVD_MAX_DIM: usize = 1024;

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// `max |U^dagger U - 1|` entrywise.
pub fn unitarity_error(u: &CMat) -> f64 {
    let p = u.adjoint() * u;
    max_abs(&(p - identity(u.nrows())))
}

pub fn hermiticity_error(h: &CMat) -> f64 {
    max_abs(&(h - h.adjoint()))
}

/// `exp(-i t H)` for Hermitian `H` via eigendecomposition.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let dim = h.nrows();
    if dim == 0 {
        return h.clone();
    }
    // Symmetrize so that round-off does not leak into the eigensolver.
    let hs = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hs.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMat::from_diagonal(&CVec::from_iterator(
        dim,
        eig.eigenvalues
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -t * e)),
    ));
    v * phases * v.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    if m.nrows().max(m.ncols()) <= SVD_MAX_DIM {
        let sv = m.clone().svd(false, false).singular_values;
        Ok(sv.iter().cloned().fold(0.0, f64::max))
    } else {
        power_iteration_norm(m, 1e-10, 10_000)
    }
}

/// Power iteration on `M^dagger M`; deterministic start vector.
pub fn power_iteration_norm(m: &CMat, tol: f64, max_iter: usize) -> Result<f64> {
    let n = m.ncols();
    let mut v = CVec::from_iterator(
        n,
        (0..n).map(|j| Complex64::new(1.0 + (j as f64 * 0.618_033_988_7).fract(), 0.0)),
    );
    let nv = v.norm();
    if nv == 0.0 {
        return Ok(0.0);
    }
    v /= Complex64::new(nv, 0.0);
    let mut sigma = 0.0;
    for it in 0..max_iter {
        let w = m * &v;
        let mut u = m.adjoint() * &w;
        let lam = u.norm();
        if lam == 0.0 {
            return Ok(0.0);
        }
        u /= Complex64::new(lam, 0.0);
        let next = lam.sqrt();
        let residual = (next - sigma).abs();
        v = u;
        sigma = next;
        if residual <= tol * sigma.max(1.0) && it > 2 {
            return Ok(sigma);
        }
        if it + 1 == max_iter {
            return Err(Error::NoConvergence {
                iterations: max_iter,
                residual,
            });
        }
    }
    Ok(sigma)
}

/// `||A - B||_2`.
pub fn spectral_distance(a: &CMat, b: &CMat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Contract(format!(
            "spectral_distance: shapes {:?} and {:?} differ",
            a.shape(),
            b.shape()
        )));
    }
    spectral_norm(&(a - b))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn distance_of_equal_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = rand_mat(&mut rng, 8);
        assert_eq!(spectral_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn uniform_phase_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = rand_mat(&mut rng, 6);
        let h = &h + h.adjoint();
        let u = expm_hermitian(&h, 0.7);
        let th = 0.4;
        let ph = Complex64::from_polar(1.0, th);
        let d = spectral_distance(&u, &(&u * ph)).unwrap();
        assert!((d - (ph - 1.0).norm()).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = rand_mat(&mut rng, 8);
        let b = rand_mat(&mut rng, 8);
        let svd = spectral_distance(&a, &b).unwrap();
        let pi = power_iteration_norm(&(&a - &b), 1e-14, 100_000).unwrap();
        assert!((svd - pi).abs() < 1e-10, "{svd} vs {pi}");
    }

    #[test]
    fn expm_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = rand_mat(&mut rng, 16);
        let h = &h + h.adjoint();
        assert!(unitarity_error(&expm_hermitian(&h, 1.3)) < 1e-12);
    }
}

use num_complex::Complex64;

use super::params::SimParams;
use super::weights::next_index;
use crate::divdiff::{alpha_table, dd_exp_exact, factorial, neg_i_pow, KTuple, PairwiseSum};
use crate::divdiff::alpha_coeffs;
use crate::error::{contract, Error, Result};
use crate::linalg::{expm_hermitian, CMat};
use crate::pauli::Mask;
use crate::pmr::{pmr_reconstruct, PmrHamiltonian};

fn check_dense(h: &PmrHamiltonian, limit: usize) -> Result<usize> {
    if h.n > limit {
        return Err(Error::DenseLimit {
            required: h.n,
            limit,
        });
    }
    Ok(1usize << h.n)
}

/// `exp(-i H dt)` from the dense reconstruction.
pub fn exact_step_unitary(h: &PmrHamiltonian, dt: f64, limit: usize) -> Result<CMat> {
    Ok(expm_hermitian(&pmr_reconstruct(h, limit)?, dt))
}

/// Walk `z -> z ^ x_{i_1} -> ...`, returning energies and the product of
/// `d_{i_j}(z_j)`; when `ratio` is set, each factor is divided by `gamma_{i_j}`.
fn walk(h: &PmrHamiltonian, z: Mask, iq: &[usize], energies: &mut Vec<f64>, ratio: bool) -> (Mask, Complex64) {
    energies.clear();
    energies.push(h.energy(z));
    let mut cur = z;
    let mut d = Complex64::new(1.0, 0.0);
    for &i in iq {
        let t = &h.terms[i];
        cur ^= t.x_mask;
        let v = t.diag.eval(cur);
        d *= if ratio { v / t.gamma } else { v };
        energies.push(h.energy(cur));
    }
    (cur, d)
}

fn series_count(m: usize, per: f64, q_max: usize) -> f64 {
    (0..=q_max).map(|q| (m as f64 * per).powi(q as i32)).sum()
}

/// Partial sum through order `Q` of the off-diagonal series with exact divided differences.
pub fn build_u_series_exact(h: &PmrHamiltonian, dt: f64, q_max: usize, budget: f64, limit: usize) -> Result<CMat> {
    let dim = check_dense(h, limit)?;
    let count = series_count(h.m(), 1.0, q_max);
    if count > budget {
        return Err(Error::Budget {
            what: "series terms".into(),
            count,
            budget,
        });
    }
    let mut u = CMat::zeros(dim, dim);
    let mut e = Vec::new();
    for z in 0..dim {
        for q in 0..=q_max {
            if q > 0 && h.m() == 0 {
                break;
            }
            let mut iq = vec![0usize; q];
            loop {
                let (row, d) = walk(h, z as Mask, &iq, &mut e, false);
                u[(row as usize, z)] += d * dd_exp_exact(&e, dt)?;
                if !next_index(&mut iq, h.m()) {
                    break;
                }
            }
        }
    }
    Ok(u)
}

/// `V = (-i)^q P_{i_q} ... P_{i_1} diag(e^{-i delta sum_s alpha_s E_{z_s}})`, `delta = dt/K`.
pub fn build_v(h: &PmrHamiltonian, iq: &[usize], kt: &KTuple, dt: f64, limit: usize) -> Result<CMat> {
    let dim = check_dense(h, limit)?;
    if iq.len() != kt.q() {
        return Err(contract("build_v: i_q and k_q lengths differ"));
    }
    if let Some(&bad) = iq.iter().find(|&&i| i >= h.m()) {
        return Err(contract(format!("build_v: term index {bad} out of range")));
    }
    let alpha = alpha_coeffs(kt).alpha_f64();
    let delta = dt / kt.big_k as f64;
    let ph = neg_i_pow(iq.len());
    let mut v = CMat::zeros(dim, dim);
    let mut e = Vec::new();
    for z in 0..dim {
        let (row, _) = walk(h, z as Mask, iq, &mut e, false);
        let theta: f64 = alpha.iter().zip(&e).map(|(a, x)| a * x).sum();
        v[(row as usize, z)] = ph * Complex64::from_polar(1.0, -delta * theta);
    }
    Ok(v)
}

/// Branch operator including the per-hop factor `d/gamma`; equals [`build_v`]
/// for constant diagonals with positive coefficients.
pub fn build_v_ratio(h: &PmrHamiltonian, iq: &[usize], kt: &KTuple, dt: f64, limit: usize) -> Result<CMat> {
    let mut v = build_v(h, iq, kt, dt, limit)?;
    let dim = v.ncols();
    let mut e = Vec::new();
    for z in 0..dim {
        let (row, d) = walk(h, z as Mask, iq, &mut e, true);
        v[(row as usize, z)] *= d;
    }
    Ok(v)
}

/// `U~ = sum_q sum_{i_q} sum_{k_q} (gamma_{i_q} dt^q)/(K^q q!) V'`, assembled column by column.
pub fn build_u_tilde(h: &PmrHamiltonian, p: &SimParams, budget: f64, limit: usize) -> Result<CMat> {
    let dim = check_dense(h, limit)?;
    let count = series_count(h.m(), p.big_k as f64, p.q_max);
    if count > budget {
        return Err(Error::Budget {
            what: "U-tilde terms".into(),
            count,
            budget,
        });
    }
    let delta = p.dt / p.big_k as f64;
    let tables: Vec<Vec<Vec<f64>>> = (0..=p.q_max).map(|q| alpha_table(q, p.big_k)).collect();
    let mut u = CMat::zeros(dim, dim);
    let mut e = Vec::new();
    for z in 0..dim {
        for q in 0..=p.q_max {
            if q > 0 && h.m() == 0 {
                break;
            }
            let pref = neg_i_pow(q) * (delta.powi(q as i32) / factorial(q));
            let mut iq = vec![0usize; q];
            loop {
                let (row, d) = walk(h, z as Mask, &iq, &mut e, false);
                if d != Complex64::new(0.0, 0.0) {
                    let mut acc = PairwiseSum::new();
                    for a in &tables[q] {
                        let th: f64 = a.iter().zip(&e).map(|(a, x)| a * x).sum();
                        acc.add(Complex64::from_polar(1.0, -delta * th));
                    }
                    u[(row as usize, z)] += d * pref * acc.total();
                }
                if !next_index(&mut iq, h.m()) {
                    break;
                }
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, spectral_distance, unitarity_error};
    use crate::lcu::params::{params_from_norms, tail};
    use crate::pauli::PauliHamiltonian;
    use crate::pmr::pmr_decompose;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn rabi(omega: f64) -> PmrHamiltonian {
        pmr_decompose(&PauliHamiltonian::from_labels(&[("X", c(omega))]).unwrap()).unwrap()
    }

    #[test]
    fn exact_step_examples() {
        let z = pmr_decompose(&PauliHamiltonian::from_labels(&[("Z", c(1.0))]).unwrap()).unwrap();
        let u = exact_step_unitary(&z, std::f64::consts::PI, 12).unwrap();
        assert!(max_abs(&(u + CMat::identity(2, 2))) < 1e-12);
        let h = rabi(0.8);
        let u = exact_step_unitary(&h, 0.3, 12).unwrap();
        let (co, si) = ((0.24f64).cos(), (0.24f64).sin());
        assert!((u[(0, 0)] - c(co)).norm() < 1e-12);
        assert!((u[(1, 0)] - Complex64::new(0.0, -si)).norm() < 1e-12);
        assert!(unitarity_error(&u) < 1e-11);
    }

    #[test]
    fn series_order_zero_is_diagonal_evolution() {
        let h = pmr_decompose(
            &PauliHamiltonian::from_labels(&[("ZI", c(0.4)), ("ZZ", c(-0.3)), ("XI", c(0.2))]).unwrap(),
        )
        .unwrap();
        let u = build_u_series_exact(&h, 0.5, 0, 1e6, 12).unwrap();
        for z in 0..4 {
            let want = Complex64::from_polar(1.0, -0.5 * h.energy(z as Mask));
            assert!((u[(z, z)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn rabi_series_is_truncated_taylor() {
        let h = rabi(0.7);
        let dt = 0.9;
        for q_max in 0..5 {
            let u = build_u_series_exact(&h, dt, q_max, 1e6, 12).unwrap();
            let mut want = CMat::zeros(2, 2);
            let mut xp = CMat::identity(2, 2);
            let x = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
            for q in 0..=q_max {
                want += &xp * (neg_i_pow(q) * (0.7f64 * dt).powi(q as i32) / factorial(q));
                xp = &xp * &x;
            }
            assert!(max_abs(&(u.clone() - want.clone())) < 1e-14);
            let p = params_from_norms(0.1, dt, 0.7, 0.0).unwrap();
            let p = SimParams { q_max, ..p };
            let ut = build_u_tilde(&h, &p, 1e6, 12).unwrap();
            assert!(max_abs(&(ut - want)) < 1e-14);
        }
    }

    #[test]
    fn v_examples() {
        let h = pmr_decompose(&PauliHamiltonian::from_labels(&[("Z", c(0.5)), ("X", c(0.3))]).unwrap())
            .unwrap();
        let v0 = build_v(&h, &[], &KTuple::new(vec![], 4).unwrap(), 0.8, 12).unwrap();
        assert!((v0[(0, 0)] - Complex64::from_polar(1.0, -0.4)).norm() < 1e-15);
        assert!((v0[(1, 1)] - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
        // K = 1, q = 1: alpha = (1/2, 1/2) so the phase is -(E_0 + E_1)/2 = 0.
        let v1 = build_v(&h, &[0], &KTuple::new(vec![1], 1).unwrap(), 1.0, 12).unwrap();
        assert!((v1[(1, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((v1[(0, 1)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(unitarity_error(&v1) < 1e-12);
    }

    #[test]
    fn series_converges() {
        let h = pmr_decompose(
            &PauliHamiltonian::from_labels(&[
                ("ZI", c(0.4)),
                ("ZZ", c(-0.3)),
                ("XI", c(0.2)),
                ("XY", c(0.25)),
                ("YY", c(-0.1)),
            ])
            .unwrap(),
        )
        .unwrap();
        let dt = 0.5;
        let exact = exact_step_unitary(&h, dt, 12).unwrap();
        for q_max in [1, 3, 5] {
            let u = build_u_series_exact(&h, dt, q_max, 1e7, 12).unwrap();
            let d = spectral_distance(&u, &exact).unwrap();
            assert!(d <= 2.0 * tail(q_max, h.gamma_total * dt), "Q={q_max}: {d}");
        }
        let u = build_u_series_exact(&h, dt, 12, 1e9, 12).unwrap();
        assert!(spectral_distance(&u, &exact).unwrap() < 1e-10);
    }
}

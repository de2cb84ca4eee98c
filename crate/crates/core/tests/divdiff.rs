mod common;

use pmrsim::divdiff::*;
use pmrsim::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn exact_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let q = rng.gen_range(0..=8);
        let x = common::uniform_inputs(&mut rng, q);
        let tau = rng.gen_range(0.1..2.0);
        let a = dd_exp_exact(&x, tau).unwrap();
        let b = dd_exp_oracle(&x, tau, 30).unwrap();
        assert!((a - b).norm() <= 1e-11, "q={q} x={x:?} tau={tau}");
    }
}

#[test]
fn clustered_inputs_stay_stable() {
    // Nearly coincident inputs: the limit is the scaled exponential.
    let x = [0.3, 0.3 + 1e-12, 0.3 - 1e-12, 0.3];
    let a = dd_exp_exact(&x, 1.0).unwrap();
    let want = mean_phase_approx(&[0.3; 4], 1.0);
    assert!((a - want).norm() < 1e-11);
}

#[test]
fn ratio_form_agrees_when_well_separated() {
    let x = [-1.5, -0.2, 0.9, 1.7];
    assert!(rel(dd_exp_ratio(&x, 0.7).unwrap(), dd_exp_exact(&x, 0.7).unwrap()) < 1e-11);
}

#[test]
fn kfold_split_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let q = rng.gen_range(0..=6);
        let x = common::uniform_inputs(&mut rng, q);
        let tau = rng.gen_range(0.1..2.0);
        let exact = dd_exp_exact(&x, tau).unwrap();
        for k in [1, 2, 4] {
            assert!(rel(leibniz_kfold_split(&x, tau, k).unwrap(), exact) <= 1e-10, "q={q} K={k}");
        }
    }
}

#[test]
fn ehat_forms_agree_exhaustively() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for q in 0..=4 {
        for k in [2, 4] {
            for _ in 0..20 {
                let x = common::uniform_inputs(&mut rng, q);
                let a = ehat_partition(&x, 0.8, k).unwrap();
                let b = ehat_ktuple(&x, 0.8, k).unwrap();
                assert!((a - b).norm() <= 1e-13);
            }
        }
    }
}

/// Independent block-mean product versus the weighted product.
#[test]
fn phase_product_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for big_k in [1, 2, 4] {
        for q in 0..=4 {
            for_each_ktuple(q, big_k, |k| {
                let kt = KTuple::new(k.to_vec(), big_k).unwrap();
                let x = common::uniform_inputs(&mut rng, q);
                let delta = rng.gen_range(0.1..1.0);
                let mut counts = vec![0usize; big_k as usize];
                for &v in k {
                    counts[v as usize - 1] += 1;
                }
                let mut lhs = Complex64::new(1.0, 0.0);
                let mut start = 0;
                for j in counts {
                    let mean = x[start..=start + j].iter().sum::<f64>() / (j + 1) as f64;
                    lhs *= Complex64::from_polar(1.0, -delta * mean);
                    start += j;
                }
                let ws = alpha_coeffs(&kt);
                let rhs = ws.alpha_f64().iter().zip(&x).fold(Complex64::new(1.0, 0.0), |acc, (a, xs)| {
                    acc * Complex64::from_polar(1.0, -delta * a * xs)
                });
                assert!((lhs - rhs).norm() <= 1e-13);
                assert_eq!(ws.alpha_sum(), Rational::from_integer(big_k as i64));
            });
        }
    }
}

#[test]
fn error_bound_holds_and_dominated_by_worst_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let (dt, de) = (0.9, 1.0);
    for q in 1..=6 {
        for big_k in [1, 2, 4] {
            let bound = dd_error_bound(q, dt, de, big_k);
            let worst = worst_case_closed_forms(q, dt, de, big_k).error();
            for _ in 0..170 {
                let x = random_gapped_inputs(&mut rng, q, de);
                let err = (dd_exp_exact(&x, dt).unwrap() - ehat_ktuple(&x, dt, big_k).unwrap()).norm();
                assert!(err <= bound, "q={q} K={big_k}: {err} > {bound}");
                assert!(err <= worst * (1.0 + 1e-9) + 1e-15, "q={q} K={big_k}: {err} > worst {worst}");
            }
        }
    }
}

#[test]
fn ehat_reduces_to_mean_phase_for_single_block() {
    let x = [0.1, -0.4, 0.6];
    assert!((ehat_partition(&x, 1.2, 1).unwrap() - mean_phase_approx(&x, 1.2)).norm() < 1e-15);
}

#[test]
fn budget_is_enforced() {
    let x = vec![0.0; 9];
    assert!(matches!(
        ehat_ktuple_with(&x, 1.0, 8, 1e3),
        Err(pmrsim::Error::Budget { .. })
    ));
}

proptest! {
    #[test]
    fn ehat_magnitude_is_capped(x in proptest::collection::vec(-2.0f64..2.0, 1..6), dt in 0.05f64..2.0, kk in 0usize..3) {
        let q = x.len() - 1;
        let e = ehat_ktuple(&x, dt, 1 << kk).unwrap();
        prop_assert!(e.norm() <= dt.powi(q as i32) / factorial(q) * (1.0 + 1e-12));
    }

    #[test]
    fn exact_is_symmetric(mut x in proptest::collection::vec(-2.0f64..2.0, 2..7), tau in 0.1f64..2.0) {
        let a = dd_exp_exact(&x, tau).unwrap();
        x.reverse();
        let b = dd_exp_exact(&x, tau).unwrap();
        prop_assert!((a - b).norm() <= 1e-13);
    }
}

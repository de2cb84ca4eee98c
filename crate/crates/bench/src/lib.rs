//! Shared fixtures for the criterion benches in `benches/`.

use pmrsim::lcu::{choose_params, SimParams};
use pmrsim::models::{Boundary, Geometry, ModelFamily};
use pmrsim::pmr::pmr_decompose;
use pmrsim::{Complex64, PauliHamiltonian, PmrHamiltonian};

/// Clustered Rydberg family with unit drive.
pub fn rydberg_family() -> ModelFamily {
    ModelFamily::Rydberg {
        geometry: Geometry::Clustered,
        omega: 1.0,
        delta: 0.5,
        c6: 100.0,
        seed: 0,
        loadings: 1,
    }
}

/// Periodic 1D dipolar chain.
pub fn dipolar_family() -> ModelFamily {
    ModelFamily::Dipolar {
        dims: 1,
        t_h: 1.0,
        u: 2.0,
        c_dd: 0.5,
        dipole: [0.0, 0.0, 1.0],
        boundary: Boundary::Periodic,
    }
}

/// Transverse-field Ising ring on `n` qubits with parameters for `t = 1`, `eps = 0.01`.
pub fn ising_ring(n: usize) -> (PmrHamiltonian, SimParams) {
    let site = |ops: &[(usize, char)]| -> String {
        (0..n).rev().map(|q| ops.iter().find(|(p, _)| *p == q).map_or('I', |(_, c)| *c)).collect()
    };
    let mut labels = Vec::new();
    for q in 0..n {
        labels.push((site(&[(q, 'Z'), ((q + 1) % n, 'Z')]), Complex64::new(1.0, 0.0)));
        labels.push((site(&[(q, 'X')]), Complex64::new(0.7, 0.0)));
    }
    let refs: Vec<(&str, Complex64)> = labels.iter().map(|(l, c)| (l.as_str(), *c)).collect();
    let h = pmr_decompose(&PauliHamiltonian::from_labels(&refs).expect("valid labels")).expect("Hermitian");
    let p = choose_params(0.01, 1.0, &h).expect("valid parameters");
    (h, p)
}

/// Deterministic divided-difference inputs in `[-1, 1]`.
pub fn dd_inputs(q: usize) -> Vec<f64> {
    (0..=q).map(|j| ((j * 37 % 11) as f64 / 5.0) - 1.0).collect()
}

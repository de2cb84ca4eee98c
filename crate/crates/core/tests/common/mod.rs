#![allow(dead_code)]

use pmrsim::{Complex64, PauliHamiltonian};
use proptest::prelude::*;
use rand::Rng;

/// Random real-coefficient Pauli sums (always Hermitian) on `1..=max_n` qubits.
pub fn pauli_sum(max_n: usize, max_terms: usize) -> impl Strategy<Value = PauliHamiltonian> {
    (1..=max_n).prop_flat_map(move |n| {
        let label = proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
            .prop_map(|cs| cs.into_iter().collect::<String>());
        proptest::collection::vec((label, -2.0f64..2.0), 1..=max_terms).prop_map(|terms| {
            let refs: Vec<(&str, Complex64)> = terms.iter().map(|(l, c)| (l.as_str(), Complex64::new(*c, 0.0))).collect();
            PauliHamiltonian::from_labels(&refs).unwrap()
        })
    })
}

/// Same as [`pauli_sum`] but drawn from an explicit generator.
pub fn random_pauli_sum<R: Rng>(rng: &mut R, n: usize, terms: usize, scale: f64) -> PauliHamiltonian {
    let labels: Vec<(String, Complex64)> = (0..terms)
        .map(|_| {
            let l: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect();
            (l, Complex64::new(rng.gen_range(-scale..scale), 0.0))
        })
        .collect();
    let refs: Vec<(&str, Complex64)> = labels.iter().map(|(l, c)| (l.as_str(), *c)).collect();
    PauliHamiltonian::from_labels(&refs).unwrap()
}

pub fn uniform_inputs<R: Rng>(rng: &mut R, q: usize) -> Vec<f64> {
    (0..=q).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{finish, ModelHamiltonian};
use crate::error::{contract, Error, Result};
use crate::pauli::{PauliSum, PauliTerm, MAX_QUBITS};

/// Side of the cubic trap array used by the clustered geometry.
pub const TRAP_SIDE: usize = 4;

/// Atom arrangement for generated Rydberg instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Unit-spaced line; per-atom interaction sums stay bounded.
    Chain,
    /// Random occupation of a fixed unit-spaced cube of `TRAP_SIDE^3` traps, so the
    /// mean pair interaction does not fall off with `N`.
    Clustered,
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(Geometry::Chain),
            "clustered" => Ok(Geometry::Clustered),
            _ => Err(Error::Parse(format!("unknown geometry `{s}` (chain|clustered)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RydbergSpec {
    pub positions: Vec<[f64; 3]>,
    /// Per-atom Rabi frequencies.
    pub omega: Vec<f64>,
    pub delta: f64,
    pub c6: f64,
}

impl RydbergSpec {
    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Uniform drive on `n` atoms placed by `geometry`; `seed` only affects the clustered layout.
    pub fn generate(n: usize, geometry: Geometry, omega: f64, delta: f64, c6: f64, seed: u64) -> Result<Self> {
        let positions = match geometry {
            Geometry::Chain => (0..n).map(|i| [i as f64, 0.0, 0.0]).collect(),
            Geometry::Clustered => {
                let cap = TRAP_SIDE.pow(3);
                if n > cap {
                    return Err(contract(format!("clustered geometry holds at most {cap} atoms, got {n}")));
                }
                let mut sites: Vec<[f64; 3]> = (0..cap)
                    .map(|s| {
                        let c = |k: usize| (s / TRAP_SIDE.pow(k as u32) % TRAP_SIDE) as f64;
                        [c(0), c(1), c(2)]
                    })
                    .collect();
                sites.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                sites.truncate(n);
                sites
            }
        };
        let spec = Self {
            positions,
            omega: vec![omega; n],
            delta,
            c6,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(contract(format!("Rydberg model needs at least 2 atoms, got {n}")));
        }
        if n > MAX_QUBITS {
            return Err(contract(format!("{n} atoms exceed {MAX_QUBITS} qubits")));
        }
        if self.omega.len() != n {
            return Err(contract(format!("{} Rabi frequencies for {n} atoms", self.omega.len())));
        }
        let finite = self.positions.iter().flatten().chain(&self.omega).chain([&self.delta, &self.c6]);
        if finite.into_iter().any(|v| !v.is_finite()) {
            return Err(contract("Rydberg spec has non-finite entries"));
        }
        for i in 0..n {
            for j in 0..i {
                if dist(&self.positions[i], &self.positions[j]) == 0.0 {
                    return Err(contract(format!("atoms {j} and {i} share a position")));
                }
            }
        }
        Ok(())
    }

    /// `C6 / |r_i - r_j|^6`.
    pub fn interaction(&self, i: usize, j: usize) -> f64 {
        self.c6 / dist(&self.positions[i], &self.positions[j]).powi(6)
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `1/2 sum (Omega_i X_i - delta Z_i) + sum_{i<j} V_ij n_i n_j` with `n = (1 + Z)/2`
/// and atom `i` on qubit `i`.
pub fn rydberg_hamiltonian(spec: &RydbergSpec) -> Result<ModelHamiltonian> {
    spec.validate()?;
    let n = spec.n();
    let re = |v: f64| Complex64::new(v, 0.0);
    let mut h = PauliSum::default();
    for i in 0..n {
        h.add_term(PauliTerm::new(re(spec.omega[i] / 2.0), 1 << i, 0));
        h.add_term(PauliTerm::new(re(-spec.delta / 2.0), 0, 1 << i));
        for j in 0..i {
            let v = re(spec.interaction(i, j) / 4.0);
            for z in [0, 1 << i, 1 << j, 1 << i | 1 << j] {
                h.add_term(PauliTerm::new(v, 0, z));
            }
        }
    }
    finish(n, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clustered_is_seeded_and_distinct() {
        let a = RydbergSpec::generate(20, Geometry::Clustered, 1.0, 0.5, 1.0, 7).unwrap();
        let b = RydbergSpec::generate(20, Geometry::Clustered, 1.0, 0.5, 1.0, 7).unwrap();
        assert_eq!(a, b);
        assert!(RydbergSpec::generate(65, Geometry::Clustered, 1.0, 0.5, 1.0, 7).is_err());
    }

    #[test]
    fn rejects_coincident_atoms() {
        let s = RydbergSpec {
            positions: vec![[0.0; 3], [0.0; 3]],
            omega: vec![1.0; 2],
            delta: 0.0,
            c6: 1.0,
        };
        assert!(rydberg_hamiltonian(&s).is_err());
    }

    #[test]
    fn pure_drive_has_no_diagonal() {
        let s = RydbergSpec::generate(3, Geometry::Chain, 1.0, 0.0, 0.0, 0).unwrap();
        let m = rydberg_hamiltonian(&s).unwrap();
        assert!(m.pmr.d0.is_zero());
        assert_eq!(m.pmr.delta_e, 0.0);
    }
}

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{finish, ModelHamiltonian};
use crate::error::{contract, Result};
use crate::pauli::{Mask, PauliSum, PauliTerm, MAX_QUBITS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    /// Wrap-around bonds, minimum-image distances.
    Periodic,
}

/// Extended Fermi-Hubbard model on a hypercubic lattice of `sites = L^dims` sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipolarSpec {
    pub dims: usize,
    pub sites: usize,
    pub t_h: f64,
    pub u: f64,
    pub c_dd: f64,
    pub dipole: [f64; 3],
    #[serde(default)]
    pub boundary: Boundary,
}

impl DipolarSpec {
    pub fn validate(&self) -> Result<usize> {
        if !(1..=3).contains(&self.dims) {
            return Err(contract(format!("lattice dimension {} not in 1..=3", self.dims)));
        }
        if self.sites < 2 {
            return Err(contract(format!("lattice needs at least 2 sites, got {}", self.sites)));
        }
        if 2 * self.sites > MAX_QUBITS {
            return Err(contract(format!("{} sites need more than {MAX_QUBITS} qubits", self.sites)));
        }
        let side = (self.sites as f64).powf(1.0 / self.dims as f64).round() as usize;
        if side.pow(self.dims as u32) != self.sites {
            return Err(contract(format!("{} sites do not form a {}-d hypercube", self.sites, self.dims)));
        }
        let norm = self.dipole.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(contract(format!("dipole orientation has norm {norm}, expected 1")));
        }
        if ![self.t_h, self.u, self.c_dd].iter().all(|v| v.is_finite()) {
            return Err(contract("dipolar spec has non-finite entries"));
        }
        Ok(side)
    }

    /// Qubit carrying spin `sigma` (0 up, 1 down) at site `j`.
    pub fn qubit(&self, sigma: usize, j: usize) -> usize {
        sigma * self.sites + j
    }

    fn coords(&self, side: usize, j: usize) -> [i64; 3] {
        let mut c = [0i64; 3];
        for (k, v) in c.iter_mut().enumerate().take(self.dims) {
            *v = (j / side.pow(k as u32) % side) as i64;
        }
        c
    }

    /// Nearest-neighbour bonds `(i, j)` with `i < j`.
    pub fn bonds(&self) -> Result<Vec<(usize, usize)>> {
        let side = self.validate()?;
        let mut out = BTreeSet::new();
        for j in 0..self.sites {
            let c = self.coords(side, j);
            for k in 0..self.dims {
                let stride = side.pow(k as u32);
                if (c[k] as usize) + 1 < side {
                    out.insert((j, j + stride));
                } else if self.boundary == Boundary::Periodic && side > 2 {
                    let o = j - (side - 1) * stride;
                    out.insert((o.min(j), o.max(j)));
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// `C_dd / |r|^3 [1 - 3 (d . r)^2 / |r|^2]` for sites `i != j`.
    pub fn interaction(&self, i: usize, j: usize) -> Result<f64> {
        let side = self.validate()?;
        let (a, b) = (self.coords(side, i), self.coords(side, j));
        let mut r = [0.0f64; 3];
        for k in 0..3 {
            let mut d = b[k] - a[k];
            if self.boundary == Boundary::Periodic {
                let s = side as i64;
                d = (d + s) % s;
                if 2 * d > s {
                    d -= s;
                }
            }
            r[k] = d as f64;
        }
        let r2: f64 = r.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(contract(format!("sites {i} and {j} coincide")));
        }
        let proj: f64 = r.iter().zip(&self.dipole).map(|(x, d)| x * d).sum();
        Ok(self.c_dd / r2.powf(1.5) * (1.0 - 3.0 * proj * proj / r2))
    }
}

/// Annihilator on qubit `q` with a Z-string over the lower qubits of its spin block.
fn annihilator(q: usize, block_start: usize) -> PauliSum {
    let string: Mask = (block_start..q).fold(0, |a, k| a | 1 << k);
    let half = Complex64::new(0.5, 0.0);
    // (X - iY) / 2 = (X + X Z) / 2 under Y = i X Z.
    let mut op = PauliSum::single(PauliTerm::new(half, 1 << q, 0));
    op.add_term(PauliTerm::new(half, 1 << q, 1 << q));
    PauliSum::single(PauliTerm::new(Complex64::new(1.0, 0.0), 0, string)).mul(&op)
}

fn number(q: usize) -> PauliSum {
    let mut n = PauliSum::identity(Complex64::new(0.5, 0.0));
    n.add_term(PauliTerm::new(Complex64::new(0.5, 0.0), 0, 1 << q));
    n
}

/// Jordan-Wigner image of the extended Hubbard model on `2 * sites` qubits.
pub fn dipolar_jwt_hamiltonian(spec: &DipolarSpec) -> Result<ModelHamiltonian> {
    spec.validate()?;
    let n = spec.sites;
    let re = |v: f64| Complex64::new(v, 0.0);
    let mut h = PauliSum::default();
    for (i, j) in spec.bonds()? {
        for sigma in 0..2 {
            let start = spec.qubit(sigma, 0);
            let ci = annihilator(spec.qubit(sigma, i), start);
            let cj = annihilator(spec.qubit(sigma, j), start);
            let mut hop = ci.adjoint().mul(&cj);
            hop.add(&cj.adjoint().mul(&ci));
            h.add(&hop.scale(re(-spec.t_h)));
        }
    }
    let site_n: Vec<PauliSum> = (0..n)
        .map(|j| {
            let mut s = number(spec.qubit(0, j));
            s.add(&number(spec.qubit(1, j)));
            s
        })
        .collect();
    for j in 0..n {
        let nn = number(spec.qubit(0, j)).mul(&number(spec.qubit(1, j)));
        h.add(&nn.scale(re(spec.u)));
        for i in 0..j {
            let v = spec.interaction(i, j)?;
            h.add(&site_n[i].mul(&site_n[j]).scale(re(v)));
        }
    }
    finish(2 * n, h)
}

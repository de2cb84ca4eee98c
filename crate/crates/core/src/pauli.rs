//! Pauli strings in bit-pair form.
//!
//! A term `(x_mask, z_mask, coeff)` denotes `coeff * X^x_mask * Z^z_mask`, with
//! `Y = i X Z` absorbed into the coefficient at ingestion. Qubit `j` is bit `j`
//! of a basis index; in string labels the rightmost character is qubit 0.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bitmask over at most 128 qubits.
pub type Mask = u128;

/// Largest supported register.
pub const MAX_QUBITS: usize = 128;

/// Coefficients below this magnitude are dropped after merging.
pub const PRUNE_TOL: f64 = 1e-14;

#[inline]
pub fn parity(m: Mask) -> bool {
    m.count_ones() & 1 == 1
}

#[inline]
pub fn sign(m: Mask) -> f64 {
    if parity(m) {
        -1.0
    } else {
        1.0
    }
}

pub fn full_mask(n: usize) -> Mask {
    if n >= 128 {
        Mask::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Render a mask as an `n`-character binary string, most significant qubit first.
pub fn mask_to_string(m: Mask, n: usize) -> String {
    (0..n)
        .rev()
        .map(|j| if m >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn mask_from_string(s: &str, n: usize) -> Result<Mask> {
    if s.len() != n {
        return Err(Error::Parse(format!(
            "mask `{s}` has length {} but n_qubits is {n}",
            s.len()
        )));
    }
    let mut m: Mask = 0;
    for (p, ch) in s.chars().enumerate() {
        let bit = n - 1 - p;
        match ch {
            '0' => {}
            '1' => m |= 1 << bit,
            _ => return Err(Error::Parse(format!("invalid mask character `{ch}` in `{s}`"))),
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub x_mask: Mask,
    pub z_mask: Mask,
}

impl PauliTerm {
    pub fn new(coeff: Complex64, x_mask: Mask, z_mask: Mask) -> Self {
        Self {
            coeff,
            x_mask,
            z_mask,
        }
    }

    /// Parse an `I|X|Y|Z` label; `Y` contributes a factor `i`.
    pub fn from_label(label: &str, coeff: Complex64) -> Result<Self> {
        let n = label.len();
        if n > MAX_QUBITS {
            return Err(Error::Parse(format!("label longer than {MAX_QUBITS} qubits")));
        }
        let mut t = PauliTerm::new(coeff, 0, 0);
        for (p, ch) in label.chars().enumerate() {
            let b: Mask = 1 << (n - 1 - p);
            match ch {
                'I' => {}
                'X' => t.x_mask |= b,
                'Z' => t.z_mask |= b,
                'Y' => {
                    t.x_mask |= b;
                    t.z_mask |= b;
                    t.coeff *= Complex64::i();
                }
                _ => return Err(Error::Parse(format!("invalid Pauli character `{ch}` in `{label}`"))),
            }
        }
        Ok(t)
    }

    /// Label with the `Y` phase folded back out, returning `(label, coeff)`.
    pub fn to_label(&self, n: usize) -> (String, Complex64) {
        let mut c = self.coeff;
        let label: String = (0..n)
            .rev()
            .map(|j| {
                let x = self.x_mask >> j & 1 == 1;
                let z = self.z_mask >> j & 1 == 1;
                match (x, z) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (false, true) => 'Z',
                    (true, true) => {
                        c *= -Complex64::i();
                        'Y'
                    }
                }
            })
            .collect();
        (label, c)
    }

    /// Coefficient the adjoint of this term carries on the same key.
    pub fn adjoint_coeff(&self) -> Complex64 {
        self.coeff.conj() * sign(self.x_mask & self.z_mask)
    }

    /// Product `self * other`, using `Z^a X^b = (-1)^{|a&b|} X^b Z^a`.
    pub fn mul(&self, other: &PauliTerm) -> PauliTerm {
        let s = sign(self.z_mask & other.x_mask);
        PauliTerm::new(
            self.coeff * other.coeff * s,
            self.x_mask ^ other.x_mask,
            self.z_mask ^ other.z_mask,
        )
    }

    /// `(row, value)` of the column for basis state `b`.
    #[inline]
    pub fn apply_basis(&self, b: Mask) -> (Mask, Complex64) {
        (b ^ self.x_mask, self.coeff * sign(self.z_mask & b))
    }
}

/// A qubit Hamiltonian as a merged, pruned list of Pauli terms in lexicographic key order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    pub n: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    /// Merge duplicate keys and prune negligible coefficients.
    pub fn new(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Contract(format!("n = {n} exceeds {MAX_QUBITS} qubits")));
        }
        let full = full_mask(n);
        let mut acc: BTreeMap<(Mask, Mask), Complex64> = BTreeMap::new();
        for t in terms {
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(Error::Parse("non-finite coefficient".into()));
            }
            if t.x_mask & !full != 0 || t.z_mask & !full != 0 {
                return Err(Error::Contract(format!("term mask exceeds {n} qubits")));
            }
            *acc.entry((t.x_mask, t.z_mask)).or_default() += t.coeff;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= PRUNE_TOL)
            .map(|((x, z), c)| PauliTerm::new(c, x, z))
            .collect();
        Ok(Self { n, terms })
    }

    pub fn from_labels(labels: &[(&str, Complex64)]) -> Result<Self> {
        let n = labels
            .first()
            .map(|(l, _)| l.len())
            .ok_or_else(|| Error::Parse("empty term list".into()))?;
        let mut ts = Vec::with_capacity(labels.len());
        for (l, c) in labels {
            if l.len() != n {
                return Err(Error::Parse(format!("label `{l}` length differs from {n}")));
            }
            ts.push(PauliTerm::from_label(l, *c)?);
        }
        Self::new(n, ts)
    }

    /// Structural Hermiticity check on merged terms.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        for t in &self.terms {
            let want = t.adjoint_coeff();
            if (want - t.coeff).norm() > tol * t.coeff.norm().max(1.0) {
                let (label, c) = t.to_label(self.n);
                let (_, e) = PauliTerm::new(want, t.x_mask, t.z_mask).to_label(self.n);
                return Err(Error::NonHermitian {
                    term: label,
                    coeff: format!("{c}"),
                    expected: format!("{e}"),
                });
            }
        }
        Ok(())
    }

    /// Number of non-identity terms.
    pub fn non_identity_count(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| t.x_mask != 0 || t.z_mask != 0)
            .count()
    }

    pub fn identity_coeff(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.x_mask == 0 && t.z_mask == 0)
            .map(|t| t.coeff)
            .unwrap_or_default()
    }

    pub fn dense(&self, limit: usize) -> Result<DMatrix<Complex64>> {
        if self.n > limit {
            return Err(Error::DenseLimit {
                required: self.n,
                limit,
            });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            for b in 0..dim {
                let (row, v) = t.apply_basis(b as Mask);
                m[(row as usize, b)] += v;
            }
        }
        Ok(m)
    }
}

/// Mutable Pauli polynomial used for operator algebra (e.g. Jordan-Wigner).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PauliSum {
    pub terms: BTreeMap<(Mask, Mask), Complex64>,
}

impl PauliSum {
    pub fn identity(c: Complex64) -> Self {
        let mut s = Self::default();
        s.add_term(PauliTerm::new(c, 0, 0));
        s
    }

    pub fn single(t: PauliTerm) -> Self {
        let mut s = Self::default();
        s.add_term(t);
        s
    }

    pub fn add_term(&mut self, t: PauliTerm) {
        *self.terms.entry((t.x_mask, t.z_mask)).or_default() += t.coeff;
    }

    pub fn add(&mut self, other: &PauliSum) {
        for (&(x, z), &c) in &other.terms {
            self.add_term(PauliTerm::new(c, x, z));
        }
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        PauliSum {
            terms: self.terms.iter().map(|(&k, &v)| (k, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::default();
        for (&(x1, z1), &c1) in &self.terms {
            let a = PauliTerm::new(c1, x1, z1);
            for (&(x2, z2), &c2) in &other.terms {
                out.add_term(a.mul(&PauliTerm::new(c2, x2, z2)));
            }
        }
        out
    }

    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            terms: self
                .terms
                .iter()
                .map(|(&(x, z), &c)| ((x, z), PauliTerm::new(c, x, z).adjoint_coeff()))
                .collect(),
        }
    }

    pub fn into_hamiltonian(self, n: usize) -> Result<PauliHamiltonian> {
        PauliHamiltonian::new(
            n,
            self.terms
                .into_iter()
                .map(|((x, z), c)| PauliTerm::new(c, x, z)),
        )
    }
}

/// On-disk Pauli Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliFile {
    pub n_qubits: usize,
    pub terms: Vec<PauliFileTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliFileTerm {
    pub pauli: String,
    pub coeff: [f64; 2],
}

impl PauliFile {
    pub fn to_hamiltonian(&self) -> Result<PauliHamiltonian> {
        let mut ts = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.pauli.len() != self.n_qubits {
                return Err(Error::Parse(format!(
                    "Pauli string `{}` has length {} but n_qubits is {}",
                    t.pauli,
                    t.pauli.len(),
                    self.n_qubits
                )));
            }
            ts.push(PauliTerm::from_label(
                &t.pauli,
                Complex64::new(t.coeff[0], t.coeff[1]),
            )?);
        }
        PauliHamiltonian::new(self.n_qubits, ts)
    }

    pub fn from_hamiltonian(h: &PauliHamiltonian) -> Self {
        PauliFile {
            n_qubits: h.n,
            terms: h
                .terms
                .iter()
                .map(|t| {
                    let (pauli, c) = t.to_label(h.n);
                    PauliFileTerm {
                        pauli,
                        coeff: [c.re, c.im],
                    }
                })
                .collect(),
        }
    }
}

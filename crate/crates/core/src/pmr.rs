//! Permutation matrix representation `H = D_0 + sum_i D_i P_i`.
//!
//! Each `P_i` is an X-string given by its bitmask and acts as `|z> -> |z ^ x>`.
//! Diagonals are expansions in Z-strings. The diagonal sits to the left of the
//! permutation, so `D_i P_i |z> = d_i(z ^ x_i) |z ^ x_i>`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::linalg::CMat;
use crate::pauli::{mask_from_string, mask_to_string, sign, Mask, PauliHamiltonian, PRUNE_TOL};

/// Exact enumeration is used while the relevant support has at most this many bits.
pub const DEFAULT_ENUM_LIMIT: u32 = 20;

/// Hermiticity is validated entrywise up to this many qubits.
pub const DEFAULT_VALIDATION_LIMIT: usize = 12;

/// Tolerance for imaginary residue in `D_0` and for constant-diagonal detection.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct PmrConfig {
    pub enum_limit: u32,
    pub validation_limit: usize,
}

impl Default for PmrConfig {
    fn default() -> Self {
        Self {
            enum_limit: DEFAULT_ENUM_LIMIT,
            validation_limit: DEFAULT_VALIDATION_LIMIT,
        }
    }
}

/// `sum_k c_k Z^{m_k}` evaluated on basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    pub n: usize,
    pub terms: Vec<(Mask, Complex64)>,
}

impl DiagonalOperator {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: vec![] }
    }

    /// Merge, prune and sort by mask.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Mask, Complex64)>) -> Self {
        let mut acc: BTreeMap<Mask, Complex64> = BTreeMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_default() += c;
        }
        Self {
            n,
            terms: acc.into_iter().filter(|(_, c)| c.norm() >= PRUNE_TOL).collect(),
        }
    }

    #[inline]
    pub fn eval(&self, z: Mask) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |a, &(m, c)| a + c * sign(m & z))
    }

    /// Real part of [`eval`](Self::eval); intended for `D_0`.
    #[inline]
    pub fn eval_real(&self, z: Mask) -> f64 {
        self.terms
            .iter()
            .fold(0.0, |a, &(m, c)| a + c.re * sign(m & z))
    }

    pub fn support(&self) -> Mask {
        self.terms.iter().fold(0, |a, &(m, _)| a | m)
    }

    pub fn sum_abs(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the diagonal deviates from a constant by more than `tol`.
    pub fn is_z_dependent(&self, tol: f64) -> bool {
        self.terms.iter().any(|&(m, c)| m != 0 && c.norm() > tol)
    }

    pub fn constant(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(m, _)| *m == 0)
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }

    /// Max of `|d(z)|`: exact over the support when small, otherwise the coefficient sum.
    pub fn max_abs(&self, enum_limit: u32) -> (f64, bool) {
        let sup = self.support();
        if sup.count_ones() > enum_limit {
            return (self.sum_abs(), false);
        }
        let mut best = 0.0f64;
        for_each_submask(sup, |z| best = best.max(self.eval(z).norm()));
        (best, true)
    }
}

/// Visit every submask of `m`, starting from 0.
pub fn for_each_submask(m: Mask, mut f: impl FnMut(Mask)) {
    let mut sub: Mask = 0;
    loop {
        f(sub);
        sub = sub.wrapping_sub(m) & m;
        if sub == 0 {
            break;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmrTerm {
    pub x_mask: Mask,
    pub diag: DiagonalOperator,
    pub gamma: f64,
    /// Whether `gamma` came from exact enumeration rather than the coefficient bound.
    pub gamma_exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmrHamiltonian {
    pub n: usize,
    pub d0: DiagonalOperator,
    pub terms: Vec<PmrTerm>,
    pub gamma_total: f64,
    pub delta_e: f64,
    pub delta_e_exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaNorms {
    pub gammas: Vec<f64>,
    pub total: f64,
    /// `false` marks an upper bound.
    pub exact: Vec<bool>,
}

impl PmrHamiltonian {
    /// Assemble from parts, validating `D_0` and computing norms.
    pub fn from_parts(
        n: usize,
        d0: DiagonalOperator,
        diags: Vec<(Mask, DiagonalOperator)>,
        cfg: &PmrConfig,
    ) -> Result<Self> {
        for &(m, c) in &d0.terms {
            if c.im.abs() > REAL_TOL {
                return Err(contract(format!(
                    "D_0 must be real: Z-mask {} has imaginary part {:e}",
                    mask_to_string(m, n),
                    c.im
                )));
            }
        }
        let mut seen = HashMap::new();
        let mut terms = Vec::with_capacity(diags.len());
        for (x, d) in diags {
            if x == 0 {
                return Err(contract("PMR term with identity permutation"));
            }
            if seen.insert(x, ()).is_some() {
                return Err(contract(format!("duplicate x_mask {}", mask_to_string(x, n))));
            }
            if d.is_zero() {
                continue;
            }
            let (gamma, gamma_exact) = d.max_abs(cfg.enum_limit);
            if gamma < PRUNE_TOL {
                continue;
            }
            terms.push(PmrTerm {
                x_mask: x,
                diag: d,
                gamma,
                gamma_exact,
            });
        }
        terms.sort_by_key(|t| t.x_mask);
        let gamma_total = terms.iter().map(|t| t.gamma).sum();
        let mut h = PmrHamiltonian {
            n,
            d0,
            terms,
            gamma_total,
            delta_e: 0.0,
            delta_e_exact: true,
        };
        let (de, exact) = compute_delta_e_with(&h, cfg.enum_limit);
        h.delta_e = de;
        h.delta_e_exact = exact;
        Ok(h)
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.gamma).collect()
    }

    pub fn gamma_exact(&self) -> bool {
        self.terms.iter().all(|t| t.gamma_exact)
    }

    /// Any off-diagonal `D_i` that is not a constant.
    pub fn is_z_dependent(&self) -> bool {
        self.terms.iter().any(|t| t.diag.is_z_dependent(REAL_TOL))
    }

    pub fn energy(&self, z: Mask) -> f64 {
        self.d0.eval_real(z)
    }
}

/// Group Pauli terms by X-mask into `D_0 + sum D_i P_i`.
pub fn pmr_decompose(h: &PauliHamiltonian) -> Result<PmrHamiltonian> {
    pmr_decompose_with(h, &PmrConfig::default())
}

pub fn pmr_decompose_with(h: &PauliHamiltonian, cfg: &PmrConfig) -> Result<PmrHamiltonian> {
    h.check_hermitian(REAL_TOL)?;
    if h.n <= cfg.validation_limit {
        validate_hermitian_entrywise(h)?;
    }
    let mut groups: BTreeMap<Mask, Vec<(Mask, Complex64)>> = BTreeMap::new();
    for t in &h.terms {
        // c X^x Z^z = c (-1)^{|x&z|} Z^z X^x
        let c = t.coeff * sign(t.x_mask & t.z_mask);
        groups.entry(t.x_mask).or_default().push((t.z_mask, c));
    }
    let d0 = DiagonalOperator::new(h.n, groups.remove(&0).unwrap_or_default());
    let diags = groups
        .into_iter()
        .map(|(x, ts)| (x, DiagonalOperator::new(h.n, ts)))
        .collect();
    PmrHamiltonian::from_parts(h.n, d0, diags, cfg)
}

fn validate_hermitian_entrywise(h: &PauliHamiltonian) -> Result<()> {
    let dim: Mask = 1 << h.n;
    let mut entries: HashMap<(Mask, Mask), Complex64> = HashMap::new();
    for t in &h.terms {
        for b in 0..dim {
            let (r, v) = t.apply_basis(b);
            *entries.entry((r, b)).or_default() += v;
        }
    }
    for (&(r, c), &v) in &entries {
        let w = entries.get(&(c, r)).copied().unwrap_or_default();
        if (v - w.conj()).norm() > REAL_TOL {
            // The structural check passed, so this is unreachable for merged input;
            // report the entry anyway.
            return Err(Error::NonHermitian {
                term: format!("entry ({r}, {c})"),
                coeff: format!("{v}"),
                expected: format!("{}", w.conj()),
            });
        }
    }
    Ok(())
}

/// Dense `D_0 + sum D_i P_i`.
pub fn pmr_reconstruct(h: &PmrHamiltonian, limit: usize) -> Result<CMat> {
    if h.n > limit {
        return Err(Error::DenseLimit {
            required: h.n,
            limit,
        });
    }
    let dim = 1usize << h.n;
    let mut m = CMat::zeros(dim, dim);
    for z in 0..dim {
        m[(z, z)] += h.d0.eval(z as Mask);
        for t in &h.terms {
            let r = z ^ t.x_mask as usize;
            m[(r, z)] += t.diag.eval(r as Mask);
        }
    }
    Ok(m)
}

pub fn gamma_norms(h: &PmrHamiltonian) -> GammaNorms {
    gamma_norms_with(h, DEFAULT_ENUM_LIMIT)
}

pub fn gamma_norms_with(h: &PmrHamiltonian, enum_limit: u32) -> GammaNorms {
    let (gammas, exact): (Vec<f64>, Vec<bool>) =
        h.terms.iter().map(|t| t.diag.max_abs(enum_limit)).unzip();
    GammaNorms {
        total: gammas.iter().sum(),
        gammas,
        exact,
    }
}

pub fn diag_energy(d0: &DiagonalOperator, z: Mask) -> f64 {
    d0.eval_real(z)
}

/// `max_{z,i} |E(z ^ x_i) - E(z)|` with an exactness flag.
pub fn compute_delta_e(h: &PmrHamiltonian) -> (f64, bool) {
    compute_delta_e_with(h, DEFAULT_ENUM_LIMIT)
}

pub fn compute_delta_e_with(h: &PmrHamiltonian, enum_limit: u32) -> (f64, bool) {
    // E(z^x) - E(z) = sum over terms with odd overlap of -2 J_k (-1)^{|k&z|},
    // so only those terms and their support matter.
    let mut best = 0.0f64;
    let mut exact = true;
    for t in &h.terms {
        let odd: Vec<(Mask, f64)> = h
            .d0
            .terms
            .iter()
            .filter(|(k, _)| (k & t.x_mask).count_ones() & 1 == 1)
            .map(|&(k, c)| (k, c.re))
            .collect();
        let sup = odd.iter().fold(0, |a, &(k, _)| a | k);
        if sup.count_ones() > enum_limit {
            exact = false;
            best = best.max(2.0 * odd.iter().map(|(_, j)| j.abs()).sum::<f64>());
            continue;
        }
        for_each_submask(sup, |z| {
            let d: f64 = odd.iter().map(|&(k, j)| -2.0 * j * sign(k & z)).sum();
            best = best.max(d.abs());
        });
    }
    (best, exact)
}

/// Flag-mode bound: `2 sum |J_k|` over Z-terms overlapping any permutation mask.
pub fn delta_e_bound(h: &PmrHamiltonian) -> f64 {
    let all_x = h.terms.iter().fold(0, |a, t| a | t.x_mask);
    2.0 * h
        .d0
        .terms
        .iter()
        .filter(|(k, _)| k & all_x != 0)
        .map(|(_, c)| c.re.abs())
        .sum::<f64>()
}

/// Angles `(theta, phi)` with `d(z)/gamma = (e^{i(theta+phi)} + e^{i(theta-phi)}) / 2`.
pub fn hop_phases(term: &PmrTerm, z: Mask) -> Result<(f64, f64)> {
    if term.gamma <= 0.0 {
        return Err(contract("hop_phases: gamma must be positive (prune zero terms)"));
    }
    ratio_phases(term.diag.eval(z) / term.gamma)
}

/// Two-phase split of a complex ratio of modulus at most one.
pub fn ratio_phases(ratio: Complex64) -> Result<(f64, f64)> {
    let a = ratio.norm();
    if a > 1.0 + 1e-12 {
        return Err(contract(format!("hop ratio modulus {a} exceeds 1")));
    }
    let theta = if a == 0.0 { 0.0 } else { ratio.arg() };
    Ok((theta, a.min(1.0).acos()))
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagTermFile {
    pub z_mask: String,
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmrTermFile {
    pub x_mask: String,
    pub diagonal: Vec<DiagTermFile>,
    pub gamma: f64,
    pub gamma_exact: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmrFile {
    pub n_qubits: usize,
    pub d0: Vec<DiagTermFile>,
    pub terms: Vec<PmrTermFile>,
    pub m: usize,
    pub gamma_total: f64,
    pub delta_e: f64,
    pub delta_e_exact: bool,
}

fn diag_to_file(d: &DiagonalOperator) -> Vec<DiagTermFile> {
    d.terms
        .iter()
        .map(|&(m, c)| DiagTermFile {
            z_mask: mask_to_string(m, d.n),
            coeff: [c.re, c.im],
        })
        .collect()
}

fn diag_from_file(n: usize, ts: &[DiagTermFile]) -> Result<DiagonalOperator> {
    let mut v = Vec::with_capacity(ts.len());
    for t in ts {
        v.push((mask_from_string(&t.z_mask, n)?, Complex64::new(t.coeff[0], t.coeff[1])));
    }
    Ok(DiagonalOperator::new(n, v))
}

impl PmrFile {
    pub fn from_hamiltonian(h: &PmrHamiltonian) -> Self {
        PmrFile {
            n_qubits: h.n,
            d0: diag_to_file(&h.d0),
            terms: h
                .terms
                .iter()
                .map(|t| PmrTermFile {
                    x_mask: mask_to_string(t.x_mask, h.n),
                    diagonal: diag_to_file(&t.diag),
                    gamma: t.gamma,
                    gamma_exact: t.gamma_exact,
                })
                .collect(),
            m: h.m(),
            gamma_total: h.gamma_total,
            delta_e: h.delta_e,
            delta_e_exact: h.delta_e_exact,
        }
    }

    /// Rebuild; norms are recomputed from the diagonals.
    pub fn to_hamiltonian(&self) -> Result<PmrHamiltonian> {
        let n = self.n_qubits;
        let d0 = diag_from_file(n, &self.d0)?;
        let mut diags = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            diags.push((mask_from_string(&t.x_mask, n)?, diag_from_file(n, &t.diagonal)?));
        }
        PmrHamiltonian::from_parts(n, d0, diags, &PmrConfig::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliHamiltonian;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_x_string() {
        let h = PauliHamiltonian::from_labels(&[("XI", c(1.0))]).unwrap();
        let p = pmr_decompose(&h).unwrap();
        assert!(p.d0.is_zero());
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].x_mask, 0b10);
        assert_eq!(p.terms[0].gamma, 1.0);
    }

    #[test]
    fn z_plus_x() {
        let h = PauliHamiltonian::from_labels(&[("Z", c(0.5)), ("X", c(0.3))]).unwrap();
        let p = pmr_decompose(&h).unwrap();
        assert_eq!(p.d0.terms, vec![(1, c(0.5))]);
        assert_eq!(p.terms[0].diag.terms, vec![(0, c(0.3))]);
        assert!((p.terms[0].gamma - 0.3).abs() < 1e-15);
        assert_eq!(p.delta_e, 1.0);
    }

    #[test]
    fn pauli_y_diagonal() {
        let h = PauliHamiltonian::from_labels(&[("Y", c(1.0))]).unwrap();
        let p = pmr_decompose(&h).unwrap();
        let t = &p.terms[0];
        assert!((t.diag.eval(0) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((t.diag.eval(1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(t.gamma, 1.0);
        let m = pmr_reconstruct(&p, 12).unwrap();
        let y = h.dense(12).unwrap();
        assert!(crate::linalg::max_abs(&(m - y)) < 1e-15);
    }

    #[test]
    fn gamma_of_projector_diagonal() {
        let d = DiagonalOperator::new(1, vec![(0, c(0.5)), (1, c(0.5))]);
        assert_eq!(d.max_abs(20), (1.0, true));
    }

    #[test]
    fn energies() {
        let d0 = DiagonalOperator::new(2, vec![(0b11, c(1.0))]);
        assert_eq!(diag_energy(&d0, 0b01), -1.0);
        let h = PmrHamiltonian::from_parts(
            2,
            d0,
            vec![(0b01, DiagonalOperator::new(2, vec![(0, c(1.0))]))],
            &PmrConfig::default(),
        )
        .unwrap();
        assert_eq!(h.delta_e, 2.0);
    }

    #[test]
    fn hop_phase_examples() {
        let (t, p) = ratio_phases(c(1.0)).unwrap();
        assert_eq!((t, p), (0.0, 0.0));
        let (t, p) = ratio_phases(Complex64::new(0.0, -1.0)).unwrap();
        assert!((t + std::f64::consts::FRAC_PI_2).abs() < 1e-15 && p.abs() < 1e-15);
        let (t, p) = ratio_phases(c(0.5)).unwrap();
        assert!(t.abs() < 1e-15 && (p - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
    }

    #[test]
    fn complex_d0_rejected() {
        let d0 = DiagonalOperator::new(1, vec![(1, Complex64::new(0.0, 1.0))]);
        assert!(PmrHamiltonian::from_parts(1, d0, vec![], &PmrConfig::default()).is_err());
    }

    #[test]
    fn bound_mode_flags() {
        let d = DiagonalOperator::new(3, vec![(0b111, c(0.5)), (0, c(0.25))]);
        let (g, exact) = d.max_abs(2);
        assert!(!exact);
        assert_eq!(g, 0.75);
    }

    #[test]
    fn file_round_trip() {
        let h = PauliHamiltonian::from_labels(&[("ZZ", c(0.5)), ("XY", c(0.3)), ("YX", c(0.2))])
            .unwrap();
        let p = pmr_decompose(&h).unwrap();
        let f = PmrFile::from_hamiltonian(&p);
        let s = serde_json::to_string(&f).unwrap();
        let q: PmrFile = serde_json::from_str(&s).unwrap();
        assert_eq!(q.to_hamiltonian().unwrap(), p);
    }
}

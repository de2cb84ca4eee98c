use serde::{Deserialize, Serialize};

use super::params::{partial_exp, SimParams};
use crate::divdiff::factorial;
use crate::error::{Error, Result};
use crate::pauli::Mask;
use crate::pmr::PmrHamiltonian;

/// Qubit layout of the LCU ancilla registers; system qubits occupy `0..n_sys`.
///
/// Per order slot `m = 0..Q` there is one unary bit `q_m = [q > m]`, a one-hot
/// register of `M` bits for `i_{m+1}`, a binary register of `kappa` bits storing
/// `k_{m+1} - 1`, and in z-dependent mode one branch-sign bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaLayout {
    pub n_sys: usize,
    pub q_max: usize,
    pub m: usize,
    pub kappa: u32,
    pub z_dependent: bool,
}

impl AncillaLayout {
    pub fn new(n_sys: usize, q_max: usize, m: usize, kappa: u32, z_dependent: bool) -> Self {
        Self {
            n_sys,
            q_max,
            m,
            kappa,
            z_dependent,
        }
    }

    fn slot_width(&self) -> usize {
        self.m + self.kappa as usize + usize::from(self.z_dependent)
    }

    pub fn n_ancilla(&self) -> usize {
        self.q_max * (1 + self.slot_width())
    }

    pub fn n_total(&self) -> usize {
        self.n_sys + self.n_ancilla()
    }

    /// Absolute qubit of unary bit `q_m`.
    pub fn q_bit(&self, m: usize) -> usize {
        self.n_sys + m
    }

    fn slot_base(&self, m: usize) -> usize {
        self.n_sys + self.q_max + m * self.slot_width()
    }

    pub fn i_bit(&self, m: usize, i: usize) -> usize {
        self.slot_base(m) + i
    }

    pub fn k_bit(&self, m: usize, b: usize) -> usize {
        self.slot_base(m) + self.m + b
    }

    pub fn pm_bit(&self, m: usize) -> usize {
        debug_assert!(self.z_dependent);
        self.slot_base(m) + self.m + self.kappa as usize
    }

    /// Ancilla bit pattern (relative to the first ancilla qubit) of a branch.
    /// `k` holds 1-based labels; `pm` holds branch signs for the active slots.
    pub fn codeword(&self, iq: &[usize], k: &[u32], pm: &[bool]) -> Mask {
        let off = self.n_sys;
        let mut a: Mask = 0;
        for m in 0..iq.len() {
            a |= 1 << (self.q_bit(m) - off);
            a |= 1 << (self.i_bit(m, iq[m]) - off);
            let kv = k.get(m).map(|v| v - 1).unwrap_or(0);
            for b in 0..self.kappa as usize {
                if kv >> b & 1 == 1 {
                    a |= 1 << (self.k_bit(m, b) - off);
                }
            }
            if self.z_dependent && pm.get(m).copied().unwrap_or(false) {
                a |= 1 << (self.pm_bit(m) - off);
            }
        }
        a
    }

    /// Inverse of [`codeword`](Self::codeword); `None` for non-codewords.
    pub fn decode(&self, a: Mask) -> Option<Branch> {
        let off = self.n_sys;
        let bit = |j: usize| a >> (j - off) & 1 == 1;
        let q = (0..self.q_max).take_while(|&m| bit(self.q_bit(m))).count();
        if (q..self.q_max).any(|m| bit(self.q_bit(m))) {
            return None;
        }
        let mut iq = Vec::with_capacity(q);
        let mut k = Vec::with_capacity(q);
        let mut pm = Vec::with_capacity(q);
        for m in 0..self.q_max {
            let ones: Vec<usize> = (0..self.m).filter(|&i| bit(self.i_bit(m, i))).collect();
            let kv: u32 = (0..self.kappa as usize)
                .map(|b| (bit(self.k_bit(m, b)) as u32) << b)
                .sum();
            let s = self.z_dependent && bit(self.pm_bit(m));
            if m < q {
                if ones.len() != 1 {
                    return None;
                }
                iq.push(ones[0]);
                k.push(kv + 1);
                pm.push(s);
            } else if !ones.is_empty() || kv != 0 || s {
                return None;
            }
        }
        Some(Branch { iq, k, pm })
    }
}

/// One LCU branch: hop indices, 1-based block labels and branch signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub iq: Vec<usize>,
    pub k: Vec<u32>,
    pub pm: Vec<bool>,
}

/// Amplitudes of the LCU ancilla state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcuWeights {
    /// `sum_{q <= Q} (gamma dt)^q / q!`.
    pub s: f64,
    pub gamma_dt: f64,
    /// `sqrt((gamma dt)^q / (q! s))` for `q = 0..=Q`.
    pub q_amps: Vec<f64>,
    /// `sqrt(gamma_i / gamma)`.
    pub i_amps: Vec<f64>,
    pub big_k: u32,
    pub z_dependent: bool,
}

impl LcuWeights {
    pub fn q_max(&self) -> usize {
        self.q_amps.len() - 1
    }

    /// Amplitude of branch `(q, i_q, k_q[, pm])`.
    pub fn amplitude(&self, iq: &[usize]) -> f64 {
        let q = iq.len();
        let mut a = self.q_amps[q] / (self.big_k as f64).powf(q as f64 / 2.0);
        for &i in iq {
            a *= self.i_amps[i];
        }
        if self.z_dependent {
            a /= 2f64.powf(q as f64 / 2.0);
        }
        a
    }

    /// Unary ladder angles: `RY(theta_m)` on `q_m` (controlled on `q_{m-1}` for `m > 0`),
    /// with `cos^2(theta_m / 2) = w_m / sum_{q >= m} w_q`.
    pub fn unary_angles(&self) -> Vec<f64> {
        let w: Vec<f64> = self.q_amps.iter().map(|a| a * a).collect();
        (0..self.q_max())
            .map(|m| {
                let rest: f64 = w[m..].iter().sum();
                if rest <= 0.0 {
                    0.0
                } else {
                    2.0 * (w[m] / rest).min(1.0).sqrt().acos()
                }
            })
            .collect()
    }

    /// Thermometer angles for the one-hot register: `CRY(theta_j)` on bit `j`
    /// controlled on bit `j - 1`, with `sin^2(theta_j / 2) = T_j / T_{j-1}` and
    /// `T_j = sum_{i >= j} gamma_i / gamma`. Index 0 is unused (bit 0 is a copy).
    pub fn onehot_angles(&self) -> Vec<f64> {
        let c: Vec<f64> = self.i_amps.iter().map(|a| a * a).collect();
        let tail = |j: usize| c[j..].iter().sum::<f64>();
        (0..c.len())
            .map(|j| {
                if j == 0 {
                    return 0.0;
                }
                let prev = tail(j - 1);
                if prev <= 0.0 {
                    0.0
                } else {
                    2.0 * (tail(j) / prev).clamp(0.0, 1.0).sqrt().asin()
                }
            })
            .collect()
    }

    /// Number of branches.
    pub fn count(&self) -> f64 {
        let per = self.i_amps.len() as f64
            * self.big_k as f64
            * if self.z_dependent { 2.0 } else { 1.0 };
        (0..=self.q_max()).map(|q| per.powi(q as i32)).sum()
    }

    /// All branches with their amplitudes, in lexicographic order.
    pub fn entries(&self, budget: f64) -> Result<Vec<(Branch, f64)>> {
        let count = self.count();
        if count > budget {
            return Err(Error::Budget {
                what: "LCU branches".into(),
                count,
                budget,
            });
        }
        let m = self.i_amps.len();
        let mut out = Vec::new();
        for q in 0..=self.q_max() {
            let mut iq = vec![0usize; q];
            loop {
                let amp = self.amplitude(&iq);
                crate::divdiff::for_each_ktuple(q, self.big_k, |k| {
                    let npm = if self.z_dependent { 1usize << q } else { 1 };
                    for pmbits in 0..npm {
                        let pm = (0..if self.z_dependent { q } else { 0 })
                            .map(|j| pmbits >> j & 1 == 1)
                            .collect();
                        out.push((
                            Branch {
                                iq: iq.clone(),
                                k: k.to_vec(),
                                pm,
                            },
                            amp,
                        ));
                    }
                });
                if !next_index(&mut iq, m) {
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// Lexicographic increment of a multi-index over `0..m`; false on wrap-around.
pub(crate) fn next_index(iq: &mut [usize], m: usize) -> bool {
    let mut pos = iq.len();
    while pos > 0 {
        pos -= 1;
        if iq[pos] + 1 < m {
            iq[pos] += 1;
            return true;
        }
        iq[pos] = 0;
    }
    false
}

/// Ancilla-state amplitudes for the given parameters.
///
/// In z-dependent mode each active slot carries an extra uniform sign bit; the
/// ratio `d/gamma` is the average of the two branch phases, so the order
/// amplitudes keep `gamma dt` unchanged.
pub fn lcu_weights(h: &PmrHamiltonian, p: &SimParams) -> LcuWeights {
    weights_from(&h.gammas(), p.dt, p.q_max, p.big_k, h.is_z_dependent())
}

pub fn weights_from(gammas: &[f64], dt: f64, q_max: usize, big_k: u32, z_dependent: bool) -> LcuWeights {
    let gamma: f64 = gammas.iter().sum();
    let x = gamma * dt;
    let s = partial_exp(q_max, x);
    LcuWeights {
        s,
        gamma_dt: x,
        q_amps: (0..=q_max)
            .map(|q| (x.powi(q as i32) / factorial(q) / s).sqrt())
            .collect(),
        i_amps: gammas
            .iter()
            .map(|g| if gamma > 0.0 { (g / gamma).sqrt() } else { 0.0 })
            .collect(),
        big_k,
        z_dependent,
    }
}

use num_complex::Complex64;

use super::params::SimParams;
use super::weights::{lcu_weights, AncillaLayout, Branch, LcuWeights};
use crate::divdiff::{alpha_coeffs, neg_i_pow, KTuple};
use crate::error::{Error, Result};
use crate::linalg::{kron, CMat};
use crate::pauli::Mask;
use crate::pmr::{ratio_phases, PmrHamiltonian};

/// Joint ancilla-plus-system qubit ceiling for the dense amplitude-amplification path.
pub const DEFAULT_OAA_LIMIT: usize = 10;

/// Hop factor for one branch sign: `e^{i(theta + phi)}` or `e^{i(theta - phi)}`.
pub fn hop_factor(ratio: Complex64, minus: bool) -> Result<Complex64> {
    let (theta, phi) = ratio_phases(ratio)?;
    Ok(Complex64::from_polar(1.0, theta + if minus { -phi } else { phi }))
}

/// Unitary applied for one ancilla branch: phases `alpha_s E_{z_s}` interleaved with
/// hops, each hop carrying its two-phase factor evaluated after the hop.
pub fn branch_unitary(h: &PmrHamiltonian, br: &Branch, big_k: u32, dt: f64) -> Result<CMat> {
    let dim = 1usize << h.n;
    let alpha = alpha_coeffs(&KTuple::new(br.k.clone(), big_k)?).alpha_f64();
    let delta = dt / big_k as f64;
    let ph = neg_i_pow(br.iq.len());
    let mut u = CMat::zeros(dim, dim);
    for z in 0..dim {
        let mut cur = z as Mask;
        let mut theta = alpha[0] * h.energy(cur);
        let mut amp = ph;
        for (j, &i) in br.iq.iter().enumerate() {
            let t = &h.terms[i];
            cur ^= t.x_mask;
            let minus = br.pm.get(j).copied().unwrap_or(false);
            amp *= hop_factor(t.diag.eval(cur) / t.gamma, minus)?;
            theta += alpha[j + 1] * h.energy(cur);
        }
        u[(cur as usize, z)] = amp * Complex64::from_polar(1.0, -delta * theta);
    }
    Ok(u)
}

/// Apply a controlled single-qubit gate `g` to the rows of `m`.
pub(crate) fn apply_controlled(m: &mut CMat, target: usize, controls: &[usize], g: [[Complex64; 2]; 2]) {
    let dim = m.nrows();
    let cmask: usize = controls.iter().map(|c| 1usize << c).sum();
    let tb = 1usize << target;
    for i in 0..dim {
        if i & tb != 0 || i & cmask != cmask {
            continue;
        }
        let j = i | tb;
        for col in 0..m.ncols() {
            let a = m[(i, col)];
            let b = m[(j, col)];
            m[(i, col)] = g[0][0] * a + g[0][1] * b;
            m[(j, col)] = g[1][0] * a + g[1][1] * b;
        }
    }
}

pub(crate) fn ry(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let r = |v: f64| Complex64::new(v, 0.0);
    [[r(c), r(-s)], [r(s), r(c)]]
}

pub(crate) fn hadamard() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub(crate) fn pauli_x() -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    [[o, l], [l, o]]
}

/// Dense prepare unitary on the ancilla qubits only (ancilla index 0 is the
/// first ancilla qubit): unary ladder, one-hot registers, then uniform k and sign bits.
pub fn prep_unitary(layout: &AncillaLayout, w: &LcuWeights) -> CMat {
    let na = layout.n_ancilla();
    let off = layout.n_sys;
    let mut b = CMat::identity(1 << na, 1 << na);
    let th = w.unary_angles();
    for m in 0..layout.q_max {
        let ctl: Vec<usize> = if m == 0 { vec![] } else { vec![layout.q_bit(m - 1) - off] };
        apply_controlled(&mut b, layout.q_bit(m) - off, &ctl, ry(th[m]));
    }
    let oh = w.onehot_angles();
    for m in 0..layout.q_max {
        let q = layout.q_bit(m) - off;
        let bit = |i: usize| layout.i_bit(m, i) - off;
        apply_controlled(&mut b, bit(0), &[q], pauli_x());
        for j in 1..layout.m {
            apply_controlled(&mut b, bit(j), &[bit(j - 1)], ry(oh[j]));
        }
        for j in 0..layout.m.saturating_sub(1) {
            apply_controlled(&mut b, bit(j), &[bit(j + 1)], pauli_x());
        }
    }
    for m in 0..layout.q_max {
        let q = layout.q_bit(m) - off;
        for kb in 0..layout.kappa as usize {
            apply_controlled(&mut b, layout.k_bit(m, kb) - off, &[q], hadamard());
        }
        if layout.z_dependent {
            apply_controlled(&mut b, layout.pm_bit(m) - off, &[q], hadamard());
        }
    }
    b
}

/// Ancilla-controlled branch unitaries on the joint space; identity on non-codewords.
pub fn select_operator(h: &PmrHamiltonian, p: &SimParams, layout: &AncillaLayout) -> Result<CMat> {
    let ds = 1usize << h.n;
    let na = layout.n_ancilla();
    let dim = ds << na;
    let mut u = CMat::zeros(dim, dim);
    for a in 0..(1usize << na) {
        let blk = match layout.decode(a as Mask) {
            Some(br) => branch_unitary(h, &br, p.big_k, p.dt)?,
            None => CMat::identity(ds, ds),
        };
        u.view_mut((a * ds, a * ds), (ds, ds)).copy_from(&blk);
    }
    Ok(u)
}

/// `R = 1 - 2 |0><0|` on the ancillas.
pub fn reflection(layout: &AncillaLayout) -> CMat {
    let ds = 1usize << layout.n_sys;
    let dim = ds << layout.n_ancilla();
    let mut r = CMat::identity(dim, dim);
    for i in 0..ds {
        r[(i, i)] = Complex64::new(-1.0, 0.0);
    }
    r
}

#[derive(Debug, Clone)]
pub struct OaaOperators {
    pub layout: AncillaLayout,
    pub weights: LcuWeights,
    /// Prepare unitary on the ancilla space.
    pub b: CMat,
    pub select: CMat,
    pub w: CMat,
    pub a: CMat,
}

impl OaaOperators {
    /// `(<0| (x) 1) M (|0> (x) 1)`.
    pub fn zero_block(&self, m: &CMat) -> CMat {
        let ds = 1usize << self.layout.n_sys;
        m.view((0, 0), (ds, ds)).into_owned()
    }
}

/// Dense `W = B^dagger U_C B` and `A = -W R W^dagger R W`.
pub fn build_oaa_operator(h: &PmrHamiltonian, p: &SimParams, limit: usize) -> Result<OaaOperators> {
    let layout = AncillaLayout::new(h.n, p.q_max, h.m(), p.kappa, h.is_z_dependent());
    if layout.n_total() > limit {
        return Err(Error::DenseLimit {
            required: layout.n_total(),
            limit,
        });
    }
    let weights = lcu_weights(h, p);
    let b = prep_unitary(&layout, &weights);
    let ds = 1usize << h.n;
    let bj = kron(&b, &CMat::identity(ds, ds));
    let select = select_operator(h, p, &layout)?;
    let w = bj.adjoint() * &select * &bj;
    let r = reflection(&layout);
    let a = -(&w * &r * w.adjoint() * &r * &w);
    Ok(OaaOperators {
        layout,
        weights,
        b,
        select,
        w,
        a,
    })
}

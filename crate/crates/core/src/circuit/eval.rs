use num_complex::Complex64;

use super::ir::{Circuit, Gate, Register};
use crate::error::{contract, Error, Result};
use crate::linalg::{CMat, CVec};
use crate::pauli::{parity, Mask, MAX_QUBITS};

/// Default qubit ceiling for dense circuit evaluation.
pub const DEFAULT_CIRCUIT_DENSE_LIMIT: usize = 14;

fn all_set(b: Mask, qs: &[usize]) -> bool {
    qs.iter().all(|&q| b >> q & 1 == 1)
}

fn low_mask(w: usize) -> Mask {
    if w >= 128 {
        Mask::MAX
    } else {
        (1 << w) - 1
    }
}

fn reg_value(b: Mask, r: &Register) -> u128 {
    if r.width == 0 {
        return 0;
    }
    (b >> r.offset) & low_mask(r.width)
}

fn rotate(b: Mask, r: &Register, left: bool) -> Mask {
    let w = r.width;
    if w <= 1 {
        return b;
    }
    let v = reg_value(b, r);
    let m = low_mask(w);
    let nv = if left {
        ((v << 1) | (v >> (w - 1))) & m
    } else {
        (v >> 1) | ((v & 1) << (w - 1))
    };
    (b & !(m << r.offset)) | (nv << r.offset)
}

/// Apply one basis-preserving gate to basis state `b`, accumulating its phase.
fn step(g: &Gate, b: &mut Mask, phase: &mut Complex64) -> Result<()> {
    match g {
        Gate::X(t) => *b ^= 1 << t,
        Gate::Cnot { c, t } => {
            if *b >> c & 1 == 1 {
                *b ^= 1 << t;
            }
        }
        Gate::Mcx { controls, t } => {
            if all_set(*b, controls) {
                *b ^= 1 << t;
            }
        }
        Gate::Phase {
            angle,
            parity: ps,
            controls,
        } => {
            let pm: Mask = ps.iter().fold(0, |a, &q| a | 1 << q);
            if all_set(*b, controls) && (ps.is_empty() || parity(*b & pm)) {
                *phase *= Complex64::from_polar(1.0, -angle);
            }
        }
        Gate::ShiftL(r) => *b = rotate(*b, r, true),
        Gate::ShiftR(r) => *b = rotate(*b, r, false),
        Gate::Cmp { a, b: rb, out } => {
            if reg_value(*b, a) <= reg_value(*b, rb) {
                *b ^= 1 << out;
            }
        }
        Gate::Macro { body, .. } => {
            for g in body {
                step(g, b, phase)?;
            }
        }
        other => {
            return Err(Error::NotBasisPreserving {
                gate: other.kind().to_string(),
            })
        }
    }
    Ok(())
}

/// Classical simulation on a basis state; returns the output bitstring and phase.
pub fn run_reversible(c: &Circuit, basis: Mask) -> Result<(Mask, Complex64)> {
    if c.n_qubits > MAX_QUBITS {
        return Err(contract(format!("{} qubits exceed the {MAX_QUBITS}-bit state", c.n_qubits)));
    }
    let mut b = basis;
    let mut ph = Complex64::new(1.0, 0.0);
    for g in &c.gates {
        step(g, &mut b, &mut ph)?;
    }
    Ok((b, ph))
}

fn apply_1q(psi: &mut [Complex64], t: usize, controls: &[usize], m: [[Complex64; 2]; 2]) {
    let tb = 1usize << t;
    let cm: usize = controls.iter().map(|c| 1usize << c).sum();
    for i in 0..psi.len() {
        if i & tb != 0 || i & cm != cm {
            continue;
        }
        let j = i | tb;
        let (a, b) = (psi[i], psi[j]);
        psi[i] = m[0][0] * a + m[0][1] * b;
        psi[j] = m[1][0] * a + m[1][1] * b;
    }
}

fn ry(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let r = |v| Complex64::new(v, 0.0);
    [[r(c), r(-s)], [r(s), r(c)]]
}

fn had() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// Apply a gate to a dense state vector over `log2(psi.len())` qubits.
pub fn apply_gate(psi: &mut [Complex64], g: &Gate, scratch: &mut Vec<Complex64>) -> Result<()> {
    match g {
        Gate::H(t) => apply_1q(psi, *t, &[], had()),
        Gate::Ch { c, t } => apply_1q(psi, *t, &[*c], had()),
        Gate::Ry { angle, t } => apply_1q(psi, *t, &[], ry(*angle)),
        Gate::Cry { angle, controls, t } => apply_1q(psi, *t, controls, ry(*angle)),
        Gate::Macro { body, .. } => {
            for g in body {
                apply_gate(psi, g, scratch)?;
            }
        }
        g => {
            scratch.clear();
            scratch.resize(psi.len(), Complex64::new(0.0, 0.0));
            for (i, &a) in psi.iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut b = i as Mask;
                let mut ph = Complex64::new(1.0, 0.0);
                step(g, &mut b, &mut ph)?;
                scratch[b as usize] += ph * a;
            }
            psi.copy_from_slice(scratch);
        }
    }
    Ok(())
}

fn check_limit(c: &Circuit, limit: usize) -> Result<usize> {
    if c.n_qubits > limit {
        return Err(Error::DenseLimit {
            required: c.n_qubits,
            limit,
        });
    }
    Ok(1usize << c.n_qubits)
}

/// Apply the circuit to a state vector.
pub fn run_state(c: &Circuit, psi: &CVec, limit: usize) -> Result<CVec> {
    let dim = check_limit(c, limit)?;
    if psi.len() != dim {
        return Err(contract(format!("state length {} but circuit needs {dim}", psi.len())));
    }
    let mut v: Vec<Complex64> = psi.iter().copied().collect();
    let mut scratch = Vec::new();
    for g in &c.gates {
        apply_gate(&mut v, g, &mut scratch)?;
    }
    Ok(CVec::from_vec(v))
}

/// Full unitary of the circuit.
pub fn run_dense(c: &Circuit, limit: usize) -> Result<CMat> {
    let dim = check_limit(c, limit)?;
    let mut u = CMat::identity(dim, dim);
    let mut scratch = Vec::new();
    for col in u.as_mut_slice().chunks_mut(dim) {
        for g in &c.gates {
            apply_gate(col, g, &mut scratch)?;
        }
    }
    Ok(u)
}

/// Matrix of a basis-preserving circuit restricted to inputs supported on the
/// low `n_low` qubits, built from one reversible run per basis state. Fails if
/// any run leaves a qubit at or above `n_low` set.
pub fn restricted_matrix(c: &Circuit, n_low: usize, limit: usize) -> Result<CMat> {
    if n_low > limit {
        return Err(Error::DenseLimit {
            required: n_low,
            limit,
        });
    }
    let dim = 1usize << n_low;
    let mut u = CMat::zeros(dim, dim);
    for b in 0..dim {
        let (out, ph) = run_reversible(c, b as Mask)?;
        if out >> n_low != 0 {
            return Err(contract(format!(
                "input {b:#b}: scratch qubits not restored (output {out:#b})"
            )));
        }
        u[(out as usize, b)] = ph;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, unitarity_error};

    fn reg(name: &str, offset: usize, width: usize) -> Register {
        Register {
            name: name.into(),
            offset,
            width,
        }
    }

    #[test]
    fn reversible_examples() {
        let mut c = Circuit::new(2);
        c.gates.push(Gate::Cnot { c: 1, t: 0 });
        // |10> in label order is qubit 1 set.
        assert_eq!(run_reversible(&c, 0b10).unwrap(), (0b11, Complex64::new(1.0, 0.0)));

        let mut c = Circuit::new(4);
        c.gates.push(Gate::ShiftL(reg("u", 0, 4)));
        assert_eq!(run_reversible(&c, 0b0001).unwrap().0, 0b0010);
        assert_eq!(run_reversible(&c, 0b1000).unwrap().0, 0b0001);
        c.gates.push(Gate::ShiftR(reg("u", 0, 4)));
        assert_eq!(run_reversible(&c, 0b0100).unwrap().0, 0b0100);

        let mut c = Circuit::new(1);
        c.gates.push(Gate::Phase {
            angle: 0.7,
            parity: vec![0],
            controls: vec![],
        });
        let (_, ph) = run_reversible(&c, 1).unwrap();
        assert!((ph - Complex64::from_polar(1.0, -0.7)).norm() < 1e-15);
        assert_eq!(run_reversible(&c, 0).unwrap().1, Complex64::new(1.0, 0.0));

        let mut c = Circuit::new(1);
        c.gates.push(Gate::H(0));
        assert!(matches!(run_reversible(&c, 0), Err(Error::NotBasisPreserving { .. })));
    }

    #[test]
    fn comparator_truth_table() {
        let a = reg("a", 0, 3);
        let b = reg("b", 3, 3);
        let mut c = Circuit::new(7);
        c.gates.push(Gate::Cmp { a, b, out: 6 });
        for x in 0..8u128 {
            for y in 0..8u128 {
                let (o, _) = run_reversible(&c, x | y << 3).unwrap();
                assert_eq!(o >> 6 & 1 == 1, x <= y);
            }
        }
        // k = 3, l = 5 gives 1.
        assert_eq!(run_reversible(&c, 3 | 5 << 3).unwrap().0 >> 6, 1);
        let mut z = Circuit::new(1);
        z.gates.push(Gate::Cmp {
            a: reg("e", 0, 0),
            b: reg("f", 0, 0),
            out: 0,
        });
        assert_eq!(run_reversible(&z, 0).unwrap().0, 1);
    }

    #[test]
    fn dense_examples() {
        let c = Circuit::new(2);
        assert!(max_abs(&(run_dense(&c, 14).unwrap() - CMat::identity(4, 4))) == 0.0);
        let mut c = Circuit::new(1);
        c.gates.push(Gate::H(0));
        let u = run_dense(&c, 14).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[(1, 1)].re + h).abs() < 1e-15 && (u[(0, 1)].re - h).abs() < 1e-15);
        assert!(matches!(run_dense(&Circuit::new(15), 14), Err(Error::DenseLimit { .. })));
    }

    #[test]
    fn dense_matches_reversible_on_permutations() {
        let r = reg("r", 0, 3);
        let mut c = Circuit::new(4);
        c.gates.extend([
            Gate::ShiftL(r.clone()),
            Gate::Mcx { controls: vec![0, 1], t: 3 },
            Gate::Phase {
                angle: 0.3,
                parity: vec![1, 3],
                controls: vec![2],
            },
            Gate::Cmp {
                a: reg("lo", 0, 2),
                b: reg("hi", 2, 1),
                out: 3,
            },
        ]);
        let u = run_dense(&c, 14).unwrap();
        assert!(unitarity_error(&u) < 1e-12);
        for b in 0..16 {
            let (o, ph) = run_reversible(&c, b as Mask).unwrap();
            assert!((u[(o as usize, b)] - ph).norm() < 1e-15);
        }
        let inv = run_dense(&c.inverse(), 14).unwrap();
        assert!(max_abs(&(inv * u - CMat::identity(16, 16))) < 1e-14);
    }
}

//! OpenQASM 2 export with macros expanded.
//!
//! Ancilla pattern: a separate register `anc` is shared by all expansions and
//! returned to zero after each gate.
//! * `MCX` with `k >= 3` controls uses a Toffoli V-chain over `k - 2` ancillas.
//! * Multi-controlled `CRY` and controlled `ZPHASE` first AND their controls into
//!   one ancilla.
//! * `ZPHASE` folds its parity set onto the last parity qubit with CNOTs, then
//!   applies `u1` or `cu1`. An uncontrolled phase with an empty parity set is a
//!   global phase and is emitted as a comment.
//! * `CMP` computes the borrow chain of `b - a` (one ancilla per bit, each a
//!   three-Toffoli majority) and flips `out` when the final borrow is clear.
//! * `SHIFTL`/`SHIFTR` are adjacent-swap rotations.

use std::fmt::Write as _;

use super::ir::{Circuit, Gate, Register};

#[derive(Clone, Copy)]
enum Wire {
    Q(usize),
    A(usize),
}

impl Wire {
    fn s(self) -> String {
        match self {
            Wire::Q(q) => format!("q[{q}]"),
            Wire::A(a) => format!("anc[{a}]"),
        }
    }
}

struct Emitter {
    out: String,
    anc_used: usize,
}

#[derive(Clone, Copy)]
enum Lit {
    Zero,
    One,
    W(Wire),
}

impl Emitter {
    fn line(&mut self, s: String) {
        self.out.push_str(&s);
        self.out.push('\n');
    }

    fn touch(&mut self, a: usize) -> Wire {
        self.anc_used = self.anc_used.max(a + 1);
        Wire::A(a)
    }

    /// Toffoli-only lines for `t ^= AND(controls)`, using ancillas from `base`.
    fn and_lines(&mut self, controls: &[Wire], t: Wire, base: usize) -> Vec<String> {
        match controls {
            [] => vec![format!("x {};", t.s())],
            [c] => vec![format!("cx {},{};", c.s(), t.s())],
            [a, b] => vec![format!("ccx {},{},{};", a.s(), b.s(), t.s())],
            _ => {
                let k = controls.len();
                let chain: Vec<Wire> = (0..k - 2).map(|j| self.touch(base + j)).collect();
                let mut up = vec![format!("ccx {},{},{};", controls[0].s(), controls[1].s(), chain[0].s())];
                for j in 1..k - 2 {
                    up.push(format!("ccx {},{},{};", controls[j + 1].s(), chain[j - 1].s(), chain[j].s()));
                }
                let mut v = up.clone();
                v.push(format!("ccx {},{},{};", controls[k - 1].s(), chain[k - 3].s(), t.s()));
                v.extend(up.into_iter().rev());
                v
            }
        }
    }

    /// Reduce controls to a single wire, returning (compute lines, wire).
    fn single_control(&mut self, controls: &[usize]) -> (Vec<String>, Wire) {
        if controls.len() == 1 {
            return (vec![], Wire::Q(controls[0]));
        }
        let c = self.touch(0);
        let ws: Vec<Wire> = controls.iter().map(|&q| Wire::Q(q)).collect();
        (self.and_lines(&ws, c, 1), c)
    }

    fn majority(&mut self, x: Lit, y: Lit, z: Lit, t: Wire) -> Vec<String> {
        let mut v = Vec::new();
        for (a, b) in [(x, y), (x, z), (y, z)] {
            match (a, b) {
                (Lit::Zero, _) | (_, Lit::Zero) => {}
                (Lit::One, Lit::One) => v.push(format!("x {};", t.s())),
                (Lit::One, Lit::W(w)) | (Lit::W(w), Lit::One) => v.push(format!("cx {},{};", w.s(), t.s())),
                (Lit::W(p), Lit::W(r)) => v.push(format!("ccx {},{},{};", p.s(), r.s(), t.s())),
            }
        }
        v
    }

    fn cmp(&mut self, a: &Register, b: &Register, out: usize) {
        let w = a.width.max(b.width);
        if w == 0 {
            self.line(format!("x q[{out}];"));
            return;
        }
        let mut fwd = Vec::new();
        for i in 0..w {
            let t = self.touch(i);
            let nb = if i < b.width {
                let q = Wire::Q(b.bit(i));
                fwd.push(format!("x {};", q.s()));
                Lit::W(q)
            } else {
                Lit::One
            };
            let ai = if i < a.width { Lit::W(Wire::Q(a.bit(i))) } else { Lit::Zero };
            let br = if i == 0 { Lit::Zero } else { Lit::W(Wire::A(i - 1)) };
            let m = self.majority(nb, ai, br, t);
            fwd.extend(m);
            if i < b.width {
                fwd.push(format!("x q[{}];", b.bit(i)));
            }
        }
        for l in &fwd {
            self.line(l.clone());
        }
        self.line(format!("cx anc[{}],q[{out}];", w - 1));
        self.line(format!("x q[{out}];"));
        for l in fwd.into_iter().rev() {
            self.line(l);
        }
    }

    fn gate(&mut self, g: &Gate) {
        match g {
            Gate::X(t) => self.line(format!("x q[{t}];")),
            Gate::Cnot { c, t } => self.line(format!("cx q[{c}],q[{t}];")),
            Gate::Mcx { controls, t } => {
                let ws: Vec<Wire> = controls.iter().map(|&q| Wire::Q(q)).collect();
                for l in self.and_lines(&ws, Wire::Q(*t), 0) {
                    self.line(l);
                }
            }
            Gate::H(t) => self.line(format!("h q[{t}];")),
            Gate::Ch { c, t } => self.line(format!("ch q[{c}],q[{t}];")),
            Gate::Ry { angle, t } => self.line(format!("ry({angle:?}) q[{t}];")),
            Gate::Cry { angle, controls, t } => {
                if controls.is_empty() {
                    self.line(format!("ry({angle:?}) q[{t}];"));
                    return;
                }
                let (pre, c) = self.single_control(controls);
                for l in &pre {
                    self.line(l.clone());
                }
                self.line(format!("cu3({angle:?},0,0) {},q[{t}];", c.s()));
                for l in pre.into_iter().rev() {
                    self.line(l);
                }
            }
            Gate::Phase {
                angle,
                parity,
                controls,
            } => {
                let fold: Vec<String> = match parity.split_last() {
                    Some((last, rest)) => rest.iter().map(|p| format!("cx q[{p}],q[{last}];")).collect(),
                    None => vec![],
                };
                for l in &fold {
                    self.line(l.clone());
                }
                let lam = -angle;
                match (parity.last(), controls.is_empty()) {
                    (None, true) => self.line(format!("// global phase {lam:?}")),
                    (Some(p), true) => self.line(format!("u1({lam:?}) q[{p}];")),
                    (target, false) => {
                        let (pre, c) = self.single_control(controls);
                        for l in &pre {
                            self.line(l.clone());
                        }
                        match target {
                            Some(p) => self.line(format!("cu1({lam:?}) {},q[{p}];", c.s())),
                            None => self.line(format!("u1({lam:?}) {};", c.s())),
                        }
                        for l in pre.into_iter().rev() {
                            self.line(l);
                        }
                    }
                }
                for l in fold.into_iter().rev() {
                    self.line(l);
                }
            }
            Gate::ShiftL(r) => {
                for i in (1..r.width).rev() {
                    self.line(format!("swap q[{}],q[{}];", r.bit(i - 1), r.bit(i)));
                }
            }
            Gate::ShiftR(r) => {
                for i in 1..r.width {
                    self.line(format!("swap q[{}],q[{}];", r.bit(i - 1), r.bit(i)));
                }
            }
            Gate::Cmp { a, b, out } => self.cmp(a, b, *out),
            Gate::Macro { name, body } => {
                self.line(format!("// begin {name}"));
                for g in body {
                    self.gate(g);
                }
                self.line(format!("// end {name}"));
            }
        }
    }
}

pub fn to_qasm(c: &Circuit) -> String {
    let mut e = Emitter {
        out: String::new(),
        anc_used: 0,
    };
    for g in &c.gates {
        e.gate(g);
    }
    let mut head = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(head, "qreg q[{}];", c.n_qubits.max(1));
    if e.anc_used > 0 {
        let _ = writeln!(head, "qreg anc[{}];", e.anc_used);
    }
    head + &e.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::eval::run_dense;
    use crate::linalg::CMat;
    use num_complex::Complex64;

    /// Minimal interpreter for the emitted subset; ancillas are placed above `q`.
    fn simulate(src: &str, n: usize) -> CMat {
        let n_anc: usize = src
            .lines()
            .find_map(|l| l.strip_prefix("qreg anc[").map(|r| r.trim_end_matches("];").parse().unwrap()))
            .unwrap_or(0);
        let total = n + n_anc;
        let dim = 1usize << total;
        let idx = |w: &str| -> usize {
            let (reg, rest) = w.split_once('[').unwrap();
            let i: usize = rest.trim_end_matches(']').parse().unwrap();
            if reg == "q" {
                i
            } else {
                n + i
            }
        };
        let mut u = CMat::zeros(dim, 1 << n);
        for c in 0..(1 << n) {
            u[(c, c)] = Complex64::new(1.0, 0.0);
        }
        for line in src.lines() {
            let line = line.trim();
            if line.starts_with("//") || line.starts_with("OPENQASM") || line.starts_with("include") || line.starts_with("qreg") {
                continue;
            }
            let line = line.trim_end_matches(';');
            let (head, args) = line.split_once(' ').unwrap();
            let qs: Vec<usize> = args.split(',').map(idx).collect();
            let (name, params) = match head.split_once('(') {
                Some((n, p)) => (n, p.trim_end_matches(')').split(',').map(|v| v.parse::<f64>().unwrap()).collect()),
                None => (head, vec![]),
            };
            let c = Complex64::new;
            let (ctl, t, m): (Vec<usize>, usize, [[Complex64; 2]; 2]) = match name {
                "x" => (vec![], qs[0], [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]),
                "cx" => (vec![qs[0]], qs[1], [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]),
                "ccx" => (vec![qs[0], qs[1]], qs[2], [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]),
                "h" | "ch" => {
                    let h = std::f64::consts::FRAC_1_SQRT_2;
                    let ctl = if name == "ch" { vec![qs[0]] } else { vec![] };
                    (ctl, *qs.last().unwrap(), [[c(h, 0.), c(h, 0.)], [c(h, 0.), c(-h, 0.)]])
                }
                "ry" | "cu3" => {
                    let (s, co) = (params[0] / 2.0).sin_cos();
                    let ctl = if name == "cu3" { vec![qs[0]] } else { vec![] };
                    (ctl, *qs.last().unwrap(), [[c(co, 0.), c(-s, 0.)], [c(s, 0.), c(co, 0.)]])
                }
                "rz" | "crz" => {
                    let a = params[0] / 2.0;
                    let ctl = if name == "crz" { vec![qs[0]] } else { vec![] };
                    let z = c(0., 0.);
                    (ctl, *qs.last().unwrap(), [[Complex64::from_polar(1.0, -a), z], [z, Complex64::from_polar(1.0, a)]])
                }
                "u1" | "cu1" => {
                    let z = c(0., 0.);
                    let ctl = if name == "cu1" { vec![qs[0]] } else { vec![] };
                    (ctl, *qs.last().unwrap(), [[c(1., 0.), z], [z, Complex64::from_polar(1.0, params[0])]])
                }
                "swap" => {
                    let (a, b) = (qs[0], qs[1]);
                    for col in 0..u.ncols() {
                        let v: Vec<Complex64> = u.column(col).iter().copied().collect();
                        for (i, &x) in v.iter().enumerate() {
                            let (ba, bb) = (i >> a & 1, i >> b & 1);
                            let j = (i & !(1 << a) & !(1 << b)) | bb << a | ba << b;
                            u[(j, col)] = x;
                        }
                    }
                    continue;
                }
                other => panic!("unexpected {other}"),
            };
            let cm: usize = ctl.iter().map(|q| 1usize << q).sum();
            for col in 0..u.ncols() {
                for i in 0..dim {
                    if i >> t & 1 == 1 || i & cm != cm {
                        continue;
                    }
                    let j = i | 1 << t;
                    let (x, y) = (u[(i, col)], u[(j, col)]);
                    u[(i, col)] = m[0][0] * x + m[0][1] * y;
                    u[(j, col)] = m[1][0] * x + m[1][1] * y;
                }
            }
        }
        for col in 0..u.ncols() {
            for i in (1 << n)..dim {
                assert!(u[(i, col)].norm() < 1e-12, "ancilla left dirty");
            }
        }
        u.rows(0, 1 << n).into_owned()
    }

    #[test]
    fn export_matches_dense() {
        let reg = |name: &str, offset, width| Register {
            name: name.into(),
            offset,
            width,
        };
        let mut c = Circuit::new(6);
        c.gates.extend([
            Gate::H(0),
            Gate::H(1),
            Gate::H(2),
            Gate::H(4),
            Gate::Mcx { controls: vec![0, 1, 2, 4], t: 3 },
            Gate::Cry {
                angle: 0.7,
                controls: vec![0, 1],
                t: 5,
            },
            Gate::Phase {
                angle: 0.4,
                parity: vec![2, 3],
                controls: vec![0, 4],
            },
            Gate::Phase {
                angle: -0.3,
                parity: vec![],
                controls: vec![1],
            },
            Gate::Phase {
                angle: 0.25,
                parity: vec![5, 1],
                controls: vec![],
            },
            Gate::ShiftL(reg("r", 1, 3)),
            Gate::Cmp {
                a: reg("a", 0, 2),
                b: reg("b", 2, 3),
                out: 5,
            },
            Gate::Cmp {
                a: reg("a", 3, 3),
                b: reg("b", 0, 1),
                out: 1,
            },
            Gate::Macro {
                name: "m".into(),
                body: vec![Gate::Ch { c: 5, t: 0 }, Gate::ShiftR(reg("r", 0, 4))],
            },
        ]);
        let want = run_dense(&c, 14).unwrap();
        let got = simulate(&to_qasm(&c), 6);
        assert!((&want - &got).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }
}

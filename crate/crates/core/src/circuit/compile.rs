use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::ir::{inverse_gates, Circuit, Gate, GateSink, Register, RegisterAlloc};
use crate::error::{contract, Error, Result};
use crate::lcu::{lcu_weights, AncillaLayout, LcuWeights, SimParams};
use crate::pauli::Mask;
use crate::pmr::{for_each_submask, ratio_phases, DiagonalOperator, PmrHamiltonian, PmrTerm};

/// Largest diagonal support expanded into Walsh phase gates for a hop.
pub const WALSH_SUPPORT_LIMIT: u32 = 16;

/// Coefficients below this magnitude are dropped from phase expansions.
const ANGLE_TOL: f64 = 1e-15;

/// How the per-position weights are turned into phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// Order-statistic form: two reversible binary searches plus occupation counts.
    #[default]
    BinarySearch,
    /// One membership flag per block, `O(K)` comparator passes.
    Membership,
}

/// Bits needed to hold the integers `0..=x`.
pub fn bits_for(x: usize) -> usize {
    (usize::BITS - x.leading_zeros()) as usize
}

fn mask_bits(m: Mask) -> Vec<usize> {
    (0..128).filter(|&b| m >> b & 1 == 1).collect()
}

/// `X`, `CNOT` or `MCX` depending on the number of controls.
pub(crate) fn mcx<S: GateSink + ?Sized>(sink: &mut S, controls: &[usize], t: usize) {
    match controls {
        [] => sink.push(Gate::X(t)),
        [c] => sink.push(Gate::Cnot { c: *c, t }),
        _ => sink.push(Gate::Mcx {
            controls: controls.to_vec(),
            t,
        }),
    }
}

/// Controlled increment modulo `2^width`.
pub(crate) fn increment<S: GateSink + ?Sized>(sink: &mut S, r: &Register, ctl: &[usize]) {
    for i in (0..r.width).rev() {
        let c: Vec<usize> = ctl.iter().copied().chain((0..i).map(|j| r.bit(j))).collect();
        mcx(sink, &c, r.bit(i));
    }
}

/// Flip `out` when register `r` holds the constant `v`.
fn equals_const<S: GateSink + ?Sized>(sink: &mut S, r: &Register, v: usize, out: usize) {
    let zeros: Vec<usize> = (0..r.width).filter(|&j| v >> j & 1 == 0).map(|j| r.bit(j)).collect();
    for &q in &zeros {
        sink.push(Gate::X(q));
    }
    mcx(sink, &r.qubits().collect::<Vec<_>>(), out);
    for &q in &zeros {
        sink.push(Gate::X(q));
    }
}

/// Registers used by the binary-search weight unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRegs {
    pub s: Register,
    pub l: Register,
    pub h: Register,
    pub t: Register,
    pub c: Register,
    pub bl: Register,
    pub bh: Register,
    pub obl: Register,
    pub obh: Register,
    pub e: usize,
    pub e2: usize,
    pub p: usize,
    pub f: usize,
    pub par: usize,
}

/// Registers used by the membership weight unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRegs {
    pub s: Register,
    pub t: Register,
    pub cl: Register,
    pub ch: Register,
    pub bj: Register,
    pub obj: Register,
    pub e: usize,
    pub e2: usize,
    pub b1: usize,
    pub b2: usize,
    pub mem: usize,
    pub par: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AlphaRegs {
    Search(SearchRegs),
    Membership(MemberRegs),
}

/// Qubit counts by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaTally {
    pub system: usize,
    /// `Q (M + kappa + 1)` plus one sign bit per slot in z-dependent mode.
    pub lcu: usize,
    pub s_counter: usize,
    /// Integer registers of the weight unit.
    pub alpha_workspace: usize,
    /// Single-qubit flags and the parity ancilla.
    pub scratch: usize,
    pub total_ancilla: usize,
}

/// Register layout of the compiled step: system, LCU ancillas (matching
/// [`AncillaLayout`]), the unary s-counter and the weight-unit workspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitLayout {
    pub anc: AncillaLayout,
    pub sys: Register,
    pub q: Register,
    pub i: Vec<Register>,
    pub k: Vec<Register>,
    pub pm: Vec<Option<usize>>,
    pub counter: Register,
    pub alpha: Option<AlphaRegs>,
    pub registers: Vec<Register>,
    pub n_qubits: usize,
    pub tally: AncillaTally,
}

impl CircuitLayout {
    pub fn new(anc: AncillaLayout, with_alpha: bool, mode: AlphaMode) -> Self {
        let (q_max, kappa) = (anc.q_max, anc.kappa as usize);
        let mut a = RegisterAlloc::default();
        let sys = a.reg("sys", anc.n_sys);
        let q = a.reg("q", q_max);
        let mut i = Vec::new();
        let mut k = Vec::new();
        let mut pm = Vec::new();
        for m in 0..q_max {
            i.push(a.reg(format!("i{m}"), anc.m));
            k.push(a.reg(format!("k{m}"), kappa));
            pm.push(anc.z_dependent.then(|| a.qubit(format!("pm{m}"))));
        }
        let lcu = a.next - anc.n_sys;
        let counter = a.reg("cnt", q_max + 1);
        let ws = bits_for(q_max);
        let wb = bits_for(q_max + 1);
        let (alpha, workspace, scratch) = if !with_alpha {
            (None, 0, 0)
        } else {
            let start = a.next;
            match mode {
                AlphaMode::BinarySearch => {
                    let regs = [
                        a.reg("S", ws),
                        a.reg("L", kappa),
                        a.reg("H", kappa),
                        a.reg("T", kappa),
                        a.reg("C", ws),
                        a.reg("BL", wb),
                        a.reg("BH", wb),
                        a.reg("OBL", q_max + 1),
                        a.reg("OBH", q_max + 1),
                    ];
                    let ws_count = a.next - start;
                    let [s, l, h, t, c, bl, bh, obl, obh] = regs;
                    let r = SearchRegs {
                        s,
                        l,
                        h,
                        t,
                        c,
                        bl,
                        bh,
                        obl,
                        obh,
                        e: a.qubit("e"),
                        e2: a.qubit("e2"),
                        p: a.qubit("P"),
                        f: a.qubit("F"),
                        par: a.qubit("par"),
                    };
                    (Some(AlphaRegs::Search(r)), ws_count, 5)
                }
                AlphaMode::Membership => {
                    let regs = [
                        a.reg("S", ws),
                        a.reg("T", kappa),
                        a.reg("CL", ws),
                        a.reg("CH", ws),
                        a.reg("BJ", wb),
                        a.reg("OBJ", q_max + 1),
                    ];
                    let ws_count = a.next - start;
                    let [s, t, cl, ch, bj, obj] = regs;
                    let r = MemberRegs {
                        s,
                        t,
                        cl,
                        ch,
                        bj,
                        obj,
                        e: a.qubit("e"),
                        e2: a.qubit("e2"),
                        b1: a.qubit("b1"),
                        b2: a.qubit("b2"),
                        mem: a.qubit("mem"),
                        par: a.qubit("par"),
                    };
                    (Some(AlphaRegs::Membership(r)), ws_count, 6)
                }
            }
        };
        let n_qubits = a.next;
        let tally = AncillaTally {
            system: anc.n_sys,
            lcu,
            s_counter: q_max + 1,
            alpha_workspace: workspace,
            scratch,
            total_ancilla: n_qubits - anc.n_sys,
        };
        Self {
            anc,
            sys,
            q,
            i,
            k,
            pm,
            counter,
            alpha,
            registers: a.registers,
            n_qubits,
            tally,
        }
    }

    pub fn for_hamiltonian(h: &PmrHamiltonian, p: &SimParams, mode: AlphaMode) -> Self {
        let anc = AncillaLayout::new(h.n, p.q_max, h.m(), p.kappa, h.is_z_dependent());
        Self::new(anc, !h.d0.is_zero(), mode)
    }

    fn empty_circuit(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            registers: self.registers.clone(),
            gates: vec![],
        }
    }
}

// ---------------------------------------------------------------------------
// State preparation

pub(crate) fn prep_gates<S: GateSink + ?Sized>(lay: &AncillaLayout, w: &LcuWeights, sink: &mut S) {
    let th = w.unary_angles();
    for m in 0..lay.q_max {
        if m == 0 {
            sink.push(Gate::Ry {
                angle: th[0],
                t: lay.q_bit(0),
            });
        } else {
            sink.push(Gate::Cry {
                angle: th[m],
                controls: vec![lay.q_bit(m - 1)],
                t: lay.q_bit(m),
            });
        }
    }
    let oh = w.onehot_angles();
    for m in 0..lay.q_max {
        if lay.m == 0 {
            continue;
        }
        sink.push(Gate::Cnot {
            c: lay.q_bit(m),
            t: lay.i_bit(m, 0),
        });
        for j in 1..lay.m {
            sink.push(Gate::Cry {
                angle: oh[j],
                controls: vec![lay.i_bit(m, j - 1)],
                t: lay.i_bit(m, j),
            });
        }
        for j in 0..lay.m - 1 {
            sink.push(Gate::Cnot {
                c: lay.i_bit(m, j + 1),
                t: lay.i_bit(m, j),
            });
        }
    }
    for m in 0..lay.q_max {
        for b in 0..lay.kappa as usize {
            sink.push(Gate::Ch {
                c: lay.q_bit(m),
                t: lay.k_bit(m, b),
            });
        }
        if lay.z_dependent {
            sink.push(Gate::Ch {
                c: lay.q_bit(m),
                t: lay.pm_bit(m),
            });
        }
    }
}

/// Ancilla-only preparation circuit (no system qubits) for the given weights.
pub fn compile_state_prep(p: &SimParams, gammas: &[f64], z_dependent: bool) -> Circuit {
    let w = crate::lcu::weights_from(gammas, p.dt, p.q_max, p.big_k, z_dependent);
    let lay = AncillaLayout::new(0, p.q_max, gammas.len(), p.kappa, z_dependent);
    let full = CircuitLayout::new(lay, false, AlphaMode::BinarySearch);
    let mut c = Circuit {
        n_qubits: lay.n_total(),
        registers: full.registers.into_iter().filter(|r| r.name != "cnt" && r.width > 0).collect(),
        gates: vec![],
    };
    prep_gates(&lay, &w, &mut c.gates);
    c
}

// ---------------------------------------------------------------------------
// Diagonal phase gadget

/// `exp(-i angle J (-1)^{z . mask})` via parity computation into ancilla qubit `n`.
pub fn compile_diag_phase(n: usize, z_mask: Mask, j: f64, angle: f64) -> Result<Circuit> {
    if z_mask == 0 {
        return Err(contract("diag phase gadget needs a nonempty Z mask"));
    }
    if z_mask >> n != 0 {
        return Err(contract(format!("Z mask exceeds {n} qubits")));
    }
    let mut c = Circuit::new(n + 1);
    diag_phase_gates(&mut c.gates, &mask_bits(z_mask), n, &[], angle * j);
    Ok(c)
}

fn diag_phase_gates<S: GateSink + ?Sized>(sink: &mut S, bits: &[usize], anc: usize, controls: &[usize], angle: f64) {
    for &b in bits {
        sink.push(Gate::Cnot { c: b, t: anc });
    }
    sink.push_signed(Gate::Phase {
        angle,
        parity: vec![anc],
        controls: controls.to_vec(),
    });
    for &b in bits.iter().rev() {
        sink.push(Gate::Cnot { c: b, t: anc });
    }
}

// ---------------------------------------------------------------------------
// Weight unit

/// Load the binary position `s` from the one-hot s-counter.
fn load_s<S: GateSink + ?Sized>(sink: &mut S, cnt: &Register, s: &Register) {
    for j in 1..cnt.width {
        for b in 0..s.width {
            if j >> b & 1 == 1 {
                sink.push(Gate::Cnot {
                    c: cnt.bit(j),
                    t: s.bit(b),
                });
            }
        }
    }
}

fn cmp(a: &Register, b: &Register, out: usize) -> Gate {
    Gate::Cmp {
        a: a.clone(),
        b: b.clone(),
        out,
    }
}

fn macro_gate(name: &str, body: Vec<Gate>) -> Gate {
    Gate::Macro {
        name: name.to_string(),
        body,
    }
}

/// Count active slots with `k_m <= T` (or `k_m < T` when `strict`) into `c`.
fn count_le(lay: &CircuitLayout, t: &Register, c: &Register, e: usize, strict: bool) -> Vec<Gate> {
    let mut g = Vec::new();
    for m in 0..lay.anc.q_max {
        let k = &lay.k[m];
        let test = if strict { cmp(t, k, e) } else { cmp(k, t, e) };
        g.push(test.clone());
        if strict {
            g.push(Gate::X(e));
        }
        increment(&mut g, c, &[e, lay.q.bit(m)]);
        if strict {
            g.push(Gate::X(e));
        }
        g.push(test);
    }
    g
}

/// `1 + #{active m : k_m == v}` into `b`, which starts at zero.
fn occupancy(lay: &CircuitLayout, v: &Register, b: &Register, e: usize, e2: usize) -> Vec<Gate> {
    let mut g = vec![Gate::X(b.bit(0))];
    for m in 0..lay.anc.q_max {
        let k = &lay.k[m];
        g.push(cmp(k, v, e));
        g.push(cmp(v, k, e2));
        increment(&mut g, b, &[e, e2, lay.q.bit(m)]);
        g.push(cmp(v, k, e2));
        g.push(cmp(k, v, e));
    }
    g
}

fn decode_onehot(g: &mut Vec<Gate>, b: &Register, onehot: &Register) {
    for v in 1..=onehot.width {
        equals_const(g, b, v, onehot.bit(v - 1));
    }
}

/// Reversible computation of `lmin - 1`, `lmax - 1`, the two occupancies (one-hot)
/// and the flag `lmax > lmin`; the phases are applied outside.
fn search_compute(lay: &CircuitLayout, r: &SearchRegs) -> Vec<Gate> {
    let kappa = lay.anc.kappa as usize;
    let mut body = Vec::new();
    let mut ld = Vec::new();
    load_s(&mut ld, &lay.counter, &r.s);
    body.push(macro_gate("load_s", ld));

    // Smallest T with #{k <= T} >= s.
    let mut lo = Vec::new();
    for b in (0..kappa).rev() {
        let mut set_t = Vec::new();
        for j in b + 1..kappa {
            set_t.push(Gate::Cnot {
                c: r.l.bit(j),
                t: r.t.bit(j),
            });
        }
        for j in 0..b {
            set_t.push(Gate::X(r.t.bit(j)));
        }
        let count = count_le(lay, &r.t, &r.c, r.e, false);
        lo.extend(set_t.iter().cloned());
        lo.push(macro_gate("sigma_count", count.clone()));
        lo.extend([
            cmp(&r.s, &r.c, r.p),
            Gate::X(r.p),
            Gate::Cnot { c: r.p, t: r.l.bit(b) },
            Gate::X(r.p),
            cmp(&r.s, &r.c, r.p),
        ]);
        lo.push(macro_gate("sigma_count_inv", inverse_gates(&count)));
        lo.extend(inverse_gates(&set_t));
    }
    body.push(macro_gate("lmin_search", lo));

    // Largest T with #{k < T} <= s.
    let mut hi = Vec::new();
    for b in (0..kappa).rev() {
        let mut set_t = Vec::new();
        for j in b + 1..kappa {
            set_t.push(Gate::Cnot {
                c: r.h.bit(j),
                t: r.t.bit(j),
            });
        }
        set_t.push(Gate::X(r.t.bit(b)));
        let count = count_le(lay, &r.t, &r.c, r.e, true);
        hi.extend(set_t.iter().cloned());
        hi.push(macro_gate("sigma_count", count.clone()));
        hi.extend([
            cmp(&r.c, &r.s, r.p),
            Gate::Cnot { c: r.p, t: r.h.bit(b) },
            cmp(&r.c, &r.s, r.p),
        ]);
        hi.push(macro_gate("sigma_count_inv", inverse_gates(&count)));
        hi.extend(inverse_gates(&set_t));
    }
    body.push(macro_gate("lmax_search", hi));

    body.push(macro_gate("occupancy_lo", occupancy(lay, &r.l, &r.bl, r.e, r.e2)));
    body.push(macro_gate("occupancy_hi", occupancy(lay, &r.h, &r.bh, r.e, r.e2)));
    body.push(cmp(&r.h, &r.l, r.f));
    body.push(Gate::X(r.f));
    let mut dec = Vec::new();
    decode_onehot(&mut dec, &r.bl, &r.obl);
    decode_onehot(&mut dec, &r.bh, &r.obh);
    body.push(macro_gate("decode", dec));
    body
}

/// Phases `exp(-i delta alpha J (-1)^p)` for every `D_0` term, given the search outputs.
fn search_phases<S: GateSink + ?Sized>(
    sink: &mut S,
    h: &PmrHamiltonian,
    lay: &CircuitLayout,
    r: &SearchRegs,
    act: Option<usize>,
    delta: f64,
) {
    let ctl = |extra: &[usize]| -> Vec<usize> { act.into_iter().chain(extra.iter().copied()).collect() };
    for &(zk, jc) in &h.d0.terms {
        let j = jc.re;
        let bits: Vec<usize> = mask_bits(zk).into_iter().map(|b| lay.sys.bit(b)).collect();
        let parity = if bits.is_empty() { vec![] } else { vec![r.par] };
        for &b in &bits {
            sink.push(Gate::Cnot { c: b, t: r.par });
        }
        let mut ph = |angle: f64, controls: Vec<usize>| {
            sink.push_signed(Gate::Phase {
                angle,
                parity: parity.clone(),
                controls,
            })
        };
        for v in 1..=r.obl.width {
            ph(delta * j / v as f64, ctl(&[r.obl.bit(v - 1)]));
        }
        for v in 1..=r.obh.width {
            ph(delta * j / v as f64, ctl(&[r.f, r.obh.bit(v - 1)]));
        }
        for b in 0..r.h.width {
            let w = delta * j * (1u64 << b) as f64;
            ph(w, ctl(&[r.f, r.h.bit(b)]));
            ph(-w, ctl(&[r.f, r.l.bit(b)]));
        }
        ph(-delta * j, ctl(&[r.f]));
        for &b in bits.iter().rev() {
            sink.push(Gate::Cnot { c: b, t: r.par });
        }
    }
}

fn member_compute(lay: &CircuitLayout, r: &MemberRegs, l: usize) -> Vec<Gate> {
    let mut body = Vec::new();
    let set_t: Vec<Gate> = (0..r.t.width)
        .filter(|&j| (l - 1) >> j & 1 == 1)
        .map(|j| Gate::X(r.t.bit(j)))
        .collect();
    body.extend(set_t.iter().cloned());
    body.push(macro_gate("sigma_count", count_le(lay, &r.t, &r.cl, r.e, true)));
    body.push(macro_gate("sigma_count", count_le(lay, &r.t, &r.ch, r.e, false)));
    body.push(macro_gate("occupancy", occupancy(lay, &r.t, &r.bj, r.e, r.e2)));
    body.push(cmp(&r.cl, &r.s, r.b1));
    body.push(cmp(&r.s, &r.ch, r.b2));
    body.push(Gate::Mcx {
        controls: vec![r.b1, r.b2],
        t: r.mem,
    });
    let mut dec = Vec::new();
    decode_onehot(&mut dec, &r.bj, &r.obj);
    body.push(macro_gate("decode", dec));
    body
}

fn member_phases<S: GateSink + ?Sized>(
    sink: &mut S,
    h: &PmrHamiltonian,
    lay: &CircuitLayout,
    r: &MemberRegs,
    act: Option<usize>,
    delta: f64,
) {
    for &(zk, jc) in &h.d0.terms {
        let j = jc.re;
        let bits: Vec<usize> = mask_bits(zk).into_iter().map(|b| lay.sys.bit(b)).collect();
        let parity = if bits.is_empty() { vec![] } else { vec![r.par] };
        for &b in &bits {
            sink.push(Gate::Cnot { c: b, t: r.par });
        }
        for v in 1..=r.obj.width {
            sink.push_signed(Gate::Phase {
                angle: delta * j / v as f64,
                parity: parity.clone(),
                controls: act.into_iter().chain([r.mem, r.obj.bit(v - 1)]).collect(),
            });
        }
        for &b in bits.iter().rev() {
            sink.push(Gate::Cnot { c: b, t: r.par });
        }
    }
}

/// Weight unit for the position currently held in the s-counter, with its phases
/// and full uncomputation. `act` is the control marking the position active.
fn alpha_block<S: GateSink + ?Sized>(sink: &mut S, h: &PmrHamiltonian, lay: &CircuitLayout, act: Option<usize>, delta: f64) {
    match &lay.alpha {
        None => {}
        Some(AlphaRegs::Search(r)) => {
            let body = search_compute(lay, r);
            let inv = inverse_gates(&body);
            sink.push(macro_gate("alpha", body));
            search_phases(sink, h, lay, r, act, delta);
            sink.push(macro_gate("alpha_inv", inv));
        }
        Some(AlphaRegs::Membership(r)) => {
            let mut ld = Vec::new();
            load_s(&mut ld, &lay.counter, &r.s);
            sink.push(macro_gate("load_s", ld.clone()));
            for l in 1..=(1usize << lay.anc.kappa) {
                let body = member_compute(lay, r, l);
                let inv = inverse_gates(&body);
                sink.push(macro_gate("alpha_block", body));
                member_phases(sink, h, lay, r, act, delta);
                sink.push(macro_gate("alpha_block_inv", inv));
            }
            sink.push(macro_gate("load_s_inv", inverse_gates(&ld)));
        }
    }
}

/// Standalone weight unit for testing: loads nothing, uses the s-counter as is.
pub fn compile_alpha_unit(h: &PmrHamiltonian, lay: &CircuitLayout, act: Option<usize>, delta: f64) -> Circuit {
    let mut c = lay.empty_circuit();
    alpha_block(&mut c.gates, h, lay, act, delta);
    c
}

/// Forward part of the binary-search unit only (no phases, no uncompute), for inspection.
pub fn compile_alpha_search_forward(lay: &CircuitLayout) -> Result<Circuit> {
    let Some(AlphaRegs::Search(r)) = &lay.alpha else {
        return Err(contract("layout has no binary-search workspace"));
    };
    let mut c = lay.empty_circuit();
    c.gates = search_compute(lay, r);
    Ok(c)
}

// ---------------------------------------------------------------------------
// Select

/// Walsh coefficients of `f` over the submasks of `support`: `f(z) = sum_S c_S (-1)^{|S & z|}`.
fn walsh(support: Mask, f: impl Fn(Mask) -> f64) -> Vec<(Mask, f64)> {
    let bits = mask_bits(support);
    let w = bits.len();
    let deposit = |idx: usize| -> Mask {
        bits.iter()
            .enumerate()
            .filter(|(j, _)| idx >> j & 1 == 1)
            .fold(0, |a, (_, &b)| a | 1 << b)
    };
    let mut v: Vec<f64> = (0..1usize << w).map(|i| f(deposit(i))).collect();
    let mut len = 1;
    while len < v.len() {
        for i in (0..v.len()).step_by(2 * len) {
            for j in i..i + len {
                let (a, b) = (v[j], v[j + len]);
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
        len *= 2;
    }
    let scale = 1.0 / (1usize << w) as f64;
    v.into_iter()
        .enumerate()
        .map(|(i, c)| (deposit(i), c * scale))
        .filter(|(_, c)| c.abs() > ANGLE_TOL)
        .collect()
}

/// Phases multiplying a hop by `exp(i(theta +- phi))` evaluated on the post-hop state.
fn hop_phase_gates<S: GateSink + ?Sized>(
    sink: &mut S,
    t: &PmrTerm,
    lay: &CircuitLayout,
    ctl: usize,
    pm: Option<usize>,
) -> Result<()> {
    let sysbits = |m: Mask| -> Vec<usize> { mask_bits(m).into_iter().map(|b| lay.sys.bit(b)).collect() };
    match pm {
        None => {
            let (theta, phi) = ratio_phases(t.diag.constant() / t.gamma)?;
            let a = theta + phi;
            if a.abs() > ANGLE_TOL {
                sink.push(Gate::Phase {
                    angle: -a,
                    parity: vec![],
                    controls: vec![ctl],
                });
            }
        }
        Some(pm) => {
            // Factor out the Z-string shared by every term: d(z) = (-1)^{|c & z|} d'(z),
            // which shifts theta by pi on odd parity and leaves phi unchanged.
            let common = t.diag.terms.iter().fold(Mask::MAX, |a, (m, _)| a & m);
            let common = if t.diag.terms.is_empty() { 0 } else { common };
            let reduced = DiagonalOperator::new(t.diag.n, t.diag.terms.iter().map(|&(m, c)| (m ^ common, c)));
            let sup = reduced.support();
            if sup.count_ones() > WALSH_SUPPORT_LIMIT {
                return Err(Error::Budget {
                    what: "hop diagonal support bits".into(),
                    count: sup.count_ones() as f64,
                    budget: WALSH_SUPPORT_LIMIT as f64,
                });
            }
            let mut table = Vec::new();
            let mut err = None;
            for_each_submask(sup, |z| match ratio_phases(reduced.eval(z) / t.gamma) {
                Ok(v) => table.push((z, v)),
                Err(e) => err = Some(e),
            });
            if let Some(e) = err {
                return Err(e);
            }
            let lookup = |z: Mask, which: usize| {
                let (_, (th, ph)) = table.iter().find(|(m, _)| *m == z).expect("submask");
                if which == 0 {
                    *th
                } else {
                    *ph
                }
            };
            let mut thetas = walsh(sup, |z| lookup(z, 0));
            if common != 0 {
                match thetas.iter_mut().find(|(m, _)| *m == 0) {
                    Some(e) => e.1 += FRAC_PI_2,
                    None => thetas.push((0, FRAC_PI_2)),
                }
                thetas.push((common, -FRAC_PI_2));
            }
            for (s, c) in thetas {
                sink.push_signed(Gate::Phase {
                    angle: -c,
                    parity: sysbits(s),
                    controls: vec![ctl],
                });
            }
            for (s, c) in walsh(sup, |z| lookup(z, 1)) {
                let mut parity = sysbits(s);
                parity.push(pm);
                sink.push_signed(Gate::Phase {
                    angle: -c,
                    parity,
                    controls: vec![ctl],
                });
            }
        }
    }
    Ok(())
}

/// Emit the select unitary: the leading weight block, then `Q` blocks of
/// counter shift, controlled hop, hop phases, `-i` and weight block.
pub fn select_gates<S: GateSink + ?Sized>(h: &PmrHamiltonian, p: &SimParams, lay: &CircuitLayout, sink: &mut S) -> Result<()> {
    let delta = p.dt / p.big_k as f64;
    sink.push(Gate::X(lay.counter.bit(0)));
    alpha_block(sink, h, lay, None, delta);
    for s in 1..=lay.anc.q_max {
        let m = s - 1;
        sink.push(Gate::ShiftL(lay.counter.clone()));
        for (i, t) in h.terms.iter().enumerate() {
            let ctl = lay.i[m].bit(i);
            for b in mask_bits(t.x_mask) {
                sink.push(Gate::Cnot {
                    c: ctl,
                    t: lay.sys.bit(b),
                });
            }
            hop_phase_gates(sink, t, lay, ctl, lay.pm[m])?;
        }
        sink.push(Gate::Phase {
            angle: FRAC_PI_2,
            parity: vec![],
            controls: vec![lay.q.bit(m)],
        });
        alpha_block(sink, h, lay, Some(lay.q.bit(m)), delta);
    }
    sink.push(Gate::ShiftL(lay.counter.clone()));
    sink.push(Gate::X(lay.counter.bit(0)));
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CompiledStep {
    pub layout: CircuitLayout,
    pub weights: LcuWeights,
    /// Preparation on the full register set.
    pub prep: Circuit,
    pub select: Circuit,
    /// `prep^dagger . select . prep`.
    pub w: Circuit,
}

pub fn compile_select(h: &PmrHamiltonian, p: &SimParams, mode: AlphaMode) -> Result<(Circuit, CircuitLayout)> {
    let lay = CircuitLayout::for_hamiltonian(h, p, mode);
    let mut c = lay.empty_circuit();
    select_gates(h, p, &lay, &mut c.gates)?;
    Ok((c, lay))
}

/// Preparation, select and their `W` composition for one step.
pub fn compile_step(h: &PmrHamiltonian, p: &SimParams, mode: AlphaMode) -> Result<CompiledStep> {
    let (select, layout) = compile_select(h, p, mode)?;
    let weights = lcu_weights(h, p);
    let mut prep = layout.empty_circuit();
    prep_gates(&layout.anc, &weights, &mut prep.gates);
    let mut w = layout.empty_circuit();
    w.gates.push(macro_gate("prep", prep.gates.clone()));
    w.gates.push(macro_gate("select", select.gates.clone()));
    w.gates.push(macro_gate("prep_inv", inverse_gates(&prep.gates)));
    Ok(CompiledStep {
        layout,
        weights,
        prep,
        select,
        w,
    })
}

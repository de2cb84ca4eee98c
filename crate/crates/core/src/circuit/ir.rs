use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

/// A contiguous, named block of qubits; bit `j` of the register is qubit `offset + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

impl Register {
    pub fn bit(&self, j: usize) -> usize {
        debug_assert!(j < self.width, "bit {j} outside register {}", self.name);
        self.offset + j
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.offset..self.offset + self.width
    }
}

/// Circuit primitives.
///
/// `Phase` applies `exp(-i angle)` when every control is set and the listed parity
/// qubits have odd parity; an empty parity list imposes no parity condition.
/// `ShiftL` rotates a register cyclically toward its high end; `Cmp` computes
/// `out ^= [value(a) <= value(b)]` with unsigned, zero-extended operands.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    Cnot { c: usize, t: usize },
    Mcx { controls: Vec<usize>, t: usize },
    H(usize),
    Ch { c: usize, t: usize },
    Ry { angle: f64, t: usize },
    Cry { angle: f64, controls: Vec<usize>, t: usize },
    Phase { angle: f64, parity: Vec<usize>, controls: Vec<usize> },
    ShiftL(Register),
    ShiftR(Register),
    Cmp { a: Register, b: Register, out: usize },
    Macro { name: String, body: Vec<Gate> },
}

impl Gate {
    /// Mnemonic used in the text format and gate counts.
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::Cnot { .. } => "CNOT",
            Gate::Mcx { .. } => "MCX",
            Gate::H(_) => "H",
            Gate::Ch { .. } => "CH",
            Gate::Ry { .. } => "RY",
            Gate::Cry { .. } => "CRY",
            Gate::Phase { .. } => "ZPHASE",
            Gate::ShiftL(_) => "SHIFTL",
            Gate::ShiftR(_) => "SHIFTR",
            Gate::Cmp { .. } => "CMP",
            Gate::Macro { .. } => "MACRO",
        }
    }

    /// True for gates that map basis states to basis states (up to a phase).
    pub fn is_basis_preserving(&self) -> bool {
        match self {
            Gate::H(_) | Gate::Ch { .. } | Gate::Ry { .. } | Gate::Cry { .. } => false,
            Gate::Macro { body, .. } => body.iter().all(Gate::is_basis_preserving),
            _ => true,
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Ry { angle, t } => Gate::Ry { angle: -angle, t: *t },
            Gate::Cry { angle, controls, t } => Gate::Cry {
                angle: -angle,
                controls: controls.clone(),
                t: *t,
            },
            Gate::Phase {
                angle,
                parity,
                controls,
            } => Gate::Phase {
                angle: -angle,
                parity: parity.clone(),
                controls: controls.clone(),
            },
            Gate::ShiftL(r) => Gate::ShiftR(r.clone()),
            Gate::ShiftR(r) => Gate::ShiftL(r.clone()),
            Gate::Macro { name, body } => Gate::Macro {
                name: inverse_name(name),
                body: inverse_gates(body),
            },
            g => g.clone(),
        }
    }

    /// Every qubit the gate touches, with the disjointness check folded in.
    fn operands(&self) -> std::result::Result<Vec<usize>, String> {
        let disjoint = |ctl: &[usize], tgt: &[usize]| -> std::result::Result<(), String> {
            let c: BTreeSet<_> = ctl.iter().collect();
            if c.len() != ctl.len() {
                return Err("repeated control".into());
            }
            if tgt.iter().any(|t| c.contains(t)) {
                return Err("control and target sets overlap".into());
            }
            Ok(())
        };
        Ok(match self {
            Gate::X(t) | Gate::H(t) | Gate::Ry { t, .. } => vec![*t],
            Gate::Cnot { c, t } | Gate::Ch { c, t } => {
                disjoint(&[*c], &[*t])?;
                vec![*c, *t]
            }
            Gate::Mcx { controls, t } | Gate::Cry { controls, t, .. } => {
                disjoint(controls, &[*t])?;
                controls.iter().copied().chain([*t]).collect()
            }
            Gate::Phase { parity, controls, .. } => {
                disjoint(controls, parity)?;
                if parity.iter().collect::<BTreeSet<_>>().len() != parity.len() {
                    return Err("repeated parity qubit".into());
                }
                controls.iter().chain(parity).copied().collect()
            }
            Gate::ShiftL(r) | Gate::ShiftR(r) => r.qubits().collect(),
            Gate::Cmp { a, b, out } => {
                if a.qubits().chain(b.qubits()).any(|q| q == *out) {
                    return Err("comparator output overlaps an operand".into());
                }
                a.qubits().chain(b.qubits()).chain([*out]).collect()
            }
            Gate::Macro { .. } => vec![],
        })
    }
}

pub(crate) fn inverse_name(name: &str) -> String {
    match name.strip_suffix("_inv") {
        Some(base) => base.to_string(),
        None => format!("{name}_inv"),
    }
}

pub fn inverse_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// Destination for emitted gates; lets large compilations be counted without storage.
pub trait GateSink {
    fn push(&mut self, g: Gate);

    /// Emit `exp(-i angle (-1)^p)` on the controls as a pair of `Phase` gates,
    /// where `p` is the parity of the phase's parity list.
    fn push_signed(&mut self, g: Gate) {
        match g {
            Gate::Phase { angle, parity, controls } if !parity.is_empty() => {
                self.push(Gate::Phase {
                    angle,
                    parity: vec![],
                    controls: controls.clone(),
                });
                self.push(Gate::Phase {
                    angle: -2.0 * angle,
                    parity,
                    controls,
                });
            }
            g => self.push(g),
        }
    }
}

impl GateSink for Vec<Gate> {
    fn push(&mut self, g: Gate) {
        Vec::push(self, g);
    }
}

/// Flat gate list over declared registers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub registers: Vec<Register>,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            registers: vec![],
            gates: vec![],
        }
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            registers: self.registers.clone(),
            gates: inverse_gates(&self.gates),
        }
    }

    /// Check operand ranges, register bounds and control/target disjointness.
    pub fn validate(&self) -> Result<()> {
        for r in &self.registers {
            if r.offset + r.width > self.n_qubits {
                return Err(contract(format!("register {} exceeds {} qubits", r.name, self.n_qubits)));
            }
        }
        fn walk(gates: &[Gate], n: usize, path: &str) -> Result<()> {
            for (i, g) in gates.iter().enumerate() {
                if let Gate::Macro { name, body } = g {
                    walk(body, n, &format!("{path}{name}/"))?;
                    continue;
                }
                let ops = g
                    .operands()
                    .map_err(|e| contract(format!("gate {path}{i} ({}): {e}", g.kind())))?;
                if let Some(q) = ops.iter().find(|&&q| q >= n) {
                    return Err(contract(format!(
                        "gate {path}{i} ({}) uses qubit {q} of {n}",
                        g.kind()
                    )));
                }
            }
            Ok(())
        }
        walk(&self.gates, self.n_qubits, "")
    }
}

impl GateSink for Circuit {
    fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }
}

/// Sequential qubit allocator producing named registers.
#[derive(Debug, Clone, Default)]
pub struct RegisterAlloc {
    pub next: usize,
    pub registers: Vec<Register>,
}

impl RegisterAlloc {
    pub fn reg(&mut self, name: impl Into<String>, width: usize) -> Register {
        let r = Register {
            name: name.into(),
            offset: self.next,
            width,
        };
        self.next += width;
        self.registers.push(r.clone());
        r
    }

    pub fn qubit(&mut self, name: impl Into<String>) -> usize {
        self.reg(name, 1).offset
    }
}

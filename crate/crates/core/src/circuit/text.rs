//! Line-oriented circuit text format.
//!
//! ```text
//! QUBITS 4
//! REG cnt 1 3
//! CNOT 0 1
//! MCX 0,1 2
//! CRY 0.5 0,1 2
//! ZPHASE 0.25 1,2 ctrl 0
//! ZPHASE 0.25 -
//! SHIFTL cnt
//! CMP a b 3
//! MACRO name {
//!   X 0
//! }
//! ```

use std::fmt::Write as _;

use super::ir::{Circuit, Gate, Register};
use crate::error::{Error, Result};

fn list(v: &[usize]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn write_gates(out: &mut String, gates: &[Gate], indent: usize) {
    let pad = "  ".repeat(indent);
    for g in gates {
        let _ = match g {
            Gate::X(t) => writeln!(out, "{pad}X {t}"),
            Gate::Cnot { c, t } => writeln!(out, "{pad}CNOT {c} {t}"),
            Gate::Mcx { controls, t } => writeln!(out, "{pad}MCX {} {t}", list(controls)),
            Gate::H(t) => writeln!(out, "{pad}H {t}"),
            Gate::Ch { c, t } => writeln!(out, "{pad}CH {c} {t}"),
            Gate::Ry { angle, t } => writeln!(out, "{pad}RY {angle:?} {t}"),
            Gate::Cry { angle, controls, t } => writeln!(out, "{pad}CRY {angle:?} {} {t}", list(controls)),
            Gate::Phase {
                angle,
                parity,
                controls,
            } => {
                if controls.is_empty() {
                    writeln!(out, "{pad}ZPHASE {angle:?} {}", list(parity))
                } else {
                    writeln!(out, "{pad}ZPHASE {angle:?} {} ctrl {}", list(parity), list(controls))
                }
            }
            Gate::ShiftL(r) => writeln!(out, "{pad}SHIFTL {}", r.name),
            Gate::ShiftR(r) => writeln!(out, "{pad}SHIFTR {}", r.name),
            Gate::Cmp { a, b, out: o } => writeln!(out, "{pad}CMP {} {} {o}", a.name, b.name),
            Gate::Macro { name, body } => {
                let _ = writeln!(out, "{pad}MACRO {name} {{");
                write_gates(out, body, indent + 1);
                writeln!(out, "{pad}}}")
            }
        };
    }
}

pub fn to_text(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "QUBITS {}", c.n_qubits);
    for r in &c.registers {
        let _ = writeln!(out, "REG {} {} {}", r.name, r.offset, r.width);
    }
    write_gates(&mut out, &c.gates, 0);
    out
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    registers: Vec<Register>,
}

fn perr(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("circuit line {line}: {msg}"))
}

impl<'a> Parser<'a> {
    fn num<T: std::str::FromStr>(&self, line: usize, tok: Option<&str>) -> Result<T> {
        let tok = tok.ok_or_else(|| perr(line, "missing operand"))?;
        tok.parse().map_err(|_| perr(line, format!("bad number {tok:?}")))
    }

    fn qlist(&self, line: usize, tok: Option<&str>) -> Result<Vec<usize>> {
        let tok = tok.ok_or_else(|| perr(line, "missing qubit list"))?;
        if tok == "-" {
            return Ok(vec![]);
        }
        tok.split(',').map(|s| self.num(line, Some(s))).collect()
    }

    fn reg(&self, line: usize, tok: Option<&str>) -> Result<Register> {
        let tok = tok.ok_or_else(|| perr(line, "missing register"))?;
        self.registers
            .iter()
            .find(|r| r.name == tok)
            .cloned()
            .ok_or_else(|| perr(line, format!("undeclared register {tok:?}")))
    }

    fn gates(&mut self, in_macro: bool) -> Result<Vec<Gate>> {
        let mut out = Vec::new();
        while self.pos < self.lines.len() {
            let (ln, text) = self.lines[self.pos];
            self.pos += 1;
            let mut tok = text.split_whitespace();
            let Some(op) = tok.next() else { continue };
            let g = match op {
                "}" if in_macro => return Ok(out),
                "X" => Gate::X(self.num(ln, tok.next())?),
                "H" => Gate::H(self.num(ln, tok.next())?),
                "CNOT" => Gate::Cnot {
                    c: self.num(ln, tok.next())?,
                    t: self.num(ln, tok.next())?,
                },
                "CH" => Gate::Ch {
                    c: self.num(ln, tok.next())?,
                    t: self.num(ln, tok.next())?,
                },
                "MCX" => Gate::Mcx {
                    controls: self.qlist(ln, tok.next())?,
                    t: self.num(ln, tok.next())?,
                },
                "RY" => Gate::Ry {
                    angle: self.num(ln, tok.next())?,
                    t: self.num(ln, tok.next())?,
                },
                "CRY" => Gate::Cry {
                    angle: self.num(ln, tok.next())?,
                    controls: self.qlist(ln, tok.next())?,
                    t: self.num(ln, tok.next())?,
                },
                "ZPHASE" => {
                    let angle = self.num(ln, tok.next())?;
                    let parity = self.qlist(ln, tok.next())?;
                    let controls = match tok.next() {
                        None => vec![],
                        Some("ctrl") => self.qlist(ln, tok.next())?,
                        Some(t) => return Err(perr(ln, format!("expected 'ctrl', found {t:?}"))),
                    };
                    Gate::Phase {
                        angle,
                        parity,
                        controls,
                    }
                }
                "SHIFTL" => Gate::ShiftL(self.reg(ln, tok.next())?),
                "SHIFTR" => Gate::ShiftR(self.reg(ln, tok.next())?),
                "CMP" => Gate::Cmp {
                    a: self.reg(ln, tok.next())?,
                    b: self.reg(ln, tok.next())?,
                    out: self.num(ln, tok.next())?,
                },
                "MACRO" => {
                    let name = tok.next().ok_or_else(|| perr(ln, "macro without a name"))?.to_string();
                    if tok.next() != Some("{") {
                        return Err(perr(ln, "expected '{' after macro name"));
                    }
                    let body = self.gates(true)?;
                    Gate::Macro { name, body }
                }
                other => return Err(perr(ln, format!("unknown gate {other:?}"))),
            };
            if let Some(extra) = tok.next() {
                return Err(perr(ln, format!("unexpected token {extra:?}")));
            }
            out.push(g);
        }
        if in_macro {
            return Err(Error::Parse("circuit: unterminated MACRO block".into()));
        }
        Ok(out)
    }
}

pub fn from_text(s: &str) -> Result<Circuit> {
    let lines: Vec<(usize, &str)> = s
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut n_qubits = None;
    let mut registers = Vec::new();
    let mut body_start = 0;
    for (i, &(ln, l)) in lines.iter().enumerate() {
        let mut tok = l.split_whitespace();
        match tok.next() {
            Some("QUBITS") => {
                let v = tok.next().and_then(|t| t.parse().ok());
                n_qubits = Some(v.ok_or_else(|| perr(ln, "QUBITS needs a count"))?);
            }
            Some("REG") => {
                let name = tok.next().ok_or_else(|| perr(ln, "REG needs a name"))?;
                let nums: Vec<usize> = tok.map(|t| t.parse().map_err(|_| perr(ln, "bad REG field"))).collect::<Result<_>>()?;
                if nums.len() != 2 {
                    return Err(perr(ln, "REG needs offset and width"));
                }
                registers.push(Register {
                    name: name.to_string(),
                    offset: nums[0],
                    width: nums[1],
                });
            }
            _ => {
                body_start = i;
                break;
            }
        }
        body_start = i + 1;
    }
    let n_qubits = n_qubits.ok_or_else(|| Error::Parse("circuit: missing QUBITS header".into()))?;
    let mut p = Parser {
        lines: lines[body_start..].to_vec(),
        pos: 0,
        registers,
    };
    let gates = p.gates(false)?;
    let c = Circuit {
        n_qubits,
        registers: p.registers,
        gates,
    };
    c.validate()?;
    Ok(c)
}

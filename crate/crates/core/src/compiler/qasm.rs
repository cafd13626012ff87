//! OpenQASM 2.0 subset used to exchange protocol circuits.
//!
//! Grammar (one statement per line; `//` comments and blank lines are
//! ignored; whitespace around tokens is free):
//!
//! ```text
//! program    := "OPENQASM 2.0;" include? qreg creg? statement*
//! include    := "include \"qelib1.inc\";"
//! qreg       := "qreg q[" N "];"                 N in 1..=5
//! creg       := "creg c[" N "];"                 same N
//! statement  := gate1 | rx | cx | measure
//! gate1      := ("x"|"y"|"z"|"h"|"s"|"sdg"|"t"|"tdg"|"id") " q[" i "];"
//! rx         := "rx(" f64 ") q[" i "];"
//! cx         := "cx q[" control "],q[" target "];"
//! measure    := "measure q[" i "] -> c[" i "];"   same index on both sides
//! ```
//!
//! [`to_qasm`] writes exactly this layout: the four header lines, then gates
//! ordered by (slot, lowest qubit), then one `measure` per measured qubit in
//! ascending order. `rx` angles use Rust's shortest round-trip float format.
//!
//! Slots are not encoded. [`from_qasm`] schedules gates as soon as possible,
//! which keeps per-qubit order and CNOT alignment.

use std::fmt::Write;

use super::{Circuit, Gate, GateKind};
use crate::{Error, Result};

pub fn to_qasm(circuit: &Circuit) -> String {
    let n = circuit.n_qubits();
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{n}];");
    let _ = writeln!(out, "creg c[{n}];");
    for g in circuit.gates() {
        let _ = match (g.kind, g.control) {
            (GateKind::Cnot, Some(c)) => writeln!(out, "cx q[{c}],q[{}];", g.target),
            (GateKind::Rx(phi), _) => writeln!(out, "rx({phi:?}) q[{}];", g.target),
            (kind, _) => writeln!(out, "{} q[{}];", kind.qasm_name(), g.target),
        };
    }
    for q in circuit.measured_qubits() {
        let _ = writeln!(out, "measure q[{q}] -> c[{q}];");
    }
    out
}

pub fn from_qasm(text: &str) -> Result<Circuit> {
    let mut parser = Parser::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        parser.statement(line).map_err(|message| Error::Qasm {
            line: idx + 1,
            message,
        })?;
    }
    if !parser.seen_version {
        return Err(Error::Qasm {
            line: 1,
            message: "missing `OPENQASM 2.0;` header".into(),
        });
    }
    parser.circuit.ok_or(Error::Qasm {
        line: text.lines().count().max(1),
        message: "missing `qreg` declaration".into(),
    })
}

#[derive(Default)]
struct Parser {
    seen_version: bool,
    circuit: Option<Circuit>,
    frontier: Vec<usize>,
    measured: Vec<bool>,
}

type Step = std::result::Result<(), String>;

impl Parser {
    fn statement(&mut self, line: &str) -> Step {
        let body = line
            .strip_suffix(';')
            .ok_or_else(|| format!("expected `;` at end of `{line}`"))?
            .trim();
        let (head, rest) = match body.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) => (&body[..i], body[i..].trim()),
            None => (body, ""),
        };
        if !self.seen_version {
            return if head == "OPENQASM" && rest == "2.0" {
                self.seen_version = true;
                Ok(())
            } else {
                Err(format!("expected `OPENQASM 2.0;`, found `{head}`"))
            };
        }
        match head {
            "include" => Ok(()),
            "qreg" => self.qreg(rest),
            "creg" => self.creg(rest),
            "measure" => self.measure(rest),
            "cx" => {
                let (c, t) = rest
                    .split_once(',')
                    .ok_or_else(|| format!("`cx` needs two operands, got `{rest}`"))?;
                let (c, t) = (self.qubit(c)?, self.qubit(t)?);
                if c == t {
                    return Err(format!("`cx` control and target are both q[{c}]"));
                }
                self.place(Gate::cnot(c, t, 0))
            }
            "rx" => {
                let close = rest
                    .find(')')
                    .filter(|_| rest.starts_with('('))
                    .ok_or_else(|| format!("malformed `rx` parameter in `{rest}`"))?;
                let angle: f64 = rest[1..close]
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad `rx` angle `{}`", &rest[1..close]))?;
                let q = self.qubit(&rest[close + 1..])?;
                self.place(Gate::single(GateKind::Rx(angle), q, 0))
            }
            name => {
                let kind = match name {
                    "x" => GateKind::X,
                    "y" => GateKind::Y,
                    "z" => GateKind::Z,
                    "h" => GateKind::H,
                    "s" => GateKind::S,
                    "sdg" => GateKind::Sdg,
                    "t" => GateKind::T,
                    "tdg" => GateKind::Tdg,
                    "id" => GateKind::Id,
                    other => return Err(format!("unsupported statement `{other}`")),
                };
                let q = self.qubit(rest)?;
                self.place(Gate::single(kind, q, 0))
            }
        }
    }

    fn register_size(decl: &str, name: char) -> std::result::Result<usize, String> {
        let inner = decl
            .strip_prefix(name)
            .and_then(|s| s.trim().strip_prefix('['))
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| format!("malformed register `{decl}`"))?;
        inner
            .trim()
            .parse()
            .map_err(|_| format!("bad register size `{inner}`"))
    }

    fn qreg(&mut self, rest: &str) -> Step {
        if self.circuit.is_some() {
            return Err("only one quantum register is supported".into());
        }
        let n = Self::register_size(rest, 'q')?;
        let circuit = Circuit::new(n).map_err(|e| e.to_string())?;
        self.frontier = vec![0; n];
        self.measured = vec![false; n];
        self.circuit = Some(circuit);
        Ok(())
    }

    fn creg(&mut self, rest: &str) -> Step {
        let n = Self::register_size(rest, 'c')?;
        match &self.circuit {
            Some(c) if c.n_qubits() == n => Ok(()),
            Some(c) => Err(format!(
                "creg size {n} differs from qreg size {}",
                c.n_qubits()
            )),
            None => Err("`creg` before `qreg`".into()),
        }
    }

    fn index(operand: &str, reg: char) -> std::result::Result<usize, String> {
        operand
            .trim()
            .strip_prefix(reg)
            .and_then(|s| s.strip_prefix('['))
            .and_then(|s| s.strip_suffix(']'))
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| format!("malformed operand `{}`", operand.trim()))
    }

    fn qubit(&self, operand: &str) -> std::result::Result<usize, String> {
        let circuit = self.circuit.as_ref().ok_or("gate before `qreg`")?;
        let q = Self::index(operand, 'q')?;
        if q >= circuit.n_qubits() {
            return Err(format!("q[{q}] is outside the register"));
        }
        Ok(q)
    }

    fn place(&mut self, gate: Gate) -> Step {
        for q in gate.qubits() {
            if self.measured[q] {
                return Err(format!("{} on q[{q}] after its measurement", gate.kind));
            }
        }
        let slot = gate.qubits().map(|q| self.frontier[q]).max().unwrap_or(0);
        for q in gate.qubits() {
            self.frontier[q] = slot + 1;
        }
        let circuit = self.circuit.as_mut().ok_or("gate before `qreg`")?;
        circuit
            .add(Gate { slot, ..gate })
            .map_err(|e| e.to_string())
    }

    fn measure(&mut self, rest: &str) -> Step {
        let (q, c) = rest
            .split_once("->")
            .ok_or_else(|| format!("malformed measure `{rest}`"))?;
        let q = self.qubit(q)?;
        let c = Self::index(c, 'c')?;
        if q != c {
            return Err(format!("measure q[{q}] must write c[{q}], not c[{c}]"));
        }
        self.measured[q] = true;
        self.circuit
            .as_mut()
            .ok_or("measure before `qreg`")?
            .measure(q)
            .map_err(|e| e.to_string())
    }
}

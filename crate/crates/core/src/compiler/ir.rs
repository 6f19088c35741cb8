//! Circuit intermediate representation and its text format.
//!
//! One instruction per line; `#` starts a comment; the first non-comment
//! line is `QUBITS <n>`.
//!
//! ```text
//! QUBITS 3
//! P0 0        # prepare |0>
//! P+ 1        # prepare |+>
//! H 2
//! CZ 0 1      # any gate mnemonic: H X Y Z S SDG SX SXDG CZ CX SWAP
//! MZ 0        # measure in Z (qubit is retired)
//! MX 1        # measure in X
//! BARRIER
//! ```
//!
//! Qubits never mentioned by a `P0`/`P+` start in `|0⟩`. A preparation must
//! precede every other use of its qubit, and a measured qubit is retired.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{CliffordGate, GateKind};
use crate::oracle::SimOp;
use crate::tableau::Basis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction {
    Prep0(usize),
    PrepPlus(usize),
    Gate(CliffordGate),
    MeasureZ(usize),
    MeasureX(usize),
    Barrier,
}

impl Instruction {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Instruction::Prep0(q) | Instruction::PrepPlus(q) | Instruction::MeasureZ(q) | Instruction::MeasureX(q) => {
                vec![*q]
            }
            Instruction::Gate(g) => g.qubits().to_vec(),
            Instruction::Barrier => vec![],
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Instruction::MeasureZ(_) | Instruction::MeasureX(_))
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Prep0(q) => write!(f, "P0 {q}"),
            Instruction::PrepPlus(q) => write!(f, "P+ {q}"),
            Instruction::Gate(g) => write!(f, "{g}"),
            Instruction::MeasureZ(q) => write!(f, "MZ {q}"),
            Instruction::MeasureX(q) => write!(f, "MX {q}"),
            Instruction::Barrier => write!(f, "BARRIER"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub n_qubits: usize,
    pub instructions: Vec<Instruction>,
}

impl CircuitIR {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            instructions: Vec::new(),
        }
    }

    pub fn push(&mut self, ins: Instruction) -> &mut Self {
        self.instructions.push(ins);
        self
    }

    pub fn gate(&mut self, g: CliffordGate) -> &mut Self {
        self.push(Instruction::Gate(g))
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.gate(CliffordGate::h(q))
    }

    pub fn cnot(&mut self, c: usize, t: usize) -> &mut Self {
        self.gate(CliffordGate::cnot(c, t))
    }

    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(CliffordGate::cz(a, b))
    }

    pub fn one(&mut self, kind: GateKind, q: usize) -> &mut Self {
        self.gate(CliffordGate::one(kind, q))
    }

    /// Appends `other` with its qubit `i` renamed to `map[i]`.
    pub fn append_mapped(&mut self, other: &CircuitIR, map: &[usize]) -> &mut Self {
        for ins in &other.instructions {
            let m = |q: usize| map[q];
            self.instructions.push(match *ins {
                Instruction::Prep0(q) => Instruction::Prep0(m(q)),
                Instruction::PrepPlus(q) => Instruction::PrepPlus(m(q)),
                Instruction::Gate(g) => Instruction::Gate(g.remapped(m)),
                Instruction::MeasureZ(q) => Instruction::MeasureZ(m(q)),
                Instruction::MeasureX(q) => Instruction::MeasureX(m(q)),
                Instruction::Barrier => Instruction::Barrier,
            });
        }
        self
    }

    /// Number of two-qubit gates of the given kind.
    pub fn count_gates(&self, kind: GateKind) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Gate(g) if g.kind() == kind))
            .count()
    }

    /// Checks the IR invariants: targets in range, preparations only on
    /// untouched qubits, and nothing after a qubit's measurement.
    pub fn validate(&self) -> Result<()> {
        let mut touched = vec![false; self.n_qubits];
        let mut retired = vec![false; self.n_qubits];
        for (i, ins) in self.instructions.iter().enumerate() {
            for q in ins.qubits() {
                let bad = |why: &str| Err(Error::Usage(format!("instruction {i} ({ins}) {why} {q}")));
                if q >= self.n_qubits {
                    return bad("targets out-of-range qubit");
                }
                if retired[q] {
                    return bad("uses measured qubit");
                }
                if matches!(ins, Instruction::Prep0(_) | Instruction::PrepPlus(_)) && touched[q] {
                    return bad("prepares already used qubit");
                }
                touched[q] = true;
                retired[q] = ins.is_measurement();
            }
        }
        Ok(())
    }

    /// Flattens to simulator operations (barriers dropped).
    pub fn to_sim_ops(&self) -> Vec<SimOp> {
        let mut out = Vec::new();
        for ins in &self.instructions {
            match *ins {
                Instruction::Prep0(_) | Instruction::Barrier => {}
                Instruction::PrepPlus(q) => out.push(SimOp::Gate(CliffordGate::h(q))),
                Instruction::Gate(g) => out.push(SimOp::Gate(g)),
                Instruction::MeasureZ(q) => out.push(SimOp::Measure(q, Basis::Z)),
                Instruction::MeasureX(q) => out.push(SimOp::Measure(q, Basis::X)),
            }
        }
        out
    }
}

impl fmt::Display for CircuitIR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.n_qubits)?;
        for ins in &self.instructions {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

impl FromStr for CircuitIR {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut circ: Option<CircuitIR> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse(format!("line {}: {m}", ln + 1));
            let words: Vec<&str> = line.split_whitespace().collect();
            let nums = || -> Result<Vec<usize>> {
                words[1..]
                    .iter()
                    .map(|w| w.parse::<usize>().map_err(|_| err(format!("bad qubit index {w:?}"))))
                    .collect()
            };
            let Some(c) = circ.as_mut() else {
                match (words[0].to_ascii_uppercase().as_str(), words.len()) {
                    ("QUBITS", 2) => circ = Some(CircuitIR::new(nums()?[0])),
                    _ => return Err(err("expected QUBITS header".into())),
                }
                continue;
            };
            let one = |v: Vec<usize>| -> Result<usize> {
                match v[..] {
                    [q] => Ok(q),
                    _ => Err(err(format!("{} takes one qubit", words[0]))),
                }
            };
            let ins = match words[0].to_ascii_uppercase().as_str() {
                "P0" => Instruction::Prep0(one(nums()?)?),
                "P+" => Instruction::PrepPlus(one(nums()?)?),
                "MZ" => Instruction::MeasureZ(one(nums()?)?),
                "MX" => Instruction::MeasureX(one(nums()?)?),
                "BARRIER" if words.len() == 1 => Instruction::Barrier,
                other => {
                    let kind: GateKind = other.parse().map_err(|e: Error| err(e.to_string()))?;
                    Instruction::Gate(CliffordGate::new(kind, &nums()?).map_err(|e| err(e.to_string()))?)
                }
            };
            c.instructions.push(ins);
        }
        let c = circ.ok_or_else(|| Error::Parse("empty circuit".into()))?;
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let text = "QUBITS 3\nP0 0\nP+ 1\nH 2\nCZ 0 1\nCX 1 2\nS 0\nBARRIER\nMZ 0\nMX 1\n";
        let c: CircuitIR = text.parse().unwrap();
        assert_eq!(c.to_string(), text);
    }

    #[test]
    fn comments_and_aliases() {
        let c: CircuitIR = "# bell\nQUBITS 2\nh 0 # first\nCNOT 0 1\n".parse().unwrap();
        assert_eq!(c.count_gates(GateKind::Cnot), 1);
    }

    #[test]
    fn invalid_circuits_are_rejected() {
        assert!("H 0\n".parse::<CircuitIR>().is_err());
        assert!("QUBITS 2\nCZ 0 2\n".parse::<CircuitIR>().is_err());
        assert!("QUBITS 2\nCZ 1 1\n".parse::<CircuitIR>().is_err());
        assert!("QUBITS 1\nMZ 0\nH 0\n".parse::<CircuitIR>().is_err());
        assert!("QUBITS 1\nH 0\nP0 0\n".parse::<CircuitIR>().is_err());
        assert!("QUBITS 1\nFOO 0\n".parse::<CircuitIR>().is_err());
    }
}

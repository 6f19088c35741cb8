//! Fault-tolerant gadgets for the four-qubit codes and the [[8,3,2]] code.
//!
//! Gate lists below are the conventions this crate uses; the fault sweep in
//! [`faults`](super::faults) checks each of them.

use serde::{Deserialize, Serialize};

use crate::codes::builtin;
use crate::pauli::PauliString;

use super::ir::{CircuitIR, Instruction};

/// A circuit fragment on local qubits `0..circuit.n_qubits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub name: String,
    pub circuit: CircuitIR,
    /// Block qubits the fragment consumes (empty for preparations).
    pub data_in: Vec<usize>,
    /// Block qubits afterwards, in code order.
    pub data_out: Vec<usize>,
    /// Measured check qubits; each must read 0.
    pub flags: Vec<usize>,
    /// Stabilizers (over `data_out`) that residual errors are reduced by:
    /// the full state stabilizer for preparations, the code's for checks.
    pub reduce_by: Vec<PauliString>,
    /// Code stabilizers of the output block. A residual that anticommutes
    /// with one of them is caught by the next check.
    pub checks: Vec<PauliString>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorDetectVariant {
    Flagged,
    Refresh,
}

fn code_checks(name: &str) -> Vec<PauliString> {
    builtin(name).stabilizers.clone()
}

fn paulis(list: &[&str]) -> Vec<PauliString> {
    list.iter().map(|s| s.parse().expect("valid Pauli literal")).collect()
}

/// Encoded `|00⟩ = (|0000⟩ + |1111⟩)/√2` of the [[4,2,2]] code with one
/// verification ancilla (qubit 4) checking `Z₁Z₂`.
pub fn gadget_ft_prep_00() -> Gadget {
    let mut c = CircuitIR::new(5);
    for q in 0..5 {
        c.push(Instruction::Prep0(q));
    }
    c.h(0).cnot(0, 1).cnot(0, 2).cnot(2, 3).cnot(1, 4).cnot(2, 4);
    c.push(Instruction::MeasureZ(4));
    Gadget {
        name: "ft_prep_00".into(),
        circuit: c,
        data_in: vec![],
        data_out: vec![0, 1, 2, 3],
        flags: vec![4],
        reduce_by: paulis(&["XXXX", "ZZII", "IZZI", "IIZZ"]),
        checks: code_checks("4-2-2"),
    }
}

/// Logical Bell pair `(|00⟩ + |11⟩)/√2` of one [[4,2,2]] block, prepared
/// as physical Bell pairs on qubits (1,2) and (0,3). Not fault-tolerant on
/// its own; used only for the first block of the encoded cat.
pub fn gadget_logical_bell() -> Gadget {
    let mut c = CircuitIR::new(4);
    for q in 0..4 {
        c.push(Instruction::Prep0(q));
    }
    c.h(1).cnot(1, 2).h(0).cnot(0, 3);
    Gadget {
        name: "logical_bell".into(),
        circuit: c,
        data_in: vec![],
        data_out: vec![0, 1, 2, 3],
        flags: vec![],
        reduce_by: paulis(&["XIIX", "ZIIZ", "IXXI", "IZZI"]),
        checks: code_checks("4-2-2"),
    }
}

/// `((|01⟩ + |10⟩)/√2)^{⊗2}`: encoded `|+⟩` of the [[4,1,2]] code with
/// gauge `Z̄₂ = -1`.
pub fn gadget_prep_plus1() -> Gadget {
    let mut c = CircuitIR::new(4);
    for q in 0..4 {
        c.push(Instruction::Prep0(q));
    }
    c.h(0).cnot(0, 1).one(crate::GateKind::X, 1);
    c.h(2).cnot(2, 3).one(crate::GateKind::X, 3);
    Gadget {
        name: "prep_plus1".into(),
        circuit: c,
        data_in: vec![],
        data_out: vec![0, 1, 2, 3],
        flags: vec![],
        reduce_by: paulis(&["XXII", "ZZII", "IIXX", "IIZZ"]),
        checks: code_checks("4-2-2"),
    }
}

/// Simultaneous `ZZZZ` and `XXXX` measurement of a [[4,2,2]] block on
/// qubits 0..4. Ancilla 4 (`|0⟩`) collects `ZZZZ`, ancilla 5 (`|+⟩`) collects
/// `XXXX`. The interleaving is chosen so that no single fault leaves an
/// undetectable weight-2 error unflagged.
///
/// The refresh variant reverses the last two CNOTs so that the ancillas take
/// the place of data qubits 2 and 3, which are measured instead. The output
/// block is then `[0, 1, 4, 5]`.
pub fn gadget_error_detect(variant: ErrorDetectVariant) -> Gadget {
    let (a, b) = (4, 5);
    let mut c = CircuitIR::new(6);
    c.push(Instruction::Prep0(a));
    c.push(Instruction::PrepPlus(b));
    c.cnot(0, a).cnot(b, 0).cnot(b, 1).cnot(1, a).cnot(3, a).cnot(b, 2);
    let (data_out, flags) = match variant {
        ErrorDetectVariant::Flagged => {
            c.cnot(2, a).cnot(b, 3);
            c.push(Instruction::MeasureZ(a));
            c.push(Instruction::MeasureX(b));
            (vec![0, 1, 2, 3], vec![a, b])
        }
        ErrorDetectVariant::Refresh => {
            c.cnot(a, 2).cnot(3, b);
            c.push(Instruction::MeasureZ(2));
            c.push(Instruction::MeasureX(3));
            (vec![0, 1, a, b], vec![2, 3])
        }
    };
    Gadget {
        name: format!("error_detect_{variant:?}").to_lowercase(),
        circuit: c,
        data_in: vec![0, 1, 2, 3],
        data_out,
        flags,
        reduce_by: paulis(&["XXXX", "ZZZZ"]),
        checks: code_checks("4-2-2"),
    }
}

/// Measures `ZZZZ` with a single unflagged ancilla. Not fault-tolerant: a
/// `Z` fault on the ancilla spreads to two data qubits.
pub fn gadget_bare_parity() -> Gadget {
    let mut c = CircuitIR::new(5);
    c.push(Instruction::Prep0(4));
    for q in 0..4 {
        c.cnot(q, 4);
    }
    c.push(Instruction::MeasureZ(4));
    Gadget {
        name: "bare_parity".into(),
        circuit: c,
        data_in: vec![0, 1, 2, 3],
        data_out: vec![0, 1, 2, 3],
        flags: vec![4],
        reduce_by: paulis(&["XXXX", "ZZZZ"]),
        checks: code_checks("4-2-2"),
    }
}

/// Encoded `|+++⟩` of the [[8,3,2]] code (12 CNOTs): the uniform
/// superposition of affine functions on the cube. Qubit `v` sits on the
/// vertex with coordinates given by its bits; the values at vertices
/// 0, 1, 2, 4 are free and the rest are parities of them.
///
/// The CNOTs commute, so their order only shapes how faults spread. This
/// one is chosen so that every weight-2 error a single fault can leave is
/// seen by the face check of [`gadget_ft_prep_832`].
pub fn gadget_prep_832() -> Gadget {
    let mut c = CircuitIR::new(8);
    for q in 0..8 {
        c.push(Instruction::Prep0(q));
    }
    for q in [0, 1, 2, 4] {
        c.h(q);
    }
    for (s, t) in [(0, 5), (1, 5), (2, 7), (4, 5), (4, 6), (2, 6), (2, 3), (1, 3), (4, 7), (0, 6), (0, 3), (1, 7)] {
        c.cnot(s, t);
    }
    Gadget {
        name: "prep_832".into(),
        circuit: c,
        data_in: vec![],
        data_out: (0..8).collect(),
        flags: vec![],
        reduce_by: paulis(&[
            "XXXXXXXX", "ZIZIZIZI", "ZZIIZZII", "ZZZZIIII", "ZZZZZZZZ", "XIXIXIXI", "XXIIXXII", "XXXXIIII",
        ]),
        checks: code_checks("8-3-2"),
    }
}

/// [`gadget_prep_832`] followed by a refresh-style check of `ZZZZ` and
/// `XXXX` on the face `{1, 3, 4, 6}`, with fresh qubits 8 and 9 replacing
/// qubits 6 and 1.
///
/// No single fault leaves an unflagged error of weight ≥ 2 in the basis
/// the block is read out in. Mixed residuals like `X_a Z_b` remain, which
/// is harmless for transversal single-basis readout.
pub fn gadget_ft_prep_832() -> Gadget {
    let prep = gadget_prep_832();
    let ed = gadget_error_detect(ErrorDetectVariant::Refresh);
    let mut c = CircuitIR::new(10);
    c.append_mapped(&prep.circuit, &(0..8).collect::<Vec<_>>());
    // ED locals 0..4 = face qubits, 4 → 8, 5 → 9
    c.append_mapped(&ed.circuit, &[4, 3, 6, 1, 8, 9]);
    Gadget {
        name: "ft_prep_832".into(),
        circuit: c,
        data_in: vec![],
        data_out: vec![0, 9, 2, 3, 4, 5, 8, 7],
        flags: vec![6, 1],
        reduce_by: prep.reduce_by,
        checks: prep.checks,
    }
}

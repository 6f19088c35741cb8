//! Lowering to the native instruction set: `P0`, one-qubit gates, `CZ`, `MZ`.

use crate::error::Result;
use crate::gate::{CliffordGate, GateKind};

use super::ir::{CircuitIR, Instruction};

/// A lowered circuit plus the final position of each input qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lowered {
    pub circuit: CircuitIR,
    /// `atom_of[q]` is the atom that holds input qubit `q` at the end.
    pub atom_of: Vec<usize>,
}

/// Rewrites `CX` as `H·CZ·H`, `P+` as `P0·H`, `MX` as `H·MZ`, turns `SWAP`
/// into a free relabeling, and cancels adjacent Hadamard pairs (not across
/// barriers).
pub fn lower(circ: &CircuitIR) -> Result<Lowered> {
    circ.validate()?;
    let mut atom_of: Vec<usize> = (0..circ.n_qubits).collect();
    let mut out: Vec<Option<Instruction>> = Vec::new();
    // index in `out` of an H that is still the latest op on that atom
    let mut pending_h: Vec<Option<usize>> = vec![None; circ.n_qubits];
    let push = |out: &mut Vec<Option<Instruction>>, pending_h: &mut Vec<Option<usize>>, ins: Instruction| {
        if let Instruction::Gate(g) = ins {
            if g.kind() == GateKind::H {
                let q = g.qubits()[0];
                if let Some(i) = pending_h[q].take() {
                    out[i] = None;
                    return;
                }
                pending_h[q] = Some(out.len());
                out.push(Some(ins));
                return;
            }
        }
        if ins == Instruction::Barrier {
            pending_h.iter_mut().for_each(|p| *p = None);
        }
        for q in ins.qubits() {
            pending_h[q] = None;
        }
        out.push(Some(ins));
    };
    for ins in &circ.instructions {
        let a = |q: usize| atom_of[q];
        match *ins {
            Instruction::Prep0(q) => push(&mut out, &mut pending_h, Instruction::Prep0(a(q))),
            Instruction::PrepPlus(q) => {
                push(&mut out, &mut pending_h, Instruction::Prep0(a(q)));
                push(&mut out, &mut pending_h, Instruction::Gate(CliffordGate::h(a(q))));
            }
            Instruction::MeasureZ(q) => push(&mut out, &mut pending_h, Instruction::MeasureZ(a(q))),
            Instruction::MeasureX(q) => {
                push(&mut out, &mut pending_h, Instruction::Gate(CliffordGate::h(a(q))));
                push(&mut out, &mut pending_h, Instruction::MeasureZ(a(q)));
            }
            Instruction::Barrier => push(&mut out, &mut pending_h, Instruction::Barrier),
            Instruction::Gate(g) => match g.kind() {
                GateKind::Swap => {
                    let [x, y] = [g.qubits()[0], g.qubits()[1]];
                    atom_of.swap(x, y);
                }
                GateKind::Cnot => {
                    let (c, t) = (a(g.qubits()[0]), a(g.qubits()[1]));
                    push(&mut out, &mut pending_h, Instruction::Gate(CliffordGate::h(t)));
                    push(&mut out, &mut pending_h, Instruction::Gate(CliffordGate::cz(c, t)));
                    push(&mut out, &mut pending_h, Instruction::Gate(CliffordGate::h(t)));
                }
                _ => push(&mut out, &mut pending_h, Instruction::Gate(g.remapped(a))),
            },
        }
    }
    let circuit = CircuitIR {
        n_qubits: circ.n_qubits,
        instructions: out.into_iter().flatten().collect(),
    };
    Ok(Lowered { circuit, atom_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::reference_distribution;

    #[test]
    fn hadamards_between_cnots_on_a_common_target_cancel() {
        let c: CircuitIR = "QUBITS 3\nCX 0 2\nCX 1 2\n".parse().unwrap();
        let l = lower(&c).unwrap();
        assert_eq!(l.circuit.to_string(), "QUBITS 3\nH 2\nCZ 0 2\nCZ 1 2\nH 2\n");
    }

    #[test]
    fn swaps_become_relabels() {
        let c: CircuitIR = "QUBITS 2\nX 0\nSWAP 0 1\nMZ 1\n".parse().unwrap();
        let l = lower(&c).unwrap();
        assert_eq!(l.circuit.to_string(), "QUBITS 2\nX 0\nMZ 0\n");
        assert_eq!(l.atom_of, [1, 0]);
    }

    #[test]
    fn lowering_preserves_outcomes() {
        let c: CircuitIR = "QUBITS 3\nP+ 0\nCX 0 1\nSWAP 1 2\nCX 0 2\nH 1\nH 1\nMX 0\nMZ 1\nMZ 2\n"
            .parse()
            .unwrap();
        let l = lower(&c).unwrap();
        for ins in &l.circuit.instructions {
            if let Instruction::Gate(g) = ins {
                assert!(matches!(g.kind(), GateKind::Cz) || !g.kind().is_two_qubit());
            }
        }
        let want = reference_distribution(3, &c.to_sim_ops()).unwrap();
        let got = reference_distribution(3, &l.circuit.to_sim_ops()).unwrap();
        assert_eq!(want.len(), got.len());
        for (k, p) in &want {
            assert!((got[k] - p).abs() < 1e-12);
        }
    }
}

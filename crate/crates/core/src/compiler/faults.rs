//! Exhaustive single-fault injection for gadgets.
//!
//! A fault is one non-identity Pauli on the support of a gate or
//! preparation, inserted right after it. The fault is pushed through the
//! rest of the gadget by conjugation; a flag fires when the propagated
//! Pauli anticommutes with that flag's measurement. An unflagged fault
//! leaves a residual error on the output block, reduced to minimum weight
//! by multiplying with the gadget's stabilizers. A residual of weight ≥ 2
//! is harmful only if it also commutes with every code check, since
//! otherwise the next round of detection sees it.

use crate::gate::CliffordGate;
use crate::pauli::{Pauli, PauliString};
use crate::tableau::{Basis, StabilizerTableau};

use super::gadgets::Gadget;
use super::ir::Instruction;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaultSweepReport {
    pub faults: usize,
    pub flagged: usize,
    /// Unflagged faults whose minimum-weight residual is 0 or 1.
    pub benign: usize,
    /// Unflagged faults leaving a detectable residual of weight ≥ 2.
    pub detectable: usize,
    /// Unflagged faults leaving an undetectable residual of weight ≥ 2, as
    /// `(instruction index, fault, residual)`.
    pub undetected_high_weight: Vec<(usize, String, String)>,
    /// The subset of `undetected_high_weight` that still has weight ≥ 2
    /// when the block is read out in a single basis (Z sees the X part,
    /// X sees the Z part).
    pub undetected_in_one_basis: usize,
}

impl FaultSweepReport {
    pub fn passed(&self) -> bool {
        self.undetected_high_weight.is_empty()
    }

    /// Fault tolerance for blocks that are only ever measured
    /// transversally in one basis.
    pub fn passed_per_basis(&self) -> bool {
        self.undetected_in_one_basis == 0
    }
}

fn all_paulis(n: usize, support: &[usize]) -> Vec<PauliString> {
    let count = 4usize.pow(support.len() as u32);
    (1..count)
        .map(|mut code| {
            let mut p = PauliString::identity(n);
            for &q in support {
                p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][code % 4]);
                code /= 4;
            }
            p
        })
        .collect()
}

/// Minimum weight of `e · s` over the group generated by `gens`.
pub fn reduced_weight(e: &PauliString, gens: &[PauliString]) -> usize {
    min_over_group(e, gens, PauliString::weight)
}

/// Minimum number of outcomes `e · s` flips when every qubit is read in
/// `basis`, over the group generated by `gens`.
pub fn reduced_weight_in(e: &PauliString, gens: &[PauliString], basis: Basis) -> usize {
    min_over_group(e, gens, |p| {
        (0..p.n_qubits())
            .filter(|&q| match basis {
                Basis::Z => p.x_bit(q),
                Basis::X => p.z_bit(q),
                Basis::Y => p.x_bit(q) != p.z_bit(q),
            })
            .count()
    })
}

fn min_over_group(e: &PauliString, gens: &[PauliString], w: impl Fn(&PauliString) -> usize) -> usize {
    let mut best = w(e);
    for mask in 1u32..1 << gens.len() {
        let mut p = e.clone();
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                p.mul_assign_right(g);
            }
        }
        best = best.min(w(&p));
    }
    best
}

/// Injects every single fault and classifies the outcome.
pub fn fault_sweep(g: &Gadget) -> FaultSweepReport {
    let n = g.circuit.n_qubits;
    let ins = &g.circuit.instructions;
    let mut report = FaultSweepReport::default();
    for (loc, at) in ins.iter().enumerate() {
        let support = match at {
            Instruction::Gate(gate) => gate.qubits().to_vec(),
            Instruction::Prep0(q) | Instruction::PrepPlus(q) => vec![*q],
            _ => continue,
        };
        for fault in all_paulis(n, &support) {
            report.faults += 1;
            let mut p = fault.clone();
            let mut flagged = false;
            for later in &ins[loc + 1..] {
                match *later {
                    Instruction::Gate(gate) => gate.conjugate(&mut p),
                    Instruction::MeasureZ(q) | Instruction::MeasureX(q) => {
                        let flips = match later {
                            Instruction::MeasureZ(_) => p.x_bit(q),
                            _ => p.z_bit(q),
                        };
                        if flips && g.flags.contains(&q) {
                            flagged = true;
                        }
                        p.set(q, Pauli::I);
                    }
                    Instruction::Prep0(_) | Instruction::PrepPlus(_) | Instruction::Barrier => {}
                }
            }
            if flagged {
                report.flagged += 1;
                continue;
            }
            let residual = p.restrict(&g.data_out);
            if reduced_weight(&residual, &g.reduce_by) <= 1 {
                report.benign += 1;
            } else if g.checks.iter().any(|c| !c.commutes_with(&residual)) {
                report.detectable += 1;
            } else {
                if [Basis::X, Basis::Z].iter().any(|&b| reduced_weight_in(&residual, &g.reduce_by, b) >= 2) {
                    report.undetected_in_one_basis += 1;
                }
                report.undetected_high_weight.push((loc, fault.to_string(), residual.to_string()));
            }
        }
    }
    report
}

/// Runs the gadget without faults after `input` (gates on the gadget's
/// qubits preparing a state of its input block) and returns whether every
/// flag reads 0 deterministically and every operator in `expect` (over
/// `data_out`) has value `+1`.
pub fn noiseless_check(g: &Gadget, input: &[CliffordGate], expect: &[PauliString]) -> bool {
    let n = g.circuit.n_qubits;
    let mut t = StabilizerTableau::new(n);
    for gate in input {
        if t.apply_gate(gate).is_err() {
            return false;
        }
    }
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    for ins in &g.circuit.instructions {
        let ok = match *ins {
            Instruction::Prep0(_) | Instruction::Barrier => true,
            Instruction::PrepPlus(q) => t.apply_gate(&CliffordGate::h(q)).is_ok(),
            Instruction::Gate(gate) => t.apply_gate(&gate).is_ok(),
            Instruction::MeasureZ(q) | Instruction::MeasureX(q) => {
                let b = if matches!(ins, Instruction::MeasureZ(_)) { Basis::Z } else { Basis::X };
                match t.measure(q, b, &mut rng) {
                    Ok(m) => !g.flags.contains(&q) || (m.deterministic && !m.outcome),
                    Err(_) => false,
                }
            }
        };
        if !ok {
            return false;
        }
    }
    expect
        .iter()
        .all(|e| t.peek_pauli(&e.embed(n, &g.data_out)) == Some(false))
}

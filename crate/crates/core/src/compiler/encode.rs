//! Block-level logical programs and their encoding into physical circuits.
//!
//! Logical gates on these codes act on whole blocks (a transversal CNOT
//! moves both logicals of a block at once), so the logical program is a
//! list of block operations rather than a gate-level circuit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{builtin, decode_block, logical_gate_mapping, CodeBasis, CodeDefinition, DecodeOutcome, LogicalGate};
use crate::error::{Error, Result};
use crate::gate::{CliffordGate, GateKind};
use crate::pauli::Pauli;
use crate::tableau::{Basis, StabilizerTableau};

use super::gadgets::{
    gadget_error_detect, gadget_ft_prep_00, gadget_ft_prep_832, gadget_logical_bell, gadget_prep_832,
    gadget_prep_plus1, ErrorDetectVariant, Gadget,
};
use super::ir::{CircuitIR, Instruction};

/// How a block is initialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockPrep {
    /// `|00⟩` of [[4,2,2]], verified by one ancilla.
    Zero,
    /// `|++⟩` of [[4,2,2]]: `Zero` followed by transversal H.
    PlusPlus,
    /// Logical Bell pair in one [[4,2,2]] block (no verification).
    Bell,
    /// `|+⟩` of [[4,1,2]] with gauge `Z̄₂ = -1`.
    PlusOne,
    /// `|+++⟩` of [[8,3,2]], optionally verified on one face.
    Plus832 { ft: bool },
}

impl BlockPrep {
    pub fn code(self) -> &'static str {
        match self {
            BlockPrep::Zero | BlockPrep::PlusPlus | BlockPrep::Bell => "4-2-2",
            BlockPrep::PlusOne => "4-1-2",
            BlockPrep::Plus832 { .. } => "8-3-2",
        }
    }

    fn gadget(self) -> Gadget {
        match self {
            BlockPrep::Zero | BlockPrep::PlusPlus => gadget_ft_prep_00(),
            BlockPrep::Bell => gadget_logical_bell(),
            BlockPrep::PlusOne => gadget_prep_plus1(),
            BlockPrep::Plus832 { ft: true } => gadget_ft_prep_832(),
            BlockPrep::Plus832 { ft: false } => gadget_prep_832(),
        }
    }

    /// Gates on the block's logical qubits that produce the same state
    /// from `|0…0⟩`.
    fn logical_gates(self) -> Vec<CliffordGate> {
        match self {
            BlockPrep::Zero => vec![],
            BlockPrep::PlusPlus => vec![CliffordGate::h(0), CliffordGate::h(1)],
            BlockPrep::Bell => vec![CliffordGate::h(0), CliffordGate::cnot(0, 1)],
            BlockPrep::PlusOne => vec![CliffordGate::h(0)],
            BlockPrep::Plus832 { .. } => (0..3).map(CliffordGate::h).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalOp {
    Prep { block: usize, prep: BlockPrep },
    /// `other` is the second block of a between-block gate.
    Gate { gate: LogicalGate, block: usize, other: Option<usize> },
    /// A logical Pauli on one logical qubit, applied through its
    /// registry representative.
    Pauli { block: usize, logical: usize, pauli: Pauli },
    ErrorDetect { block: usize, variant: ErrorDetectVariant },
    Measure { block: usize, basis: CodeBasis },
    Barrier,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalProgram {
    /// Code name of each block.
    pub blocks: Vec<String>,
    pub ops: Vec<LogicalOp>,
}

impl LogicalProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a block and its preparation; returns the block index.
    pub fn prep(&mut self, prep: BlockPrep) -> usize {
        let block = self.blocks.len();
        self.blocks.push(prep.code().to_string());
        self.ops.push(LogicalOp::Prep { block, prep });
        block
    }

    pub fn gate(&mut self, gate: LogicalGate, block: usize) -> &mut Self {
        self.ops.push(LogicalOp::Gate { gate, block, other: None });
        self
    }

    pub fn between(&mut self, gate: LogicalGate, a: usize, b: usize) -> &mut Self {
        self.ops.push(LogicalOp::Gate { gate, block: a, other: Some(b) });
        self
    }

    pub fn pauli(&mut self, block: usize, logical: usize, pauli: Pauli) -> &mut Self {
        self.ops.push(LogicalOp::Pauli { block, logical, pauli });
        self
    }

    pub fn error_detect(&mut self, block: usize, variant: ErrorDetectVariant) -> &mut Self {
        self.ops.push(LogicalOp::ErrorDetect { block, variant });
        self
    }

    pub fn measure(&mut self, block: usize, basis: CodeBasis) -> &mut Self {
        self.ops.push(LogicalOp::Measure { block, basis });
        self
    }

    fn code(&self, block: usize) -> Result<&'static CodeDefinition> {
        let name = self.blocks.get(block).ok_or_else(|| Error::Compile(format!("no block {block}")))?;
        crate::codes::Registry::builtin().get(name)
    }

    /// Index of each block's first logical qubit, plus the total.
    pub fn logical_offsets(&self) -> Result<(Vec<usize>, usize)> {
        let mut offs = Vec::with_capacity(self.blocks.len());
        let mut total = 0;
        for b in 0..self.blocks.len() {
            offs.push(total);
            total += self.code(b)?.k();
        }
        Ok((offs, total))
    }
}

/// A block's physical qubits (circuit indices, in code order) at the end
/// of the circuit, and how it was read out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedBlock {
    pub code: String,
    pub qubits: Vec<usize>,
    pub basis: Option<CodeBasis>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedCircuit {
    pub circuit: CircuitIR,
    pub blocks: Vec<EncodedBlock>,
    /// Circuit qubits whose measurement must read 0 for the trial to count.
    pub flags: Vec<usize>,
    /// Flag qubits grouped per block, for copy-wise rejection.
    pub block_flags: Vec<Vec<usize>>,
}

/// Encodes a block-level logical program. Qubits are allocated in program
/// order: each preparation takes its gadget's qubits and each error
/// detection takes two fresh ancillas.
pub fn encode_circuit(prog: &LogicalProgram) -> Result<EncodedCircuit> {
    let mut ins: Vec<Instruction> = Vec::new();
    let mut next = 0usize;
    let mut blocks: Vec<Option<EncodedBlock>> = vec![None; prog.blocks.len()];
    let mut flags = Vec::new();
    let mut block_flags = vec![Vec::new(); prog.blocks.len()];
    let place = |ins: &mut Vec<Instruction>, g: &Gadget, map: &[usize]| {
        let mut c = CircuitIR::new(usize::MAX);
        c.append_mapped(&g.circuit, map);
        ins.extend(c.instructions);
    };
    let live = |blocks: &mut Vec<Option<EncodedBlock>>, b: usize| -> Result<()> {
        match blocks.get(b) {
            Some(Some(blk)) if blk.basis.is_none() => Ok(()),
            Some(Some(_)) => Err(Error::Compile(format!("block {b} used after measurement"))),
            _ => Err(Error::Compile(format!("block {b} used before preparation"))),
        }
    };
    for op in &prog.ops {
        match *op {
            LogicalOp::Prep { block, prep } => {
                if blocks.get(block).map_or(true, |b| b.is_some()) || prog.blocks[block] != prep.code() {
                    return Err(Error::Compile(format!("bad preparation of block {block}")));
                }
                let g = prep.gadget();
                let map: Vec<usize> = (next..next + g.circuit.n_qubits).collect();
                next += g.circuit.n_qubits;
                place(&mut ins, &g, &map);
                if prep == BlockPrep::PlusPlus {
                    ins.extend(g.data_out.iter().map(|&q| Instruction::Gate(CliffordGate::h(map[q]))));
                }
                let f: Vec<usize> = g.flags.iter().map(|&q| map[q]).collect();
                flags.extend(&f);
                block_flags[block].extend(f);
                blocks[block] = Some(EncodedBlock {
                    code: prep.code().into(),
                    qubits: g.data_out.iter().map(|&q| map[q]).collect(),
                    basis: None,
                });
            }
            LogicalOp::Gate { gate, block, other } => {
                live(&mut blocks, block)?;
                let code = prog.code(block)?;
                let mut qs = blocks[block].as_ref().unwrap().qubits.clone();
                if gate.is_between_blocks() {
                    let o = other.ok_or_else(|| Error::Compile(format!("{gate:?} needs two blocks")))?;
                    live(&mut blocks, o)?;
                    if o == block || prog.blocks[o] != prog.blocks[block] {
                        return Err(Error::Compile(format!("{gate:?} between incompatible blocks")));
                    }
                    qs.extend(&blocks[o].as_ref().unwrap().qubits);
                } else if other.is_some() || code.k() < 2 {
                    return Err(Error::Compile(format!("{gate:?} needs one two-logical block")));
                }
                let phys = logical_gate_mapping(code, gate).map_err(|e| Error::Compile(e.to_string()))?;
                ins.extend(phys.iter().map(|g| Instruction::Gate(g.remapped(|q| qs[q]))));
            }
            LogicalOp::Pauli { block, logical, pauli } => {
                live(&mut blocks, block)?;
                let code = prog.code(block)?;
                if logical >= code.k() {
                    return Err(Error::Compile(format!("block {block} has no logical {logical}")));
                }
                let qs = &blocks[block].as_ref().unwrap().qubits;
                let mut rep = crate::pauli::PauliString::identity(code.n);
                if matches!(pauli, Pauli::X | Pauli::Y) {
                    rep.mul_assign_right(&code.logical_x[logical]);
                }
                if matches!(pauli, Pauli::Z | Pauli::Y) {
                    rep.mul_assign_right(&code.logical_z[logical]);
                }
                for q in 0..code.n {
                    let kind = match rep.get(q) {
                        Pauli::I => continue,
                        Pauli::X => GateKind::X,
                        Pauli::Y => GateKind::Y,
                        Pauli::Z => GateKind::Z,
                    };
                    ins.push(Instruction::Gate(CliffordGate::one(kind, qs[q])));
                }
            }
            LogicalOp::ErrorDetect { block, variant } => {
                live(&mut blocks, block)?;
                if prog.blocks[block] != "4-2-2" && prog.blocks[block] != "4-1-2" {
                    return Err(Error::Compile(format!("no error detection gadget for code {}", prog.blocks[block])));
                }
                let g = gadget_error_detect(variant);
                let blk = blocks[block].as_mut().unwrap();
                let mut map = blk.qubits.clone();
                map.extend([next, next + 1]);
                next += 2;
                place(&mut ins, &g, &map);
                let f: Vec<usize> = g.flags.iter().map(|&q| map[q]).collect();
                flags.extend(&f);
                block_flags[block].extend(f);
                blk.qubits = g.data_out.iter().map(|&q| map[q]).collect();
            }
            LogicalOp::Measure { block, basis } => {
                live(&mut blocks, block)?;
                let blk = blocks[block].as_mut().unwrap();
                for &q in &blk.qubits {
                    ins.push(match basis {
                        CodeBasis::X => Instruction::MeasureX(q),
                        CodeBasis::Z => Instruction::MeasureZ(q),
                    });
                }
                blk.basis = Some(basis);
            }
            LogicalOp::Barrier => ins.push(Instruction::Barrier),
        }
    }
    let blocks = blocks
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::Compile(format!("block {i} never prepared"))))
        .collect::<Result<Vec<_>>>()?;
    let circuit = CircuitIR {
        n_qubits: next,
        instructions: ins,
    };
    circuit.validate().map_err(|e| Error::Compile(e.to_string()))?;
    Ok(EncodedCircuit {
        circuit,
        blocks,
        flags,
        block_flags,
    })
}

/// Result of reading an encoded circuit's measurement record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalReadout {
    pub flagged: bool,
    pub blocks: Vec<DecodeOutcome>,
}

impl EncodedCircuit {
    /// Decodes measured blocks; `bit(q)` is the measured value of circuit
    /// qubit `q` (`None` if lost). Unmeasured blocks decode to an empty
    /// `Decoded`.
    pub fn read(&self, bit: impl Fn(usize) -> Option<bool>) -> Result<LogicalReadout> {
        let flagged = self.flags.iter().any(|&q| bit(q) != Some(false));
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b.basis {
                None => Ok(DecodeOutcome::Decoded(vec![])),
                Some(basis) => {
                    let bits: Vec<Option<bool>> = b.qubits.iter().map(|&q| bit(q)).collect();
                    decode_block(builtin(&b.code), basis, &bits)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LogicalReadout { flagged, blocks })
    }
}

/// Gates on logical qubits for `gate`, with the second block's logicals
/// numbered from `k`.
fn logical_action(gate: LogicalGate, k: usize) -> Result<Vec<CliffordGate>> {
    if k == 2 {
        return Ok(gate.logical_action());
    }
    match gate {
        LogicalGate::TransversalCnot => Ok((0..k).map(|i| CliffordGate::cnot(i, i + k)).collect()),
        _ => Err(Error::Compile(format!("no logical action of {gate:?} for {k} logical qubits"))),
    }
}

/// Applies one non-measurement op to a logical tableau.
fn apply_logical(prog: &LogicalProgram, offs: &[usize], t: &mut StabilizerTableau, op: &LogicalOp) -> Result<()> {
    match *op {
        LogicalOp::Prep { block, prep } => {
            for g in prep.logical_gates() {
                t.apply_gate(&g.remapped(|q| offs[block] + q))?;
            }
        }
        LogicalOp::Gate { gate, block, other } => {
            let k = prog.code(block)?.k();
            let map = |q: usize| if q < k { offs[block] + q } else { offs[other.unwrap_or(block)] + q - k };
            for g in logical_action(gate, k)? {
                t.apply_gate(&g.remapped(map))?;
            }
        }
        LogicalOp::Pauli { block, logical, pauli } => t.apply_single_pauli(offs[block] + logical, pauli),
        LogicalOp::ErrorDetect { .. } | LogicalOp::Barrier | LogicalOp::Measure { .. } => {}
    }
    Ok(())
}

/// The logical state with every measurement deferred to the end, plus the
/// basis each logical qubit is measured in. Deferral is exact because a
/// measured block is never touched again.
pub fn logical_final_state(prog: &LogicalProgram) -> Result<(StabilizerTableau, Vec<Option<Basis>>)> {
    let (offs, total) = prog.logical_offsets()?;
    let mut t = StabilizerTableau::new(total.max(1));
    let mut bases = vec![None; total];
    for op in &prog.ops {
        apply_logical(prog, &offs, &mut t, op)?;
        if let LogicalOp::Measure { block, basis } = *op {
            for i in 0..prog.code(block)?.k() {
                bases[offs[block] + i] = Some(match basis {
                    CodeBasis::X => Basis::X,
                    CodeBasis::Z => Basis::Z,
                });
            }
        }
    }
    Ok((t, bases))
}

/// Simulates the program at the logical level. Measurement outcomes are
/// taken from `forced` when given (one entry per measured logical, in
/// program order); returns the outcomes and, for each, whether it was
/// deterministic.
pub fn simulate_logical<R: Rng + ?Sized>(
    prog: &LogicalProgram,
    forced: Option<&[bool]>,
    rng: &mut R,
) -> Result<Vec<(bool, bool)>> {
    let (offs, total) = prog.logical_offsets()?;
    let mut t = StabilizerTableau::new(total.max(1));
    let mut out = Vec::new();
    for op in &prog.ops {
        apply_logical(prog, &offs, &mut t, op)?;
        if let LogicalOp::Measure { block, basis } = *op {
            let b = match basis {
                CodeBasis::X => Basis::X,
                CodeBasis::Z => Basis::Z,
            };
            for i in 0..prog.code(block)?.k() {
                let m = match forced {
                    Some(f) => {
                        let want = *f.get(out.len()).ok_or_else(|| Error::Usage("too few forced outcomes".into()))?;
                        t.measure_forced(offs[block] + i, b, || want)?
                    }
                    None => t.measure(offs[block] + i, b, rng)?,
                };
                out.push((m.outcome, m.deterministic));
            }
        }
    }
    Ok(out)
}

//! Circuit construction for each experiment family.

use crate::codes::{CodeBasis, LogicalGate};
use crate::compiler::{
    encode_circuit, logical_final_state, BlockPrep, CircuitIR, ErrorDetectVariant, Instruction, LogicalProgram,
};
use crate::error::{Error, Result};
use crate::gate::{CliffordGate, GateKind};
use crate::pauli::Pauli;
use crate::tableau::{Basis, StabilizerTableau};

use super::constraints::{circuit_final_state, generator_settings, parity_constraints, Constraint};
use super::{BvRead, Interp, InterpKind, Readout};

/// A measurement setting before compilation.
pub(crate) struct Draft {
    pub name: String,
    pub circuit: CircuitIR,
    pub readout: Readout,
    pub interp: Interp,
}

fn physical(name: &str, circuit: CircuitIR, bv: Option<BvRead>) -> Result<Draft> {
    let (t, bases) = circuit_final_state(&circuit)?;
    Ok(Draft {
        name: name.into(),
        readout: Readout::Z,
        interp: Interp {
            kind: InterpKind::Physical,
            constraints: parity_constraints(&t, &bases),
            bv,
        },
        circuit,
    })
}

fn encoded(name: &str, prog: &LogicalProgram, tesseract: bool, bv: Option<BvRead>) -> Result<Draft> {
    let enc = encode_circuit(prog)?;
    let (t, bases) = logical_final_state(prog)?;
    let constraints = if tesseract { vec![] } else { parity_constraints(&t, &bases) };
    Ok(Draft {
        name: name.into(),
        circuit: enc.circuit.clone(),
        readout: Readout::Z,
        interp: Interp {
            kind: if tesseract { InterpKind::Tesseract(enc) } else { InterpKind::Encoded(enc) },
            constraints,
            bv,
        },
    })
}

/// Antiferromagnetic cat `(|0101…⟩ + |1010…⟩)/√2` by a logarithmic-depth
/// CNOT fan-out, measured in Z.
pub(crate) fn cat_circuit(n: usize) -> CircuitIR {
    let mut c = CircuitIR::new(n);
    c.h(0);
    let mut have = 1;
    while have < n {
        for i in 0..have.min(n - have) {
            c.cnot(i, i + have);
        }
        have *= 2;
    }
    for q in (1..n).step_by(2) {
        c.one(GateKind::X, q);
    }
    for q in 0..n {
        c.push(Instruction::MeasureZ(q));
    }
    c
}

/// Measurement angle of qubit `j` in coherence setting `k`. Alternating the
/// sign undoes the X flips on odd qubits, so the ideal parity is `(-1)^k`.
pub fn cat_angle(n: usize, k: usize, j: usize) -> f64 {
    let phi = k as f64 * std::f64::consts::PI / n as f64;
    if j % 2 == 0 {
        phi
    } else {
        -phi
    }
}

pub(crate) fn cat(n: usize) -> Result<Vec<Draft>> {
    let mut out = vec![physical("z", cat_circuit(n), None)?];
    for k in 1..=n {
        let circuit = cat_circuit(n);
        out.push(Draft {
            name: format!("coh{k}"),
            readout: Readout::Equatorial {
                qubits: (0..n).collect(),
                angles: (0..n).map(|j| cat_angle(n, k, j)).collect(),
            },
            interp: Interp {
                kind: InterpKind::Physical,
                constraints: vec![Constraint {
                    support: (0..n).collect(),
                    odd: k % 2 == 1,
                }],
                bv: None,
            },
            circuit,
        });
    }
    Ok(out)
}

/// Logical cat over `k` qubits: a Bell block, then `k/2 - 1` verified
/// `|00⟩` blocks joined by a binary fan-out of transversal CNOTs.
pub(crate) fn cat_encoded_program(k: usize, basis: CodeBasis) -> LogicalProgram {
    let mut p = LogicalProgram::new();
    let nb = k / 2;
    let first = p.prep(BlockPrep::Bell);
    let mut blocks = vec![first];
    for _ in 1..nb {
        blocks.push(p.prep(BlockPrep::Zero));
    }
    let mut have = 1;
    while have < nb {
        for i in 0..have.min(nb - have) {
            p.between(LogicalGate::TransversalCnot, blocks[i], blocks[i + have]);
        }
        have *= 2;
    }
    for &b in &blocks {
        p.measure(b, basis);
    }
    p
}

pub(crate) fn cat_encoded(k: usize) -> Result<Vec<Draft>> {
    Ok(vec![
        encoded("x", &cat_encoded_program(k, CodeBasis::X), false, None)?,
        encoded("z", &cat_encoded_program(k, CodeBasis::Z), false, None)?,
    ])
}

/// Bernstein–Vazirani. Unencoded: query qubits `0..n`, ancilla `n`.
pub(crate) fn bv_unencoded(s: &[bool]) -> Result<Vec<Draft>> {
    let n = s.len();
    let mut c = CircuitIR::new(n + 1);
    c.one(GateKind::X, n);
    for q in 0..=n {
        c.h(q);
    }
    for (i, &b) in s.iter().enumerate() {
        if b {
            c.cnot(i, n);
        }
    }
    for q in 0..=n {
        c.h(q);
    }
    for q in 0..=n {
        c.push(Instruction::MeasureZ(q));
    }
    let bv = BvRead {
        query: (0..n).collect(),
        ancilla: None,
        s: s.to_vec(),
    };
    Ok(vec![physical("z", c, Some(bv))?])
}

/// Encoded Bernstein–Vazirani on [[4,1,2]] blocks: query blocks in `|+⟩`,
/// the ancilla in `|−⟩`, one transversal CNOT per set bit of `s`, and
/// X readout. The ancilla block is prepared last so it stays in place
/// while the query blocks visit it.
pub(crate) fn bv_program(s: &[bool]) -> LogicalProgram {
    let mut p = LogicalProgram::new();
    let query: Vec<usize> = s.iter().map(|_| p.prep(BlockPrep::PlusOne)).collect();
    let anc = p.prep(BlockPrep::PlusOne);
    p.pauli(anc, 0, Pauli::Z);
    for (i, &b) in s.iter().enumerate() {
        if b {
            p.between(LogicalGate::TransversalCnot, query[i], anc);
        }
    }
    p.measure(anc, CodeBasis::X);
    for &q in &query {
        p.measure(q, CodeBasis::X);
    }
    p
}

pub(crate) fn bv_encoded(s: &[bool]) -> Result<Vec<Draft>> {
    let n = s.len();
    let bv = BvRead {
        query: (0..n).collect(),
        ancilla: Some(n),
        s: s.to_vec(),
    };
    Ok(vec![encoded("x", &bv_program(s), false, Some(bv))?])
}

/// Generators of the two-qubit group used by the random sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    H2,
    Cx,
    Cz,
    Swap,
}

/// The four random sequences. Each element is a product of generators
/// written as an operator product (the rightmost acts first).
pub fn random_sequence(id: usize) -> Result<Vec<Vec<Gen>>> {
    use Gen::*;
    Ok(match id {
        0 => vec![vec![H2, Cx]],
        1 => vec![vec![], vec![Cx, Cz, H2, Cx]],
        2 => vec![vec![H2, Swap, Cx], vec![Cz, H2, Swap], vec![H2, Swap, Cz]],
        3 => vec![vec![Cx, H2, Cx], vec![H2], vec![Swap, Cx], vec![Cz, Cx, H2]],
        _ => return Err(Error::Usage(format!("unknown random sequence {id} (0..=3)"))),
    })
}

fn logical_gates(g: Gen) -> Vec<LogicalGate> {
    match g {
        Gen::H2 => vec![LogicalGate::HadamardSwap, LogicalGate::InBlockSwap],
        Gen::Cx => vec![LogicalGate::InBlockCnot],
        Gen::Cz => vec![LogicalGate::Cz],
        Gen::Swap => vec![LogicalGate::InBlockSwap],
    }
}

fn physical_gates(g: Gen) -> Vec<CliffordGate> {
    match g {
        Gen::H2 => vec![CliffordGate::h(0), CliffordGate::h(1)],
        Gen::Cx => vec![CliffordGate::cnot(0, 1)],
        Gen::Cz => vec![CliffordGate::cz(0, 1)],
        Gen::Swap => vec![CliffordGate::two(GateKind::Swap, 0, 1)],
    }
}

/// Cheapest word of in-block logical gates after which both logicals of
/// `t` have definite values in one transversal basis. Logical CZ is a frame
/// update, CNOT and SWAP are relabelings, and the Hadamard costs a layer
/// of one-qubit gates, so words are ranked by Hadamard count, then length.
fn readout_frame(t: &StabilizerTableau) -> Result<(Vec<LogicalGate>, CodeBasis)> {
    const FREE: [LogicalGate; 4] = [LogicalGate::Cz, LogicalGate::InBlockCnot, LogicalGate::InBlockSwap, LogicalGate::HadamardSwap];
    let mut best: Option<((usize, usize), Vec<LogicalGate>, CodeBasis)> = None;
    let mut words: Vec<Vec<LogicalGate>> = vec![vec![]];
    for _ in 0..=4 {
        for w in &words {
            let mut u = t.clone();
            for g in w {
                for a in g.logical_action() {
                    u.apply_gate(&a)?;
                }
            }
            for (cb, b) in [(CodeBasis::Z, Basis::Z), (CodeBasis::X, Basis::X)] {
                if parity_constraints(&u, &[Some(b), Some(b)]).len() == 2 {
                    let cost = (w.iter().filter(|&&g| g == LogicalGate::HadamardSwap).count(), w.len());
                    if best.as_ref().map_or(true, |(c, _, _)| cost < *c) {
                        best = Some((cost, w.clone(), cb));
                    }
                }
            }
        }
        words = words
            .iter()
            .flat_map(|w| FREE.iter().map(move |&g| [w.clone(), vec![g]].concat()))
            .collect();
    }
    best.map(|(_, w, b)| (w, b))
        .ok_or_else(|| Error::Compile("no transversal readout frame for the logical state".into()))
}

fn encoded_two_logical(body: LogicalProgram, block: usize) -> Result<Vec<Draft>> {
    let (t, _) = logical_final_state(&body)?;
    let (word, basis) = readout_frame(&t)?;
    let mut p = body;
    for g in word {
        p.gate(g, block);
    }
    p.measure(block, basis);
    let name = match basis {
        CodeBasis::X => "x",
        CodeBasis::Z => "z",
    };
    Ok(vec![encoded(name, &p, false, None)?])
}

/// Physical two-qubit baseline: one setting per group of qubitwise
/// commuting stabilizer generators of the final state.
fn baseline(body: CircuitIR) -> Result<Vec<Draft>> {
    let (t, _) = circuit_final_state(&body)?;
    generator_settings(&t)
        .into_iter()
        .enumerate()
        .map(|(i, bases)| {
            let mut c = body.clone();
            for (q, b) in bases.iter().enumerate() {
                match b {
                    Basis::Z => c.push(Instruction::MeasureZ(q)),
                    Basis::X => c.push(Instruction::MeasureX(q)),
                    Basis::Y => c.one(GateKind::SzDag, q).push(Instruction::MeasureX(q)),
                };
            }
            physical(&format!("g{i}"), c, None)
        })
        .collect()
}

/// `j + 1` logical CZ gates on `|++⟩` with a refreshing detection round
/// between consecutive gates.
pub(crate) fn repeated_cz_program(j: usize) -> (LogicalProgram, usize) {
    let mut p = LogicalProgram::new();
    let b = p.prep(BlockPrep::PlusPlus);
    for i in 0..=j {
        p.gate(LogicalGate::Cz, b);
        if i < j {
            p.error_detect(b, ErrorDetectVariant::Refresh);
        }
    }
    (p, b)
}

pub(crate) fn repeated_cz(j: usize, encoded: bool) -> Result<Vec<Draft>> {
    if encoded {
        let (p, b) = repeated_cz_program(j);
        return encoded_two_logical(p, b);
    }
    // both atoms return to the register between gates, with X echoes
    let mut c = CircuitIR::new(2);
    c.push(Instruction::PrepPlus(0)).push(Instruction::PrepPlus(1));
    c.cz(0, 1);
    for _ in 0..j {
        c.push(Instruction::Barrier);
        c.one(GateKind::X, 0).one(GateKind::X, 1);
        c.cz(0, 1);
    }
    baseline(c)
}

pub(crate) fn random_sequence_drafts(id: usize, encoded: bool) -> Result<Vec<Draft>> {
    let seq = random_sequence(id)?;
    if encoded {
        let mut p = LogicalProgram::new();
        let b = p.prep(BlockPrep::Zero);
        for (e, element) in seq.iter().enumerate() {
            if e > 0 {
                p.error_detect(b, ErrorDetectVariant::Flagged);
            }
            for &g in element.iter().rev() {
                for lg in logical_gates(g) {
                    p.gate(lg, b);
                }
            }
        }
        return encoded_two_logical(p, b);
    }
    let mut c = CircuitIR::new(2);
    for element in &seq {
        for &g in element.iter().rev() {
            for pg in physical_gates(g) {
                c.gate(pg);
            }
        }
    }
    baseline(c)
}

/// Copies of `|+++⟩` in the [[8,3,2]] code, all measured in one basis.
pub(crate) fn tesseract_program(ft: bool, basis: CodeBasis) -> LogicalProgram {
    let copies = if ft { 25 } else { 32 };
    let mut p = LogicalProgram::new();
    let blocks: Vec<usize> = (0..copies).map(|_| p.prep(BlockPrep::Plus832 { ft })).collect();
    for b in blocks {
        p.measure(b, basis);
    }
    p
}

pub(crate) fn tesseract(ft: bool) -> Result<Vec<Draft>> {
    Ok(vec![
        encoded("x", &tesseract_program(ft, CodeBasis::X), true, None)?,
        encoded("z", &tesseract_program(ft, CodeBasis::Z), true, None)?,
    ])
}

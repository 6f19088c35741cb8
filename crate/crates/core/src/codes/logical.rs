use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::gate::{CliffordGate, GateKind};
use crate::pauli::{PauliString, Phase};

use super::CodeDefinition;

/// Logical operations with a fault-tolerant physical realization.
///
/// In-block gates act on one block's logical qubits `0` and `1`. Between-block
/// gates act on two blocks whose physical qubits are numbered `0..n` (first
/// block) and `n..2n` (second block).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalGate {
    /// CNOT from logical 1 to logical 2.
    InBlockCnot,
    InBlockSwap,
    /// `H⊗H` followed by a swap of the two logicals.
    HadamardSwap,
    Cz,
    /// CZ conjugated by `H⊗H`.
    DualCz,
    TransversalCnot,
    TransversalCz,
}

impl LogicalGate {
    pub const ALL: [LogicalGate; 7] = [
        LogicalGate::InBlockCnot,
        LogicalGate::InBlockSwap,
        LogicalGate::HadamardSwap,
        LogicalGate::Cz,
        LogicalGate::DualCz,
        LogicalGate::TransversalCnot,
        LogicalGate::TransversalCz,
    ];

    pub fn is_between_blocks(self) -> bool {
        matches!(self, LogicalGate::TransversalCnot | LogicalGate::TransversalCz)
    }

    /// The intended action on logical qubits of a two-logical-qubit code
    /// (second block's logicals are `2, 3`).
    pub fn logical_action(self) -> Vec<CliffordGate> {
        use GateKind::*;
        let g1 = |k, q| CliffordGate::one(k, q);
        let g2 = CliffordGate::two;
        match self {
            LogicalGate::InBlockCnot => vec![g2(Cnot, 0, 1)],
            LogicalGate::InBlockSwap => vec![g2(Swap, 0, 1)],
            LogicalGate::HadamardSwap => vec![g2(Swap, 0, 1), g1(H, 0), g1(H, 1)],
            LogicalGate::Cz => vec![g2(Cz, 0, 1)],
            LogicalGate::DualCz => vec![g1(H, 0), g1(H, 1), g2(Cz, 0, 1), g1(H, 0), g1(H, 1)],
            LogicalGate::TransversalCnot => vec![g2(Cnot, 0, 2), g2(Cnot, 1, 3)],
            LogicalGate::TransversalCz => vec![g2(Cz, 0, 3), g2(Cz, 1, 2)],
        }
    }
}

/// Physical gates realizing `gate` on the given code, in time order.
pub fn logical_gate_mapping(code: &CodeDefinition, gate: LogicalGate) -> Result<Vec<CliffordGate>> {
    use GateKind::*;
    let n = code.n;
    if gate == LogicalGate::TransversalCnot && code.is_css() {
        return Ok((0..n).map(|q| CliffordGate::cnot(q, q + n)).collect());
    }
    if !matches!(code.name.as_str(), "4-2-2" | "4-1-2") {
        return usage(format!("{gate:?} has no mapping for code {}", code.name));
    }
    let g1 = |k, q| CliffordGate::one(k, q);
    Ok(match gate {
        LogicalGate::InBlockCnot => vec![CliffordGate::two(Swap, 0, 2)],
        LogicalGate::InBlockSwap => vec![CliffordGate::two(Swap, 1, 2)],
        LogicalGate::HadamardSwap => (0..4).map(CliffordGate::h).collect(),
        LogicalGate::Cz => vec![g1(Sz, 0), g1(SzDag, 1), g1(SzDag, 2), g1(Sz, 3)],
        LogicalGate::DualCz => vec![g1(Sx, 0), g1(SxDag, 1), g1(SxDag, 2), g1(Sx, 3)],
        LogicalGate::TransversalCz => (0..4).map(|q| CliffordGate::cz(q, q + 4)).collect(),
        LogicalGate::TransversalCnot => unreachable!(),
    })
}

fn strip_sign(mut p: PauliString) -> PauliString {
    p.set_phase(Phase::PlusOne);
    p
}

/// Whether `physical` maps every logical (and gauge) operator to the image
/// prescribed by `logical`, up to stabilizers and sign, and maps the
/// stabilizer group onto itself. `blocks` copies of the code are laid out
/// consecutively.
pub fn check_logical_action(code: &CodeDefinition, blocks: usize, physical: &[CliffordGate], logical: &[CliffordGate]) -> bool {
    let n = code.n;
    let big = n * blocks;
    let place = |p: &PauliString, b: usize| p.embed(big, &(b * n..(b + 1) * n).collect::<Vec<_>>());
    let pairs: Vec<(&PauliString, &PauliString)> = code
        .logical_x
        .iter()
        .zip(&code.logical_z)
        .chain(code.gauge.iter().map(|(a, b)| (a, b)))
        .collect();
    let kk = pairs.len();
    let mut lx = Vec::new();
    let mut lz = Vec::new();
    for b in 0..blocks {
        for (x, z) in &pairs {
            lx.push(place(x, b));
            lz.push(place(z, b));
        }
    }
    let stabs: Vec<PauliString> = (0..blocks)
        .flat_map(|b| code.stabilizers.iter().map(move |s| (s, b)))
        .map(|(s, b)| place(s, b))
        .collect();
    let mut group = vec![PauliString::identity(big)];
    for s in &stabs {
        let more: Vec<PauliString> = group.iter().map(|g| g.mul(s)).collect();
        group.extend(more);
    }
    let group: Vec<PauliString> = group.into_iter().map(strip_sign).collect();
    let in_group = |p: &PauliString| group.contains(&strip_sign(p.clone()));
    let conj = |p: &PauliString| {
        let mut q = p.clone();
        for g in physical {
            g.conjugate(&mut q);
        }
        q
    };
    // logical Pauli string → physical representative
    let lift = |lp: &PauliString| {
        let mut out = PauliString::identity(big);
        for i in 0..blocks * kk {
            if lp.x_bit(i) {
                out.mul_assign_right(&lx[i]);
            }
            if lp.z_bit(i) {
                out.mul_assign_right(&lz[i]);
            }
        }
        out
    };
    for s in &stabs {
        if !in_group(&conj(s)) {
            return false;
        }
    }
    for i in 0..blocks * kk {
        for (reps, p) in [(&lx, crate::pauli::Pauli::X), (&lz, crate::pauli::Pauli::Z)] {
            let mut lp = PauliString::single(blocks * kk, i, p);
            for g in logical {
                g.conjugate(&mut lp);
            }
            let got = conj(&reps[i]);
            if !in_group(&got.mul(&lift(&lp))) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::builtin;

    #[test]
    fn every_mapping_has_its_logical_action() {
        let code = builtin("4-2-2");
        for g in LogicalGate::ALL {
            let blocks = if g.is_between_blocks() { 2 } else { 1 };
            let phys = logical_gate_mapping(code, g).unwrap();
            assert!(check_logical_action(code, blocks, &phys, &g.logical_action()), "{g:?}");
        }
    }

    #[test]
    fn wrong_action_is_detected() {
        let code = builtin("4-2-2");
        let phys = logical_gate_mapping(code, LogicalGate::Cz).unwrap();
        assert!(!check_logical_action(code, 1, &phys, &LogicalGate::InBlockSwap.logical_action()));
    }

    #[test]
    fn cz_mapping_is_the_sqrt_z_pattern() {
        let phys = logical_gate_mapping(builtin("4-2-2"), LogicalGate::Cz).unwrap();
        let text: Vec<String> = phys.iter().map(|g| g.to_string()).collect();
        assert_eq!(text, ["S 0", "SDG 1", "SDG 2", "S 3"]);
    }

    #[test]
    fn unsupported_gate_is_usage_error() {
        assert!(logical_gate_mapping(builtin("8-3-2"), LogicalGate::Cz).is_err());
        assert!(logical_gate_mapping(builtin("8-3-2"), LogicalGate::TransversalCnot).is_ok());
    }
}

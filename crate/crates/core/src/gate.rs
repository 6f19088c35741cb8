//! The fixed Clifford gate set and its conjugation action on Pauli bits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::pauli::{PauliString, WORD};

/// Gate kinds. `Sz = √Z`, `Sx ∝ √X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    Sz,
    SzDag,
    Sx,
    SxDag,
    Cz,
    Cnot,
    Swap,
}

impl GateKind {
    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::Cz | GateKind::Cnot | GateKind::Swap)
    }

    /// Z-axis rotations are done by shifting the drive phase and cost nothing.
    pub fn is_virtual(self) -> bool {
        matches!(self, GateKind::Z | GateKind::Sz | GateKind::SzDag)
    }

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::Sz => GateKind::SzDag,
            GateKind::SzDag => GateKind::Sz,
            GateKind::Sx => GateKind::SxDag,
            GateKind::SxDag => GateKind::Sx,
            k => k,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Sz => "S",
            GateKind::SzDag => "SDG",
            GateKind::Sx => "SX",
            GateKind::SxDag => "SXDG",
            GateKind::Cz => "CZ",
            GateKind::Cnot => "CX",
            GateKind::Swap => "SWAP",
        }
    }

    pub const ONE_QUBIT: [GateKind; 8] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::Sz,
        GateKind::SzDag,
        GateKind::Sx,
        GateKind::SxDag,
    ];
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "S" | "SZ" => GateKind::Sz,
            "SDG" | "SZDG" => GateKind::SzDag,
            "SX" => GateKind::Sx,
            "SXDG" => GateKind::SxDag,
            "CZ" => GateKind::Cz,
            "CX" | "CNOT" => GateKind::Cnot,
            "SWAP" => GateKind::Swap,
            other => return Err(Error::Parse(format!("unknown gate {other:?}"))),
        })
    }
}

/// A gate with its targets. For `Cnot` the first target is the control.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordGate {
    kind: GateKind,
    targets: [usize; 2],
}

impl CliffordGate {
    pub fn one(kind: GateKind, q: usize) -> Self {
        assert!(!kind.is_two_qubit(), "{kind:?} needs two targets");
        Self {
            kind,
            targets: [q, q],
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Self::try_two(kind, a, b).expect("invalid two-qubit gate")
    }

    pub fn try_two(kind: GateKind, a: usize, b: usize) -> Result<Self> {
        if !kind.is_two_qubit() {
            return usage(format!("{kind:?} takes one target"));
        }
        if a == b {
            return usage(format!("{kind:?} targets must differ, got {a} twice"));
        }
        Ok(Self {
            kind,
            targets: [a, b],
        })
    }

    pub fn new(kind: GateKind, targets: &[usize]) -> Result<Self> {
        match (kind.is_two_qubit(), targets) {
            (false, [q]) => Ok(Self::one(kind, *q)),
            (true, [a, b]) => Self::try_two(kind, *a, *b),
            _ => usage(format!("{kind:?} given {} targets", targets.len())),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(GateKind::Cz, a, b)
    }
    pub fn cnot(c: usize, t: usize) -> Self {
        Self::two(GateKind::Cnot, c, t)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        if self.kind.is_two_qubit() {
            &self.targets
        } else {
            &self.targets[..1]
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            kind: self.kind.inverse(),
            targets: self.targets,
        }
    }

    /// Same gate with qubits renamed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        Self {
            kind: self.kind,
            targets: [map(self.targets[0]), map(self.targets[1])],
        }
    }

    /// Conjugates packed Pauli bits by this gate in place (`P ← G P G†`).
    /// Returns `true` when the sign flips.
    #[inline]
    pub(crate) fn conjugate_bits(&self, x: &mut [u64], z: &mut [u64]) -> bool {
        let [a, b] = self.targets;
        let (wa, ma) = (a / WORD, 1u64 << (a % WORD));
        let xa = x[wa] & ma != 0;
        let za = z[wa] & ma != 0;
        let set = |v: &mut [u64], w: usize, m: u64, on: bool| {
            if on {
                v[w] |= m
            } else {
                v[w] &= !m
            }
        };
        match self.kind {
            GateKind::H => {
                set(x, wa, ma, za);
                set(z, wa, ma, xa);
                xa && za
            }
            GateKind::X => za,
            GateKind::Y => xa ^ za,
            GateKind::Z => xa,
            GateKind::Sz => {
                set(z, wa, ma, za ^ xa);
                xa && za
            }
            GateKind::SzDag => {
                set(z, wa, ma, za ^ xa);
                xa && !za
            }
            GateKind::Sx => {
                set(x, wa, ma, xa ^ za);
                za && !xa
            }
            GateKind::SxDag => {
                set(x, wa, ma, xa ^ za);
                xa && za
            }
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => {
                let (wb, mb) = (b / WORD, 1u64 << (b % WORD));
                let xb = x[wb] & mb != 0;
                let zb = z[wb] & mb != 0;
                match self.kind {
                    GateKind::Cnot => {
                        set(x, wb, mb, xb ^ xa);
                        set(z, wa, ma, za ^ zb);
                        xa && zb && !(xb ^ za)
                    }
                    GateKind::Cz => {
                        set(z, wa, ma, za ^ xb);
                        set(z, wb, mb, zb ^ xa);
                        xa && xb && (za ^ zb)
                    }
                    _ => {
                        set(x, wa, ma, xb);
                        set(z, wa, ma, zb);
                        set(x, wb, mb, xa);
                        set(z, wb, mb, za);
                        false
                    }
                }
            }
        }
    }

    /// Conjugates a Pauli string: `P ← G P G†`.
    pub fn conjugate(&self, p: &mut PauliString) {
        for &q in self.qubits() {
            assert!(q < p.n_qubits(), "gate target {q} out of range");
        }
        let (x, z) = p.words_mut();
        if self.conjugate_bits(x, z) {
            p.negate();
        }
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.is_two_qubit() {
            write!(f, "{} {} {}", self.kind.mnemonic(), self.targets[0], self.targets[1])
        } else {
            write!(f, "{} {}", self.kind.mnemonic(), self.targets[0])
        }
    }
}

impl fmt::Debug for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conj(g: CliffordGate, s: &str) -> String {
        let mut p: PauliString = s.parse().unwrap();
        g.conjugate(&mut p);
        p.to_string()
    }

    #[test]
    fn sqrt_z_rules() {
        let g = CliffordGate::one(GateKind::Sz, 0);
        assert_eq!(conj(g, "X"), "+Y");
        assert_eq!(conj(g, "Y"), "-X");
        assert_eq!(conj(g, "Z"), "+Z");
    }

    #[test]
    fn sqrt_x_rules() {
        let g = CliffordGate::one(GateKind::Sx, 0);
        assert_eq!(conj(g, "X"), "+X");
        assert_eq!(conj(g, "Y"), "+Z");
        assert_eq!(conj(g, "Z"), "-Y");
    }

    #[test]
    fn daggers_invert() {
        for kind in GateKind::ONE_QUBIT {
            let g = CliffordGate::one(kind, 0);
            for s in ["X", "Y", "Z"] {
                let mut p: PauliString = s.parse().unwrap();
                g.conjugate(&mut p);
                g.inverse().conjugate(&mut p);
                assert_eq!(p.to_string(), format!("+{s}"), "{kind:?}");
            }
        }
    }

    #[test]
    fn hadamard_decomposes_into_square_roots() {
        // H = Sz Sx Sz, applied right to left.
        for s in ["X", "Y", "Z"] {
            let mut a: PauliString = s.parse().unwrap();
            CliffordGate::h(0).conjugate(&mut a);
            let mut b: PauliString = s.parse().unwrap();
            for k in [GateKind::Sz, GateKind::Sx, GateKind::Sz] {
                CliffordGate::one(k, 0).conjugate(&mut b);
            }
            assert_eq!(a, b, "{s}");
        }
    }

    #[test]
    fn two_qubit_rules() {
        assert_eq!(conj(CliffordGate::cnot(0, 1), "XI"), "+XX");
        assert_eq!(conj(CliffordGate::cnot(0, 1), "IZ"), "+ZZ");
        assert_eq!(conj(CliffordGate::cnot(0, 1), "YY"), "-XZ");
        assert_eq!(conj(CliffordGate::cz(0, 1), "XI"), "+XZ");
        assert_eq!(conj(CliffordGate::cz(0, 1), "XY"), "-YX");
        assert_eq!(conj(CliffordGate::two(GateKind::Swap, 0, 1), "XZ"), "+ZX");
    }

    #[test]
    fn two_qubit_gate_needs_distinct_targets() {
        assert!(CliffordGate::try_two(GateKind::Cz, 3, 3).is_err());
        assert!(CliffordGate::new(GateKind::H, &[0, 1]).is_err());
    }
}

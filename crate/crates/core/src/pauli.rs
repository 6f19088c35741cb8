//! Bit-packed Pauli strings with an exact phase in `{+1, +i, -1, -i}`.
//!
//! A string is stored as `i^k · σ_0 ⊗ σ_1 ⊗ …` where each `σ_j` is one of the
//! Hermitian single-qubit Paulis `I, X, Y, Z`, encoded by the bit pair
//! `(x_j, z_j)` with `(1, 1)` meaning `Y` (not `XZ`).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

/// Overall phase of a Pauli string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: u8) -> Self {
        match k & 3 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }
}

/// Sum over packed words of the exponent of `i` picked up when multiplying
/// `(x1, z1) · (x2, z2)` qubit by qubit, reduced mod 4.
#[inline]
pub(crate) fn product_phase_word(x1: u64, z1: u64, x2: u64, z2: u64) -> i32 {
    // Per qubit: Y·Z, X·Y, Z·X give +i; Y·X, X·Z, Z·Y give -i.
    let plus = (x1 & z1 & !x2 & z2) | (x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2);
    let minus = (x1 & z1 & x2 & !z2) | (x1 & !z1 & !x2 & z2) | (!x1 & z1 & x2 & z2);
    plus.count_ones() as i32 - minus.count_ones() as i32
}

/// An `n`-qubit Pauli operator with phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, p);
        s
    }

    /// Builds a string of one Pauli type on the given support.
    pub fn on_support(n: usize, support: &[usize], p: Pauli) -> Self {
        let mut s = Self::identity(n);
        for &q in support {
            s.set(q, p);
        }
        s
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut s = Self::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    pub(crate) fn from_raw(n: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        debug_assert_eq!(z.len(), words_for(n));
        Self {
            n,
            x,
            z,
            phase: phase & 3,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        Phase::from_exponent(self.phase)
    }

    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase.exponent();
    }

    /// Multiplies the phase by `i^k`.
    pub fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) & 3;
    }

    pub fn negate(&mut self) {
        self.add_phase(2);
    }

    pub fn negated(mut self) -> Self {
        self.negate();
        self
    }

    /// True when the phase is real (`±1`).
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// `true` for a `-1` phase, `false` for `+1`. Panics on imaginary phase in debug.
    pub fn sign_bit(&self) -> bool {
        debug_assert!(self.is_hermitian());
        self.phase == 2
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (xb, zb) = p.bits();
        let m = 1u64 << (q % WORD);
        let w = q / WORD;
        if xb {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if zb {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub(crate) fn words_mut(&mut self) -> (&mut [u64], &mut [u64]) {
        (&mut self.x, &mut self.z)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Qubits where the string acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    /// True if only `I`/`X` appear.
    pub fn is_x_type(&self) -> bool {
        self.z.iter().all(|&w| w == 0)
    }

    /// True if only `I`/`Z` appear.
    pub fn is_z_type(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones() & 1;
        }
        acc == 0
    }

    /// Returns `self · other` with the exact phase.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.mul_assign_right(other);
        out
    }

    /// `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        let mut k = self.phase as i32 + other.phase as i32;
        for i in 0..self.x.len() {
            k += product_phase_word(self.x[i], self.z[i], other.x[i], other.z[i]);
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
        self.phase = k.rem_euclid(4) as u8;
    }

    /// Restricts to the listed qubits, in order, dropping the phase of the
    /// discarded factors (which are all Hermitian so the phase is kept).
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut s = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            s.set(i, self.get(q));
        }
        s.phase = self.phase;
        s
    }

    /// Embeds this string into a larger register at the given positions.
    pub fn embed(&self, n: usize, positions: &[usize]) -> PauliString {
        assert_eq!(positions.len(), self.n);
        let mut s = PauliString::identity(n);
        for (i, &q) in positions.iter().enumerate() {
            s.set(q, self.get(i));
        }
        s.phase = self.phase;
        s
    }

    /// Support as a bit mask; only valid for `n <= 64`.
    pub fn support_mask(&self) -> u64 {
        assert!(self.n <= 64);
        self.x.first().copied().unwrap_or(0) | self.z.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `"XXII"`, `"+IZIZ"`, `"-ZZ"`, `"iX"`, `"-iY"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string {s:?}")));
        }
        let mut out = PauliString::identity(body.chars().count());
        for (q, c) in body.chars().enumerate() {
            let p = match c {
                'I' | '_' | '.' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Parse(format!("bad Pauli symbol {other:?} in {s:?}"))),
            };
            out.set(q, p);
        }
        out.phase = phase;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(p("X").mul(&p("Z")), p("-iY"));
        assert_eq!(p("Z").mul(&p("X")), p("iY"));
        assert_eq!(p("Y").mul(&p("Y")), p("I"));
        assert_eq!(p("X").mul(&p("Y")), p("iZ"));
        assert_eq!(p("Y").mul(&p("Z")), p("iX"));
    }

    #[test]
    fn weight_and_identity() {
        assert_eq!(p("IXYZ").weight(), 3);
        let id = PauliString::identity(5);
        assert_eq!(id.weight(), 0);
        assert_eq!(id.phase(), Phase::PlusOne);
    }

    #[test]
    fn commutation() {
        assert!(p("XXXX").commutes_with(&p("ZZZZ")));
        assert!(!p("XXII").commutes_with(&p("IZIZ")));
        assert!(p("XXII").commutes_with(&p("IIZZ")));
    }

    #[test]
    fn display_round_trip() {
        for s in ["+XIZY", "-ZZ", "+iX", "-iYYI"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn wide_strings_cross_word_boundary() {
        let a = PauliString::on_support(130, &[0, 64, 129], Pauli::X);
        let b = PauliString::on_support(130, &[64, 129], Pauli::Z);
        assert!(a.commutes_with(&b));
        assert_eq!(a.mul(&b).weight(), 3);
    }
}

//! Stabilizer/destabilizer tableau with loss tracking.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers, bit-packed
//! row-major. Measurement follows the Aaronson–Gottesman procedure. A lost
//! qubit is traced out by measuring it in `Z` then `X` and discarding the
//! results; afterwards every gate touching it is skipped.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::gate::{CliffordGate, GateKind};
use crate::pauli::{product_phase_word, words_for, Pauli, PauliString, WORD};

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

/// Result of a single-qubit measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// `false` ↦ eigenvalue `+1`, `true` ↦ `-1`.
    pub outcome: bool,
    pub deterministic: bool,
}

#[derive(Clone, Debug)]
pub struct StabilizerTableau {
    n: usize,
    w: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    /// Phase exponent of `i`, per row.
    phase: Vec<u8>,
    lost: Vec<bool>,
}

impl StabilizerTableau {
    /// The all-`|0⟩` state.
    pub fn new(n: usize) -> Self {
        let w = words_for(n);
        let mut t = Self {
            n,
            w,
            xs: vec![0; 2 * n * w],
            zs: vec![0; 2 * n * w],
            phase: vec![0; 2 * n],
            lost: vec![false; n],
        };
        for q in 0..n {
            t.xs[q * w + q / WORD] |= 1 << (q % WORD);
            t.zs[(n + q) * w + q / WORD] |= 1 << (q % WORD);
        }
        t
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn is_lost(&self, q: usize) -> bool {
        self.lost[q]
    }

    pub fn lost_mask(&self) -> &[bool] {
        &self.lost
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return usage(format!("qubit {q} out of range for {} qubits", self.n));
        }
        Ok(())
    }

    #[inline]
    fn xbit(&self, row: usize, q: usize) -> bool {
        (self.xs[row * self.w + q / WORD] >> (q % WORD)) & 1 == 1
    }

    fn row(&self, row: usize) -> PauliString {
        let r = row * self.w..(row + 1) * self.w;
        PauliString::from_raw(
            self.n,
            self.xs[r.clone()].to_vec(),
            self.zs[r].to_vec(),
            self.phase[row],
        )
    }

    pub fn stabilizer(&self, i: usize) -> PauliString {
        self.row(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> PauliString {
        self.row(i)
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    /// `row[h] ← row[src] · row[h]`.
    fn rowsum(&mut self, h: usize, src: usize) {
        let w = self.w;
        let mut k = self.phase[h] as i32 + self.phase[src] as i32;
        for j in 0..w {
            let (xi, zi) = (self.xs[src * w + j], self.zs[src * w + j]);
            let (xh, zh) = (self.xs[h * w + j], self.zs[h * w + j]);
            k += product_phase_word(xi, zi, xh, zh);
            self.xs[h * w + j] = xh ^ xi;
            self.zs[h * w + j] = zh ^ zi;
        }
        self.phase[h] = k.rem_euclid(4) as u8;
    }

    /// Applies a gate. Gates touching a lost qubit are skipped and `false`
    /// is returned.
    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<bool> {
        for &q in gate.qubits() {
            self.check_qubit(q)?;
        }
        if gate.qubits().iter().any(|&q| self.lost[q]) {
            return Ok(false);
        }
        self.apply_unchecked(gate);
        Ok(true)
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &CliffordGate) {
        let w = self.w;
        for row in 0..2 * self.n {
            let r = row * w..(row + 1) * w;
            let flip = gate.conjugate_bits(&mut self.xs[r.clone()], &mut self.zs[r]);
            if flip {
                self.phase[row] = (self.phase[row] + 2) & 3;
            }
        }
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a CliffordGate>) -> Result<()> {
        for g in gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    fn rotate_to_z(&mut self, q: usize, basis: Basis) {
        match basis {
            Basis::Z => {}
            Basis::X => self.apply_unchecked(&CliffordGate::h(q)),
            Basis::Y => self.apply_unchecked(&CliffordGate::one(GateKind::Sx, q)),
        }
    }

    fn rotate_from_z(&mut self, q: usize, basis: Basis) {
        match basis {
            Basis::Z => {}
            Basis::X => self.apply_unchecked(&CliffordGate::h(q)),
            Basis::Y => self.apply_unchecked(&CliffordGate::one(GateKind::SxDag, q)),
        }
    }

    /// Projective measurement in the given basis.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, basis: Basis, rng: &mut R) -> Result<Measurement> {
        self.measure_forced(q, basis, || rng.gen::<bool>())
    }

    /// Like [`measure`](Self::measure) but a nondeterministic outcome is taken
    /// from `choose`.
    pub fn measure_forced(&mut self, q: usize, basis: Basis, choose: impl FnOnce() -> bool) -> Result<Measurement> {
        self.check_qubit(q)?;
        if self.lost[q] {
            return usage(format!("qubit {q} is lost and cannot be measured"));
        }
        self.rotate_to_z(q, basis);
        let m = self.measure_z(q, choose);
        self.rotate_from_z(q, basis);
        #[cfg(debug_assertions)]
        if self.n <= 16 {
            self.debug_check();
        }
        Ok(m)
    }

    fn measure_z(&mut self, q: usize, choose: impl FnOnce() -> bool) -> Measurement {
        let n = self.n;
        let w = self.w;
        if let Some(p) = (n..2 * n).find(|&r| self.xbit(r, q)) {
            for i in 0..2 * n {
                if i != p && self.xbit(i, q) {
                    self.rowsum(i, p);
                }
            }
            // destabilizer ← old stabilizer, stabilizer ← ±Z_q
            let d = p - n;
            let (src, dst) = (p * w, d * w);
            self.xs.copy_within(src..src + w, dst);
            self.zs.copy_within(src..src + w, dst);
            self.phase[d] = self.phase[p];
            let outcome = choose();
            self.xs[src..src + w].fill(0);
            self.zs[src..src + w].fill(0);
            self.zs[src + q / WORD] |= 1 << (q % WORD);
            self.phase[p] = if outcome { 2 } else { 0 };
            Measurement {
                outcome,
                deterministic: false,
            }
        } else {
            let mut acc = PauliString::identity(n);
            for i in 0..n {
                if self.xbit(i, q) {
                    acc.mul_assign_right(&self.row(n + i));
                }
            }
            Measurement {
                outcome: acc.phase_exponent() == 2,
                deterministic: true,
            }
        }
    }

    /// Traces out `q`: measure in `Z` then `X`, forget both results, mark lost.
    pub fn mark_lost<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<()> {
        self.mark_lost_reporting(q, rng).map(|_| ())
    }

    /// [`mark_lost`](Self::mark_lost), also returning the discarded `Z` and
    /// `X` outcomes so a reference simulator can follow the same trajectory.
    pub fn mark_lost_reporting<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<(Measurement, Measurement)> {
        self.check_qubit(q)?;
        if self.lost[q] {
            return usage(format!("qubit {q} is already lost"));
        }
        let z = self.measure(q, Basis::Z, rng)?;
        let x = self.measure(q, Basis::X, rng)?;
        self.lost[q] = true;
        Ok((z, x))
    }

    /// Applies a Pauli operator to the state (ignoring lost qubits).
    pub fn apply_pauli(&mut self, p: &PauliString) {
        assert_eq!(p.n_qubits(), self.n);
        for q in p.support() {
            if self.lost[q] {
                continue;
            }
            let kind = match p.get(q) {
                Pauli::X => GateKind::X,
                Pauli::Y => GateKind::Y,
                Pauli::Z => GateKind::Z,
                Pauli::I => continue,
            };
            self.apply_unchecked(&CliffordGate::one(kind, q));
        }
    }

    /// Applies a single-qubit Pauli, unless `q` is lost.
    pub fn apply_single_pauli(&mut self, q: usize, p: Pauli) {
        if self.lost[q] {
            return;
        }
        let w = self.w;
        let (wq, m) = (q / WORD, 1u64 << (q % WORD));
        let (px, pz) = p.bits();
        for row in 0..2 * self.n {
            let x = self.xs[row * w + wq] & m != 0;
            let z = self.zs[row * w + wq] & m != 0;
            if (px && z) ^ (pz && x) {
                self.phase[row] = (self.phase[row] + 2) & 3;
            }
        }
    }

    /// If `±P` is in the stabilizer group returns `Some(sign_is_negative)`,
    /// otherwise `None` (the expectation of `P` is zero).
    pub fn peek_pauli(&self, p: &PauliString) -> Option<bool> {
        assert_eq!(p.n_qubits(), self.n);
        let n = self.n;
        for i in 0..n {
            if !self.row(n + i).commutes_with(p) {
                return None;
            }
        }
        let mut acc = PauliString::identity(n);
        for i in 0..n {
            if !self.row(i).commutes_with(p) {
                acc.mul_assign_right(&self.row(n + i));
            }
        }
        let mut bare = p.clone();
        bare.set_phase(crate::pauli::Phase::PlusOne);
        debug_assert_eq!(
            {
                let mut a = acc.clone();
                a.set_phase(crate::pauli::Phase::PlusOne);
                a
            },
            bare
        );
        // acc = s · P_bare with s = ±1; P = t · P_bare, so P = (t/s) · acc.
        let rel = (p.phase_exponent() + 4 - acc.phase_exponent()) & 3;
        debug_assert!(rel & 1 == 0);
        Some(rel == 2)
    }

    /// Checks commutation and pairing invariants; panics on violation.
    pub fn check_invariants(&self) {
        let n = self.n;
        for i in 0..n {
            let si = self.row(n + i);
            assert!(si.is_hermitian(), "stabilizer {i} has imaginary phase");
            for j in 0..n {
                let sj = self.row(n + j);
                assert!(si.commutes_with(&sj), "stabilizers {i},{j} anticommute");
                let dj = self.row(j);
                assert_eq!(si.commutes_with(&dj), i != j, "pairing broken at ({i},{j})");
            }
        }
    }

    /// Word-level version of [`check_invariants`](Self::check_invariants)
    /// cheap enough to run after every measurement.
    #[cfg(debug_assertions)]
    fn debug_check(&self) {
        let (n, w) = (self.n, self.w);
        let anti = |a: usize, b: usize| {
            let mut acc = 0;
            for j in 0..w {
                acc ^= ((self.xs[a * w + j] & self.zs[b * w + j]) ^ (self.zs[a * w + j] & self.xs[b * w + j])).count_ones();
            }
            acc & 1 == 1
        };
        for i in 0..n {
            assert!(self.phase[n + i] & 1 == 0, "stabilizer {i} has imaginary phase");
            for j in 0..n {
                assert!(!anti(n + i, n + j), "stabilizers {i},{j} anticommute");
                assert_eq!(anti(n + i, j), i == j, "pairing broken at ({i},{j})");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn cat4() -> StabilizerTableau {
        let mut t = StabilizerTableau::new(4);
        t.apply_gate(&CliffordGate::h(0)).unwrap();
        for q in 1..4 {
            t.apply_gate(&CliffordGate::cnot(0, q)).unwrap();
        }
        t
    }

    #[test]
    fn zero_state_measures_zero_deterministically() {
        let mut t = StabilizerTableau::new(1);
        let m = t.measure(0, Basis::Z, &mut rng()).unwrap();
        assert_eq!(m, Measurement { outcome: false, deterministic: true });
    }

    #[test]
    fn zero_state_x_measurement_is_random() {
        let mut r = rng();
        let mut ones = 0;
        for _ in 0..400 {
            let mut t = StabilizerTableau::new(1);
            let m = t.measure(0, Basis::X, &mut r).unwrap();
            assert!(!m.deterministic);
            ones += m.outcome as u32;
        }
        assert!((150..250).contains(&ones), "{ones}");
    }

    #[test]
    fn repeated_measurement_is_stable() {
        let mut r = rng();
        let mut t = StabilizerTableau::new(1);
        let a = t.measure(0, Basis::Y, &mut r).unwrap();
        let b = t.measure(0, Basis::Y, &mut r).unwrap();
        assert!(b.deterministic);
        assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let mut t = cat4();
        let before = t.stabilizers();
        t.apply_gate(&CliffordGate::h(2)).unwrap();
        t.apply_gate(&CliffordGate::h(2)).unwrap();
        assert_eq!(t.stabilizers(), before);
    }

    #[test]
    fn cat_x_parity_is_even() {
        let mut r = rng();
        for _ in 0..50 {
            let mut t = cat4();
            let parity = (0..4).fold(false, |acc, q| acc ^ t.measure(q, Basis::X, &mut r).unwrap().outcome);
            assert!(!parity);
        }
    }

    #[test]
    fn peek_reports_stabilizer_signs() {
        let t = cat4();
        assert_eq!(t.peek_pauli(&"XXXX".parse().unwrap()), Some(false));
        assert_eq!(t.peek_pauli(&"ZZII".parse().unwrap()), Some(false));
        assert_eq!(t.peek_pauli(&"-ZZII".parse().unwrap()), Some(true));
        assert_eq!(t.peek_pauli(&"YYXX".parse().unwrap()), Some(true));
        assert_eq!(t.peek_pauli(&"ZIII".parse().unwrap()), None);
    }

    #[test]
    fn out_of_range_target_is_usage_error() {
        let mut t = StabilizerTableau::new(2);
        assert!(t.apply_gate(&CliffordGate::h(2)).is_err());
        assert!(t.measure(5, Basis::Z, &mut rng()).is_err());
    }

    #[test]
    fn losing_product_state_keeps_neighbour() {
        let mut r = rng();
        let mut t = StabilizerTableau::new(2);
        t.mark_lost(0, &mut r).unwrap();
        let m = t.measure(1, Basis::Z, &mut r).unwrap();
        assert_eq!(m, Measurement { outcome: false, deterministic: true });
    }

    #[test]
    fn double_loss_is_rejected() {
        let mut r = rng();
        let mut t = StabilizerTableau::new(2);
        t.mark_lost(1, &mut r).unwrap();
        assert!(t.mark_lost(1, &mut r).is_err());
    }

    #[test]
    fn gates_on_lost_qubit_are_skipped() {
        let mut r = rng();
        let mut t = StabilizerTableau::new(2);
        t.mark_lost(0, &mut r).unwrap();
        assert!(!t.apply_gate(&CliffordGate::cnot(0, 1)).unwrap());
        let m = t.measure(1, Basis::Z, &mut r).unwrap();
        assert!(m.deterministic && !m.outcome);
    }

    #[test]
    fn losing_cat_member_leaves_classical_correlation() {
        let mut r = rng();
        let mut seen = [0u32; 2];
        for _ in 0..200 {
            let mut t = cat4();
            t.mark_lost(2, &mut r).unwrap();
            let bits: Vec<bool> = [0, 1, 3]
                .iter()
                .map(|&q| t.measure(q, Basis::Z, &mut r).unwrap().outcome)
                .collect();
            assert!(bits.iter().all(|&b| b == bits[0]));
            seen[bits[0] as usize] += 1;
        }
        assert!(seen[0] > 60 && seen[1] > 60, "{seen:?}");
    }
}

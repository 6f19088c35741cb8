//! Dense reference simulators used to cross-check the tableau.
//!
//! Gates are applied as explicit unitary matrices, independent of the Pauli
//! bit rules in [`gate`](crate::gate). Loss is a partial trace, modelled by
//! fully depolarizing the lost qubit in a density matrix.

use std::collections::BTreeMap;

use num_complex::Complex64 as C;
use rand::Rng;

use crate::error::{usage, Result};
use crate::gate::{CliffordGate, GateKind};
use crate::tableau::{Basis, Measurement, StabilizerTableau};

pub const MAX_STATEVECTOR_QUBITS: usize = 12;
pub const MAX_DENSITY_QUBITS: usize = 8;

/// A flat instruction for the simulators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimOp {
    Gate(CliffordGate),
    Measure(usize, Basis),
    Lose(usize),
}

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

type M2 = [[C; 2]; 2];

fn single_matrix(kind: GateKind) -> M2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |re: f64, im: f64| C::new(re, im);
    match kind {
        GateKind::H => [[r(h, 0.), r(h, 0.)], [r(h, 0.), r(-h, 0.)]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::Sz => [[ONE, ZERO], [ZERO, I]],
        GateKind::SzDag => [[ONE, ZERO], [ZERO, -I]],
        // exp(-iπX/4) and its inverse
        GateKind::Sx => [[r(h, 0.), r(0., -h)], [r(0., -h), r(h, 0.)]],
        GateKind::SxDag => [[r(h, 0.), r(0., h)], [r(0., h), r(h, 0.)]],
        k => unreachable!("{k:?} is not a one-qubit gate"),
    }
}

fn conj(m: M2) -> M2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

fn apply_1q(v: &mut [C], t: usize, m: &M2) {
    let bit = 1usize << t;
    for i in 0..v.len() {
        if i & bit == 0 {
            let (a, b) = (v[i], v[i | bit]);
            v[i] = m[0][0] * a + m[0][1] * b;
            v[i | bit] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// Two-qubit gates in the set are monomial: permute amplitudes, maybe negate.
fn apply_2q(v: &mut [C], kind: GateKind, a: usize, b: usize) {
    let (ba, bb) = (1usize << a, 1usize << b);
    match kind {
        GateKind::Cz => {
            for (i, x) in v.iter_mut().enumerate() {
                if i & ba != 0 && i & bb != 0 {
                    *x = -*x;
                }
            }
        }
        GateKind::Cnot => {
            for i in 0..v.len() {
                if i & ba != 0 && i & bb == 0 {
                    v.swap(i, i | bb);
                }
            }
        }
        GateKind::Swap => {
            for i in 0..v.len() {
                if i & ba != 0 && i & bb == 0 {
                    v.swap(i, (i & !ba) | bb);
                }
            }
        }
        k => unreachable!("{k:?} is not a two-qubit gate"),
    }
}

/// Rotation taking a `basis` measurement to a `Z` measurement.
fn to_z(basis: Basis) -> Option<GateKind> {
    match basis {
        Basis::Z => None,
        Basis::X => Some(GateKind::H),
        Basis::Y => Some(GateKind::Sx),
    }
}

/// Pure-state simulator on up to [`MAX_STATEVECTOR_QUBITS`] qubits.
#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amp: Vec<C>,
}

impl StateVector {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_STATEVECTOR_QUBITS {
            return usage(format!("state vector limited to {MAX_STATEVECTOR_QUBITS} qubits, got {n}"));
        }
        let mut amp = vec![ZERO; 1 << n];
        amp[0] = ONE;
        Ok(Self { n, amp })
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amp
    }

    pub fn apply_gate(&mut self, g: &CliffordGate) {
        let q = g.qubits();
        if g.kind().is_two_qubit() {
            apply_2q(&mut self.amp, g.kind(), q[0], q[1]);
        } else {
            apply_1q(&mut self.amp, q[0], &single_matrix(g.kind()));
        }
    }

    /// Probability of outcome 1 when measuring `q` in `basis`.
    pub fn prob_one(&self, q: usize, basis: Basis) -> f64 {
        let mut s = self.clone();
        if let Some(k) = to_z(basis) {
            apply_1q(&mut s.amp, q, &single_matrix(k));
        }
        s.amp
            .iter()
            .enumerate()
            .filter(|(i, _)| i & (1 << q) != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects onto the given outcome and renormalizes; returns its probability.
    pub fn project(&mut self, q: usize, basis: Basis, outcome: bool) -> f64 {
        let rot = to_z(basis).map(single_matrix);
        if let Some(m) = &rot {
            apply_1q(&mut self.amp, q, m);
        }
        let mut p = 0.0;
        for (i, a) in self.amp.iter_mut().enumerate() {
            if ((i >> q) & 1 == 1) != outcome {
                *a = ZERO;
            } else {
                p += a.norm_sqr();
            }
        }
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            self.amp.iter_mut().for_each(|a| *a *= s);
        }
        if let Some(m) = &rot {
            let inv = [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]];
            apply_1q(&mut self.amp, q, &inv);
        }
        p
    }
}

/// Mixed-state simulator on up to [`MAX_DENSITY_QUBITS`] qubits.
///
/// `ρ[r][c]` is stored at `r << n | c`, so the matrix is a vector on `2n`
/// qubits: gates act as `U` on the row half and `U*` on the column half.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n: usize,
    rho: Vec<C>,
    lost: Vec<bool>,
}

impl DensityMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_DENSITY_QUBITS {
            return usage(format!("density matrix limited to {MAX_DENSITY_QUBITS} qubits, got {n}"));
        }
        let mut rho = vec![ZERO; 1 << (2 * n)];
        rho[0] = ONE;
        Ok(Self {
            n,
            rho,
            lost: vec![false; n],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn is_lost(&self, q: usize) -> bool {
        self.lost[q]
    }

    pub fn entry(&self, r: usize, c: usize) -> C {
        self.rho[(r << self.n) | c]
    }

    pub fn trace(&self) -> f64 {
        (0..1usize << self.n).map(|i| self.entry(i, i).re).sum()
    }

    fn apply_1q_matrix(&mut self, q: usize, m: &M2) {
        apply_1q(&mut self.rho, q + self.n, m);
        apply_1q(&mut self.rho, q, &conj(*m));
    }

    /// Applies a gate; gates touching a lost qubit are skipped.
    pub fn apply_gate(&mut self, g: &CliffordGate) {
        let q = g.qubits();
        if q.iter().any(|&t| self.lost[t]) {
            return;
        }
        if g.kind().is_two_qubit() {
            // monomial gates with real entries: U* = U
            apply_2q(&mut self.rho, g.kind(), q[0] + self.n, q[1] + self.n);
            apply_2q(&mut self.rho, g.kind(), q[0], q[1]);
        } else {
            self.apply_1q_matrix(q[0], &single_matrix(g.kind()));
        }
    }

    /// Applies `ρ ↦ (1-p)ρ + p ZρZ` on qubit `q`.
    pub fn dephase(&mut self, q: usize, p: f64) {
        let n = self.n;
        for (i, x) in self.rho.iter_mut().enumerate() {
            let r = (i >> n) >> q & 1;
            let c = i >> q & 1;
            if r != c {
                *x *= 1.0 - 2.0 * p;
            }
        }
    }

    fn with_rotation<T>(&mut self, q: usize, basis: Basis, f: impl FnOnce(&mut Self) -> T) -> T {
        let rot = to_z(basis).map(single_matrix);
        if let Some(m) = &rot {
            self.apply_1q_matrix(q, m);
        }
        let out = f(self);
        if let Some(m) = &rot {
            let inv = [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]];
            self.apply_1q_matrix(q, &inv);
        }
        out
    }

    /// Probability of outcome 1 when measuring `q` in `basis`.
    pub fn prob_one(&mut self, q: usize, basis: Basis) -> f64 {
        self.with_rotation(q, basis, |s| {
            let tr = s.trace();
            let p: f64 = (0..1usize << s.n)
                .filter(|i| i & (1 << q) != 0)
                .map(|i| s.entry(i, i).re)
                .sum();
            p / tr
        })
    }

    /// Selective measurement: keeps the `outcome` branch, renormalized.
    pub fn project(&mut self, q: usize, basis: Basis, outcome: bool) {
        let n = self.n;
        self.with_rotation(q, basis, |s| {
            let want = outcome as usize;
            for (i, x) in s.rho.iter_mut().enumerate() {
                if ((i >> n) >> q & 1) != want || (i >> q & 1) != want {
                    *x = ZERO;
                }
            }
            let tr = s.trace();
            if tr > 0.0 {
                s.rho.iter_mut().for_each(|x| *x /= tr);
            }
        });
    }

    /// Non-selective measurement: removes coherences between outcomes.
    pub fn dephase_measure(&mut self, q: usize, basis: Basis) {
        let n = self.n;
        self.with_rotation(q, basis, |s| {
            for (i, x) in s.rho.iter_mut().enumerate() {
                if ((i >> n) >> q & 1) != (i >> q & 1) {
                    *x = ZERO;
                }
            }
        });
    }

    /// Traces `q` out, leaving it maximally mixed and flagged lost.
    pub fn lose(&mut self, q: usize) -> Result<()> {
        if self.lost[q] {
            return usage(format!("qubit {q} is already lost"));
        }
        let n = self.n;
        let b = 1usize << q;
        let dim = 1usize << n;
        for r in 0..dim {
            if r & b != 0 {
                continue;
            }
            for c in 0..dim {
                if c & b != 0 {
                    continue;
                }
                let avg = (self.rho[(r << n) | c] + self.rho[((r | b) << n) | (c | b)]) * 0.5;
                self.rho[(r << n) | c] = avg;
                self.rho[((r | b) << n) | (c | b)] = avg;
                self.rho[((r | b) << n) | c] = ZERO;
                self.rho[(r << n) | (c | b)] = ZERO;
            }
        }
        self.lost[q] = true;
        Ok(())
    }

    /// Reduced density matrix of a single present qubit as `(ρ00, ρ01, ρ11)`.
    pub fn single_qubit_reduced(&self, q: usize) -> (C, C, C) {
        let n = self.n;
        let b = 1usize << q;
        let (mut r00, mut r01, mut r11) = (ZERO, ZERO, ZERO);
        for i in 0..1usize << n {
            if i & b == 0 {
                r00 += self.entry(i, i);
                r01 += self.entry(i, i | b);
                r11 += self.entry(i | b, i | b);
            }
        }
        (r00, r01, r11)
    }
}

/// Exact distribution over measurement records (one bit per `Measure`, in
/// program order). Loss-free circuits use a state vector (≤ 12 qubits),
/// lossy ones a density matrix (≤ 8 qubits).
pub fn reference_distribution(n: usize, ops: &[SimOp]) -> Result<BTreeMap<Vec<bool>, f64>> {
    let mut out = BTreeMap::new();
    if ops.iter().any(|o| matches!(o, SimOp::Lose(_))) {
        let dm = DensityMatrix::new(n)?;
        branch_dm(dm, ops, Vec::new(), 1.0, &mut out)?;
    } else {
        let sv = StateVector::new(n)?;
        branch_sv(sv, ops, Vec::new(), 1.0, &mut out)?;
    }
    Ok(out)
}

const BRANCH_EPS: f64 = 1e-12;

fn check_target(n: usize, q: usize) -> Result<()> {
    if q >= n {
        return usage(format!("qubit {q} out of range for {n} qubits"));
    }
    Ok(())
}

fn branch_sv(mut s: StateVector, ops: &[SimOp], rec: Vec<bool>, w: f64, out: &mut BTreeMap<Vec<bool>, f64>) -> Result<()> {
    for (i, op) in ops.iter().enumerate() {
        match *op {
            SimOp::Gate(g) => {
                for &q in g.qubits() {
                    check_target(s.n, q)?;
                }
                s.apply_gate(&g);
            }
            SimOp::Measure(q, b) => {
                check_target(s.n, q)?;
                let p1 = s.prob_one(q, b);
                for (bit, p) in [(false, 1.0 - p1), (true, p1)] {
                    if p > BRANCH_EPS {
                        let mut t = s.clone();
                        t.project(q, b, bit);
                        let mut r = rec.clone();
                        r.push(bit);
                        branch_sv(t, &ops[i + 1..], r, w * p, out)?;
                    }
                }
                return Ok(());
            }
            SimOp::Lose(_) => unreachable!("lossy circuits use the density matrix"),
        }
    }
    *out.entry(rec).or_insert(0.0) += w;
    Ok(())
}

fn branch_dm(mut s: DensityMatrix, ops: &[SimOp], rec: Vec<bool>, w: f64, out: &mut BTreeMap<Vec<bool>, f64>) -> Result<()> {
    for (i, op) in ops.iter().enumerate() {
        match *op {
            SimOp::Gate(g) => {
                for &q in g.qubits() {
                    check_target(s.n, q)?;
                }
                s.apply_gate(&g);
            }
            SimOp::Lose(q) => {
                check_target(s.n, q)?;
                s.lose(q)?;
            }
            SimOp::Measure(q, b) => {
                check_target(s.n, q)?;
                if s.lost[q] {
                    return usage(format!("qubit {q} is lost and cannot be measured"));
                }
                let p1 = s.prob_one(q, b);
                for (bit, p) in [(false, 1.0 - p1), (true, p1)] {
                    if p > BRANCH_EPS {
                        let mut t = s.clone();
                        t.project(q, b, bit);
                        let mut r = rec.clone();
                        r.push(bit);
                        branch_dm(t, &ops[i + 1..], r, w * p, out)?;
                    }
                }
                return Ok(());
            }
        }
    }
    *out.entry(rec).or_insert(0.0) += w;
    Ok(())
}

/// Exact marginal probability of outcome 1 for each `Measure`, in order.
pub fn reference_marginals(n: usize, ops: &[SimOp]) -> Result<Vec<f64>> {
    let mut s = DensityMatrix::new(n)?;
    let mut out = Vec::new();
    for op in ops {
        match *op {
            SimOp::Gate(g) => {
                for &q in g.qubits() {
                    check_target(n, q)?;
                }
                s.apply_gate(&g)
            }
            SimOp::Lose(q) => {
                check_target(n, q)?;
                s.lose(q)?
            }
            SimOp::Measure(q, b) => {
                check_target(n, q)?;
                out.push(s.prob_one(q, b));
                s.dephase_measure(q, b);
            }
        }
    }
    Ok(out)
}

/// Runs `ops` on a tableau, returning the record and per-measurement
/// determinism flags.
pub fn run_tableau<R: Rng + ?Sized>(n: usize, ops: &[SimOp], rng: &mut R) -> Result<(Vec<bool>, Vec<bool>)> {
    let mut t = StabilizerTableau::new(n);
    let mut bits = Vec::new();
    let mut det = Vec::new();
    for op in ops {
        match *op {
            SimOp::Gate(g) => {
                t.apply_gate(&g)?;
            }
            SimOp::Lose(q) => t.mark_lost(q, rng)?,
            SimOp::Measure(q, b) => {
                let m = t.measure(q, b, rng)?;
                bits.push(m.outcome);
                det.push(m.deterministic);
            }
        }
    }
    Ok((bits, det))
}

/// Draws a random Clifford circuit with mid-circuit measurements and
/// losses. No qubit is lost twice or measured after loss.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Vec<SimOp> {
    let mut lost = vec![false; n];
    let mut ops = Vec::with_capacity(depth);
    let bases = [Basis::X, Basis::Y, Basis::Z];
    while ops.len() < depth {
        let roll: f64 = rng.gen();
        let q = rng.gen_range(0..n);
        if roll < 0.12 {
            if !lost[q] {
                ops.push(SimOp::Measure(q, bases[rng.gen_range(0..3)]));
            }
        } else if roll < 0.16 {
            // keep at least one qubit around to measure
            if !lost[q] && lost.iter().filter(|&&l| !l).count() > 1 {
                lost[q] = true;
                ops.push(SimOp::Lose(q));
            }
        } else if roll < 0.55 || n == 1 {
            let kind = GateKind::ONE_QUBIT[rng.gen_range(0..GateKind::ONE_QUBIT.len())];
            ops.push(SimOp::Gate(CliffordGate::one(kind, q)));
        } else {
            let mut r = rng.gen_range(0..n - 1);
            if r >= q {
                r += 1;
            }
            let kind = [GateKind::Cz, GateKind::Cnot, GateKind::Swap][rng.gen_range(0..3)];
            ops.push(SimOp::Gate(CliffordGate::two(kind, q, r)));
        }
    }
    for q in 0..n {
        if !lost[q] {
            ops.push(SimOp::Measure(q, bases[rng.gen_range(0..3)]));
        }
    }
    ops
}

/// Steps the tableau and a density matrix together, forcing the oracle onto
/// the tableau's outcomes. Returns a description of the first disagreement.
///
/// For a stabilizer state every single-qubit Pauli measurement has outcome
/// probability 0, 1/2 or 1, and the tableau must call it deterministic
/// exactly when the oracle's probability is 0 or 1.
pub fn lockstep_check<R: Rng + ?Sized>(n: usize, ops: &[SimOp], rng: &mut R) -> Result<Option<String>> {
    let mut t = StabilizerTableau::new(n);
    let mut d = DensityMatrix::new(n)?;
    for (i, op) in ops.iter().enumerate() {
        match *op {
            SimOp::Gate(g) => {
                t.apply_gate(&g)?;
                d.apply_gate(&g);
            }
            SimOp::Lose(q) => {
                // The tableau's Z outcome conditions the rest of the state;
                // follow it, then trace the qubit out.
                let (z, _) = t.mark_lost_reporting(q, rng)?;
                if let Some(msg) = check_step(i, &mut d, q, Basis::Z, z) {
                    return Ok(Some(msg));
                }
                d.project(q, Basis::Z, z.outcome);
                d.lose(q)?;
            }
            SimOp::Measure(q, b) => {
                let m = t.measure(q, b, rng)?;
                if let Some(msg) = check_step(i, &mut d, q, b, m) {
                    return Ok(Some(msg));
                }
                d.project(q, b, m.outcome);
            }
        }
    }
    Ok(None)
}

fn check_step(i: usize, d: &mut DensityMatrix, q: usize, b: Basis, m: Measurement) -> Option<String> {
    const TOL: f64 = 1e-9;
    let p1 = d.prob_one(q, b);
    let oracle_det = p1 < TOL || p1 > 1.0 - TOL;
    if oracle_det != m.deterministic {
        return Some(format!("op {i}: tableau deterministic={} but oracle p1={p1}", m.deterministic));
    }
    if oracle_det && (p1 > 0.5) != m.outcome {
        return Some(format!("op {i}: tableau outcome {} but oracle p1={p1}", m.outcome as u8));
    }
    if !oracle_det && (p1 - 0.5).abs() > TOL {
        return Some(format!("op {i}: oracle p1={p1} is not a stabilizer probability"));
    }
    None
}

/// Outcome of comparing sampled tableau marginals with exact ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MarginalComparison {
    /// Measurements with an exact marginal strictly between 0 and 1.
    pub stochastic: usize,
    /// Those whose sampled frequency is more than 3σ from the exact value.
    pub exceed_3sigma: usize,
    /// Measurements with marginal 0 or 1 where some shot disagreed.
    pub deterministic_mismatches: usize,
    pub deterministic: usize,
}

/// Samples `shots` tableau runs and compares per-measurement frequencies of
/// outcome 1 with the exact marginals.
pub fn compare_marginals<R: Rng + ?Sized>(n: usize, ops: &[SimOp], shots: usize, rng: &mut R) -> Result<MarginalComparison> {
    let exact = reference_marginals(n, ops)?;
    let mut ones = vec![0usize; exact.len()];
    let mut wrong_det = vec![false; exact.len()];
    for _ in 0..shots {
        let (bits, det) = run_tableau(n, ops, rng)?;
        for (k, (&b, &dflag)) in bits.iter().zip(&det).enumerate() {
            ones[k] += b as usize;
            let p = exact[k];
            if (p < 1e-9 || p > 1.0 - 1e-9) && (b != (p > 0.5) || !dflag) {
                wrong_det[k] = true;
            }
        }
    }
    let mut cmp = MarginalComparison::default();
    for (k, &p) in exact.iter().enumerate() {
        if p < 1e-9 || p > 1.0 - 1e-9 {
            cmp.deterministic += 1;
            cmp.deterministic_mismatches += wrong_det[k] as usize;
        } else {
            cmp.stochastic += 1;
            let f = ones[k] as f64 / shots as f64;
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            if (f - p).abs() > 3.0 * sigma {
                cmp.exceed_3sigma += 1;
            }
        }
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(kind: GateKind, q: &[usize]) -> SimOp {
        SimOp::Gate(CliffordGate::new(kind, q).unwrap())
    }

    #[test]
    fn bell_distribution() {
        let ops = [
            g(GateKind::H, &[0]),
            g(GateKind::Cnot, &[0, 1]),
            SimOp::Measure(0, Basis::Z),
            SimOp::Measure(1, Basis::Z),
        ];
        let d = reference_distribution(2, &ops).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[&vec![false, false]] - 0.5).abs() < 1e-12);
        assert!((d[&vec![true, true]] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zzzz_parity_of_0110_reads_zero() {
        // data 0..4 prepared as |0110⟩, ancilla 4
        let mut ops = vec![g(GateKind::X, &[1]), g(GateKind::X, &[2])];
        for q in 0..4 {
            ops.push(g(GateKind::Cnot, &[q, 4]));
        }
        ops.push(SimOp::Measure(4, Basis::Z));
        let d = reference_distribution(5, &ops).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[&vec![false]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn losing_half_a_bell_pair_leaves_mixed_state() {
        for b in [Basis::X, Basis::Y, Basis::Z] {
            let ops = [
                g(GateKind::H, &[0]),
                g(GateKind::Cnot, &[0, 1]),
                SimOp::Lose(0),
                SimOp::Measure(1, b),
            ];
            let m = reference_marginals(2, &ops).unwrap();
            assert!((m[0] - 0.5).abs() < 1e-12, "{b:?}");
        }
    }

    #[test]
    fn lost_cat_member_gives_correlated_remainder() {
        let mut ops = vec![g(GateKind::H, &[0])];
        for q in 1..4 {
            ops.push(g(GateKind::Cnot, &[0, q]));
        }
        ops.push(SimOp::Lose(2));
        for q in [0, 1, 3] {
            ops.push(SimOp::Measure(q, Basis::Z));
        }
        let d = reference_distribution(4, &ops).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[&vec![false; 3]] - 0.5).abs() < 1e-12);
        assert!((d[&vec![true; 3]] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sqrt_x_matrix_matches_conjugation_rule() {
        // S_X Z S_X† = -Y: |0⟩ rotated by S_X is the -1 eigenstate of Y.
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&CliffordGate::one(GateKind::Sx, 0));
        assert!((s.prob_one(0, Basis::Y) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dephasing_decays_cat_coherence() {
        let p = 0.1;
        let mut d = DensityMatrix::new(4).unwrap();
        d.apply_gate(&CliffordGate::h(0));
        for q in 1..4 {
            d.apply_gate(&CliffordGate::cnot(0, q));
        }
        for q in 0..4 {
            d.dephase(q, p);
        }
        let coh = d.entry(0, 15).re;
        assert!((coh - 0.5 * (1.0 - 2.0 * p).powi(4)).abs() < 1e-12);
    }

    #[test]
    fn size_limits_are_usage_errors() {
        assert!(StateVector::new(13).is_err());
        assert!(DensityMatrix::new(9).is_err());
    }

    #[test]
    fn random_circuits_agree_in_lockstep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let ops = random_circuit(n, 30, &mut rng);
            assert_eq!(lockstep_check(n, &ops, &mut rng).unwrap(), None, "{ops:?}");
        }
    }
}

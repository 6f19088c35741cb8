//! Randomized benchmarking on one or two atoms.
//!
//! These protocols run on a dedicated two-atom executor instead of the
//! scheduler: the sequences are random per trial and the benchmarked
//! operation (a composite one-qubit Clifford, or a CZ with its moves) is
//! the unit that noise is attached to.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;

use crate::compiler::MachineLayout;
use crate::error::{Error, Result};
use crate::gate::{CliffordGate, GateKind};
use crate::noise::{NoiseModel, TrialMeta, TrialRecord};
use crate::pauli::{Pauli, PauliString};
use crate::tableau::{Basis, StabilizerTableau};

use super::spec::RbKind;
use super::TrialEval;

/// A Clifford group element with its shortest word over `H`, `S` and `CZ`.
#[derive(Clone, Debug)]
pub struct CliffordElement {
    pub word: Vec<CliffordGate>,
    /// Images of `X_0, Z_0, X_1, Z_1, …` under conjugation.
    images: Vec<PauliString>,
}

#[derive(Debug)]
pub struct CliffordGroup {
    n: usize,
    elements: Vec<CliffordElement>,
    index: HashMap<Vec<PauliString>, usize>,
}

fn identity_images(n: usize) -> Vec<PauliString> {
    (0..n)
        .flat_map(|q| [PauliString::single(n, q, Pauli::X), PauliString::single(n, q, Pauli::Z)])
        .collect()
}

impl CliffordGroup {
    /// Breadth-first enumeration from the identity.
    fn generate(n: usize) -> Self {
        let mut gens: Vec<CliffordGate> = (0..n)
            .flat_map(|q| [CliffordGate::h(q), CliffordGate::one(GateKind::Sz, q)])
            .collect();
        if n == 2 {
            gens.push(CliffordGate::cz(0, 1));
        }
        let start = CliffordElement {
            word: vec![],
            images: identity_images(n),
        };
        let mut index = HashMap::from([(start.images.clone(), 0)]);
        let mut elements = vec![start];
        let mut head = 0;
        while head < elements.len() {
            for g in &gens {
                let mut images = elements[head].images.clone();
                images.iter_mut().for_each(|p| g.conjugate(p));
                if !index.contains_key(&images) {
                    let mut word = elements[head].word.clone();
                    word.push(*g);
                    index.insert(images.clone(), elements.len());
                    elements.push(CliffordElement { word, images });
                }
            }
            head += 1;
        }
        CliffordGroup { n, elements, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &CliffordElement {
        &self.elements[i]
    }

    pub fn identity(&self) -> Vec<PauliString> {
        identity_images(self.n)
    }

    /// Index of the inverse of the Clifford with the given images.
    pub fn inverse_of(&self, images: &[PauliString]) -> usize {
        let n = self.n;
        let gens = identity_images(n);
        // preimage of each bare Pauli, by enumerating generator products
        let mut pre: HashMap<PauliString, PauliString> = HashMap::new();
        for mask in 0u32..1 << (2 * n) {
            let mut p = PauliString::identity(n);
            let mut img = PauliString::identity(n);
            for i in 0..2 * n {
                if mask >> i & 1 == 1 {
                    p.mul_assign_right(&gens[i]);
                    img.mul_assign_right(&images[i]);
                }
            }
            // C(p) = img = i^c · bare, so C^{-1}(bare) = i^{-c} · p
            let c = img.phase_exponent();
            img.set_phase(crate::pauli::Phase::PlusOne);
            p.add_phase((4 - c) & 3);
            pre.insert(img, p);
        }
        let inv: Vec<PauliString> = gens.iter().map(|g| pre[g].clone()).collect();
        self.index[&inv]
    }
}

/// The 24-element one-qubit Clifford group (Paulis included, phases not).
pub fn clifford_group_1q() -> &'static CliffordGroup {
    static G: OnceLock<CliffordGroup> = OnceLock::new();
    G.get_or_init(|| CliffordGroup::generate(1))
}

/// The 11520-element two-qubit Clifford group.
pub fn clifford_group_2q() -> &'static CliffordGroup {
    static G: OnceLock<CliffordGroup> = OnceLock::new();
    G.get_or_init(|| CliffordGroup::generate(2))
}

fn compose(images: &mut [PauliString], gates: &[CliffordGate]) {
    for p in images.iter_mut() {
        for g in gates {
            g.conjugate(p);
        }
    }
}

/// Two atoms (or one) under the noise model.
struct Atoms<'a, R: Rng + ?Sized> {
    t: StabilizerTableau,
    loaded: Vec<bool>,
    lost: Vec<bool>,
    leaked: Vec<bool>,
    model: &'a NoiseModel,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> Atoms<'a, R> {
    fn new(n: usize, model: &'a NoiseModel, rng: &'a mut R) -> Self {
        let mut t = StabilizerTableau::new(n);
        let mut loaded = vec![true; n];
        for (q, l) in loaded.iter_mut().enumerate() {
            if rng.gen::<f64>() < model.p_load_loss {
                *l = false;
                t.mark_lost(q, rng).expect("fresh atom");
            } else if rng.gen::<f64>() < model.prep_flip() {
                t.apply_single_pauli(q, Pauli::X);
            }
        }
        Atoms {
            t,
            lost: loaded.iter().map(|l| !l).collect(),
            leaked: vec![false; n],
            loaded,
            model,
            rng,
        }
    }

    fn present(&self, q: usize) -> bool {
        !self.lost[q] && !self.leaked[q]
    }

    fn pauli_error(&mut self, q: usize, p: f64) {
        if self.present(q) && self.rng.gen::<f64>() < p {
            let e = [Pauli::X, Pauli::Y, Pauli::Z][self.rng.gen_range(0..3)];
            self.t.apply_single_pauli(q, e);
        }
    }

    /// Ideal gates on present atoms, no noise.
    fn gates(&mut self, gates: &[CliffordGate]) {
        for g in gates {
            if g.qubits().iter().all(|&q| self.present(q)) {
                self.t.apply_gate(g).expect("present atoms");
            }
        }
    }

    /// A word of elementary gates with per-gate noise.
    fn noisy_word(&mut self, gates: &[CliffordGate]) {
        for g in gates {
            if g.kind() == GateKind::Cz {
                self.cz(g.qubits()[0], g.qubits()[1]);
            } else {
                self.gates(std::slice::from_ref(g));
                if !g.kind().is_virtual() {
                    self.pauli_error(g.qubits()[0], self.model.p_1q);
                }
            }
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        if !self.present(a) || !self.present(b) {
            return;
        }
        self.t.apply_gate(&CliffordGate::cz(a, b)).expect("present atoms");
        if self.rng.gen::<f64>() < self.model.p_2q_pauli {
            let k = self.rng.gen_range(1..16);
            self.t.apply_single_pauli(a, Pauli::from_bits(k & 1 == 1, k & 2 == 2));
            self.t.apply_single_pauli(b, Pauli::from_bits(k & 4 == 4, k & 8 == 8));
        }
        if self.rng.gen::<f64>() < self.model.p_2q_loss {
            let q = if self.rng.gen::<bool>() { a } else { b };
            self.t.mark_lost(q, self.rng).expect("present atom");
            if self.rng.gen::<f64>() < self.model.leak_to_loss_clock {
                self.lost[q] = true;
            } else {
                self.leaked[q] = true;
            }
        }
    }

    fn move_atom(&mut self, q: usize) {
        if !self.lost[q] && self.rng.gen::<f64>() < self.model.p_move_loss {
            if !self.leaked[q] {
                self.t.mark_lost(q, self.rng).expect("present atom");
            }
            self.lost[q] = true;
            self.leaked[q] = false;
        }
    }

    fn read(mut self, meta: TrialMeta) -> TrialRecord {
        let (f0, f1) = self.model.readout_flip();
        let n = self.t.n_qubits();
        let readout = (0..n)
            .map(|q| {
                if self.lost[q] {
                    return None;
                }
                let v = if self.leaked[q] {
                    self.rng.gen::<bool>()
                } else {
                    self.t.measure(q, Basis::Z, self.rng).expect("present atom").outcome
                };
                let flip = self.rng.gen::<f64>() < if v { f1 } else { f0 };
                Some(v ^ flip)
            })
            .collect();
        TrialRecord {
            preselect: self.loaded,
            survival: self.lost.iter().map(|l| !l).collect(),
            readout,
            meta,
        }
    }
}

/// Depths and curves of one RB protocol. Settings are named
/// `<curve>:d=<depth>`.
#[derive(Clone, Debug)]
pub struct RbPlan {
    pub kind: RbKind,
    pub depths: Vec<usize>,
    pub curves: Vec<&'static str>,
}

impl RbPlan {
    pub fn new(kind: RbKind, depths: Vec<usize>, _layout: &MachineLayout) -> Result<Self> {
        if depths.len() < 3 {
            return Err(Error::Usage("RB needs at least 3 depths".into()));
        }
        let curves = match kind {
            RbKind::Clifford1q => vec!["rb"],
            RbKind::Irb2qStatic => vec!["ref", "int"],
            RbKind::Echoed2q { .. } => vec!["cz", "nocz"],
        };
        Ok(RbPlan { kind, depths, curves })
    }

    pub fn setting_names(&self) -> Vec<String> {
        self.curves
            .iter()
            .flat_map(|c| self.depths.iter().map(move |d| format!("{c}:d={d}")))
            .collect()
    }

    /// `(curve index, depth)` of a setting.
    pub fn setting(&self, s: usize) -> (usize, usize) {
        (s / self.depths.len(), self.depths[s % self.depths.len()])
    }

    pub fn n_atoms(&self) -> usize {
        match self.kind {
            RbKind::Clifford1q => 1,
            _ => 2,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, s: usize, model: &NoiseModel, meta: TrialMeta, rng: &mut R) -> TrialRecord {
        let (curve, depth) = self.setting(s);
        match self.kind {
            RbKind::Clifford1q => clifford_1q_trial(depth, model, meta, rng),
            RbKind::Irb2qStatic => irb_trial(depth, curve == 1, model, meta, rng),
            RbKind::Echoed2q { moves } => echoed_trial(depth, curve == 0, moves, model, meta, rng),
        }
    }

    /// Accepted when no atom is lost; the error is failing to return to
    /// the all-zero state.
    pub fn evaluate(&self, s: usize, rec: &TrialRecord) -> Result<TrialEval> {
        if rec.n_atoms() != self.n_atoms() {
            return Err(Error::Usage(format!("RB record has {} atoms, expected {}", rec.n_atoms(), self.n_atoms())));
        }
        let returned = rec.readout.iter().all(|b| *b == Some(false));
        Ok(TrialEval {
            setting: s,
            preselect_full: rec.full_preselect(),
            losses: rec.lost_count(),
            accepted: rec.lost_count() == 0,
            error: if returned { 0.0 } else { 1.0 },
            bv: None,
            copies: Vec::new(),
        })
    }
}

/// Each Clifford is one composite pulse carrying a single Pauli error
/// with probability `p_1q`.
fn clifford_1q_trial<R: Rng + ?Sized>(depth: usize, model: &NoiseModel, meta: TrialMeta, rng: &mut R) -> TrialRecord {
    let g = clifford_group_1q();
    let mut a = Atoms::new(1, model, rng);
    let mut images = g.identity();
    for _ in 0..depth {
        let e = g.element(a.rng.gen_range(0..g.len()));
        a.gates(&e.word);
        a.pauli_error(0, model.p_1q);
        compose(&mut images, &e.word);
    }
    let inv = g.element(g.inverse_of(&images));
    a.gates(&inv.word);
    a.pauli_error(0, model.p_1q);
    a.read(meta)
}

/// Random two-qubit Cliffords built from noisy `H` and `CZ` gates,
/// optionally each followed by an interleaved CZ.
fn irb_trial<R: Rng + ?Sized>(depth: usize, interleave: bool, model: &NoiseModel, meta: TrialMeta, rng: &mut R) -> TrialRecord {
    let g = clifford_group_2q();
    let mut a = Atoms::new(2, model, rng);
    let mut images = g.identity();
    let cz = [CliffordGate::cz(0, 1)];
    for _ in 0..depth {
        let e = g.element(a.rng.gen_range(0..g.len()));
        a.noisy_word(&e.word);
        compose(&mut images, &e.word);
        if interleave {
            a.noisy_word(&cz);
            compose(&mut images, &cz);
        }
    }
    let inv = g.element(g.inverse_of(&images));
    a.noisy_word(&inv.word);
    a.read(meta)
}

/// One unit: a random composite Clifford on each atom, then (with moves)
/// both atoms move into the interaction zone, CZ, an X echo on both, CZ,
/// and both move back. The reference curve drops the CZs. Since
/// `CZ·(X⊗X)·CZ = Y⊗Y`, the ideal unit is local and each atom is
/// inverted separately at the end.
fn echoed_trial<R: Rng + ?Sized>(
    depth: usize,
    with_cz: bool,
    moves: bool,
    model: &NoiseModel,
    meta: TrialMeta,
    rng: &mut R,
) -> TrialRecord {
    let g = clifford_group_1q();
    let mut a = Atoms::new(2, model, rng);
    let mut images = [g.identity(), g.identity()];
    let echo = if with_cz { GateKind::Y } else { GateKind::X };
    for _ in 0..depth {
        for (q, im) in images.iter_mut().enumerate() {
            let e = g.element(a.rng.gen_range(0..g.len()));
            let word: Vec<CliffordGate> = e.word.iter().map(|x| x.remapped(|_| q)).collect();
            a.gates(&word);
            a.pauli_error(q, model.p_1q);
            compose(im, &e.word);
            compose(im, &[CliffordGate::one(echo, 0)]);
        }
        if moves {
            a.move_atom(0);
            a.move_atom(1);
        }
        if with_cz {
            a.cz(0, 1);
        }
        a.noisy_word(&[CliffordGate::one(GateKind::X, 0), CliffordGate::one(GateKind::X, 1)]);
        if with_cz {
            a.cz(0, 1);
        }
        if moves {
            a.move_atom(0);
            a.move_atom(1);
        }
    }
    for (q, im) in images.iter().enumerate() {
        let inv = g.element(g.inverse_of(im));
        let word: Vec<CliffordGate> = inv.word.iter().map(|x| x.remapped(|_| q)).collect();
        a.gates(&word);
        a.pauli_error(q, model.p_1q);
    }
    a.read(meta)
}

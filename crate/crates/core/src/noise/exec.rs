//! Monte-Carlo execution of a timed schedule.
//!
//! Atoms that never share a CZ evolve independently, so the plan splits
//! the schedule into connected components and gives each its own small
//! tableau. Noise is sampled per operation from one RNG stream per trial.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::compiler::{StepKind, TimedSchedule};
use crate::error::Result;
use crate::gate::CliffordGate;
use crate::pauli::Pauli;
use crate::tableau::{Basis, StabilizerTableau};

use super::model::NoiseModel;
use super::record::{TrialMeta, TrialRecord};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Gate(CliffordGate),
    Cz(usize, usize),
    Move(usize),
    Idle(f64),
}

#[derive(Clone, Debug)]
struct Component {
    atoms: Vec<usize>,
    /// Operations on local indices.
    ops: Vec<Op>,
}

/// A schedule prepared for repeated sampling.
#[derive(Clone, Debug)]
pub struct ExecPlan {
    n_atoms: usize,
    components: Vec<Component>,
    /// `(component, local index)` of each atom.
    place: Vec<(usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl ExecPlan {
    pub fn new(schedule: &TimedSchedule) -> Self {
        let n = schedule.n_atoms;
        let mut parent: Vec<usize> = (0..n).collect();
        for step in &schedule.steps {
            if let StepKind::Cz { pairs } = &step.kind {
                for p in pairs {
                    let (a, b) = (find(&mut parent, p.a), find(&mut parent, p.b));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut place = vec![(0, 0); n];
        let mut components: Vec<Component> = Vec::new();
        let mut root_comp = vec![usize::MAX; n];
        for q in 0..n {
            let r = find(&mut parent, q);
            if root_comp[r] == usize::MAX {
                root_comp[r] = components.len();
                components.push(Component { atoms: vec![], ops: vec![] });
            }
            let c = root_comp[r];
            place[q] = (c, components[c].atoms.len());
            components[c].atoms.push(q);
        }
        for step in &schedule.steps {
            match &step.kind {
                StepKind::OneQubit { gates } => {
                    for g in gates {
                        let (c, l) = place[g.qubits()[0]];
                        components[c].ops.push(Op::Gate(g.remapped(|_| l)));
                    }
                }
                StepKind::Cz { pairs } => {
                    for p in pairs {
                        let (c, la) = place[p.a];
                        components[c].ops.push(Op::Cz(la, place[p.b].1));
                    }
                }
                StepKind::Move { moves } => {
                    for m in moves {
                        let (c, l) = place[m.atom];
                        components[c].ops.push(Op::Move(l));
                    }
                }
            }
            if step.duration_ms > 0.0 {
                for comp in components.iter_mut() {
                    comp.ops.push(Op::Idle(step.duration_ms));
                }
            }
        }
        ExecPlan {
            n_atoms: n,
            components,
            place,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Samples the noisy evolution up to (not including) readout.
    pub fn evolve<R: Rng + ?Sized>(&self, model: &NoiseModel, rng: &mut R) -> FinalState {
        let mut lost = vec![false; self.n_atoms];
        let mut leaked = vec![false; self.n_atoms];
        let mut preselect = vec![true; self.n_atoms];
        let mut tableaus = Vec::with_capacity(self.components.len());
        for comp in &self.components {
            let m = comp.atoms.len();
            let mut t = StabilizerTableau::new(m);
            let mut gone = vec![false; m];
            let mut leak = vec![false; m];
            for (l, _) in comp.atoms.iter().enumerate() {
                if rng.gen::<f64>() < model.p_load_loss {
                    gone[l] = true;
                    t.mark_lost(l, rng).expect("fresh atom");
                } else if rng.gen::<f64>() < model.prep_flip() {
                    t.apply_single_pauli(l, Pauli::X);
                }
            }
            let loaded: Vec<bool> = gone.iter().map(|g| !g).collect();
            // leaked atoms are decoupled in the tableau but still in the trap
            let absent = |gone: &[bool], leak: &[bool], l: usize| gone[l] || leak[l];
            for op in &comp.ops {
                match *op {
                    Op::Gate(g) => {
                        let q = g.qubits()[0];
                        if absent(&gone, &leak, q) {
                            continue;
                        }
                        t.apply_unchecked(&g);
                        if !g.kind().is_virtual() && rng.gen::<f64>() < model.p_1q {
                            t.apply_single_pauli(q, random_pauli(rng));
                        }
                    }
                    Op::Cz(a, b) => {
                        if absent(&gone, &leak, a) || absent(&gone, &leak, b) {
                            continue;
                        }
                        t.apply_unchecked(&CliffordGate::cz(a, b));
                        if rng.gen::<f64>() < model.p_2q_pauli {
                            let k = rng.gen_range(1..16);
                            t.apply_single_pauli(a, Pauli::from_bits(k & 1 == 1, k & 2 == 2));
                            t.apply_single_pauli(b, Pauli::from_bits(k & 4 == 4, k & 8 == 8));
                        }
                        if rng.gen::<f64>() < model.p_2q_loss {
                            let q = if rng.gen::<bool>() { a } else { b };
                            t.mark_lost(q, rng).expect("present atom");
                            if rng.gen::<f64>() < model.leak_to_loss_clock {
                                gone[q] = true;
                            } else {
                                leak[q] = true;
                            }
                        }
                    }
                    Op::Move(q) => {
                        if !gone[q] && rng.gen::<f64>() < model.p_move_loss {
                            if !leak[q] {
                                t.mark_lost(q, rng).expect("present atom");
                            }
                            gone[q] = true;
                            leak[q] = false;
                        }
                    }
                    Op::Idle(ms) => {
                        if model.idle_z_per_ms > 0.0 {
                            let p = (model.idle_z_per_ms * ms).min(1.0);
                            for q in 0..m {
                                if !absent(&gone, &leak, q) && rng.gen::<f64>() < p {
                                    t.apply_single_pauli(q, Pauli::Z);
                                }
                            }
                        }
                    }
                }
            }
            for (l, &q) in comp.atoms.iter().enumerate() {
                lost[q] = gone[l];
                leaked[q] = leak[l];
                preselect[q] = loaded[l];
            }
            tableaus.push(t);
        }
        FinalState {
            tableaus,
            place: self.place.clone(),
            lost,
            leaked,
            preselect,
        }
    }

    /// One full trial: evolution, then a Z image of every atom.
    pub fn sample<R: Rng + ?Sized>(&self, model: &NoiseModel, meta: TrialMeta, rng: &mut R) -> TrialRecord {
        let mut st = self.evolve(model, rng);
        st.read_all_z(model, meta, rng)
    }
}

fn random_pauli<R: Rng + ?Sized>(rng: &mut R) -> Pauli {
    [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)]
}

/// The per-trial state just before readout.
#[derive(Clone, Debug)]
pub struct FinalState {
    tableaus: Vec<StabilizerTableau>,
    place: Vec<(usize, usize)>,
    pub lost: Vec<bool>,
    /// Still trapped but out of the qubit subspace.
    pub leaked: Vec<bool>,
    pub preselect: Vec<bool>,
}

impl FinalState {
    /// The tableau holding `atom`, and its local index there.
    pub fn tableau_of(&self, atom: usize) -> (&StabilizerTableau, usize) {
        let (c, l) = self.place[atom];
        (&self.tableaus[c], l)
    }

    /// Applies a gate to an atom that is neither lost nor leaked.
    pub fn apply(&mut self, gate: &CliffordGate) -> Result<()> {
        let (c, _) = self.place[gate.qubits()[0]];
        let local = gate.remapped(|q| self.place[q].1);
        if gate.qubits().iter().any(|&q| self.place[q].0 != c) {
            return Err(crate::error::Error::Usage(format!("{gate} spans independent components")));
        }
        self.tableaus[c].apply_gate(&local).map(|_| ())
    }

    pub fn apply_pauli(&mut self, atom: usize, p: Pauli) {
        let (c, l) = self.place[atom];
        self.tableaus[c].apply_single_pauli(l, p);
    }

    /// Measures every atom in Z with readout noise. Leaked atoms give a
    /// uniformly random bit; lost atoms are missing from the image.
    pub fn read_all_z<R: Rng + ?Sized>(&mut self, model: &NoiseModel, meta: TrialMeta, rng: &mut R) -> TrialRecord {
        let n = self.place.len();
        let (f0, f1) = model.readout_flip();
        let mut readout = vec![None; n];
        for (q, bit) in readout.iter_mut().enumerate() {
            if self.lost[q] {
                continue;
            }
            let v = if self.leaked[q] {
                rng.gen::<bool>()
            } else {
                let (c, l) = self.place[q];
                self.tableaus[c].measure(l, Basis::Z, rng).expect("present atom").outcome
            };
            let flip = rng.gen::<f64>() < if v { f1 } else { f0 };
            *bit = Some(v ^ flip);
        }
        TrialRecord {
            preselect: self.preselect.clone(),
            survival: self.lost.iter().map(|l| !l).collect(),
            readout,
            meta,
        }
    }
}

/// Runs `n_trials` independent trials. Trial `k` draws from its own
/// ChaCha8 stream `k` of `seed`, so results do not depend on thread count
/// or scheduling; the output is in trial order.
pub fn run_trials<T, F>(n_trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..n_trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, k);
            f(k, &mut rng)
        })
        .collect()
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{lower, schedule, MachineLayout};

    fn plan(text: &str) -> ExecPlan {
        let c = lower(&text.parse().unwrap()).unwrap().circuit;
        ExecPlan::new(&schedule(&c, &MachineLayout::default()).unwrap())
    }

    fn meta() -> TrialMeta {
        TrialMeta::default()
    }

    #[test]
    fn zero_noise_is_the_ideal_circuit() {
        let p = plan("QUBITS 3\nX 0\nCX 0 1\nMZ 0\nMZ 1\nMZ 2\n");
        let mut rng = trial_rng(1, 0);
        for _ in 0..20 {
            let r = p.sample(&NoiseModel::zero(), meta(), &mut rng);
            assert_eq!(r.readout, [Some(true), Some(true), Some(false)]);
            assert!(r.survival.iter().all(|&s| s));
        }
    }

    #[test]
    fn forced_leakage_loses_exactly_one_atom() {
        let p = plan("QUBITS 2\nCZ 0 1\n");
        let m = NoiseModel {
            p_2q_loss: 1.0,
            leak_to_loss_clock: 1.0,
            ..NoiseModel::zero()
        };
        let mut rng = trial_rng(2, 0);
        for _ in 0..100 {
            assert_eq!(p.sample(&m, meta(), &mut rng).lost_count(), 1);
        }
    }

    #[test]
    fn silent_leakage_stays_present_and_random() {
        let p = plan("QUBITS 2\nCZ 0 1\n");
        let m = NoiseModel {
            p_2q_loss: 1.0,
            leak_to_loss_clock: 0.0,
            ..NoiseModel::zero()
        };
        let mut ones = 0;
        for k in 0..2000 {
            let r = p.sample(&m, meta(), &mut trial_rng(3, k));
            assert_eq!(r.lost_count(), 0);
            ones += r.readout.iter().filter(|b| **b == Some(true)).count();
        }
        // one of two atoms is random, the other reads 0
        assert!((ones as f64 / 2000.0 - 0.5).abs() < 0.05, "{ones}");
    }

    #[test]
    fn independent_pairs_are_separate_components() {
        let p = plan("QUBITS 4\nCZ 0 1\nCZ 2 3\n");
        assert_eq!(p.components.len(), 2);
    }

    #[test]
    fn trials_are_reproducible() {
        let p = plan("QUBITS 4\nH 0\nCX 0 1\nCX 1 2\nCX 2 3\nMZ 0\n");
        let m = NoiseModel::paper();
        let run = |seed| run_trials(200, seed, |k, rng| p.sample(&m, TrialMeta { trial: k, ..meta() }, rng));
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }
}

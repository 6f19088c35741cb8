//! Experiment families: circuit construction, execution and per-trial
//! interpretation.
//!
//! An experiment is a list of measurement settings. Each setting is a
//! circuit compiled down to a timed schedule, plus the rule that turns one
//! trial record back into logical outcomes. Trial `k` of a run belongs to
//! setting `k / trials_per_setting` and draws from RNG stream `k`.

pub mod build;
pub mod constraints;
pub mod equatorial;
pub mod rb;
pub mod spec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::codes::{builtin, DecodeOutcome};
use crate::compiler::{lower, schedule, CircuitIR, EncodedCircuit, MachineLayout, TimedSchedule};
use crate::error::{Error, Result};
use crate::noise::{run_trials, ExecPlan, NoiseModel, TrialMeta, TrialRecord};

pub use build::{cat_angle, random_sequence, Gen};
pub use constraints::{parity_constraints, success_probability, Constraint};
pub use equatorial::equatorial_parity;
pub use rb::{clifford_group_1q, clifford_group_2q, RbPlan};
pub use spec::{ExperimentSpec, RbKind, BV_SIZES, MAX_CAT};

/// How the final image of a setting is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Readout {
    /// Every atom imaged in Z.
    Z,
    /// The listed circuit qubits are measured along equatorial axes at the
    /// given angles; their bits are sampled from the exact parity.
    Equatorial { qubits: Vec<usize>, angles: Vec<f64> },
}

/// Bits read as a Bernstein–Vazirani answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvRead {
    /// Outcome indices (circuit qubits or logical qubits) of the answer.
    pub query: Vec<usize>,
    /// Logical ancilla that should read `|−⟩`, when encoded.
    pub ancilla: Option<usize>,
    pub s: Vec<bool>,
}

#[derive(Clone, Debug)]
pub enum InterpKind {
    /// Outcomes are the circuit qubits' bits.
    Physical,
    /// Outcomes are decoded logical bits, in logical-offset order.
    Encoded(EncodedCircuit),
    /// Per-copy acceptance and data bits of [[8,3,2]] copies.
    Tesseract(EncodedCircuit),
}

#[derive(Clone, Debug)]
pub struct Interp {
    pub kind: InterpKind,
    /// Parities that an ideal run satisfies.
    pub constraints: Vec<Constraint>,
    pub bv: Option<BvRead>,
}

/// One compiled measurement setting.
#[derive(Clone, Debug)]
pub struct Setting {
    pub name: String,
    /// Circuit before lowering, on circuit qubits.
    pub circuit: CircuitIR,
    /// `atom_of[q]` is the atom holding circuit qubit `q` at readout.
    pub atom_of: Vec<usize>,
    pub schedule: TimedSchedule,
    pub plan: ExecPlan,
    pub readout: Readout,
    pub interp: Interp,
}

#[derive(Clone, Debug)]
pub enum Body {
    Circuits(Vec<Setting>),
    Rb(RbPlan),
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub spec: ExperimentSpec,
    pub body: Body,
}

/// A trial reduced to what the estimators need.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialEval {
    pub setting: usize,
    pub preselect_full: bool,
    /// Atoms missing from the final image.
    pub losses: usize,
    /// Passed the experiment's own checks (flags, decoding).
    pub accepted: bool,
    /// Probability of a logical error, with unknown bits uniformly random.
    pub error: f64,
    pub bv: Option<BvTrial>,
    /// Tesseract: data bits of each accepted [[8,3,2]] copy.
    pub copies: Vec<Option<[Option<bool>; 8]>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BvTrial {
    pub success: bool,
    pub pr_guess: f64,
    pub hamming: f64,
}

impl Setting {
    fn compile(d: build::Draft, layout: &MachineLayout) -> Result<Self> {
        let low = lower(&d.circuit)?;
        let sched = schedule(&low.circuit, layout)?;
        Ok(Setting {
            name: d.name,
            plan: ExecPlan::new(&sched),
            schedule: sched,
            atom_of: low.atom_of,
            circuit: d.circuit,
            readout: d.readout,
            interp: d.interp,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.schedule.n_atoms
    }

    pub fn sample<R: Rng + ?Sized>(&self, model: &NoiseModel, meta: TrialMeta, rng: &mut R) -> TrialRecord {
        match &self.readout {
            Readout::Z => self.plan.sample(model, meta, rng),
            Readout::Equatorial { qubits, angles } => {
                let mut st = self.plan.evolve(model, rng);
                let atoms: Vec<usize> = qubits.iter().map(|&q| self.atom_of[q]).collect();
                let intact = atoms.iter().all(|&a| !st.lost[a] && !st.leaked[a]);
                let p_even = if intact {
                    let (t, _) = st.tableau_of(atoms[0]);
                    let local: Vec<usize> = atoms.iter().map(|&a| st.tableau_of(a).1).collect();
                    debug_assert!(atoms.iter().all(|&a| std::ptr::eq(st.tableau_of(a).0, t)));
                    let e = equatorial_parity(t, &local, angles).expect("intact qubits in one component");
                    (1.0 + e) / 2.0
                } else {
                    0.5
                };
                let odd = rng.gen::<f64>() >= p_even;
                // the other atoms are imaged normally
                let mut rec = st.read_all_z(model, meta, rng);
                let (f0, f1) = model.readout_flip();
                let mut parity = false;
                let last = atoms.len() - 1;
                for (i, &a) in atoms.iter().enumerate() {
                    if st.lost[a] {
                        continue;
                    }
                    let mut v = rng.gen::<bool>();
                    if i == last && intact {
                        v = parity ^ odd;
                    }
                    parity ^= v;
                    let flip = rng.gen::<f64>() < if v { f1 } else { f0 };
                    rec.readout[a] = Some(v ^ flip);
                }
                rec
            }
        }
    }

    /// Outcome bits of the trial: circuit-qubit bits, or decoded logical
    /// bits. Returns the bits plus (flagged, rejected).
    fn outcome_bits(&self, rec: &TrialRecord) -> Result<(Vec<Option<bool>>, bool, bool)> {
        let bit = |q: usize| rec.readout[self.atom_of[q]];
        match &self.interp.kind {
            InterpKind::Physical => Ok(((0..self.circuit.n_qubits).map(bit).collect(), false, false)),
            InterpKind::Encoded(enc) | InterpKind::Tesseract(enc) => {
                let r = enc.read(bit)?;
                let mut bits = Vec::new();
                let mut rejected = false;
                for (b, o) in enc.blocks.iter().zip(&r.blocks) {
                    let k = builtin(&b.code).k();
                    match o {
                        DecodeOutcome::Decoded(v) if v.len() == k => bits.extend(v.iter().map(|&x| Some(x))),
                        DecodeOutcome::Rejected { .. } => {
                            rejected = true;
                            bits.extend(std::iter::repeat(None).take(k));
                        }
                        _ => bits.extend(std::iter::repeat(None).take(k)),
                    }
                }
                Ok((bits, r.flagged, rejected))
            }
        }
    }

    pub fn evaluate(&self, index: usize, rec: &TrialRecord) -> Result<TrialEval> {
        if rec.n_atoms() != self.n_atoms() {
            return Err(Error::Usage(format!(
                "record has {} atoms, setting {} has {}",
                rec.n_atoms(),
                self.name,
                self.n_atoms()
            )));
        }
        let mut ev = TrialEval {
            setting: index,
            preselect_full: rec.full_preselect(),
            losses: rec.lost_count(),
            accepted: true,
            error: 0.0,
            bv: None,
            copies: Vec::new(),
        };
        if let InterpKind::Tesseract(enc) = &self.interp.kind {
            let bit = |q: usize| rec.readout[self.atom_of[q]];
            let ft = enc.block_flags.iter().any(|f| !f.is_empty());
            for (b, blk) in enc.blocks.iter().enumerate() {
                let data: Vec<Option<bool>> = blk.qubits.iter().map(|&q| bit(q)).collect();
                let flags = &enc.block_flags[b];
                let ok = !ft || (data.iter().all(Option::is_some) && flags.iter().all(|&q| bit(q) == Some(false)));
                ev.copies.push(ok.then(|| data.try_into().expect("eight data qubits")));
            }
            return Ok(ev);
        }
        let (bits, flagged, rejected) = self.outcome_bits(rec)?;
        let p_ok = success_probability(&self.interp.constraints, &bits);
        match (&self.interp.bv, &self.interp.kind) {
            (Some(bv), _) => {
                let mut pr_guess = 1.0;
                let mut hamming = 0.0;
                let mut exact = true;
                for (&i, &want) in bv.query.iter().zip(&bv.s) {
                    match bits[i] {
                        Some(b) if b == want => {}
                        Some(_) => {
                            pr_guess = 0.0;
                            hamming += 1.0;
                            exact = false;
                        }
                        None => {
                            pr_guess *= 0.5;
                            hamming += 0.5;
                            exact = false;
                        }
                    }
                }
                ev.accepted = !flagged && bv.query.iter().all(|&i| bits[i].is_some());
                let anc_ok = bv.ancilla.map_or(true, |a| bits[a] == Some(true));
                let success = ev.accepted && exact && anc_ok;
                ev.error = if success { 0.0 } else { 1.0 };
                ev.bv = Some(BvTrial { success, pr_guess, hamming });
            }
            (None, InterpKind::Physical) => ev.error = 1.0 - p_ok,
            (None, _) => {
                let needed = self.interp.constraints.iter().flat_map(|c| &c.support).all(|&i| bits[i].is_some());
                ev.accepted = !flagged && !rejected && needed;
                ev.error = 1.0 - p_ok;
            }
        }
        Ok(ev)
    }
}

impl Experiment {
    pub fn compile(spec: &ExperimentSpec) -> Result<Self> {
        Self::compile_with(spec, &MachineLayout::default())
    }

    pub fn compile_with(spec: &ExperimentSpec, layout: &MachineLayout) -> Result<Self> {
        spec.validate()?;
        let drafts = match spec {
            ExperimentSpec::Cat { n } => build::cat(*n)?,
            ExperimentSpec::CatEncoded { k } => build::cat_encoded(*k)?,
            ExperimentSpec::Bv { encoded: false, s } => build::bv_unencoded(s)?,
            ExperimentSpec::Bv { encoded: true, s } => build::bv_encoded(s)?,
            ExperimentSpec::RepeatedCz { j, encoded } => build::repeated_cz(*j, *encoded)?,
            ExperimentSpec::RandomSequence { id, encoded } => build::random_sequence_drafts(*id, *encoded)?,
            ExperimentSpec::Tesseract { ft } => build::tesseract(*ft)?,
            ExperimentSpec::Rb { kind, depths } => {
                return Ok(Experiment {
                    spec: spec.clone(),
                    body: Body::Rb(RbPlan::new(*kind, depths.clone(), layout)?),
                })
            }
        };
        let settings = drafts.into_iter().map(|d| Setting::compile(d, layout)).collect::<Result<Vec<_>>>()?;
        Ok(Experiment {
            spec: spec.clone(),
            body: Body::Circuits(settings),
        })
    }

    pub fn setting_names(&self) -> Vec<String> {
        match &self.body {
            Body::Circuits(s) => s.iter().map(|s| s.name.clone()).collect(),
            Body::Rb(p) => p.setting_names(),
        }
    }

    pub fn settings(&self) -> &[Setting] {
        match &self.body {
            Body::Circuits(s) => s,
            Body::Rb(_) => &[],
        }
    }

    pub fn setting_index(&self, name: &str) -> Result<usize> {
        self.setting_names()
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Usage(format!("{} has no setting {name:?}", self.spec)))
    }

    /// One trial of setting `s`.
    pub fn sample(&self, s: usize, model: &NoiseModel, seed: u64, trial: u64, rng: &mut ChaCha8Rng) -> TrialRecord {
        let meta = TrialMeta {
            experiment: self.spec.to_string(),
            setting: self.setting_names()[s].clone(),
            seed,
            trial,
        };
        match &self.body {
            Body::Circuits(settings) => settings[s].sample(model, meta, rng),
            Body::Rb(p) => p.sample(s, model, meta, rng),
        }
    }

    /// Runs every setting `trials_per_setting` times, in trial order.
    pub fn run(&self, model: &NoiseModel, trials_per_setting: u64, seed: u64) -> Vec<TrialRecord> {
        let per = trials_per_setting.max(1);
        let total = trials_per_setting * self.setting_names().len() as u64;
        run_trials(total, seed, |k, rng| self.sample((k / per) as usize, model, seed, k, rng))
    }

    pub fn evaluate(&self, rec: &TrialRecord) -> Result<TrialEval> {
        if rec.meta.experiment != self.spec.to_string() {
            return Err(Error::Usage(format!(
                "record of {:?} evaluated against {}",
                rec.meta.experiment, self.spec
            )));
        }
        let s = self.setting_index(&rec.meta.setting)?;
        match &self.body {
            Body::Circuits(settings) => settings[s].evaluate(s, rec),
            Body::Rb(p) => p.evaluate(s, rec),
        }
    }
}

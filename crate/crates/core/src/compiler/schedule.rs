//! Zoned movement scheduling.
//!
//! Atoms live on a square register grid and travel to an interaction zone
//! (IZ) row of pair slots for CZ gates. The scheduler is list-based: each
//! round it emits every ready one-qubit gate, or else a chunk of ready CZ
//! pairs that fits in the IZ. Atoms stay in the IZ after a gate and are only
//! sent home when their slot is needed (farthest next use first) or at the
//! end, so a block that keeps interacting is never shuttled back and forth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{CliffordGate, GateKind};

use super::ir::{CircuitIR, Instruction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub fn distance(self, other: Site) -> f64 {
        let (dx, dy) = ((self.x - other.x) as f64, (self.y - other.y) as f64);
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub iterations: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineLayout {
    pub register_cols: usize,
    pub register_rows: usize,
    pub iz_pair_slots: usize,
    /// Grid row of the IZ; slot `s` occupies `(4s, row)` and `(4s + 1, row)`.
    pub iz_row: i32,
    pub move_ms_per_sqrt_unit: f64,
    pub handoff_ms: f64,
    pub cz_step_ms: f64,
    pub one_qubit_step_ms: f64,
    /// Optional move-count optimization over CZ chunk priorities.
    pub anneal: Option<AnnealConfig>,
}

impl Default for MachineLayout {
    fn default() -> Self {
        Self {
            register_cols: 16,
            register_rows: 16,
            iz_pair_slots: 8,
            iz_row: -5,
            move_ms_per_sqrt_unit: 0.12,
            handoff_ms: 0.4,
            cz_step_ms: 0.0,
            one_qubit_step_ms: 0.0,
            anneal: None,
        }
    }
}

impl MachineLayout {
    pub fn capacity(&self) -> usize {
        self.register_cols * self.register_rows
    }

    pub fn register_site(&self, atom: usize) -> Site {
        Site {
            x: (atom % self.register_cols) as i32,
            y: (atom / self.register_cols) as i32,
        }
    }

    pub fn iz_site(&self, slot: usize, side: usize) -> Site {
        Site {
            x: 4 * slot as i32 + side as i32,
            y: self.iz_row,
        }
    }

    pub fn move_duration_ms(&self, length: f64) -> f64 {
        self.move_ms_per_sqrt_unit * length.sqrt() + self.handoff_ms
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub atom: usize,
    pub from: Site,
    pub to: Site,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StepKind {
    OneQubit { gates: Vec<CliffordGate> },
    Cz { pairs: Vec<CzSlot> },
    Move { moves: Vec<Move> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CzSlot {
    pub slot: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimedStep {
    pub start_ms: f64,
    pub duration_ms: f64,
    #[serde(flatten)]
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimedSchedule {
    pub n_atoms: usize,
    pub steps: Vec<TimedStep>,
    /// Atoms read out in Z at the end (every other atom is imaged too, but
    /// its bit carries no circuit meaning).
    pub measured: Vec<usize>,
    pub move_count: usize,
    pub total_duration_ms: f64,
}

impl TimedSchedule {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn cz_count(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match &s.kind {
                StepKind::Cz { pairs } => pairs.len(),
                _ => 0,
            })
            .sum()
    }

    /// Replays the schedule against the circuit it came from and checks
    /// every legality rule: per-atom operation order, slot capacity, both
    /// CZ partners in the same slot, moves starting where the atom is, no
    /// shared sites, and shape-preserving parallel moves.
    pub fn validate(&self, circuit: &CircuitIR, layout: &MachineLayout) -> Result<()> {
        let bad = |m: String| Err(Error::Compile(format!("illegal schedule: {m}")));
        let mut want: Vec<Vec<CliffordGate>> = vec![Vec::new(); self.n_atoms];
        for ins in &circuit.instructions {
            if let Instruction::Gate(g) = ins {
                for &q in g.qubits() {
                    want[q].push(*g);
                }
            }
        }
        let mut got: Vec<Vec<CliffordGate>> = vec![Vec::new(); self.n_atoms];
        let mut pos: Vec<Site> = (0..self.n_atoms).map(|a| layout.register_site(a)).collect();
        let mut t = 0.0;
        for (i, step) in self.steps.iter().enumerate() {
            if (step.start_ms - t).abs() > 1e-9 {
                return bad(format!("step {i} starts at {} not {t}", step.start_ms));
            }
            t += step.duration_ms;
            match &step.kind {
                StepKind::OneQubit { gates } => {
                    for g in gates {
                        got[g.qubits()[0]].push(*g);
                    }
                }
                StepKind::Cz { pairs } => {
                    if pairs.len() > layout.iz_pair_slots {
                        return bad(format!("step {i} has {} CZ pairs", pairs.len()));
                    }
                    for p in pairs {
                        let sites = [layout.iz_site(p.slot, 0), layout.iz_site(p.slot, 1)];
                        if !(sites.contains(&pos[p.a]) && sites.contains(&pos[p.b])) {
                            return bad(format!("step {i}: CZ {} {} not together in slot {}", p.a, p.b, p.slot));
                        }
                        let g = CliffordGate::cz(p.a, p.b);
                        got[p.a].push(g);
                        got[p.b].push(g);
                    }
                }
                StepKind::Move { moves } => {
                    if moves.len() > 2 && !shape_preserving(moves) {
                        return bad(format!("step {i}: parallel move is not shape-preserving"));
                    }
                    for m in moves {
                        if pos[m.atom] != m.from {
                            return bad(format!("step {i}: atom {} is not at {:?}", m.atom, m.from));
                        }
                        pos[m.atom] = m.to;
                    }
                    let mut seen = pos.clone();
                    seen.sort();
                    if seen.windows(2).any(|w| w[0] == w[1]) {
                        return bad(format!("step {i}: two atoms share a site"));
                    }
                }
            }
        }
        let same = |a: &CliffordGate, b: &CliffordGate| {
            a.kind() == b.kind() && {
                let (mut x, mut y) = (a.qubits().to_vec(), b.qubits().to_vec());
                if a.kind() == GateKind::Cz {
                    x.sort();
                    y.sort();
                }
                x == y
            }
        };
        for q in 0..self.n_atoms {
            if want[q].len() != got[q].len() || !want[q].iter().zip(&got[q]).all(|(a, b)| same(a, b)) {
                return bad(format!("operation order on atom {q} differs from the circuit"));
            }
            if pos[q] != layout.register_site(q) {
                return bad(format!("atom {q} not back in the register"));
            }
        }
        Ok(())
    }
}

/// Whether a set of moves is a per-axis increasing affine map (stretch
/// plus translation) of the source sites.
pub fn shape_preserving(moves: &[Move]) -> bool {
    let axis = |f: &dyn Fn(Site) -> i32| -> bool {
        let pts: Vec<(f64, f64)> = moves.iter().map(|m| (f(m.from) as f64, f(m.to) as f64)).collect();
        let Some(&(x0, y0)) = pts.first() else { return true };
        match pts.iter().find(|p| p.0 != x0) {
            None => pts.iter().all(|p| p.1 == y0),
            Some(&(x1, y1)) => {
                let s = (y1 - y0) / (x1 - x0);
                s > 0.0 && pts.iter().all(|p| (y0 + s * (p.0 - x0) - p.1).abs() < 1e-9)
            }
        }
    };
    axis(&|s| s.x) && axis(&|s| s.y)
}

/// Splits moves into parallel groups, greedily, keeping every group of
/// more than two atoms shape-preserving.
fn group_moves(moves: Vec<Move>) -> Vec<Vec<Move>> {
    let mut groups: Vec<Vec<Move>> = Vec::new();
    for m in moves {
        let fits = groups.iter().position(|g| {
            let mut t = g.clone();
            t.push(m);
            t.len() <= 2 || shape_preserving(&t)
        });
        match fits {
            Some(i) => groups[i].push(m),
            None => groups.push(vec![m]),
        }
    }
    groups
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Place {
    Register,
    Iz(usize, usize),
}

struct Builder<'a> {
    layout: &'a MachineLayout,
    place: Vec<Place>,
    slots: Vec<[Option<usize>; 2]>,
    steps: Vec<TimedStep>,
    t: f64,
    move_count: usize,
}

impl Builder<'_> {
    fn site(&self, atom: usize, p: Place) -> Site {
        match p {
            Place::Register => self.layout.register_site(atom),
            Place::Iz(s, side) => self.layout.iz_site(s, side),
        }
    }

    fn push(&mut self, duration_ms: f64, kind: StepKind) {
        self.steps.push(TimedStep {
            start_ms: self.t,
            duration_ms,
            kind,
        });
        self.t += duration_ms;
    }

    /// Emits a batch of relocations as grouped move steps. A move waits
    /// until its target site is empty; a cycle of waiting moves is broken
    /// by sending one atom home first.
    fn relocate(&mut self, batch: Vec<(usize, Place)>) {
        let mut pending: Vec<(usize, Place)> = batch.into_iter().filter(|&(a, to)| self.place[a] != to).collect();
        while !pending.is_empty() {
            let busy = |b: &Self, a: usize, to: Place| b.place.iter().enumerate().any(|(o, &p)| o != a && p == to && to != Place::Register);
            let (go, wait): (Vec<_>, Vec<_>) = pending.iter().partition(|&&(a, to)| !busy(self, a, to));
            if go.is_empty() {
                let (a, _) = wait[0];
                self.emit(vec![(a, Place::Register)]);
                pending = wait.into_iter().filter(|&(x, to)| x != a || to != Place::Register).collect();
                continue;
            }
            self.emit(go);
            pending = wait;
        }
    }

    fn emit(&mut self, batch: Vec<(usize, Place)>) {
        let mut moves = Vec::new();
        for (atom, to) in batch {
            let from = self.place[atom];
            if let Place::Iz(s, side) = from {
                self.slots[s][side] = None;
            }
            if let Place::Iz(s, side) = to {
                self.slots[s][side] = Some(atom);
            }
            let (f, t) = (self.site(atom, from), self.site(atom, to));
            moves.push(Move {
                atom,
                from: f,
                to: t,
                length: f.distance(t),
            });
            self.place[atom] = to;
        }
        self.move_count += moves.len();
        for g in group_moves(moves) {
            let d = g.iter().map(|m| self.layout.move_duration_ms(m.length)).fold(0.0, f64::max);
            self.push(d, StepKind::Move { moves: g });
        }
    }
}

/// Schedules a lowered circuit (one-qubit gates, CZ, measurements).
pub fn schedule(circuit: &CircuitIR, layout: &MachineLayout) -> Result<TimedSchedule> {
    let n = circuit.n_qubits;
    let cz_ops: Vec<usize> = circuit
        .instructions
        .iter()
        .enumerate()
        .filter(|(_, i)| matches!(i, Instruction::Gate(g) if g.kind() == GateKind::Cz))
        .map(|(k, _)| k)
        .collect();
    let base = schedule_with_priority(circuit, layout, &|k| k)?;
    let Some(cfg) = layout.anneal else { return Ok(base) };
    if cz_ops.len() < 2 {
        return Ok(base);
    }
    // simulated annealing over CZ priorities, objective = move count
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut keys: Vec<usize> = (0..circuit.instructions.len()).collect();
    let mut cur = base.move_count;
    let mut best = base;
    for it in 0..cfg.iterations {
        let temp = 2.0 * (1.0 - it as f64 / cfg.iterations as f64) + 1e-3;
        let (i, j) = (cz_ops[rng.gen_range(0..cz_ops.len())], cz_ops[rng.gen_range(0..cz_ops.len())]);
        keys.swap(i, j);
        let cand = schedule_with_priority(circuit, layout, &|k| keys[k])?;
        let delta = cand.move_count as f64 - cur as f64;
        if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
            cur = cand.move_count;
            if cand.move_count < best.move_count {
                best = cand;
            }
        } else {
            keys.swap(i, j);
        }
    }
    debug_assert_eq!(best.n_atoms, n);
    Ok(best)
}

fn schedule_with_priority(circuit: &CircuitIR, layout: &MachineLayout, prio: &dyn Fn(usize) -> usize) -> Result<TimedSchedule> {
    let n = circuit.n_qubits;
    if n > layout.capacity() {
        return Err(Error::Compile(format!("{n} atoms exceed the register capacity of {}", layout.capacity())));
    }
    // per-atom queues of instruction indices (gates only)
    let mut queue: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut measured = Vec::new();
    for (k, ins) in circuit.instructions.iter().enumerate() {
        match ins {
            Instruction::Gate(g) => {
                if g.kind().is_two_qubit() && g.kind() != GateKind::Cz {
                    return Err(Error::Compile(format!("schedule needs a lowered circuit, found {g}")));
                }
                for &q in g.qubits() {
                    queue[q].push(k);
                }
            }
            Instruction::MeasureZ(q) => measured.push(*q),
            Instruction::MeasureX(_) | Instruction::PrepPlus(_) => {
                return Err(Error::Compile(format!("schedule needs a lowered circuit, found {ins}")));
            }
            Instruction::Prep0(_) | Instruction::Barrier => {}
        }
    }
    // later CZ uses of each atom, for eviction decisions
    let mut cz_uses: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, ins) in circuit.instructions.iter().enumerate() {
        if let Instruction::Gate(g) = ins {
            if g.kind() == GateKind::Cz {
                for &q in g.qubits() {
                    cz_uses[q].push(k);
                }
            }
        }
    }
    let gate = |k: usize| match circuit.instructions[k] {
        Instruction::Gate(g) => g,
        _ => unreachable!(),
    };
    // barriers split the circuit into segments; atoms go home at each one
    let mut segment = vec![0usize; circuit.instructions.len()];
    let mut seg = 0;
    for (k, ins) in circuit.instructions.iter().enumerate() {
        if *ins == Instruction::Barrier {
            seg += 1;
        }
        segment[k] = seg;
    }
    let mut current = 0usize;
    let mut head = vec![0usize; n];
    let mut b = Builder {
        layout,
        place: vec![Place::Register; n],
        slots: vec![[None, None]; layout.iz_pair_slots],
        steps: Vec::new(),
        t: 0.0,
        move_count: 0,
    };
    let next_use = |head: &[usize], q: usize| -> usize {
        let cur = queue[q].get(head[q]).copied().unwrap_or(usize::MAX);
        cz_uses[q].iter().copied().find(|&k| k >= cur).unwrap_or(usize::MAX)
    };
    loop {
        let mut ready: Vec<usize> = Vec::new();
        for q in 0..n {
            if let Some(&k) = queue[q].get(head[q]) {
                let g = gate(k);
                if g.qubits().iter().all(|&p| queue[p].get(head[p]) == Some(&k)) && g.qubits()[0] == q && segment[k] <= current {
                    ready.push(k);
                }
            }
        }
        if ready.is_empty() {
            if current >= seg {
                break;
            }
            current += 1;
            let home: Vec<(usize, Place)> = (0..n).filter(|&q| b.place[q] != Place::Register).map(|q| (q, Place::Register)).collect();
            b.relocate(home);
            continue;
        }
        let one: Vec<usize> = ready.iter().copied().filter(|&k| !gate(k).kind().is_two_qubit()).collect();
        if !one.is_empty() {
            let mut gates: Vec<CliffordGate> = one.iter().map(|&k| gate(k)).collect();
            gates.sort_by_key(|g| g.qubits()[0]);
            for g in &gates {
                head[g.qubits()[0]] += 1;
            }
            b.push(layout.one_qubit_step_ms, StepKind::OneQubit { gates });
            continue;
        }
        let mut czs = ready;
        let resident = |b: &Builder, k: usize| gate(k).qubits().iter().any(|&q| b.place[q] != Place::Register);
        czs.sort_by_key(|&k| (!resident(&b, k), prio(k), k));
        czs.truncate(layout.iz_pair_slots);
        // slot assignment: anchored pairs keep a resident's slot
        let mut slot_of: Vec<Option<usize>> = vec![None; czs.len()];
        let mut reserved = vec![false; layout.iz_pair_slots];
        for (i, &k) in czs.iter().enumerate() {
            for &q in gate(k).qubits() {
                if let Place::Iz(s, _) = b.place[q] {
                    if !reserved[s] && slot_of[i].is_none() {
                        reserved[s] = true;
                        slot_of[i] = Some(s);
                    }
                }
            }
        }
        let in_chunk: Vec<usize> = czs.iter().flat_map(|&k| gate(k).qubits().to_vec()).collect();
        for i in 0..czs.len() {
            if slot_of[i].is_some() {
                continue;
            }
            // free slot first, else the slot whose residents are needed last
            let pick = (0..layout.iz_pair_slots)
                .filter(|&s| !reserved[s])
                .min_by_key(|&s| {
                    let occ = b.slots[s].iter().flatten().count();
                    let soonest = b.slots[s].iter().flatten().map(|&q| next_use(&head, q)).min().unwrap_or(usize::MAX);
                    (occ > 0, std::cmp::Reverse(soonest), s)
                })
                .expect("chunk never exceeds the slot count");
            reserved[pick] = true;
            slot_of[i] = Some(pick);
        }
        // evict residents of reserved slots that are not in this chunk
        let mut evict = Vec::new();
        for s in 0..layout.iz_pair_slots {
            if reserved[s] {
                for q in b.slots[s].iter().flatten() {
                    if !in_chunk.contains(q) {
                        evict.push((*q, Place::Register));
                    }
                }
            }
        }
        evict.sort_by_key(|e| e.0);
        b.relocate(evict);
        // arrivals: a resident already in its slot keeps its side
        let mut arrive = Vec::new();
        let mut pairs = Vec::new();
        for (i, &k) in czs.iter().enumerate() {
            let s = slot_of[i].unwrap();
            let mut qs = gate(k).qubits().to_vec();
            qs.sort();
            let stays: Vec<usize> = qs.iter().copied().filter(|&q| matches!(b.place[q], Place::Iz(t, _) if t == s)).collect();
            let mut sides = [None, None];
            for &q in &stays {
                if let Place::Iz(_, side) = b.place[q] {
                    sides[side] = Some(q);
                }
            }
            for &q in &qs {
                if !stays.contains(&q) {
                    let side = if sides[0].is_none() { 0 } else { 1 };
                    sides[side] = Some(q);
                    arrive.push((q, Place::Iz(s, side)));
                }
            }
            pairs.push(CzSlot { slot: s, a: qs[0], b: qs[1] });
        }
        // atoms leaving a slot that another pair is arriving into go first
        arrive.sort_by_key(|&(q, to)| (matches!(b.place[q], Place::Register), to_key(to), q));
        b.relocate(arrive);
        for &k in &czs {
            for &q in gate(k).qubits() {
                head[q] += 1;
            }
        }
        pairs.sort_by_key(|p| p.slot);
        b.push(layout.cz_step_ms, StepKind::Cz { pairs });
    }
    if head.iter().zip(&queue).any(|(h, q)| *h != q.len()) {
        return Err(Error::Compile("scheduler stalled before the end of the circuit".into()));
    }
    let home: Vec<(usize, Place)> = (0..n).filter(|&q| b.place[q] != Place::Register).map(|q| (q, Place::Register)).collect();
    b.relocate(home);
    Ok(TimedSchedule {
        n_atoms: n,
        total_duration_ms: b.t,
        move_count: b.move_count,
        steps: b.steps,
        measured,
    })
}

fn to_key(p: Place) -> (usize, usize) {
    match p {
        Place::Register => (usize::MAX, 0),
        Place::Iz(s, side) => (s, side),
    }
}

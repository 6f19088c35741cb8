use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use erasim::analysis::{analyze, fit_decay, Report, SelectionPolicy};
use erasim::compiler::{lower, schedule, CircuitIR, Instruction, MachineLayout, TimedSchedule};
use erasim::experiments::{Experiment, TrialEval};
use erasim::noise::NoiseModel;
use erasim::{CliffordGate, GateKind};

const KINDS: [GateKind; 11] = [
    GateKind::H,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::Sz,
    GateKind::SzDag,
    GateKind::Sx,
    GateKind::SxDag,
    GateKind::Cz,
    GateKind::Cnot,
    GateKind::Swap,
];

/// Turns raw draws into a valid program: preparations only on fresh
/// qubits, nothing after a measurement.
fn build_program(n: usize, draws: &[(u8, usize, usize)]) -> CircuitIR {
    let mut c = CircuitIR::new(n);
    let (mut touched, mut retired) = (vec![false; n], vec![false; n]);
    for &(op, a, b) in draws {
        let (a, b) = (a % n, b % n);
        let ins = match op % 16 {
            0 | 1 if touched[a] => continue,
            0 => Instruction::Prep0(a),
            1 => Instruction::PrepPlus(a),
            2 => Instruction::MeasureZ(a),
            3 => Instruction::MeasureX(a),
            4 => Instruction::Barrier,
            k => {
                let kind = KINDS[(k as usize - 5) % KINDS.len()];
                if kind.is_two_qubit() {
                    if a == b {
                        continue;
                    }
                    Instruction::Gate(CliffordGate::new(kind, &[a, b]).unwrap())
                } else {
                    Instruction::Gate(CliffordGate::new(kind, &[a]).unwrap())
                }
            }
        };
        if ins.qubits().iter().any(|&q| retired[q]) {
            continue;
        }
        for q in ins.qubits() {
            touched[q] = true;
            retired[q] = ins.is_measurement();
        }
        c.push(ins);
    }
    c
}

fn program() -> impl Strategy<Value = CircuitIR> {
    (1usize..=24, prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>()), 0..80))
        .prop_map(|(n, d)| build_program(n, &d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn schedules_are_legal_and_round_trip(c in program()) {
        c.validate().unwrap();
        let text: CircuitIR = c.to_string().parse().unwrap();
        prop_assert_eq!(&text, &c);

        let low = lower(&c).unwrap();
        let layout = MachineLayout::default();
        let s = schedule(&low.circuit, &layout).unwrap();
        s.validate(&low.circuit, &layout).unwrap();
        prop_assert_eq!(s.cz_count(), low.circuit.count_gates(GateKind::Cz));
        let back: TimedSchedule = serde_json::from_str(&s.to_json()).unwrap();
        prop_assert_eq!(back, s);

        let mut seen = low.atom_of.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..c.n_qubits).collect::<Vec<_>>());
    }
}

fn trial_eval() -> impl Strategy<Value = TrialEval> {
    (0usize..3, any::<bool>(), 0usize..6, any::<bool>(), 0.0f64..=1.0).prop_map(|(setting, preselect_full, losses, accepted, error)| TrialEval {
        setting,
        preselect_full,
        losses,
        accepted,
        error,
        bv: None,
        copies: Vec::new(),
    })
}

proptest! {
    #[test]
    fn looser_loss_limits_keep_more(evals in prop::collection::vec(trial_eval(), 0..200)) {
        let kept = |p: &SelectionPolicy| evals.iter().filter(|e| p.accepts(e)).count();
        let mut last = 0;
        for k in 0..7 {
            let p = SelectionPolicy::max_losses(k);
            let n = kept(&p);
            prop_assert!(n >= last);
            last = n;
            // every trial kept at k is kept at k + 1
            let q = SelectionPolicy::max_losses(k + 1);
            prop_assert!(evals.iter().all(|e| !p.accepts(e) || q.accepts(e)));
        }
        prop_assert!(kept(&SelectionPolicy::default()) >= last);
        prop_assert_eq!(kept(&SelectionPolicy::permissive()), evals.len());
    }
}

fn noisy(spec: &str) -> (Experiment, Vec<TrialEval>) {
    let exp = Experiment::compile(&spec.parse().unwrap()).unwrap();
    let mut model = NoiseModel::paper();
    model.set("p_2q_loss", 0.03).unwrap();
    let evals = exp.run(&model, 150, 9).iter().map(|r| exp.evaluate(r).unwrap()).collect();
    (exp, evals)
}

fn cases() -> &'static [(Experiment, Vec<TrialEval>)] {
    static CASES: OnceLock<Vec<(Experiment, Vec<TrialEval>)>> = OnceLock::new();
    CASES.get_or_init(|| {
        ["cat:n=6", "cat-encoded:k=8", "bv:n=7,encoded=true", "repeated-cz:j=2,encoded=true"]
            .into_iter()
            .map(noisy)
            .collect()
    })
}

fn same_report(a: &Report, b: &Report) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.rows.len(), b.rows.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        prop_assert_eq!(&x.metric, &y.metric);
        prop_assert_eq!((x.n_accepted, x.n_total), (y.n_accepted, y.n_total));
        for (u, v) in [(x.value, y.value), (x.ci_low, y.ci_low), (x.ci_high, y.ci_high)] {
            prop_assert!((u - v).abs() < 1e-9 || (u.is_nan() && v.is_nan()), "{}: {} vs {}", x.metric, u, v);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimators_ignore_trial_order(case in 0usize..4, shuffle_seed in any::<u64>(), k in 0usize..4) {
        let (exp, evals) = &cases()[case];
        let mut shuffled = evals.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        for p in [SelectionPolicy::default(), SelectionPolicy::permissive(), SelectionPolicy::max_losses(k)] {
            same_report(&analyze(exp, evals, &p, 1).unwrap(), &analyze(exp, &shuffled, &p, 1).unwrap())?;
        }
    }

    #[test]
    fn rb_fit_recovers_the_decay(
        ri in 0usize..4,
        a in 0.3f64..0.8,
        b in 0.1f64..0.5,
        jitter in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let r: f64 = [0.9, 0.95, 0.99, 0.999][ri];
        // depths reaching roughly two decay lengths
        let span = (2.0 / (1.0 - r)).min(3000.0);
        let depths: Vec<f64> = (0..8).map(|i| (span * i as f64 / 7.0).round().max(1.0)).collect();
        let y: Vec<f64> = depths.iter().zip(&jitter).map(|(&d, j)| a * r.powf(d) + b + 1e-4 * j).collect();
        let fit = fit_decay(&depths, &y, None, None).unwrap();
        prop_assert!((fit.r - r).abs() <= 0.02 * (1.0 - r), "r = {} fitted {}", r, fit.r);
        let exact: Vec<f64> = depths.iter().map(|&d| a * r.powf(d) + b).collect();
        let fit = fit_decay(&depths, &exact, None, Some(b)).unwrap();
        prop_assert!((fit.r - r).abs() <= 1e-6 * (1.0 - r) + 1e-12);
        prop_assert!((fit.a - a).abs() < 1e-6);
    }
}

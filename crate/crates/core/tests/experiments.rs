use erasim::codes::{tesseract_decode, CodeBasis, TesseractOutcome};
use erasim::experiments::{Experiment, ExperimentSpec, TrialEval};
use erasim::noise::NoiseModel;

fn compile(spec: &str) -> Experiment {
    Experiment::compile(&spec.parse().unwrap()).unwrap()
}

fn noiseless_evals(exp: &Experiment, trials: u64) -> Vec<TrialEval> {
    exp.run(&NoiseModel::zero(), trials, 5)
        .iter()
        .map(|r| exp.evaluate(r).unwrap())
        .collect()
}

#[test]
fn noiseless_runs_always_succeed() {
    let specs = [
        "cat:n=6",
        "cat:n=11",
        "cat-encoded:k=24",
        "bv:n=7,encoded=false",
        "bv:n=7,encoded=true",
        "bv:n=11,encoded=true,s=10110011101",
        "repeated-cz:j=0,encoded=true",
        "repeated-cz:j=3,encoded=true",
        "repeated-cz:j=3,encoded=false",
        "tesseract:ft=false",
    ];
    for s in specs {
        let exp = compile(s);
        for ev in noiseless_evals(&exp, 20) {
            assert!(ev.accepted, "{s} setting {} rejected", ev.setting);
            assert_eq!(ev.error, 0.0, "{s} setting {}", ev.setting);
            if let Some(bv) = ev.bv {
                assert!(bv.success && bv.pr_guess == 1.0 && bv.hamming == 0.0, "{s}");
            }
        }
    }
    for id in 0..4 {
        for enc in [true, false] {
            let s = format!("random-sequence:id={id},encoded={enc}");
            for ev in noiseless_evals(&compile(&s), 10) {
                assert!(ev.accepted && ev.error == 0.0, "{s} setting {}", ev.setting);
            }
        }
    }
}

#[test]
fn noiseless_tesseract_blocks_are_correct() {
    for ft in [true, false] {
        let exp = compile(&format!("tesseract:ft={ft}"));
        for ev in noiseless_evals(&exp, 4) {
            let copies: Vec<[Option<bool>; 8]> = ev.copies.iter().map(|c| c.expect("accepted copy")).collect();
            assert_eq!(copies.len(), if ft { 25 } else { 32 });
            for pair in copies.chunks_exact(2) {
                let mut bits = [None; 16];
                bits[..8].copy_from_slice(&pair[0]);
                bits[8..].copy_from_slice(&pair[1]);
                let basis = if exp.setting_names()[ev.setting] == "x" { CodeBasis::X } else { CodeBasis::Z };
                assert_eq!(tesseract_decode(&bits, basis), TesseractOutcome::Correct);
            }
        }
    }
}

#[test]
fn cat_z_outcomes_alternate() {
    let exp = compile("cat:n=8");
    let z = exp.setting_index("z").unwrap();
    let mut seen = [false; 2];
    for r in exp.run(&NoiseModel::zero(), 40, 1).iter().filter(|r| r.meta.setting == "z") {
        let s = &exp.settings()[z];
        let bits: Vec<bool> = (0..8).map(|q| r.readout[s.atom_of[q]].unwrap()).collect();
        let first = bits[0];
        assert!(bits.iter().enumerate().all(|(i, &b)| b == (first ^ (i % 2 == 1))));
        seen[first as usize] = true;
    }
    assert_eq!(seen, [true, true]);
}

#[test]
fn resource_counts() {
    for n in [7, 11, 27] {
        let exp = compile(&format!("bv:n={n},encoded=true"));
        for s in exp.settings() {
            assert_eq!(s.n_atoms(), 4 * (n + 1));
            assert_eq!(s.schedule.cz_count(), 6 * n + 2);
        }
    }
    for j in [0, 1, 9] {
        let exp = compile(&format!("repeated-cz:j={j},encoded=true"));
        let s = &exp.settings()[0];
        assert_eq!(s.n_atoms(), 5 + 2 * j);
        assert_eq!(s.schedule.cz_count(), 5 + 8 * j);
    }
    for s in compile("cat-encoded:k=24").settings() {
        assert_eq!((s.n_atoms(), s.schedule.cz_count()), (59, 101));
    }
    for ft in [true, false] {
        let exp = compile(&format!("tesseract:ft={ft}"));
        assert_eq!(exp.settings()[0].n_atoms(), if ft { 250 } else { 256 });
    }
}

#[test]
fn encoded_cat_survives_any_single_data_loss() {
    let exp = compile("cat-encoded:k=24");
    let recs = exp.run(&NoiseModel::zero(), 3, 2);
    for rec in &recs {
        let s = &exp.settings()[exp.setting_index(&rec.meta.setting).unwrap()];
        let erasim::experiments::InterpKind::Encoded(enc) = &s.interp.kind else { panic!("encoded") };
        for blk in &enc.blocks {
            for &q in &blk.qubits {
                let mut r = rec.clone();
                let a = s.atom_of[q];
                r.readout[a] = None;
                r.survival[a] = false;
                let ev = exp.evaluate(&r).unwrap();
                assert!(ev.accepted && ev.error == 0.0, "loss of qubit {q} in {}", rec.meta.setting);
            }
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let exp = compile("bv:n=7,encoded=true");
    let m = NoiseModel::paper();
    assert_eq!(exp.run(&m, 50, 9), exp.run(&m, 50, 9));
    assert_ne!(exp.run(&m, 50, 9), exp.run(&m, 50, 10));
}

#[test]
fn unknown_sequence_is_a_usage_error() {
    assert!("random-sequence:id=4,encoded=true".parse::<ExperimentSpec>().and_then(|s| s.validate()).is_err());
}

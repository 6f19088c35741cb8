//! The fast property suite behind `erasim verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use erasim::analysis::{analyze, SelectionPolicy};
use erasim::codes::{verify_code_distance, Registry};
use erasim::compiler::{
    fault_sweep, gadget_bare_parity, gadget_error_detect, gadget_ft_prep_00, gadget_ft_prep_832, gadget_prep_plus1,
    ErrorDetectVariant, Gadget,
};
use erasim::experiments::{Experiment, ExperimentSpec, RbKind};
use erasim::noise::NoiseModel;
use erasim::oracle::{compare_marginals, lockstep_check, random_circuit};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check { name: name.to_string(), pass, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Every code's brute-force distance must match the `d` in its `n-k-d` name.
pub fn check_codes(registry_text: Option<&str>) -> Check {
    let parsed = match registry_text {
        Some(t) => Registry::parse(t),
        None => Ok(Registry::builtin().clone()),
    };
    let reg = match parsed {
        Ok(r) => r,
        Err(e) => return Check::new("code distances", false, format!("registry rejected: {e}")),
    };
    let mut pass = true;
    let mut notes = Vec::new();
    for name in reg.names() {
        let want = name.rsplit('-').next().and_then(|d| d.parse::<usize>().ok());
        let got = reg.get(name).and_then(verify_code_distance);
        let ok = matches!((&got, want), (Ok(d), Some(w)) if *d == w);
        pass &= ok;
        match got {
            Ok(d) => notes.push(format!("{name} d={d}")),
            Err(e) => notes.push(format!("{name} {e}")),
        }
    }
    Check::new("code distances", pass, notes.join(", "))
}

/// What a gadget's single-fault sweep must show.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    FaultTolerant,
    /// Only single-basis residuals matter (transversal readout).
    FaultTolerantPerBasis,
    /// A known non-fault-tolerant circuit the sweep must catch.
    NotFaultTolerant,
}

pub fn standard_gadgets() -> Vec<(Gadget, Expect)> {
    vec![
        (gadget_ft_prep_00(), Expect::FaultTolerant),
        (gadget_prep_plus1(), Expect::FaultTolerant),
        (gadget_error_detect(ErrorDetectVariant::Flagged), Expect::FaultTolerant),
        (gadget_error_detect(ErrorDetectVariant::Refresh), Expect::FaultTolerant),
        (gadget_ft_prep_832(), Expect::FaultTolerantPerBasis),
        (gadget_bare_parity(), Expect::NotFaultTolerant),
    ]
}

pub fn check_gadgets(gadgets: &[(Gadget, Expect)]) -> Check {
    let mut pass = true;
    let mut notes = Vec::new();
    for (g, expect) in gadgets {
        let r = fault_sweep(g);
        let ok = match expect {
            Expect::FaultTolerant => r.passed(),
            Expect::FaultTolerantPerBasis => r.passed_per_basis(),
            Expect::NotFaultTolerant => !r.passed(),
        };
        pass &= ok;
        notes.push(format!("{} {}/{} undetected", g.name, r.undetected_high_weight.len(), r.faults));
    }
    Check::new("gadget fault sweeps", pass, notes.join(", "))
}

pub fn check_oracle(circuits: u64, seed: u64) -> Check {
    const SHOTS: usize = 500;
    let results: Vec<_> = (0..circuits)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(i));
            let n = rng.gen_range(1..=8);
            let ops = random_circuit(n, rng.gen_range(1..=40 - n), &mut rng);
            let lock = lockstep_check(n, &ops, &mut rng);
            let cmp = compare_marginals(n, &ops, SHOTS, &mut rng);
            (lock, cmp)
        })
        .collect();
    let mut lock_fail = 0;
    let (mut det_fail, mut stochastic, mut exceed) = (0, 0, 0);
    for (lock, cmp) in results {
        match (lock, cmp) {
            (Ok(None), Ok(c)) => {
                det_fail += c.deterministic_mismatches;
                stochastic += c.stochastic;
                exceed += c.exceed_3sigma;
            }
            _ => lock_fail += 1,
        }
    }
    let expected = 0.0027 * stochastic as f64;
    let allowed = (expected + 5.0 * expected.sqrt() + 5.0).floor() as usize;
    Check::new(
        "tableau vs oracle",
        lock_fail == 0 && det_fail == 0 && exceed <= allowed,
        format!("{circuits} circuits, {lock_fail} lockstep failures, {det_fail} deterministic mismatches, {exceed}/{stochastic} beyond 3σ (≤ {allowed})"),
    )
}

/// Value every metric of a noiseless run must take, when it has one.
pub fn expected_noiseless(metric: &str) -> Option<f64> {
    if metric.starts_with("classical_") || metric == "mean_correct_blocks_per_shot" {
        return None;
    }
    if ["acceptance", "fidelity", "success", "pr_guess", "entangled"].iter().any(|k| metric.contains(k)) || metric.starts_with("r:") {
        return Some(1.0);
    }
    if ["error", "rejection", "hamming", "loss", "p_x", "p_z"].iter().any(|k| metric.contains(k)) {
        return Some(0.0);
    }
    None
}

pub fn check_noiseless(seed: u64) -> Check {
    let mut specs: Vec<String> = [
        "cat:n=6",
        "cat-encoded:k=8",
        "bv:n=7,encoded=false",
        "bv:n=7,encoded=true",
        "repeated-cz:j=2,encoded=true",
        "repeated-cz:j=2,encoded=false",
        "random-sequence:id=1,encoded=true",
        "tesseract:ft=true",
    ]
    .map(String::from)
    .to_vec();
    for kind in [RbKind::Clifford1q, RbKind::Echoed2q { moves: true }] {
        specs.push(ExperimentSpec::Rb { kind, depths: kind.default_depths() }.to_string());
    }
    let zero = NoiseModel::zero();
    let mut bad = Vec::new();
    for spec in &specs {
        let result = spec.parse().and_then(|s| Experiment::compile(&s)).and_then(|exp| {
            let evals = exp.run(&zero, 10, seed).iter().map(|r| exp.evaluate(r)).collect::<erasim::Result<Vec<_>>>()?;
            analyze(&exp, &evals, &SelectionPolicy::default(), seed)
        });
        match result {
            Ok(r) => {
                for row in &r.rows {
                    if let Some(want) = expected_noiseless(&row.metric) {
                        if !((row.value - want).abs() < 1e-9) {
                            bad.push(format!("{spec} {}={}", row.metric, row.value));
                        }
                    }
                }
            }
            Err(e) => bad.push(format!("{spec}: {e}")),
        }
    }
    let detail = if bad.is_empty() { format!("{} experiments exact", specs.len()) } else { bad.join("; ") };
    Check::new("noiseless end-to-end", bad.is_empty(), detail)
}

pub fn run_suite(registry_text: Option<&str>, oracle_circuits: u64, seed: u64) -> Vec<Check> {
    vec![
        check_codes(registry_text),
        check_gadgets(&standard_gadgets()),
        check_oracle(oracle_circuits, seed),
        check_noiseless(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use erasim::compiler::Instruction;
    use erasim::CliffordGate;

    const BUILTIN: &str = include_str!("../../core/data/codes.txt");

    #[test]
    fn builtin_registry_passes() {
        assert!(check_codes(None).pass);
        assert!(check_codes(Some(BUILTIN)).pass);
    }

    #[test]
    fn corrupted_generator_fails() {
        let bad = BUILTIN.replacen("stabilizer ZZZZ", "stabilizer ZZII", 1);
        assert_ne!(bad, BUILTIN);
        assert!(!check_codes(Some(&bad)).pass);
    }

    #[test]
    fn flipped_cnot_fails_the_sweep() {
        let mut g = gadget_ft_prep_00();
        let i = g
            .circuit
            .instructions
            .iter()
            .position(|i| matches!(i, Instruction::Gate(c) if *c == CliffordGate::cnot(2, 4)))
            .expect("verification CNOT");
        g.circuit.instructions[i] = Instruction::Gate(CliffordGate::cnot(4, 2));
        assert!(!check_gadgets(&[(g, Expect::FaultTolerant)]).pass);
        assert!(check_gadgets(&standard_gadgets()).pass);
    }

    #[test]
    fn small_oracle_and_noiseless_runs_pass() {
        assert!(check_oracle(20, 3).pass);
        assert!(check_noiseless(3).pass);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::TrialEval;

use super::selection::{apply_selection, SelectionPolicy};
use super::stats::EstimateWithCI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvMetrics {
    pub n: usize,
    /// Accepted trials that returned `s` exactly (and, encoded, the
    /// ancilla as `|−⟩`).
    pub success_given_accept: EstimateWithCI,
    pub acceptance: EstimateWithCI,
    /// Single-query guessing probability, over all eligible trials.
    pub pr_guess: EstimateWithCI,
    pub exp_hamming: EstimateWithCI,
    pub classical: ClassicalBaseline,
}

/// What a single classical query achieves: one bit of `s` learned, the
/// other `n - 1` guessed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBaseline {
    pub pr_guess: f64,
    pub exp_hamming: f64,
}

pub fn classical_baseline(n: usize) -> ClassicalBaseline {
    assert!(n >= 1);
    ClassicalBaseline {
        pr_guess: 0.5f64.powi(n as i32 - 1),
        exp_hamming: (n - 1) as f64 / 2.0,
    }
}

pub fn bv_metrics(evals: &[TrialEval], n: usize, policy: &SelectionPolicy) -> Result<BvMetrics> {
    let mut guess = Vec::new();
    let mut ham = Vec::new();
    for e in evals {
        let b = e.bv.ok_or_else(|| Error::Usage("records are not Bernstein-Vazirani trials".into()))?;
        if b.hamming > n as f64 {
            return Err(Error::Usage(format!("Hamming distance {} exceeds n = {n}", b.hamming)));
        }
        if policy.eligible(e) {
            guess.push(b.pr_guess);
            ham.push(b.hamming);
        }
    }
    let (kept, acceptance) = apply_selection(evals, policy);
    let successes = kept.iter().filter(|e| e.bv.is_some_and(|b| b.success)).count();
    let eligible = guess.len() as u64;
    Ok(BvMetrics {
        n,
        success_given_accept: EstimateWithCI::rate(successes as f64, kept.len() as u64, eligible),
        acceptance,
        pr_guess: EstimateWithCI::rate(guess.iter().sum(), eligible, eligible),
        exp_hamming: EstimateWithCI::mean(&ham, eligible),
        classical: classical_baseline(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::selection::eval;
    use crate::experiments::BvTrial;

    fn bv(success: bool, pr_guess: f64, hamming: f64) -> TrialEval {
        let mut e = eval(0, 0, success, if success { 0.0 } else { 1.0 });
        e.bv = Some(BvTrial { success, pr_guess, hamming });
        e
    }

    #[test]
    fn classical_baseline_is_exact() {
        let c = classical_baseline(27);
        assert_eq!(c.pr_guess, 1.0 / (1u64 << 26) as f64);
        assert_eq!(c.exp_hamming, 13.0);
        assert_eq!(classical_baseline(1).pr_guess, 1.0);
    }

    #[test]
    fn perfect_trials() {
        let evals = vec![bv(true, 1.0, 0.0); 10];
        let m = bv_metrics(&evals, 7, &SelectionPolicy::default()).unwrap();
        assert_eq!((m.success_given_accept.value, m.pr_guess.value, m.exp_hamming.value), (1.0, 1.0, 0.0));
    }

    #[test]
    fn one_erased_bit_costs_half() {
        let mut evals = vec![bv(true, 1.0, 0.0); 3];
        evals.push(bv(false, 0.5, 0.5));
        let m = bv_metrics(&evals, 7, &SelectionPolicy::default()).unwrap();
        assert_eq!(m.pr_guess.value, 3.5 / 4.0);
        assert_eq!(m.exp_hamming.value, 0.5 / 4.0);
        assert_eq!(m.acceptance.value, 0.75);
        assert_eq!(m.success_given_accept.value, 1.0);
    }

    #[test]
    fn mismatches_are_usage_errors() {
        assert!(bv_metrics(&[eval(0, 0, true, 0.0)], 7, &SelectionPolicy::default()).is_err());
        assert!(bv_metrics(&[bv(false, 0.0, 9.0)], 7, &SelectionPolicy::default()).is_err());
    }
}

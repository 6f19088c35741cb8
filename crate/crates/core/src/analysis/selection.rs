use serde::{Deserialize, Serialize};

use crate::experiments::TrialEval;

use super::stats::EstimateWithCI;

/// Which trials count.
///
/// A trial is eligible when it passes the preselection requirement, and
/// accepted when it is eligible, within the loss limit, and passes the
/// experiment's own acceptance rule (flags, decoding). Acceptance rates are
/// over eligible trials; error rates are over accepted ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub require_preselect_full: bool,
    pub max_total_losses: Option<usize>,
    pub require_no_loss: bool,
    /// Apply the experiment's acceptance rule.
    pub require_accepted: bool,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        SelectionPolicy {
            require_preselect_full: true,
            max_total_losses: None,
            require_no_loss: false,
            require_accepted: true,
        }
    }
}

impl SelectionPolicy {
    /// Keeps every trial.
    pub fn permissive() -> Self {
        SelectionPolicy {
            require_preselect_full: false,
            max_total_losses: None,
            require_no_loss: false,
            require_accepted: false,
        }
    }

    /// Default policy with at most `k` lost atoms.
    pub fn max_losses(k: usize) -> Self {
        SelectionPolicy {
            max_total_losses: Some(k),
            require_no_loss: k == 0,
            ..Self::default()
        }
    }

    fn loss_limit(&self) -> Option<usize> {
        if self.require_no_loss {
            Some(0)
        } else {
            self.max_total_losses
        }
    }

    pub fn eligible(&self, e: &TrialEval) -> bool {
        !self.require_preselect_full || e.preselect_full
    }

    pub fn accepts(&self, e: &TrialEval) -> bool {
        self.eligible(e) && self.loss_limit().map_or(true, |k| e.losses <= k) && (!self.require_accepted || e.accepted)
    }
}

/// Trials kept by the policy, and the acceptance rate over eligible trials.
pub fn apply_selection<'a>(evals: &'a [TrialEval], policy: &SelectionPolicy) -> (Vec<&'a TrialEval>, EstimateWithCI) {
    let eligible = evals.iter().filter(|e| policy.eligible(e)).count() as u64;
    let kept: Vec<&TrialEval> = evals.iter().filter(|e| policy.accepts(e)).collect();
    let acc = EstimateWithCI::rate(kept.len() as f64, eligible, eligible);
    (kept, acc)
}

/// Error rate over the kept trials of one setting.
pub fn error_rate(evals: &[TrialEval], setting: usize, policy: &SelectionPolicy) -> EstimateWithCI {
    let mine: Vec<TrialEval> = evals.iter().filter(|e| e.setting == setting).cloned().collect();
    let (kept, acc) = apply_selection(&mine, policy);
    EstimateWithCI::rate(kept.iter().map(|e| e.error).sum(), kept.len() as u64, acc.n_total)
}

#[cfg(test)]
pub(crate) fn eval(setting: usize, losses: usize, accepted: bool, error: f64) -> TrialEval {
    TrialEval {
        setting,
        preselect_full: true,
        losses,
        accepted,
        error,
        bv: None,
        copies: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permissive_keeps_everything() {
        let mut evals = vec![eval(0, 2, false, 1.0), eval(0, 0, true, 0.0)];
        evals[0].preselect_full = false;
        let (kept, acc) = apply_selection(&evals, &SelectionPolicy::permissive());
        assert_eq!(kept.len(), 2);
        assert_eq!(acc.value, 1.0);
    }

    #[test]
    fn loss_threshold_zero_halves_acceptance() {
        let evals: Vec<TrialEval> = (0..100).map(|i| eval(0, i % 2, true, 0.0)).collect();
        let (kept, acc) = apply_selection(&evals, &SelectionPolicy::max_losses(0));
        assert_eq!(kept.len(), 50);
        assert_eq!(acc.value, 0.5);
        assert_eq!(acc.n_total, 100);
    }

    #[test]
    fn error_rate_is_over_accepted_trials() {
        let evals = vec![eval(0, 0, true, 1.0), eval(0, 0, true, 0.0), eval(0, 0, false, 1.0), eval(1, 0, true, 1.0)];
        let e = error_rate(&evals, 0, &SelectionPolicy::default());
        assert_eq!((e.value, e.n_accepted, e.n_total), (0.5, 2, 3));
    }
}

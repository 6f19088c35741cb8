use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::TrialEval;

use super::selection::{error_rate, SelectionPolicy};
use super::stats::{EstimateWithCI, Z95};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatFidelity {
    pub fidelity: EstimateWithCI,
    /// Z-basis error, or `p_Z` for the bound.
    pub z_error: EstimateWithCI,
    /// Coherence-setting errors, or `[p_X]` for the bound.
    pub other_errors: Vec<EstimateWithCI>,
    /// Fidelity above one half certifies genuine multipartite entanglement.
    pub entangled: bool,
}

fn index(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::Usage(format!("records lack the {name:?} setting")))
}

/// `value = 1 - Σ w_i e_i` with the interval from the propagated standard
/// errors.
fn combine(parts: &[(f64, &EstimateWithCI)]) -> EstimateWithCI {
    if parts.iter().any(|(_, e)| !e.is_defined()) {
        return EstimateWithCI::undefined(parts.iter().map(|(_, e)| e.n_total).sum());
    }
    let value = 1.0 - parts.iter().map(|(w, e)| w * e.value).sum::<f64>();
    let se = parts.iter().map(|(w, e)| (w * e.std_err()).powi(2)).sum::<f64>().sqrt();
    EstimateWithCI {
        value,
        ci_low: value - Z95 * se,
        ci_high: value + Z95 * se,
        n_accepted: parts.iter().map(|(_, e)| e.n_accepted).sum(),
        n_total: parts.iter().map(|(_, e)| e.n_total).sum(),
    }
}

/// Fidelity of an `n`-qubit cat from its Z setting and the `n` coherence
/// settings `coh1..cohn`: `1 - ½·e_Z - mean_k e_k`.
pub fn cat_fidelity(names: &[String], evals: &[TrialEval], n: usize, policy: &SelectionPolicy) -> Result<CatFidelity> {
    let z_error = error_rate(evals, index(names, "z")?, policy);
    let coh = (1..=n)
        .map(|k| Ok(error_rate(evals, index(names, &format!("coh{k}"))?, policy)))
        .collect::<Result<Vec<_>>>()?;
    let mut parts = vec![(0.5, &z_error)];
    parts.extend(coh.iter().map(|e| (1.0 / n as f64, e)));
    let fidelity = combine(&parts);
    Ok(CatFidelity {
        entangled: fidelity.value > 0.5,
        fidelity,
        z_error,
        other_errors: coh,
    })
}

/// Lower bound `1 - p_X - p_Z` from the two transversal bases.
pub fn cat_fidelity_bound(names: &[String], evals: &[TrialEval], policy: &SelectionPolicy) -> Result<CatFidelity> {
    let px = error_rate(evals, index(names, "x")?, policy);
    let pz = error_rate(evals, index(names, "z")?, policy);
    let fidelity = combine(&[(1.0, &px), (1.0, &pz)]);
    Ok(CatFidelity {
        entangled: fidelity.value > 0.5,
        fidelity,
        z_error: pz,
        other_errors: vec![px],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::selection::eval;

    fn names(n: usize) -> Vec<String> {
        std::iter::once("z".to_string()).chain((1..=n).map(|k| format!("coh{k}"))).collect()
    }

    #[test]
    fn synthetic_rates_combine() {
        let n = 4;
        let mut evals = Vec::new();
        for t in 0..10 {
            evals.push(eval(0, 0, true, if t < 2 { 1.0 } else { 0.0 }));
            for k in 1..=n {
                evals.push(eval(k, 0, true, if t < 3 { 1.0 } else { 0.0 }));
            }
        }
        let f = cat_fidelity(&names(n), &evals, n, &SelectionPolicy::default()).unwrap();
        assert!((f.fidelity.value - 0.6).abs() < 1e-12);
        assert!(f.entangled);
        assert!(f.fidelity.ci_low < 0.6 && f.fidelity.ci_high > 0.6);
    }

    #[test]
    fn perfect_records_give_one() {
        let evals: Vec<TrialEval> = (0..3).map(|s| eval(s, 0, true, 0.0)).collect();
        let f = cat_fidelity(&names(2), &evals, 2, &SelectionPolicy::default()).unwrap();
        assert_eq!(f.fidelity.value, 1.0);
    }

    #[test]
    fn missing_setting_is_usage_error() {
        assert!(cat_fidelity(&names(2), &[], 3, &SelectionPolicy::default()).is_err());
        assert!(cat_fidelity_bound(&names(2), &[], &SelectionPolicy::default()).is_err());
    }
}

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::codes::{tesseract_decode, CodeBasis, TesseractOutcome};
use crate::experiments::TrialEval;
use crate::noise::trial_rng;

use super::stats::EstimateWithCI;

/// Random pairings of accepted [[8,3,2]] copies into [[16,6,4]] blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesseractSummary {
    /// Accepted copies over all copies.
    pub copy_acceptance: EstimateWithCI,
    /// `Wrong` over decoded (non-rejected) blocks.
    pub block_error: EstimateWithCI,
    /// Rejected over all formed blocks.
    pub block_rejection: EstimateWithCI,
    /// `histogram[c]` counts shots with exactly `c` correct blocks.
    pub histogram: Vec<u64>,
    pub mean_correct_per_shot: f64,
}

/// Pairs the accepted copies of each trial `shots` times with a seeded
/// shuffle (trial `t` uses stream `t` of `seed`) and decodes every block.
pub fn tesseract_pairing(evals: &[(&TrialEval, CodeBasis)], seed: u64, shots: usize) -> TesseractSummary {
    let (mut copies, mut accepted) = (0u64, 0u64);
    let (mut correct, mut wrong, mut rejected) = (0u64, 0u64, 0u64);
    let max_blocks = evals.iter().map(|(e, _)| e.copies.len() / 2).max().unwrap_or(0);
    let mut histogram = vec![0u64; max_blocks + 1];
    for (t, &(e, basis)) in evals.iter().enumerate() {
        let ok: Vec<&[Option<bool>; 8]> = e.copies.iter().flatten().collect();
        copies += e.copies.len() as u64;
        accepted += ok.len() as u64;
        let mut rng = trial_rng(seed, t as u64);
        let mut order: Vec<usize> = (0..ok.len()).collect();
        for _ in 0..shots {
            order.shuffle(&mut rng);
            let mut good = 0;
            for pair in order.chunks_exact(2) {
                let mut bits = [None; 16];
                bits[..8].copy_from_slice(ok[pair[0]]);
                bits[8..].copy_from_slice(ok[pair[1]]);
                match tesseract_decode(&bits, basis) {
                    TesseractOutcome::Correct => {
                        correct += 1;
                        good += 1;
                    }
                    TesseractOutcome::Wrong => wrong += 1,
                    TesseractOutcome::Rejected => rejected += 1,
                }
            }
            histogram[good] += 1;
        }
    }
    let formed = correct + wrong + rejected;
    let n_shots: u64 = histogram.iter().sum();
    TesseractSummary {
        mean_correct_per_shot: if n_shots == 0 { f64::NAN } else { correct as f64 / n_shots as f64 },
        copy_acceptance: EstimateWithCI::rate(accepted as f64, copies, copies),
        block_error: EstimateWithCI::rate(wrong as f64, correct + wrong, formed),
        block_rejection: EstimateWithCI::rate(rejected as f64, formed, formed),
        histogram,
    }
}

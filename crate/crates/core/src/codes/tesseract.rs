use std::sync::OnceLock;

use super::{builtin, CodeBasis};

/// Verdict for one [[16,6,4]] block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TesseractOutcome {
    Rejected,
    Correct,
    Wrong,
}

/// Supports `{v : v_i = 1, v_3 = 1}` for `i = 0, 1, 2`: the three logical
/// operators with a definite value when the block is two `|+++⟩` copies of
/// the [[8,3,2]] code. They are the same in both bases.
pub const TESSERACT_CHECKED_SUPPORTS: [u16; 3] = [0xAA00, 0xCC00, 0xF000];

/// Bit strings compatible with the checks (the classical code dual to the
/// check space, 2^11 words).
fn codewords() -> &'static [u16] {
    static WORDS: OnceLock<Vec<u16>> = OnceLock::new();
    WORDS.get_or_init(|| {
        let checks: Vec<u16> = builtin("16-6-4")
            .basis_generators(CodeBasis::Z)
            .iter()
            .map(|s| s.support_mask() as u16)
            .collect();
        (0..=u16::MAX)
            .filter(|&w| checks.iter().all(|c| (w & c).count_ones() % 2 == 0))
            .collect()
    })
}

/// Decodes a transversal measurement of a [[16,6,4]] block.
///
/// The nearest codeword on the present qubits is found by exhaustive
/// search. The block is rejected when the number of losses plus the
/// correction weight is at least 2, which is beyond what a distance-4 code
/// corrects unambiguously; otherwise the three checked logicals must all
/// read `+1`. The code is self-dual, so `basis` only labels the data.
pub fn tesseract_decode(bits: &[Option<bool>; 16], _basis: CodeBasis) -> TesseractOutcome {
    let mut present = 0u16;
    let mut ones = 0u16;
    for (i, b) in bits.iter().enumerate() {
        if let Some(b) = b {
            present |= 1 << i;
            ones |= (*b as u16) << i;
        }
    }
    let losses = 16 - present.count_ones();
    if losses >= 2 {
        return TesseractOutcome::Rejected;
    }
    let mut best = u32::MAX;
    let mut best_word = 0u16;
    for &c in codewords() {
        let d = ((c ^ ones) & present).count_ones();
        if d < best {
            best = d;
            best_word = c;
        }
    }
    if losses + best >= 2 {
        return TesseractOutcome::Rejected;
    }
    if TESSERACT_CHECKED_SUPPORTS
        .iter()
        .all(|s| (best_word & s).count_ones() % 2 == 0)
    {
        TesseractOutcome::Correct
    } else {
        TesseractOutcome::Wrong
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codeword_count() {
        assert_eq!(codewords().len(), 2048);
    }

    #[test]
    fn checked_supports_are_x_logicals_of_pair_i3() {
        let c = builtin("16-6-4");
        for s in TESSERACT_CHECKED_SUPPORTS {
            assert!(c.logical_x.iter().any(|l| l.support_mask() == s as u64));
        }
    }

    #[test]
    fn zero_is_correct_and_single_loss_tolerated() {
        let mut b = [Some(false); 16];
        assert_eq!(tesseract_decode(&b, CodeBasis::X), TesseractOutcome::Correct);
        b[5] = None;
        assert_eq!(tesseract_decode(&b, CodeBasis::X), TesseractOutcome::Correct);
        b[6] = None;
        assert_eq!(tesseract_decode(&b, CodeBasis::X), TesseractOutcome::Rejected);
    }

    #[test]
    fn flipped_checked_logical_is_wrong() {
        // a codeword with odd parity on the first checked support
        let w = codewords()
            .iter()
            .copied()
            .find(|&c| (c & TESSERACT_CHECKED_SUPPORTS[0]).count_ones() % 2 == 1)
            .unwrap();
        let b: [Option<bool>; 16] = std::array::from_fn(|i| Some(w >> i & 1 == 1));
        assert_eq!(tesseract_decode(&b, CodeBasis::Z), TesseractOutcome::Wrong);
    }
}

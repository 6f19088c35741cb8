use crate::error::{usage, Result};
use crate::pauli::{Pauli, PauliString};

use super::{CodeBasis, CodeDefinition};

/// Per-block result of loss-aware decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// One bit per logical qubit; `true` means eigenvalue `-1`.
    Decoded(Vec<bool>),
    /// Logical `logical` has no representative avoiding the lost qubits.
    Undecodable { logical: usize },
    /// A check on present qubits (given as a support mask) had odd parity.
    Rejected { check: u64 },
}

impl DecodeOutcome {
    pub fn bits(&self) -> Option<&[bool]> {
        match self {
            DecodeOutcome::Decoded(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_rejected(&self) -> bool {
        matches!(self, DecodeOutcome::Rejected { .. })
    }
}

/// All products of the given support masks (the group they generate).
pub(crate) fn span(gens: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &g in gens {
        if out.contains(&g) {
            continue;
        }
        let extra: Vec<u64> = out.iter().map(|&e| e ^ g).collect();
        out.extend(extra);
    }
    out
}

fn lex_support_key(mask: u64) -> (u32, Vec<u32>) {
    let support: Vec<u32> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
    (mask.count_ones(), support)
}

/// Decodes one block measured transversally in `basis`. `bits[i]` is `None`
/// when qubit `i` was lost.
///
/// Every element of the basis-type stabilizer group that avoids lost qubits
/// is a check; a failing check rejects the block. Each logical is then read
/// from the lowest-weight (then lexicographically first) representative in
/// its stabilizer coset that avoids lost qubits.
pub fn decode_block(code: &CodeDefinition, basis: CodeBasis, bits: &[Option<bool>]) -> Result<DecodeOutcome> {
    if bits.len() != code.n {
        return usage(format!("{} bits given for a {}-qubit code", bits.len(), code.n));
    }
    let mut present = 0u64;
    let mut ones = 0u64;
    for (i, b) in bits.iter().enumerate() {
        if let Some(b) = b {
            present |= 1 << i;
            ones |= (*b as u64) << i;
        }
    }
    let group = span(&code.basis_generators(basis).iter().map(|s| s.support_mask()).collect::<Vec<_>>());
    for &g in &group {
        if g != 0 && g & !present == 0 && (g & ones).count_ones() % 2 == 1 {
            return Ok(DecodeOutcome::Rejected { check: g });
        }
    }
    let mut out = Vec::with_capacity(code.k());
    for (li, l) in code.basis_logicals(basis).iter().enumerate() {
        let base = l.support_mask();
        let rep = group
            .iter()
            .map(|&g| g ^ base)
            .filter(|r| r & !present == 0)
            .min_by_key(|&r| lex_support_key(r));
        match rep {
            Some(r) => out.push((r & ones).count_ones() % 2 == 1),
            None => return Ok(DecodeOutcome::Undecodable { logical: li }),
        }
    }
    Ok(DecodeOutcome::Decoded(out))
}

fn commutes_masks(x: u64, z: u64, ox: u64, oz: u64) -> bool {
    ((x & oz).count_ones() + (z & ox).count_ones()) % 2 == 0
}

fn xz_masks(p: &PauliString) -> (u64, u64) {
    let mut x = 0;
    let mut z = 0;
    for q in 0..p.n_qubits() {
        x |= (p.x_bit(q) as u64) << q;
        z |= (p.z_bit(q) as u64) << q;
    }
    (x, z)
}

/// Brute-force minimum weight of an operator that commutes with every
/// stabilizer and acts nontrivially on a logical (non-gauge) qubit.
///
/// Operators are enumerated by weight, so the search stops at the first
/// logical found.
pub fn verify_code_distance(code: &CodeDefinition) -> Result<usize> {
    let n = code.n;
    if n > 16 {
        return usage(format!("distance search limited to 16 qubits, got {n}"));
    }
    let stabs: Vec<(u64, u64)> = code.stabilizers.iter().map(xz_masks).collect();
    let logicals: Vec<(u64, u64)> = code.logical_x.iter().chain(&code.logical_z).map(xz_masks).collect();
    let is_logical = |x: u64, z: u64| {
        stabs.iter().all(|&(sx, sz)| commutes_masks(x, z, sx, sz))
            && logicals.iter().any(|&(lx, lz)| !commutes_masks(x, z, lx, lz))
    };
    for w in 1..=n {
        let mut found = false;
        for_each_subset(n, w, |support| {
            if found {
                return;
            }
            // every assignment of X, Y, Z over the support
            let qs: Vec<usize> = (0..n).filter(|q| support >> q & 1 == 1).collect();
            let mut digits = vec![0u8; w];
            loop {
                let mut x = 0u64;
                let mut z = 0u64;
                for (d, &q) in digits.iter().zip(&qs) {
                    let (px, pz) = Pauli::NON_IDENTITY[*d as usize].bits();
                    x |= (px as u64) << q;
                    z |= (pz as u64) << q;
                }
                if is_logical(x, z) {
                    found = true;
                    return;
                }
                let mut i = 0;
                while i < w && digits[i] == 2 {
                    digits[i] = 0;
                    i += 1;
                }
                if i == w {
                    break;
                }
                digits[i] += 1;
            }
        });
        if found {
            return Ok(w);
        }
    }
    usage(format!("code {} has no logical operators", code.name))
}

/// Calls `f` with every `n`-bit mask of popcount `w`, in increasing order.
fn for_each_subset(n: usize, w: usize, mut f: impl FnMut(u64)) {
    if w == 0 {
        f(0);
        return;
    }
    let mut m: u64 = (1 << w) - 1;
    while m < 1 << n {
        f(m);
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
}

//! Deterministic parities of a measurement record.
//!
//! A noiseless stabilizer state measured qubit-by-qubit has a set of
//! outcome parities that are fixed: exactly the stabilizer elements built
//! from the measured single-qubit Paulis. These are the success conditions
//! of every experiment here.

use serde::{Deserialize, Serialize};

use crate::compiler::{CircuitIR, Instruction};
use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::pauli::{Pauli, PauliString};
use crate::tableau::{Basis, StabilizerTableau};

/// The listed outcome bits must have the given parity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub support: Vec<usize>,
    pub odd: bool,
}

/// Independent generators of the fixed parities of `t` when qubit `q` is
/// measured in `bases[q]` (unmeasured when `None`).
pub fn parity_constraints(t: &StabilizerTableau, bases: &[Option<Basis>]) -> Vec<Constraint> {
    assert_eq!(bases.len(), t.n_qubits());
    // linear conditions a row must meet: (qubit, use x bit, use z bit)
    let mut conds: Vec<(usize, bool, bool)> = Vec::new();
    for (q, b) in bases.iter().enumerate() {
        match b {
            None => conds.extend([(q, true, false), (q, false, true)]),
            Some(Basis::Z) => conds.push((q, true, false)),
            Some(Basis::X) => conds.push((q, false, true)),
            Some(Basis::Y) => conds.push((q, true, true)),
        }
    }
    let eval = |p: &PauliString, &(q, x, z): &(usize, bool, bool)| (x && p.x_bit(q)) ^ (z && p.z_bit(q));
    let mut rows = t.stabilizers();
    for c in &conds {
        let Some(i) = rows.iter().position(|r| eval(r, c)) else { continue };
        let p = rows.swap_remove(i);
        for r in rows.iter_mut() {
            if eval(r, c) {
                r.mul_assign_right(&p);
            }
        }
    }
    rows.into_iter()
        .filter(|r| !r.is_identity())
        .map(|r| Constraint {
            support: r.support(),
            odd: r.sign_bit(),
        })
        .collect()
}

/// Noiseless state of a circuit with every measurement deferred to the end,
/// and the basis each qubit is measured in.
pub fn circuit_final_state(c: &CircuitIR) -> Result<(StabilizerTableau, Vec<Option<Basis>>)> {
    let mut t = StabilizerTableau::new(c.n_qubits);
    let mut bases = vec![None; c.n_qubits];
    for ins in &c.instructions {
        for q in ins.qubits() {
            if bases[q].is_some() {
                return Err(Error::Compile(format!("qubit {q} used after its measurement")));
            }
        }
        match *ins {
            Instruction::Prep0(_) | Instruction::Barrier => {}
            Instruction::PrepPlus(q) => {
                t.apply_gate(&CliffordGate::h(q))?;
            }
            Instruction::Gate(g) => {
                t.apply_gate(&g)?;
            }
            Instruction::MeasureZ(q) => bases[q] = Some(Basis::Z),
            Instruction::MeasureX(q) => bases[q] = Some(Basis::X),
        }
    }
    Ok((t, bases))
}

/// Probability that every constraint holds when unknown bits are replaced
/// by independent uniform bits (a lost qubit is a maximally mixed one).
pub fn success_probability(constraints: &[Constraint], bits: &[Option<bool>]) -> f64 {
    // rows over the unknown bits, with the parity still required of them
    let unknown: Vec<usize> = {
        let mut u: Vec<usize> = constraints.iter().flat_map(|c| c.support.iter().copied()).filter(|&q| bits[q].is_none()).collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    let mut rows: Vec<(Vec<bool>, bool)> = Vec::new();
    for c in constraints {
        let mut need = c.odd;
        let mut row = vec![false; unknown.len()];
        for &q in &c.support {
            match bits[q] {
                Some(b) => need ^= b,
                None => row[unknown.binary_search(&q).unwrap()] ^= true,
            }
        }
        if row.iter().any(|&x| x) {
            rows.push((row, need));
        } else if need {
            return 0.0;
        }
    }
    let mut rank = 0;
    for col in 0..unknown.len() {
        let Some(i) = (rank..rows.len()).find(|&i| rows[i].0[col]) else { continue };
        rows.swap(rank, i);
        let (pr, pn) = rows[rank].clone();
        for (j, r) in rows.iter_mut().enumerate() {
            if j != rank && r.0[col] {
                for (a, b) in r.0.iter_mut().zip(&pr) {
                    *a ^= b;
                }
                r.1 ^= pn;
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r.1) {
        return 0.0;
    }
    (-(rank as f64)).exp2()
}

/// Measurement settings (one basis per qubit) that together reveal a full
/// set of stabilizer generators of `t` using single-qubit measurements.
/// Generators that share a setting commute qubit by qubit.
pub fn generator_settings(t: &StabilizerTableau) -> Vec<Vec<Basis>> {
    let m = t.n_qubits();
    let basis_of = |p: Pauli| match p {
        Pauli::X => Basis::X,
        Pauli::Y => Basis::Y,
        _ => Basis::Z,
    };
    let gens = t.stabilizers();
    let mut settings: Vec<Vec<Option<Pauli>>> = Vec::new();
    for g in &gens {
        let fits = |s: &Vec<Option<Pauli>>| (0..m).all(|q| g.get(q) == Pauli::I || s[q].map_or(true, |p| p == g.get(q)));
        let idx = match settings.iter().position(fits) {
            Some(i) => i,
            None => {
                settings.push(vec![None; m]);
                settings.len() - 1
            }
        };
        for q in 0..m {
            if g.get(q) != Pauli::I {
                settings[idx][q] = Some(g.get(q));
            }
        }
    }
    settings
        .into_iter()
        .map(|s| s.into_iter().map(|p| p.map_or(Basis::Z, basis_of)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> StabilizerTableau {
        let mut t = StabilizerTableau::new(2);
        t.apply_all(&[CliffordGate::h(0), CliffordGate::cnot(0, 1)]).unwrap();
        t
    }

    #[test]
    fn bell_constraints_per_basis() {
        let t = bell();
        let zz = parity_constraints(&t, &[Some(Basis::Z), Some(Basis::Z)]);
        assert_eq!(zz, [Constraint { support: vec![0, 1], odd: false }]);
        let xz = parity_constraints(&t, &[Some(Basis::X), Some(Basis::Z)]);
        assert!(xz.is_empty());
        let yy = parity_constraints(&t, &[Some(Basis::Y), Some(Basis::Y)]);
        assert_eq!(yy, [Constraint { support: vec![0, 1], odd: true }]);
        assert!(parity_constraints(&t, &[Some(Basis::Z), None]).is_empty());
    }

    #[test]
    fn unknown_bits_cost_half_per_independent_constraint() {
        let cs = [
            Constraint { support: vec![0, 1], odd: false },
            Constraint { support: vec![1, 2], odd: false },
        ];
        assert_eq!(success_probability(&cs, &[Some(true), Some(true), Some(true)]), 1.0);
        assert_eq!(success_probability(&cs, &[Some(true), Some(false), Some(true)]), 0.0);
        assert_eq!(success_probability(&cs, &[Some(true), None, Some(true)]), 0.5);
        assert_eq!(success_probability(&cs, &[Some(true), None, Some(false)]), 0.0);
        assert_eq!(success_probability(&cs, &[None, None, None]), 0.25);
    }

    #[test]
    fn settings_cover_generators() {
        let s = generator_settings(&bell());
        assert_eq!(s.len(), 2);
        let mut t = StabilizerTableau::new(2);
        t.apply_all(&[CliffordGate::h(0)]).unwrap();
        assert_eq!(generator_settings(&t), [vec![Basis::X, Basis::Z]]);
    }
}

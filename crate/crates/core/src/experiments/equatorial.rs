//! Parity of equatorial-basis measurements on a stabilizer state.
//!
//! Measuring qubit `j` along `cos θ_j X + sin θ_j Y` is not a Clifford
//! operation for general angles, so instead of rotating the state we
//! compute the expectation of the product observable directly.
//!
//! Write `M = ⊗_j (cos θ_j X_j + sin θ_j Y_j) = X_Q ∏_j (cos θ_j + i sin θ_j Z_j)`.
//! Only stabilizer elements of the form `c · X_Q Z^z` with `z ⊆ Q` contribute.
//! They form a coset `g0 · V` of a Z-type subgroup, on which the sign is a
//! linear character `(-1)^{u·v}`, so the sum over the coset collapses by a
//! Walsh–Hadamard transform to a sum over `V⊥`, whose size is `2^{|Q| - dim V}`
//! (two terms for a cat state).

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::tableau::StabilizerTableau;

/// `i^c · X^x Z^z` over at most 64 qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Xz {
    c: u8,
    x: u64,
    z: u64,
}

impl Xz {
    fn mul(self, o: Xz) -> Xz {
        // X^x1 Z^z1 X^x2 Z^z2 = (-1)^{z1·x2} X^{x1+x2} Z^{z1+z2}
        let swap = 2 * ((self.z & o.x).count_ones() as u8 & 1);
        Xz {
            c: (self.c + o.c + swap) & 3,
            x: self.x ^ o.x,
            z: self.z ^ o.z,
        }
    }
}

const MAX_FREE: usize = 24;

/// `⟨ψ| ⊗_{j} (cos θ_j X + sin θ_j Y) |ψ⟩` over `qubits`, identity elsewhere.
/// None of the qubits may be lost.
pub fn equatorial_parity(t: &StabilizerTableau, qubits: &[usize], angles: &[f64]) -> Result<f64> {
    let m = t.n_qubits();
    if m > 64 {
        return Err(Error::Usage(format!("equatorial parity supports up to 64 qubits, got {m}")));
    }
    if qubits.len() != angles.len() {
        return Err(Error::Usage("one angle per measured qubit".into()));
    }
    let mut q_mask = 0u64;
    for &q in qubits {
        if q >= m || t.is_lost(q) || q_mask >> q & 1 == 1 {
            return Err(Error::Usage(format!("qubit {q} cannot be measured")));
        }
        q_mask |= 1 << q;
    }
    let mut rows: Vec<Xz> = t
        .stabilizers()
        .iter()
        .map(|s| {
            let (x, z) = (s.x_words()[0], s.z_words()[0]);
            // a Hermitian Y is i·XZ
            Xz {
                c: (s.phase_exponent() + (x & z).count_ones() as u8) & 3,
                x,
                z,
            }
        })
        .collect();

    // reduced row echelon form on the X part
    let mut xrows: Vec<(usize, Xz)> = Vec::new();
    for col in 0..m {
        let Some(i) = rows.iter().position(|r| r.x >> col & 1 == 1) else { continue };
        let p = rows.swap_remove(i);
        for r in rows.iter_mut() {
            if r.x >> col & 1 == 1 {
                *r = r.mul(p);
            }
        }
        for (_, r) in xrows.iter_mut() {
            if r.x >> col & 1 == 1 {
                *r = r.mul(p);
            }
        }
        xrows.push((col, p));
    }
    let mut g0 = Xz { c: 0, x: 0, z: 0 };
    for &(col, r) in &xrows {
        if q_mask >> col & 1 == 1 {
            g0 = g0.mul(r);
        }
    }
    if g0.x != q_mask {
        return Ok(0.0);
    }

    // Z-type rows: clear the part outside Q
    let outside = !q_mask & if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut zrows = rows;
    let mut vrows: Vec<Xz> = Vec::new();
    for col in 0..m {
        if outside >> col & 1 == 0 {
            continue;
        }
        let Some(i) = zrows.iter().position(|r| r.z >> col & 1 == 1) else { continue };
        let p = zrows.swap_remove(i);
        for r in zrows.iter_mut() {
            if r.z >> col & 1 == 1 {
                *r = r.mul(p);
            }
        }
        if g0.z >> col & 1 == 1 {
            g0 = g0.mul(p);
        }
    }
    if g0.z & outside != 0 {
        return Ok(0.0);
    }
    // remaining rows span V; reduce them on Q and read off the character
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..m {
        if q_mask >> col & 1 == 0 {
            continue;
        }
        let Some(i) = zrows.iter().position(|r| r.z >> col & 1 == 1) else { continue };
        let p = zrows.swap_remove(i);
        for r in zrows.iter_mut().chain(vrows.iter_mut()) {
            if r.z >> col & 1 == 1 {
                *r = r.mul(p);
            }
        }
        vrows.push(p);
        pivots.push(col);
    }
    debug_assert!(zrows.iter().all(|r| r.z == 0 && r.c == 0), "dependent stabilizer rows");
    let mut u = 0u64;
    for (r, &col) in vrows.iter().zip(&pivots) {
        debug_assert!(r.c == 0 || r.c == 2);
        if r.c == 2 {
            u |= 1 << col;
        }
    }
    let free: Vec<usize> = qubits.iter().copied().filter(|q| !pivots.contains(q)).collect();
    if free.len() > MAX_FREE {
        return Err(Error::Usage(format!("equatorial parity needs 2^{} terms", free.len())));
    }
    let duals: Vec<u64> = free
        .iter()
        .map(|&f| {
            let mut y = 1u64 << f;
            for (r, &col) in vrows.iter().zip(&pivots) {
                if r.z >> f & 1 == 1 {
                    y |= 1 << col;
                }
            }
            y
        })
        .collect();

    let g = |j: usize, bit: bool| if bit { C::new(0.0, angles[j].sin()) } else { C::new(angles[j].cos(), 0.0) };
    let mut sum = C::new(0.0, 0.0);
    for combo in 0u64..1 << duals.len() {
        let mut y = 0u64;
        for (i, d) in duals.iter().enumerate() {
            if combo >> i & 1 == 1 {
                y ^= d;
            }
        }
        let mut term = C::new(1.0, 0.0);
        for (j, &q) in qubits.iter().enumerate() {
            let z0 = g0.z >> q & 1 == 1;
            let s = if (u ^ y) >> q & 1 == 1 { -1.0 } else { 1.0 };
            term *= g(j, z0) + s * g(j, !z0);
        }
        sum += term;
    }
    let scale = (-(free.len() as f64)).exp2();
    // g0 = i^c X_Q Z^z0 stabilizes, so ⟨X_Q Z^z0⟩ = i^{-c}
    let phase = C::i().powu(((4 - g0.c) & 3) as u32);
    let e = phase * sum * scale;
    debug_assert!(e.im.abs() < 1e-9, "equatorial parity is real, got {e}");
    Ok(e.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::CliffordGate;
    use crate::oracle::{random_circuit, DensityMatrix, SimOp, StateVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phase_of(x: usize, qubits: &[usize], angles: &[f64]) -> C {
        let mut ph = C::new(1.0, 0.0);
        for (j, &q) in qubits.iter().enumerate() {
            let s = if x >> q & 1 == 0 { 1.0 } else { -1.0 };
            ph *= C::from_polar(1.0, s * angles[j]);
        }
        ph
    }

    /// `Σ_x conj(ψ(x ⊕ 1_Q)) ψ(x) ∏ e^{±iθ}` from the state vector.
    fn dense(sv: &StateVector, qubits: &[usize], angles: &[f64]) -> f64 {
        let flip: usize = qubits.iter().map(|q| 1 << q).sum();
        let a = sv.amplitudes();
        let mut e = C::new(0.0, 0.0);
        for x in 0..a.len() {
            e += a[x ^ flip].conj() * a[x] * phase_of(x, qubits, angles);
        }
        e.re
    }

    #[test]
    fn matches_state_vector_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let ops = random_circuit(n, 30, &mut rng);
            let mut t = StabilizerTableau::new(n);
            let mut sv = StateVector::new(n).unwrap();
            for op in &ops {
                if let SimOp::Gate(g) = op {
                    t.apply_gate(g).unwrap();
                    sv.apply_gate(g);
                }
            }
            let mut qubits: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
            if qubits.is_empty() {
                qubits.push(0);
            }
            let angles: Vec<f64> = qubits.iter().map(|_| rng.gen_range(-3.2..3.2)).collect();
            let got = equatorial_parity(&t, &qubits, &angles).unwrap();
            let want = dense(&sv, &qubits, &angles);
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    fn ghz(n: usize) -> Vec<CliffordGate> {
        let mut g = vec![CliffordGate::h(0)];
        g.extend((1..n).map(|i| CliffordGate::cnot(0, i)));
        g
    }

    #[test]
    fn ghz_parity_is_cos_n_phi() {
        for n in [2, 5, 40] {
            let mut t = StabilizerTableau::new(n);
            t.apply_all(&ghz(n)).unwrap();
            let qs: Vec<usize> = (0..n).collect();
            for k in 0..=n {
                let phi = k as f64 * std::f64::consts::PI / n as f64 + 0.1;
                let e = equatorial_parity(&t, &qs, &vec![phi; n]).unwrap();
                assert!((e - (n as f64 * phi).cos()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dephased_cat_matches_density_matrix() {
        // averaging the evaluator over Z-error patterns equals the
        // density-matrix expectation, (1 - 2p)^n times the pure value
        let n = 4;
        let p = 0.07;
        let qs: Vec<usize> = (0..n).collect();
        let phi = std::f64::consts::PI / n as f64;
        let angles = vec![phi; n];
        let mut avg = 0.0;
        for pattern in 0..1usize << n {
            let mut t = StabilizerTableau::new(n);
            t.apply_all(&ghz(n)).unwrap();
            let mut w = 1.0;
            for q in 0..n {
                if pattern >> q & 1 == 1 {
                    t.apply_single_pauli(q, crate::pauli::Pauli::Z);
                    w *= p;
                } else {
                    w *= 1.0 - p;
                }
            }
            avg += w * equatorial_parity(&t, &qs, &angles).unwrap();
        }
        let mut rho = DensityMatrix::new(n).unwrap();
        for g in ghz(n) {
            rho.apply_gate(&g);
        }
        for q in 0..n {
            rho.dephase(q, p);
        }
        let flip = (1 << n) - 1;
        let mut dm = C::new(0.0, 0.0);
        for a in 0..1usize << n {
            dm += rho.entry(a, a ^ flip) * phase_of(a, &qs, &angles);
        }
        let expect = (1.0 - 2.0 * p).powi(n as i32) * (n as f64 * phi).cos();
        assert!((avg - expect).abs() < 1e-12, "{avg} vs {expect}");
        assert!((dm.re - expect).abs() < 1e-9, "{} vs {expect}", dm.re);
    }
}

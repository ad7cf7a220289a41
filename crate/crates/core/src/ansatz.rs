//! Standing-wave ansatz states and expectation-value decay rates.
//!
//! The single-excitation ansatz for mode `n` of an `N`-atom chain is
//! `√(2/(N+1)) cos(k_n x_j)` for odd `n` and `sin(k_n x_j)` for even `n`, with
//! `k_n d = πn/(N+1)` and `x_j = jd − (N+1)d/2`, `j = 1..N`.

use crate::hamiltonian::{EffectiveHamiltonian, TupleBasis};
use crate::linalg;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// Tuples of `n` excited atoms.
    Excitations(usize),
    /// Storage-state amplitudes `s_j` of a three-level chain.
    Storage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    pub amplitudes: Vec<C64>,
    pub basis: BasisTag,
}

impl SpinState {
    pub fn new(amplitudes: Vec<C64>, basis: BasisTag) -> Result<Self> {
        let n = linalg::norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("state has zero or non-finite norm"));
        }
        Ok(SpinState { amplitudes: amplitudes.iter().map(|v| v / n).collect(), basis })
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }
}

/// Real ansatz coefficients for `n_index ∈ 1..=N`.
pub fn ansatz_coefficients(n_index: usize, atoms: usize) -> Vec<f64> {
    let pref = (2.0 / (atoms as f64 + 1.0)).sqrt();
    let kd = std::f64::consts::PI * n_index as f64 / (atoms as f64 + 1.0);
    (1..=atoms)
        .map(|j| {
            let x = j as f64 - (atoms as f64 + 1.0) / 2.0;
            if n_index % 2 == 1 {
                pref * (kd * x).cos()
            } else {
                pref * (kd * x).sin()
            }
        })
        .collect()
}

/// Wave vector `k_n = πn/((N+1)d)` of an ansatz state.
pub fn ansatz_wavevector(n_index: usize, atoms: usize, d: f64) -> f64 {
    std::f64::consts::PI * n_index as f64 / ((atoms as f64 + 1.0) * d)
}

pub fn ansatz_state(n_index: usize, atoms: usize) -> Result<SpinState> {
    if n_index == 0 || n_index > atoms {
        return Err(Error::invalid(format!("ansatz index {n_index} outside 1..={atoms}")));
    }
    let c = ansatz_coefficients(n_index, atoms).into_iter().map(|v| C64::new(v, 0.0)).collect();
    SpinState::new(c, BasisTag::Excitations(1))
}

/// Slater determinant of single-excitation vectors, one row per mode.
fn slater_state(orbitals: &[Vec<C64>], atoms: usize) -> Result<SpinState> {
    let n = orbitals.len();
    let basis = TupleBasis::new(atoms, n)?;
    let amps: Vec<C64> = basis
        .tuples
        .iter()
        .map(|t| {
            let m: Vec<Vec<C64>> = orbitals.iter().map(|o| t.iter().map(|&i| o[i]).collect()).collect();
            determinant(m)
        })
        .collect();
    SpinState::new(amps, BasisTag::Excitations(n))
        .map_err(|_| Error::invalid("orbitals are linearly dependent"))
}

/// Antisymmetrized product of the ansatz states `k_indices`.
pub fn fermionic_ansatz(k_indices: &[usize], atoms: usize) -> Result<SpinState> {
    if k_indices.len() < 2 {
        return Err(Error::invalid("fermionic ansatz needs at least two modes"));
    }
    for (i, a) in k_indices.iter().enumerate() {
        if k_indices[..i].contains(a) {
            return Err(Error::invalid(format!("repeated mode index {a} gives the zero state")));
        }
    }
    let orbitals: Result<Vec<Vec<C64>>> =
        k_indices.iter().map(|&k| ansatz_state(k, atoms).map(|s| s.amplitudes)).collect();
    slater_state(&orbitals?, atoms)
}

/// Antisymmetrized product of arbitrary single-excitation vectors.
pub fn fermionic_state(modes: &[Vec<C64>]) -> Result<SpinState> {
    let atoms = modes.first().map(|m| m.len()).unwrap_or(0);
    if modes.len() < 2 || modes.iter().any(|m| m.len() != atoms) {
        return Err(Error::invalid("need at least two single-excitation vectors of equal length"));
    }
    slater_state(modes, atoms)
}

/// `(S†)^n |g⟩` with `S† = Σ_j c_j σ_j†`, normalized. Hard-core spins keep
/// only tuples of distinct atoms, each with weight `n! Π c`.
pub fn bosonic_state(mode: &[C64], excitations: usize) -> Result<SpinState> {
    let basis = TupleBasis::new(mode.len(), excitations)?;
    let amps = basis.tuples.iter().map(|t| t.iter().map(|&i| mode[i]).product()).collect();
    SpinState::new(amps, BasisTag::Excitations(excitations))
}

/// `Γ = −2 Im⟨ψ|H|ψ⟩/⟨ψ|ψ⟩`.
pub fn state_decay_rate(state: &SpinState, h: &EffectiveHamiltonian) -> Result<f64> {
    let hv = h.apply(&state.amplitudes)?;
    expectation_decay(&state.amplitudes, &hv)
}

/// Same as [`state_decay_rate`] given `H|ψ⟩` from any operator.
pub fn expectation_decay(psi: &[C64], h_psi: &[C64]) -> Result<f64> {
    if psi.len() != h_psi.len() {
        return Err(Error::DimensionMismatch { expected: psi.len(), got: h_psi.len() });
    }
    let nn = linalg::dot(psi, psi).re;
    Ok(-2.0 * linalg::dot(psi, h_psi).im / nn)
}

/// `1 − |⟨a|b⟩|²` for unit vectors (plain inner product).
pub fn overlap_error(a: &[C64], b: &[C64]) -> f64 {
    let o = linalg::dot(a, b).norm_sqr() / (linalg::dot(a, a).re * linalg::dot(b, b).re);
    (1.0 - o).max(0.0)
}

fn determinant(mut m: Vec<Vec<C64>>) -> C64 {
    let n = m.len();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
            .unwrap();
        if m[piv][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[r][k] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ansatz_is_orthonormal() {
        let n = 17;
        let v: Vec<Vec<f64>> = (1..=n).map(|k| ansatz_coefficients(k, n)).collect();
        for a in 0..n {
            for b in 0..n {
                let g: f64 = v[a].iter().zip(&v[b]).map(|(x, y)| x * y).sum();
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn swapping_modes_flips_sign() {
        let a = fermionic_ansatz(&[1, 2], 9).unwrap();
        let b = fermionic_ansatz(&[2, 1], 9).unwrap();
        for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
            assert!((x + y).norm() < 1e-14);
        }
        assert!((a.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn repeated_index_rejected() {
        assert!(fermionic_ansatz(&[3, 3], 9).is_err());
        assert!(ansatz_state(0, 5).is_err());
    }

    #[test]
    fn determinant_small() {
        let m = vec![
            vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(3.0, 0.0)],
        ];
        assert!((determinant(m) - C64::new(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bosonic_pair_weights() {
        let c = vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)];
        let s = bosonic_state(&c, 2).unwrap();
        // Colex order: (0,1), (0,2), (1,2).
        let norm = (4.0f64 + 9.0 + 36.0).sqrt();
        assert!((s.amplitudes[0].re - 2.0 / norm).abs() < 1e-14);
        assert!((s.amplitudes[2].re - 6.0 / norm).abs() < 1e-14);
    }
}

//! Eigenmodes of an effective Hamiltonian and their wave-vector labels.

use crate::ansatz::ansatz_coefficients;
use crate::geometry::LatticeKind;
use crate::hamiltonian::EffectiveHamiltonian;
use crate::linalg;
use crate::{AtomArray, Result, C64};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Zero-padding factor of the discrete Fourier transform used to label modes.
pub const PADDING: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DominantK {
    /// `|k|` of the standing wave along a chain or ring index.
    Line(f64),
    /// `(k1, k2)` of the best product-ansatz match on a square lattice.
    Plane(f64, f64),
}

impl DominantK {
    pub fn magnitude(&self) -> f64 {
        match *self {
            DominantK::Line(k) => k.abs(),
            DominantK::Plane(a, b) => (a * a + b * b).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenMode {
    /// Rank by ascending decay, starting at 1.
    pub xi: usize,
    #[serde(rename = "J")]
    pub shift: f64,
    #[serde(rename = "Gamma")]
    pub decay: f64,
    pub eigenvalue: C64,
    pub coefficients: Vec<C64>,
    pub dominant_k: Option<DominantK>,
}

impl EigenMode {
    pub fn from_eigenvalue(eigenvalue: C64, coefficients: Vec<C64>) -> Self {
        EigenMode {
            xi: 0,
            shift: eigenvalue.re,
            decay: -2.0 * eigenvalue.im,
            eigenvalue,
            coefficients,
            dominant_k: None,
        }
    }
}

/// Full diagonalization, modes sorted by ascending decay.
///
/// When `array` is given and the basis is single-excitation, every mode gets
/// a dominant wave vector. Ties in decay are broken by ascending shift, then
/// by dominant `|k|`.
pub fn eigenmodes(h: &EffectiveHamiltonian, array: Option<&AtomArray>) -> Result<Vec<EigenMode>> {
    let e = linalg::eig(&h.matrix)?;
    let mut modes: Vec<EigenMode> = (0..e.values.len())
        .map(|k| EigenMode::from_eigenvalue(e.values[k], linalg::column(&e.vectors, k)))
        .collect();
    if let Some(array) = array {
        if h.excitations == 1 && array.len() == h.dim() {
            label_modes(&mut modes, array);
        }
    }
    sort_modes(&mut modes);
    Ok(modes)
}

/// Eigenvalues only, sorted by ascending decay.
pub fn decay_spectrum(h: &EffectiveHamiltonian) -> Result<Vec<(f64, f64)>> {
    let mut v: Vec<(f64, f64)> = linalg::eigenvalues(&h.matrix)?
        .into_iter()
        .map(|l| (-2.0 * l.im, l.re))
        .collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal)));
    Ok(v)
}

pub fn label_modes(modes: &mut [EigenMode], array: &AtomArray) {
    for m in modes.iter_mut() {
        m.dominant_k = Some(match array.kind {
            LatticeKind::Square => classify_plane(&m.coefficients, array.side, array.lattice_constant),
            _ => DominantK::Line(dominant_k_line(&m.coefficients, array.lattice_constant)),
        });
    }
}

pub fn sort_modes(modes: &mut [EigenMode]) {
    let tol = 1e-12;
    modes.sort_by(|a, b| {
        let by_decay = if (a.decay - b.decay).abs() <= tol * a.decay.abs().max(b.decay.abs()).max(1e-300) {
            Ordering::Equal
        } else {
            a.decay.partial_cmp(&b.decay).unwrap_or(Ordering::Equal)
        };
        by_decay
            .then(a.shift.partial_cmp(&b.shift).unwrap_or(Ordering::Equal))
            .then_with(|| {
                let ka = a.dominant_k.map(|k| k.magnitude()).unwrap_or(0.0);
                let kb = b.dominant_k.map(|k| k.magnitude()).unwrap_or(0.0);
                ka.partial_cmp(&kb).unwrap_or(Ordering::Equal)
            })
    });
    for (i, m) in modes.iter_mut().enumerate() {
        m.xi = i + 1;
    }
}

/// Peak of the zero-padded transform `|Σ_j c_j e^{−ikjd}|` over the zone.
///
/// Standing waves peak at `±k`; the magnitude is returned, and near-ties
/// between different `|k|` go to the larger one.
pub fn dominant_k_line(c: &[C64], d: f64) -> f64 {
    let n = c.len();
    let points = PADDING * n;
    let mut best_k = 0.0;
    let mut best = -1.0;
    for p in 0..=points / 2 {
        let k = std::f64::consts::PI * p as f64 / (points as f64 / 2.0) / d;
        let step = C64::from_polar(1.0, -k * d);
        let mut phase = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for v in c {
            acc += v * phase;
            phase *= step;
        }
        let a = acc.norm_sqr();
        if a > best * (1.0 + 1e-12) || (a >= best * (1.0 - 1e-12) && k > best_k) {
            best = a;
            best_k = k;
        }
    }
    best_k
}

/// Product-ansatz label `(π n1/((M+1)d), π n2/((M+1)d))` with the largest
/// overlap for a mode on an `M × M` lattice stored as index `a·M + b`.
pub fn classify_plane(c: &[C64], side: usize, d: f64) -> DominantK {
    let (n1, n2) = best_product_ansatz(c, side);
    let k = |n: usize| std::f64::consts::PI * n as f64 / ((side + 1) as f64 * d);
    DominantK::Plane(k(n1), k(n2))
}

/// `(n1, n2)` maximizing `|⟨φ_{n1} ⊗ φ_{n2}|c⟩|`.
pub fn best_product_ansatz(c: &[C64], side: usize) -> (usize, usize) {
    let phi: Vec<Vec<f64>> = (1..=side).map(|n| ansatz_coefficients(n, side)).collect();
    // t[n1][b] = Σ_a φ_{n1}(a) c[a, b], then overlap = Σ_b φ_{n2}(b) t[n1][b].
    let mut best = (-1.0, (1, 1));
    for (i1, p1) in phi.iter().enumerate() {
        let mut t = vec![C64::new(0.0, 0.0); side];
        for (a, &w) in p1.iter().enumerate() {
            for (b, tb) in t.iter_mut().enumerate() {
                *tb += c[a * side + b] * w;
            }
        }
        for (i2, p2) in phi.iter().enumerate() {
            let o: C64 = p2.iter().zip(&t).map(|(w, v)| v * *w).sum();
            let o = o.norm_sqr();
            if o > best.0 {
                best = (o, (i1 + 1, i2 + 1));
            }
        }
    }
    best.1
}

/// Sum of all single-excitation decay rates, equal to `Σ Γ_ii`.
pub fn total_decay(modes: &[EigenMode]) -> f64 {
    modes.iter().map(|m| m.decay).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_chain;
    use crate::hamiltonian::free_space_hamiltonian;

    #[test]
    fn decoupled_atoms() {
        let a = build_chain(2, 1e5, [1.0, 0.0, 0.0]).unwrap();
        let modes = eigenmodes(&free_space_hamiltonian(&a).unwrap(), Some(&a)).unwrap();
        assert_eq!(modes.len(), 2);
        for m in &modes {
            assert!((m.decay - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn trace_of_decay() {
        let a = build_chain(30, 1.7, [0.0, 0.0, 1.0]).unwrap();
        let modes = eigenmodes(&free_space_hamiltonian(&a).unwrap(), Some(&a)).unwrap();
        assert!((total_decay(&modes) - 30.0).abs() < 1e-8 * 30.0);
        assert!(modes.windows(2).all(|w| w[0].decay <= w[1].decay + 1e-12));
        assert_eq!(modes[0].xi, 1);
    }

    #[test]
    fn plane_wave_label() {
        let d = 0.9;
        let k = 2.1;
        let c: Vec<C64> = (0..40).map(|j| C64::new((k * j as f64 * d).cos(), 0.0)).collect();
        let found = dominant_k_line(&c, d);
        assert!((found - k).abs() < std::f64::consts::PI / (8.0 * 40.0 * d) * 1.01);
    }

    #[test]
    fn product_ansatz_label() {
        let m = 6;
        let p1 = ansatz_coefficients(2, m);
        let p2 = ansatz_coefficients(5, m);
        let c: Vec<C64> = (0..m * m).map(|i| C64::new(p1[i / m] * p2[i % m], 0.0)).collect();
        assert_eq!(best_product_ansatz(&c, m), (2, 5));
    }
}

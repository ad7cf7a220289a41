//! Free-space dyadic Green's tensor and the pair couplings it induces.
//!
//! With `k0 = 1`,
//!
//! ```text
//! G0(r) = e^{ir}/(4π r³) [ (r² + ir − 1) 1 + (3 − 3ir − r²) r̂⊗r̂ ]
//! ```
//!
//! and for unit dipole `d̂` the coherent and dissipative rates are
//! `J = −3π d̂·Re G·d̂` and `Γ = 6π d̂·Im G·d̂` (in `Γ0`).

use crate::geometry::AtomArray;
use crate::{Error, Real, Result};
use num_complex::Complex;
use rayon::prelude::*;

/// Separations below this are treated as coincident atoms.
pub const MIN_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensTensor<T>(pub [[Complex<T>; 3]; 3]);

impl<T: Real> GreensTensor<T> {
    pub fn zero() -> Self {
        GreensTensor([[Complex::new(T::zero(), T::zero()); 3]; 3])
    }

    /// `a·G·b` for real vectors.
    pub fn contract(&self, a: [T; 3], b: [T; 3]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                acc = acc + self.0[i][j] * (*ai * *bj);
            }
        }
        acc
    }

    /// `G·b`.
    pub fn apply(&self, b: [T; 3]) -> [Complex<T>; 3] {
        let mut out = [Complex::new(T::zero(), T::zero()); 3];
        for (i, row) in self.0.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                out[i] = out[i] + row[j] * *bj;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = *self;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    /// Self term after regularization: real part dropped, `Im G_αα = 1/6π`.
    pub fn regularized_self() -> Self {
        let mut g = Self::zero();
        let v = T::one() / (T::lit(6.0) * T::PI());
        for a in 0..3 {
            g.0[a][a] = Complex::new(T::zero(), v);
        }
        g
    }
}

/// Free-space Green's tensor at displacement `r` (units of `1/k0`).
pub fn free_space_greens<T: Real>(r: [T; 3]) -> Result<GreensTensor<T>> {
    let dist = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if !(dist >= T::lit(MIN_SEPARATION)) {
        return Err(Error::Coincident {
            separation: dist.as_f64(),
            min: MIN_SEPARATION,
        });
    }
    let (iso, dyad) = greens_radial_factors(dist);
    let rhat = [r[0] / dist, r[1] / dist, r[2] / dist];
    let mut g = GreensTensor::zero();
    for a in 0..3 {
        for b in 0..3 {
            let mut v = dyad * (rhat[a] * rhat[b]);
            if a == b {
                v = v + iso;
            }
            g.0[a][b] = v;
        }
    }
    Ok(g)
}

/// Coefficients of `1` and `r̂⊗r̂` in the free-space tensor at distance `r`.
pub fn greens_radial_factors<T: Real>(r: T) -> (Complex<T>, Complex<T>) {
    let phase = Complex::new(r.cos(), r.sin());
    let pref = phase / (T::lit(4.0) * T::PI() * r * r * r);
    let iso = Complex::new(r * r - T::one(), r);
    let dyad = Complex::new(T::lit(3.0) - r * r, -T::lit(3.0) * r);
    (pref * iso, pref * dyad)
}

/// `(J, Γ)` for a pair with Green's tensor `g` and common dipole `d̂`.
pub fn rates_from_tensor<T: Real>(g: &GreensTensor<T>, dipole: [T; 3]) -> (T, T) {
    let v = g.contract(dipole, dipole);
    let three_pi = T::lit(3.0) * T::PI();
    (-three_pi * v.re, T::lit(2.0) * three_pi * v.im)
}

/// Supplies Green's tensors between atoms.
pub trait GreensProvider<T: Real>: Sync {
    fn pair(&self, ri: [T; 3], rj: [T; 3]) -> Result<GreensTensor<T>>;
    fn self_term(&self) -> GreensTensor<T>;

    /// `(J, Γ)` of the self term for dipole `d̂`.
    fn self_rates(&self, dipole: [T; 3]) -> (T, T) {
        rates_from_tensor(&self.self_term(), dipole)
    }
}

/// The vacuum.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeSpace;

impl<T: Real> GreensProvider<T> for FreeSpace {
    fn pair(&self, ri: [T; 3], rj: [T; 3]) -> Result<GreensTensor<T>> {
        free_space_greens([ri[0] - rj[0], ri[1] - rj[1], ri[2] - rj[2]])
    }

    fn self_term(&self) -> GreensTensor<T> {
        GreensTensor::regularized_self()
    }

    /// Exactly `(0, Γ0)`; the product `6π · 1/6π` is not exact in floating point.
    fn self_rates(&self, _dipole: [T; 3]) -> (T, T) {
        (T::zero(), T::one())
    }
}

/// Real symmetric `N × N` matrices of coherent (`J`) and dissipative (`Γ`)
/// couplings, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCouplings<T> {
    pub n: usize,
    pub j: Vec<T>,
    pub gamma: Vec<T>,
}

impl<T: Real> PairCouplings<T> {
    pub fn j_at(&self, a: usize, b: usize) -> T {
        self.j[a * self.n + b]
    }

    pub fn gamma_at(&self, a: usize, b: usize) -> T {
        self.gamma[a * self.n + b]
    }
}

/// Builds `J^{ij}` and `Γ^{ij}` for every pair of the array.
pub fn couplings_from_greens<T: Real, P: GreensProvider<T>>(
    array: &AtomArray<T>,
    provider: &P,
) -> Result<PairCouplings<T>> {
    let dipole = array
        .dipole
        .vector()
        .ok_or_else(|| Error::invalid("radial dipoles need the fiber coupling provider"))?;
    let n = array.len();
    let (self_j, self_g) = provider.self_rates(dipole);
    let rows: Vec<Result<Vec<(T, T)>>> = (0..n)
        .into_par_iter()
        .map(|a| {
            ((a + 1)..n)
                .map(|b| {
                    let g = provider.pair(array.positions[a], array.positions[b])?;
                    Ok(rates_from_tensor(&g, dipole))
                })
                .collect()
        })
        .collect();
    let mut j = vec![T::zero(); n * n];
    let mut gamma = vec![T::zero(); n * n];
    for (a, row) in rows.into_iter().enumerate() {
        j[a * n + a] = self_j;
        gamma[a * n + a] = self_g;
        for (off, (jv, gv)) in row?.into_iter().enumerate() {
            let b = a + 1 + off;
            j[a * n + b] = jv;
            j[b * n + a] = jv;
            gamma[a * n + b] = gv;
            gamma[b * n + a] = gv;
        }
    }
    Ok(PairCouplings { n, j, gamma })
}

/// Free-space couplings of an array with a vector dipole.
pub fn free_space_couplings<T: Real>(array: &AtomArray<T>) -> Result<PairCouplings<T>> {
    couplings_from_greens(array, &FreeSpace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn on_axis_transverse_component() {
        for &z in &[0.3f64, 1.7, 12.0] {
            let g = free_space_greens([0.0, 0.0, z]).unwrap();
            let expect = Complex::new(z.cos(), z.sin()) / (4.0 * PI * z)
                * Complex::new(1.0 - 1.0 / (z * z), 1.0 / z);
            assert!((g.0[0][0] - expect).norm() < 1e-14 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn far_field_leading_term() {
        let z: f64 = 1e4;
        let g = free_space_greens([0.0, 0.0, z]).unwrap();
        let lead = Complex::new(z.cos(), z.sin()) / (4.0 * PI * z);
        assert!(((g.0[0][0] - lead) / lead).norm() < 2e-4);
    }

    #[test]
    fn small_distance_limit() {
        for &r in &[1e-3, 1e-4] {
            let g = free_space_greens([r, 0.0, 0.0]).unwrap();
            for a in 0..3 {
                assert!((g.0[a][a].im - 1.0 / (6.0 * PI)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn coincident_rejected() {
        assert!(matches!(free_space_greens([0.0, 0.0, 1e-7]), Err(Error::Coincident { .. })));
    }

    #[test]
    fn single_atom_rates() {
        let array = crate::geometry::build_chain(1, 1.0, [1.0, 0.0, 0.0]).unwrap();
        let c = free_space_couplings(&array).unwrap();
        assert_eq!(c.gamma_at(0, 0), 1.0);
        assert_eq!(c.j_at(0, 0), 0.0);
    }

    #[test]
    fn two_atom_transverse_decay() {
        // Frozen from an independent evaluation of the closed form
        // (3/2)[sin x/x + cos x/x² − sin x/x³] at x = 0.4π.
        let d = 0.2 * 2.0 * PI;
        let array = crate::geometry::build_chain(2, d, [1.0, 0.0, 0.0]).unwrap();
        let c = free_space_couplings(&array).unwrap();
        assert!((c.gamma_at(0, 1) - 0.709_871_852_438_837_6).abs() < 1e-12);
    }

    #[test]
    fn far_pairs_decouple() {
        let array = crate::geometry::build_chain(2, 1e5f64, [0.0, 0.0, 1.0]).unwrap();
        let c = free_space_couplings(&array).unwrap();
        assert!(c.gamma_at(0, 1).abs() < 1e-9 && c.j_at(0, 1).abs() < 1e-9);
    }

    #[test]
    fn single_precision_tensor() {
        let g = free_space_greens::<f32>([0.0, 0.0, 2.0]).unwrap();
        let g64 = free_space_greens::<f64>([0.0, 0.0, 2.0]).unwrap();
        assert!((g.0[0][0].re as f64 - g64.0[0][0].re).abs() < 1e-6);
    }
}

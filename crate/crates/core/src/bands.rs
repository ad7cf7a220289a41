//! Infinite-lattice band structure.
//!
//! The shift of a Bloch spin wave in an infinite chain has a closed form in
//! polylogarithms of `e^{i(k0 ± kz)d}`; its decay rate is a finite sum over the
//! reciprocal lattice vectors that bring `k + g` inside the light cone.

use crate::geometry::Polarization;
use crate::polylog::polylog;
use crate::{Error, Real, Result};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Distance to the singular circle `|k + g| = k0` below which a 2D decay sum is
/// reported as singular.
pub const LIGHT_CIRCLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPoint<K> {
    pub k: K,
    #[serde(rename = "J")]
    pub shift: f64,
    #[serde(rename = "Gamma")]
    pub decay: f64,
    pub polarization: Polarization,
}

/// Reduces `kz` into the first Brillouin zone `(−π/d, π/d]`.
pub fn fold_to_zone<T: Real>(kz: T, d: T) -> T {
    let g = T::TAU() / d;
    let mut k = kz - (kz / g).round() * g;
    if k <= -T::PI() / d {
        k += g;
    }
    k
}

/// Collective shift `J(kz)` of an infinite chain along `ẑ`.
///
/// Diverges for transverse polarization when `(k0 ± kz)d` is a multiple of
/// `2π`; that case is reported as [`Error::Divergent`].
pub fn dispersion_1d<T: Real>(kz: T, d: T, pol: Polarization) -> Result<T> {
    check_spacing(d)?;
    if !kz.is_finite() {
        return Err(Error::invalid("wave vector must be finite"));
    }
    let phase = |theta: T| Complex::new(theta.cos(), theta.sin());
    let ep = phase((T::one() + kz) * d);
    let em = phase((T::one() - kz) * d);
    let li3 = polylog(3, ep)? + polylog(3, em)?;
    let li2 = polylog(2, ep)? + polylog(2, em)?;
    let i_d = Complex::new(T::zero(), d);
    let d3 = d * d * d;
    match pol {
        Polarization::Parallel => {
            let v = li3 - i_d * li2;
            Ok(-T::lit(1.5) / d3 * v.re)
        }
        Polarization::Transverse => {
            let one = Complex::new(T::one(), T::zero());
            let tol = T::epsilon() * T::lit(1e3);
            if (one - ep).norm() < tol || (one - em).norm() < tol {
                return Err(Error::Divergent(format!(
                    "transverse shift on the light line (kz = {kz}, d = {d})"
                )));
            }
            let logs = (one - ep).ln() + (one - em).ln();
            let v = li3 - i_d * li2 + logs * (d * d);
            Ok(T::lit(0.75) / d3 * v.re)
        }
    }
}

/// Collective decay `Γ(kz)` of an infinite chain along `ẑ`.
///
/// Exactly zero when no diffraction order lies inside the light cone.
pub fn decay_1d<T: Real>(kz: T, d: T, pol: Polarization) -> T {
    let g = T::TAU() / d;
    let mut sum = T::zero();
    // Orders with |kz + n g| ≤ 1.
    let lo = ((-T::one() - kz) / g).ceil().to_i64().unwrap_or(0);
    let hi = ((T::one() - kz) / g).floor().to_i64().unwrap_or(-1);
    for n in lo..=hi {
        let q = kz + T::from_i64(n).unwrap() * g;
        if q.abs() > T::one() {
            continue;
        }
        sum += match pol {
            Polarization::Parallel => T::one() - q * q,
            Polarization::Transverse => T::one() + q * q,
        };
    }
    let pref = match pol {
        Polarization::Parallel => T::lit(1.5) * T::PI() / d,
        Polarization::Transverse => T::lit(0.75) * T::PI() / d,
    };
    pref * sum
}

/// Collective decay `Γ(k)` of an infinite square lattice of spacing `d`.
///
/// `k = (k1, k2)` is measured along the two lattice axes. For parallel
/// polarization `in_plane` is the dipole direction in the same frame; it is
/// ignored for transverse polarization.
pub fn decay_2d<T: Real>(k: [T; 2], d: T, pol: Polarization, in_plane: [T; 2]) -> Result<T> {
    check_spacing(d)?;
    let norm = (in_plane[0] * in_plane[0] + in_plane[1] * in_plane[1]).sqrt();
    if pol == Polarization::Parallel && !(norm > T::zero()) {
        return Err(Error::invalid("in-plane dipole must be nonzero"));
    }
    let dip = [in_plane[0] / norm, in_plane[1] / norm];
    let g = T::TAU() / d;
    let range = |kc: T| {
        let lo = ((-T::one() - kc) / g).ceil().to_i64().unwrap_or(0);
        let hi = ((T::one() - kc) / g).floor().to_i64().unwrap_or(-1);
        lo..=hi
    };
    let mut sum = T::zero();
    for n1 in range(k[0]) {
        for n2 in range(k[1]) {
            let q = [
                k[0] + T::from_i64(n1).unwrap() * g,
                k[1] + T::from_i64(n2).unwrap() * g,
            ];
            let q2 = q[0] * q[0] + q[1] * q[1];
            let q_abs = q2.sqrt();
            if (q_abs - T::one()).abs() < T::lit(LIGHT_CIRCLE_TOLERANCE) {
                return Err(Error::Singular(format!(
                    "|k + g| = {q_abs} on the light circle"
                )));
            }
            if q_abs > T::one() {
                continue;
            }
            let root = (T::one() - q2).sqrt();
            sum += match pol {
                Polarization::Parallel => {
                    let proj = q[0] * dip[0] + q[1] * dip[1];
                    (T::one() - proj * proj) / root
                }
                Polarization::Transverse => q2 / root,
            };
        }
    }
    Ok(T::lit(3.0) * T::PI() / (d * d) * sum)
}

/// Largest `d/λ0` that still supports guided modes in 1D or 2D.
pub fn max_guided_spacing(dimension: u32) -> Result<f64> {
    match dimension {
        1 => Ok(0.5),
        2 => Ok(std::f64::consts::FRAC_1_SQRT_2),
        other => Err(Error::Unsupported(format!("no guided-spacing bound for dimension {other}"))),
    }
}

/// Band samples `(k, J, Γ)` on `points` wave vectors spanning the zone.
pub fn band_1d(d: f64, pol: Polarization, points: usize) -> Result<Vec<BandPoint<f64>>> {
    check_spacing(d)?;
    if points < 2 {
        return Err(Error::invalid("band needs at least two points"));
    }
    let kmax = std::f64::consts::PI / d;
    (0..points)
        .map(|i| {
            // Midpoint grid avoids the zone boundary and exact light-line hits.
            let k = -kmax + 2.0 * kmax * (i as f64 + 0.5) / points as f64;
            let shift = match dispersion_1d(k, d, pol) {
                Ok(v) => v,
                Err(Error::Divergent(_)) => f64::NAN,
                Err(e) => return Err(e),
            };
            Ok(BandPoint { k, shift, decay: decay_1d(k, d, pol), polarization: pol })
        })
        .collect()
}

fn check_spacing<T: Real>(d: T) -> Result<()> {
    if d > T::zero() && d.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("lattice constant must be positive, got {d}")))
    }
}
